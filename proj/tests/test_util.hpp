#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <vector>
#include <filesystem>
#include <memory>
#include <string>

#include <unistd.h>

#include "sgprm/geometry.hpp"
#include "sgprm/perception.hpp"
#include "sgprm/scenegraph.hpp"

namespace sgprm::testing {

inline std::filesystem::path data_path(const std::string& relative) {
  return std::filesystem::path(SGPRM_DATA_DIR) / relative;
}

inline SceneGraph office_scene() { return load_scene(data_path("scenes/office.json")); }

inline RobotModel default_robot() { return load_robot(data_path("robots/pan_tilt_base.json")); }

inline std::shared_ptr<const PerceptionModel> oracle_model(const SceneGraph& scene, const RobotModel& robot,
                                                          const OracleParams& params = {}) {
  return std::make_shared<OracleCostModel>(scene.obstacles, params, robot);
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("sgprm_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Scene with one object and no obstacles in a 10 x 10 x 3 room.
inline SceneGraph single_object_scene(const Vec3& centroid = {5.0, 5.0, 1.0},
                                      const Vec3& normal = {-1.0, 0.0, 0.0}) {
  SceneGraph scene;
  scene.workspace = Box{Vec3(0, 0, 0), Vec3(10, 10, 3)};
  scene.class_vocabulary = {"monitor", "painting", "human"};
  ObjectNode obj;
  obj.id = "target";
  obj.class_name = "monitor";
  obj.centroid = centroid;
  obj.face_normal = normal;
  obj.extent = Vec3(0.5, 0.5, 0.5);
  scene.objects.push_back(obj);
  return scene;
}

/// Ranks with ties sharing their average rank.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j);
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return pearson(average_ranks(a), average_ranks(b));
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace sgprm::testing
