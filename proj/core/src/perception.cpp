#include "sgprm/perception.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sgprm/errors.hpp"
#include "sgprm/rng.hpp"

namespace sgprm {

void OracleParams::validate() const {
  if (!(optimal_distance > 0.0 && distance_sigma > 0.0 && axis_exponent > 0.0)) {
    throw InvalidConfigurationError("oracle parameters must be positive");
  }
}

double oracle_score(const CameraPose& cam, const ObjectNode& obj, std::span<const Obstacle> obstacles,
                    const OracleParams& params, const RobotModel& robot) {
  if (!in_fov(cam, obj.centroid, robot)) return 0.0;
  if (occluded(cam, obj.centroid, obstacles)) return 0.0;

  const Vec3 v = obj.centroid - cam.center;
  const double d = v.norm();
  if (!(d > 0.0)) return 0.0;
  const double cos_axis = std::clamp(v.dot(cam.optical_axis) / d, 0.0, 1.0);
  const double cos_face = -obj.face_normal.dot(v) / d;
  if (cos_face <= 0.0) return 0.0;

  const double range_err = (d - params.optimal_distance) / params.distance_sigma;
  const double s = std::exp(-0.5 * range_err * range_err) * std::pow(cos_axis, params.axis_exponent) *
                   std::min(cos_face, 1.0);
  return std::clamp(s, 0.0, 1.0);
}

void PerceptionModel::object_costs(std::span<const CameraPose> cams, const ObjectNode& obj,
                                   std::span<double> out) const {
  for (std::size_t i = 0; i < cams.size(); ++i) out[i] = object_cost(cams[i], obj);
}

OracleCostModel::OracleCostModel(std::vector<Obstacle> obstacles, OracleParams params, RobotModel robot)
    : obstacles_(std::move(obstacles)), params_(params), robot_(std::move(robot)) {
  params_.validate();
}

double OracleCostModel::object_cost(const CameraPose& cam, const ObjectNode& obj) const {
  return label_from_score(oracle_score(cam, obj, obstacles_, params_, robot_));
}

double perception_cost_of(const Configuration& q, const ObjectNode& obj, const PerceptionModel& model,
                          const RobotModel& robot) {
  return model.object_cost(forward_kinematics(q, robot), obj);
}

double aggregate_cost(const Configuration& q, const SceneGraph& scene, const PerceptionModel& model,
                      const RobotModel& robot) {
  const CameraPose cam = forward_kinematics(q, robot);
  double p = 0.0;
  for (const auto& o : scene.objects) {
    if (o.monitored()) p += o.weight * model.object_cost(cam, o);
  }
  return p;
}

std::vector<double> batch_cost_cameras(std::span<const CameraPose> cams, const SceneGraph& scene,
                                       const PerceptionModel& model) {
  std::vector<double> total(cams.size(), 0.0);
  std::vector<double> per_object(cams.size());
  for (const auto& o : scene.objects) {
    if (!o.monitored()) continue;
    model.object_costs(cams, o, per_object);
    for (std::size_t i = 0; i < cams.size(); ++i) total[i] += o.weight * per_object[i];
  }
  return total;
}

std::vector<double> batch_cost(std::span<const Configuration> qs, const SceneGraph& scene,
                               const PerceptionModel& model, const RobotModel& robot) {
  std::vector<CameraPose> cams;
  cams.reserve(qs.size());
  for (const auto& q : qs) cams.push_back(forward_kinematics(q, robot));
  return batch_cost_cameras(cams, scene, model);
}

// --- dataset -------------------------------------------------------------------

std::vector<PerceptionSample> generate_dataset(const SceneGraph& scene, const RobotModel& robot,
                                               const OracleParams& params, std::size_t count,
                                               std::uint64_t seed) {
  if (count == 0) throw DomainError("generate_dataset: count must be >= 1");
  const auto objects = scene.monitored_objects();
  if (objects.empty()) throw DomainError("generate_dataset: scene has no monitored object");
  params.validate();

  const double r_min = 0.3;
  const double r_max = 2.0 * params.optimal_distance + 3.0 * params.distance_sigma;
  // The camera must be able to look back at the centroid within the tilt range.
  const double el_min = -robot.tilt_limits.hi;
  const double el_max = -robot.tilt_limits.lo;
  constexpr int kMaxAttempts = 100000;

  Rng rng(mix_seed(seed));
  std::uniform_int_distribution<std::size_t> pick(0, objects.size() - 1);
  std::vector<PerceptionSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const ObjectNode& obj = objects[pick(rng)];
    bool done = false;
    for (int attempt = 0; attempt < kMaxAttempts && !done; ++attempt) {
      const double r = uniform(rng, r_min, r_max);
      const double az = uniform(rng, -kPi, kPi);
      const double el = uniform(rng, el_min, el_max);
      const double jitter_h = uniform(rng, -robot.fov_half_angle_h, robot.fov_half_angle_h);
      const double jitter_v = uniform(rng, -robot.fov_half_angle_v, robot.fov_half_angle_v);

      const Vec3 offset(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
      const Vec3 center = obj.centroid + r * offset;
      if (center.z() < 0.05) continue;
      const Vec3 dir = -offset;
      const double yaw = std::atan2(dir.y(), dir.x()) + jitter_h;
      const double pitch = std::asin(std::clamp(dir.z(), -1.0, 1.0)) + jitter_v;
      const CameraPose cam = make_camera_pose(center, yaw, pitch);
      if (!in_fov(cam, obj.centroid, robot) || occluded(cam, obj.centroid, scene.obstacles)) continue;

      PerceptionSample s;
      s.camera = cam;
      s.object_id = obj.id;
      s.score = oracle_score(cam, obj, scene.obstacles, params, robot);
      s.label = label_from_score(s.score);
      out.push_back(std::move(s));
      done = true;
    }
    if (!done) throw SamplingError("generate_dataset: could not place an unoccluded camera near '" + obj.id + "'");
  }
  return out;
}

void save_dataset(const std::vector<PerceptionSample>& samples, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path.string());
  out << "px,py,pz,qw,qx,qy,qz,object_id,score,label\n";
  char buf[512];
  for (const auto& s : samples) {
    const Eigen::Quaterniond q(s.camera.rotation());
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,", s.camera.center.x(),
                  s.camera.center.y(), s.camera.center.z(), q.w(), q.x(), q.y(), q.z());
    out << buf << s.object_id;
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", s.score, s.label);
    out << buf;
  }
  if (!out) throw DomainError("write failed for " + path.string());
}

std::vector<PerceptionSample> load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("px,py,pz,qw,qx,qy,qz,object_id,score,label", 0) != 0) {
    throw ParseError(path.string() + ": missing dataset header");
  }
  std::vector<PerceptionSample> samples;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 10) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected 10 fields");
    }
    try {
      double v[7];
      for (int i = 0; i < 7; ++i) v[i] = std::stod(fields[i]);
      const Eigen::Quaterniond q(v[3], v[4], v[5], v[6]);
      const Mat3 r = q.normalized().toRotationMatrix();
      PerceptionSample s;
      s.camera.center = Vec3(v[0], v[1], v[2]);
      s.camera.optical_axis = r.col(0);
      s.camera.up = r.col(2);
      s.object_id = fields[7];
      s.score = std::stod(fields[8]);
      s.label = std::stod(fields[9]);
      samples.push_back(std::move(s));
    } catch (const std::logic_error&) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  return samples;
}

}  // namespace sgprm
