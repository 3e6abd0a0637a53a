#pragma once

// Perception scoring: the analytic detector oracle, the cost-model interface
// shared by the oracle and the learned costmap, the aggregate per-configuration
// cost, and training-set generation.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "sgprm/geometry.hpp"
#include "sgprm/scenegraph.hpp"

namespace sgprm {

struct OracleParams {
  double optimal_distance = 2.0;  // meters
  double distance_sigma = 1.0;    // meters
  double axis_exponent = 4.0;

  void validate() const;
};

/// Detection score in [0, 1]: zero when the centroid is outside the FOV or
/// occluded, otherwise a product of a range term, an off-axis term and a
/// viewing-angle term against the object's face normal.
double oracle_score(const CameraPose& cam, const ObjectNode& obj, std::span<const Obstacle> obstacles,
                    const OracleParams& params, const RobotModel& robot);

/// Perception cost label (1 - s)^2.
inline double label_from_score(double s) { return (1.0 - s) * (1.0 - s); }

struct PerceptionSample {
  CameraPose camera;
  std::string object_id;
  double score = 0.0;
  double label = 1.0;
};

/// Per-object perception cost f(camera, o) in [0, 1]. Implementations are
/// immutable after construction and safe to call concurrently.
class PerceptionModel {
 public:
  virtual ~PerceptionModel() = default;

  virtual double object_cost(const CameraPose& cam, const ObjectNode& obj) const = 0;

  /// out[i] = object_cost(cams[i], obj). The default loops over the scalar call.
  virtual void object_costs(std::span<const CameraPose> cams, const ObjectNode& obj,
                            std::span<double> out) const;

  virtual std::string kind() const = 0;
};

/// Ground-truth backend: cost = (1 - oracle_score)^2.
class OracleCostModel final : public PerceptionModel {
 public:
  OracleCostModel(std::vector<Obstacle> obstacles, OracleParams params, RobotModel robot);

  double object_cost(const CameraPose& cam, const ObjectNode& obj) const override;
  std::string kind() const override { return "oracle"; }

 private:
  std::vector<Obstacle> obstacles_;
  OracleParams params_;
  RobotModel robot_;
};

/// f(q, o): forward kinematics followed by the cost model.
double perception_cost_of(const Configuration& q, const ObjectNode& obj, const PerceptionModel& model,
                          const RobotModel& robot);

/// p(q) = sum over monitored objects of w_o * f(q, o).
double aggregate_cost(const Configuration& q, const SceneGraph& scene, const PerceptionModel& model,
                      const RobotModel& robot);

/// Elementwise aggregate_cost over `qs`, evaluated object-by-object in batches.
std::vector<double> batch_cost(std::span<const Configuration> qs, const SceneGraph& scene,
                               const PerceptionModel& model, const RobotModel& robot);

/// Aggregate cost for camera poses that were already computed.
std::vector<double> batch_cost_cameras(std::span<const CameraPose> cams, const SceneGraph& scene,
                                       const PerceptionModel& model);

/// Synthetic training set of camera poses around monitored objects. Each pose
/// keeps its object's centroid in the FOV and unoccluded. Deterministic in `seed`.
std::vector<PerceptionSample> generate_dataset(const SceneGraph& scene, const RobotModel& robot,
                                               const OracleParams& params, std::size_t count,
                                               std::uint64_t seed);

// Dataset file: CSV with header
//   px,py,pz,qw,qx,qy,qz,object_id,score,label
// where (qw, qx, qy, qz) is the camera rotation (columns: axis, left, up).
void save_dataset(const std::vector<PerceptionSample>& samples, const std::filesystem::path& path);
std::vector<PerceptionSample> load_dataset(const std::filesystem::path& path);

}  // namespace sgprm
