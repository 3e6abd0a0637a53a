#pragma once

// Comparison planners. Each is a PlannerStrategy: only the node sampler and
// the perception channel differ from MOPS-PRM.

#include <memory>
#include <string>

#include "sgprm/roadmap.hpp"

namespace sgprm {

enum class Method { kClosestObjectLowDof, kClosestObject, kLowestCostObject, kMopsPrm };

inline constexpr Method kAllMethods[] = {Method::kClosestObjectLowDof, Method::kClosestObject,
                                         Method::kLowestCostObject, Method::kMopsPrm};

const char* to_string(Method m);
Method method_from_string(const std::string& name);

/// Monitored object whose centroid is nearest to the camera center; ties by id.
const ObjectNode& closest_object_target(const CameraPose& cam, const SceneGraph& scene);
const ObjectNode& closest_object_target(const Configuration& q, const SceneGraph& scene, const RobotModel& robot);

/// Monitored object with the lowest f(q, o); ties by id.
const ObjectNode& lowest_cost_target(const Configuration& q, const SceneGraph& scene, const PerceptionModel& model,
                                     const RobotModel& robot);

/// Distance from the camera center to the nearest monitored centroid.
double nearest_object_distance(const Configuration& q, const SceneGraph& scene, const RobotModel& robot);

/// min over monitored objects of f(q, o).
double lowest_object_cost(const Configuration& q, const SceneGraph& scene, const PerceptionModel& model,
                          const RobotModel& robot);

struct BaselineParams {
  ProjectionParams projection;
  int max_retries = 100;
  double rest_pan = 0.0;
  double rest_tilt = 0.0;
};

class BaselineStrategy final : public PlannerStrategy {
 public:
  BaselineStrategy(Method kind, const SceneGraph& scene, const RobotModel& robot,
                   std::shared_ptr<const PerceptionModel> model, BaselineParams params = {});

  Method kind() const { return kind_; }
  std::string name() const override { return to_string(kind_); }
  Configuration sample_node(Rng& rng, SamplerStats& stats) const override;
  std::vector<double> point_perception(std::span<const Configuration> qs) const override;

 private:
  Method kind_;
  SceneGraph scene_;
  RobotModel robot_;
  std::shared_ptr<const PerceptionModel> model_;
  BaselineParams params_;
};

/// Edge quadrature of the baseline's perception channel.
double baseline_edge_perception(const BaselineStrategy& strategy, const LocalMotion& motion, int K);

/// Strategy for any method; MOPS-PRM uses `sampler`, baselines use its projection settings.
std::unique_ptr<PlannerStrategy> make_strategy(Method method, const SceneGraph& scene, const RobotModel& robot,
                                               std::shared_ptr<const PerceptionModel> model,
                                               const SamplerParams& sampler = {});

}  // namespace sgprm
