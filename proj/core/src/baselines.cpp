#include "sgprm/baselines.hpp"

#include <algorithm>
#include <limits>

#include "sgprm/errors.hpp"

namespace sgprm {

const char* to_string(Method m) {
  switch (m) {
    case Method::kClosestObjectLowDof: return "closest_object_low_dof";
    case Method::kClosestObject: return "closest_object";
    case Method::kLowestCostObject: return "lowest_cost_object";
    default: return "mops_prm";
  }
}

Method method_from_string(const std::string& name) {
  for (Method m : kAllMethods) {
    if (name == to_string(m)) return m;
  }
  throw InvalidConfigurationError("unknown method '" + name + "'");
}

namespace {

// Lexicographic (key, id) argmin over monitored objects.
template <typename Key>
const ObjectNode& argmin_monitored(const SceneGraph& scene, Key key) {
  const ObjectNode* best = nullptr;
  double best_key = std::numeric_limits<double>::infinity();
  for (const auto& o : scene.objects) {
    if (!o.monitored()) continue;
    const double k = key(o);
    if (!best || k < best_key || (k == best_key && o.id < best->id)) {
      best = &o;
      best_key = k;
    }
  }
  if (!best) throw DomainError("scene has no monitored object");
  return *best;
}

}  // namespace

const ObjectNode& closest_object_target(const CameraPose& cam, const SceneGraph& scene) {
  return argmin_monitored(scene, [&](const ObjectNode& o) { return (o.centroid - cam.center).norm(); });
}

const ObjectNode& closest_object_target(const Configuration& q, const SceneGraph& scene, const RobotModel& robot) {
  return closest_object_target(forward_kinematics(q, robot), scene);
}

const ObjectNode& lowest_cost_target(const Configuration& q, const SceneGraph& scene, const PerceptionModel& model,
                                     const RobotModel& robot) {
  const CameraPose cam = forward_kinematics(q, robot);
  return argmin_monitored(scene, [&](const ObjectNode& o) { return model.object_cost(cam, o); });
}

double nearest_object_distance(const Configuration& q, const SceneGraph& scene, const RobotModel& robot) {
  const CameraPose cam = forward_kinematics(q, robot);
  return (closest_object_target(cam, scene).centroid - cam.center).norm();
}

double lowest_object_cost(const Configuration& q, const SceneGraph& scene, const PerceptionModel& model,
                          const RobotModel& robot) {
  const CameraPose cam = forward_kinematics(q, robot);
  const ObjectNode& o = argmin_monitored(scene, [&](const ObjectNode& n) { return model.object_cost(cam, n); });
  return model.object_cost(cam, o);
}

BaselineStrategy::BaselineStrategy(Method kind, const SceneGraph& scene, const RobotModel& robot,
                                   std::shared_ptr<const PerceptionModel> model, BaselineParams params)
    : kind_(kind), scene_(scene), robot_(robot), model_(std::move(model)), params_(params) {
  if (kind_ == Method::kMopsPrm) throw InvalidConfigurationError("BaselineStrategy: not a baseline method");
  if (!model_) throw InvalidConfigurationError("BaselineStrategy: null perception model");
  if (scene_.monitored_objects().empty()) throw DomainError("baseline planners need a monitored object");
  if (!robot_.pan_limits.contains(params_.rest_pan) || !robot_.tilt_limits.contains(params_.rest_tilt)) {
    throw InvalidConfigurationError("rest pan/tilt outside joint limits");
  }
  params_.projection.validate();
}

Configuration BaselineStrategy::sample_node(Rng& rng, SamplerStats& stats) const {
  for (int attempt = 0; attempt <= params_.max_retries; ++attempt) {
    Configuration q0 = sample_free(scene_.workspace, scene_.obstacles, robot_, rng);
    ++stats.free_samples;
    if (kind_ == Method::kClosestObjectLowDof) {
      q0.pan = params_.rest_pan;
      q0.tilt = params_.rest_tilt;
      return q0;
    }
    const ObjectNode& target = kind_ == Method::kClosestObject
                                   ? closest_object_target(q0, scene_, robot_)
                                   : lowest_cost_target(q0, scene_, *model_, robot_);
    if (kind_ == Method::kLowestCostObject) stats.cost_evaluations += scene_.monitored_objects().size();
    ++stats.projections;
    const ProjectionResult pr = project_to_centroid(q0, target.centroid, scene_, robot_, params_.projection);
    if (pr.success) return pr.q;
    ++stats.projection_failures;
  }
  throw SamplingError(std::string(to_string(kind_)) + ": every projection failed after " +
                      std::to_string(params_.max_retries) + " retries");
}

std::vector<double> BaselineStrategy::point_perception(std::span<const Configuration> qs) const {
  std::vector<double> out(qs.size());
  if (kind_ == Method::kLowestCostObject) {
    std::vector<CameraPose> cams;
    cams.reserve(qs.size());
    for (const auto& q : qs) cams.push_back(forward_kinematics(q, robot_));
    std::fill(out.begin(), out.end(), std::numeric_limits<double>::infinity());
    std::vector<double> per(qs.size());
    for (const auto& o : scene_.objects) {
      if (!o.monitored()) continue;
      model_->object_costs(cams, o, per);
      for (std::size_t i = 0; i < qs.size(); ++i) out[i] = std::min(out[i], per[i]);
    }
    return out;
  }
  for (std::size_t i = 0; i < qs.size(); ++i) out[i] = nearest_object_distance(qs[i], scene_, robot_);
  return out;
}

double baseline_edge_perception(const BaselineStrategy& strategy, const LocalMotion& motion, int K) {
  return edge_perception(strategy, motion, K);
}

std::unique_ptr<PlannerStrategy> make_strategy(Method method, const SceneGraph& scene, const RobotModel& robot,
                                               std::shared_ptr<const PerceptionModel> model,
                                               const SamplerParams& sampler) {
  if (method == Method::kMopsPrm) return std::make_unique<MopsStrategy>(scene, robot, std::move(model), sampler);
  BaselineParams bp;
  bp.projection = sampler.projection;
  bp.max_retries = sampler.max_retries;
  return std::make_unique<BaselineStrategy>(method, scene, robot, std::move(model), bp);
}

}  // namespace sgprm
