#pragma once

// Node generation: uniform free-space samples, projection that re-aims the
// camera at a target point, Gaussian local sampling around the projected
// configuration and lowest-cost selection.

#include <array>
#include <cstddef>
#include <vector>

#include "sgprm/geometry.hpp"
#include "sgprm/perception.hpp"
#include "sgprm/rng.hpp"
#include "sgprm/scenegraph.hpp"

namespace sgprm {

struct ProjectionParams {
  double lambda = 0.3;
  double rho = 0.05;  // trust radius in the weighted configuration norm
  int max_iterations = 100;
  double residual_tolerance = 1e-3;  // stop once ||phi|| is this small

  void validate() const;
};

struct LocalSamplingParams {
  int M = 5;
  /// Standard deviations before scaling by the robot's DoF weights.
  std::array<double, kDof> noise_scales{1.0, 1.0, 1.0, 1.0, 1.0};

  void validate() const;
};

struct SamplerParams {
  ProjectionParams projection;
  LocalSamplingParams local;
  int max_retries = 100;
};

/// Counters used to audit which code paths a sampler exercised.
struct SamplerStats {
  std::size_t free_samples = 0;
  std::size_t projections = 0;
  std::size_t projection_failures = 0;
  std::size_t local_candidates = 0;
  std::size_t cost_evaluations = 0;

  SamplerStats& operator+=(const SamplerStats& o);
  bool operator==(const SamplerStats&) const = default;
};

/// Base disc inside the workspace footprint, joints within limits, no obstacle overlap.
bool config_valid(const Configuration& q, const SceneGraph& scene, const RobotModel& robot);

/// Uniform over workspace x joint limits, restricted to valid configurations.
/// Throws SamplingError after 10000 rejected draws.
Configuration sample_free(const Box& bounds, std::span<const Obstacle> obstacles, const RobotModel& robot,
                          Rng& rng);

/// ||phi(q, c)||^2 and its gradient with respect to q.
double aim_residual_sq(const Configuration& q, const Vec3& c, const RobotModel& robot);
std::array<double, kDof> aim_residual_sq_gradient(const Configuration& q, const Vec3& c,
                                                  const RobotModel& robot);

/// ||phi(q, c)||^2 + lambda * ||q - q0||^2 in the weighted norm.
double projection_objective(const Configuration& q, const Configuration& q0, const Vec3& c,
                            const RobotModel& robot, double lambda);

struct ProjectionResult {
  Configuration q;
  bool success = false;
  bool converged = false;
  int iterations = 0;
  double initial_residual = 0.0;  // ||phi|| at q0
  double final_residual = 0.0;    // ||phi|| at q
  double objective = 0.0;
};

/// Projected Gauss-Newton with backtracking. Iterates stay inside the trust
/// ball around q0 and inside the joint limits.
ProjectionResult project_to_centroid(const Configuration& q0, const Vec3& c, const SceneGraph& scene,
                                     const RobotModel& robot, const ProjectionParams& params);

/// q_proj followed by the perturbations that are valid and keep c in view;
/// exact duplicates removed.
std::vector<Configuration> local_sample(const Configuration& q_proj, const Vec3& c, const SceneGraph& scene,
                                        const RobotModel& robot, const LocalSamplingParams& params, Rng& rng);

/// Index of the lowest aggregate cost, earliest on ties. Throws DomainError if empty.
std::size_t select_node_index(std::span<const Configuration> candidates, const SceneGraph& scene,
                              const PerceptionModel& model, const RobotModel& robot);
Configuration select_node(std::span<const Configuration> candidates, const SceneGraph& scene,
                          const PerceptionModel& model, const RobotModel& robot);

/// Free sample, projection toward every centroid, local sampling, selection.
/// Retries with a fresh sample when every projection fails.
Configuration perception_aware_sample(const SceneGraph& scene, const RobotModel& robot,
                                      const PerceptionModel& model, const SamplerParams& params, Rng& rng,
                                      SamplerStats* stats = nullptr);

}  // namespace sgprm
