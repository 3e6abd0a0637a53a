#include "sgprm/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>

#include "sgprm/errors.hpp"

namespace sgprm {

namespace {

using Vec5 = Eigen::Matrix<double, kDof, 1>;

bool inside_footprint(const Configuration& q, const Box& bounds, double r) {
  return q.x >= bounds.min.x() + r && q.x <= bounds.max.x() - r && q.y >= bounds.min.y() + r &&
         q.y <= bounds.max.y() - r;
}

bool valid_in(const Configuration& q, const Box& bounds, std::span<const Obstacle> obstacles,
              const RobotModel& robot) {
  return within_joint_limits(q, robot) && inside_footprint(q, bounds, robot.base_radius) &&
         !config_in_collision(q, obstacles, robot);
}

Configuration offset(const Configuration& q0, const Vec5& delta, const DofWeights& w) {
  Configuration q;
  q.x = q0.x + delta[0] / w[0];
  q.y = q0.y + delta[1] / w[1];
  q.theta = wrap_angle(q0.theta + delta[2] / w[2]);
  q.pan = q0.pan + delta[3] / w[3];
  q.tilt = q0.tilt + delta[4] / w[4];
  return q;
}

// d(phi)/dq as a 3x5 matrix, plus phi itself.
Eigen::Matrix<double, 3, kDof> residual_jacobian(const Configuration& q, const Vec3& c, const RobotModel& robot,
                                                 Vec3& phi) {
  const CameraPose cam = forward_kinematics_unchecked(q, robot);
  const CameraJacobian jac = camera_jacobian(q, robot);
  const Vec3& z = cam.optical_axis;
  const Vec3 d = c - cam.center;
  const double zd = z.dot(d);
  phi = d - zd * z;
  Eigen::Matrix<double, 3, kDof> j;
  for (int i = 0; i < kDof; ++i) {
    const Vec3 dd = -jac.center.col(i);
    const Vec3 dz = jac.axis.col(i);
    j.col(i) = dd - (dz.dot(d) + z.dot(dd)) * z - zd * dz;
  }
  return j;
}

// Feasible set in scaled offsets: the rho-ball intersected with the joint box.
// The box contains the origin, so clamping after the radial projection keeps
// the point inside the ball.
Vec5 project_feasible(Vec5 delta, double rho, const Vec5& lo, const Vec5& hi) {
  const double n = delta.norm();
  if (n > rho) delta *= rho / n;
  return delta.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

void ProjectionParams::validate() const {
  if (!(lambda >= 0.0)) throw InvalidConfigurationError("projection lambda must be >= 0");
  if (!(rho > 0.0)) throw InvalidConfigurationError("projection rho must be > 0");
  if (max_iterations < 1) throw InvalidConfigurationError("projection max_iterations must be >= 1");
}

void LocalSamplingParams::validate() const {
  if (M < 0) throw InvalidConfigurationError("local sampling M must be >= 0");
  for (double s : noise_scales) {
    if (!(s >= 0.0)) throw InvalidConfigurationError("noise scales must be >= 0");
  }
}

SamplerStats& SamplerStats::operator+=(const SamplerStats& o) {
  free_samples += o.free_samples;
  projections += o.projections;
  projection_failures += o.projection_failures;
  local_candidates += o.local_candidates;
  cost_evaluations += o.cost_evaluations;
  return *this;
}

bool config_valid(const Configuration& q, const SceneGraph& scene, const RobotModel& robot) {
  return valid_in(q, scene.workspace, scene.obstacles, robot);
}

Configuration sample_free(const Box& bounds, std::span<const Obstacle> obstacles, const RobotModel& robot,
                          Rng& rng) {
  constexpr int kMaxAttempts = 10000;
  const double r = robot.base_radius;
  if (bounds.max.x() - bounds.min.x() < 2.0 * r || bounds.max.y() - bounds.min.y() < 2.0 * r) {
    throw SamplingError("workspace is narrower than the robot base");
  }
  for (int i = 0; i < kMaxAttempts; ++i) {
    Configuration q;
    q.x = uniform(rng, bounds.min.x() + r, bounds.max.x() - r);
    q.y = uniform(rng, bounds.min.y() + r, bounds.max.y() - r);
    q.theta = uniform(rng, -kPi, kPi);
    q.pan = uniform(rng, robot.pan_limits.lo, robot.pan_limits.hi);
    q.tilt = uniform(rng, robot.tilt_limits.lo, robot.tilt_limits.hi);
    if (!config_in_collision(q, obstacles, robot)) return q;
  }
  throw SamplingError("sample_free: no collision-free configuration in 10000 draws");
}

double aim_residual_sq(const Configuration& q, const Vec3& c, const RobotModel& robot) {
  return lateral_residual(q, c, robot).squaredNorm();
}

std::array<double, kDof> aim_residual_sq_gradient(const Configuration& q, const Vec3& c,
                                                  const RobotModel& robot) {
  Vec3 phi;
  const auto j = residual_jacobian(q, c, robot, phi);
  const Vec5 g = 2.0 * j.transpose() * phi;
  return {g[0], g[1], g[2], g[3], g[4]};
}

double projection_objective(const Configuration& q, const Configuration& q0, const Vec3& c,
                            const RobotModel& robot, double lambda) {
  const double d = config_distance(q0, q, robot.dof_weights);
  return aim_residual_sq(q, c, robot) + lambda * d * d;
}

ProjectionResult project_to_centroid(const Configuration& q0, const Vec3& c, const SceneGraph& scene,
                                     const RobotModel& robot, const ProjectionParams& params) {
  params.validate();
  const DofWeights& w = robot.dof_weights;
  const Vec5 wv(w[0], w[1], w[2], w[3], w[4]);
  const double inf = std::numeric_limits<double>::infinity();
  Vec5 lo, hi;
  lo << -inf, -inf, -inf, w[3] * (robot.pan_limits.lo - q0.pan), w[4] * (robot.tilt_limits.lo - q0.tilt);
  hi << inf, inf, inf, w[3] * (robot.pan_limits.hi - q0.pan), w[4] * (robot.tilt_limits.hi - q0.tilt);
  lo = lo.cwiseMin(Vec5::Zero());
  hi = hi.cwiseMax(Vec5::Zero());

  auto objective = [&](const Vec5& delta, Vec3* phi_out = nullptr) {
    const Vec3 phi = lateral_residual(offset(q0, delta, w), c, robot);
    if (phi_out) *phi_out = phi;
    return phi.squaredNorm() + params.lambda * delta.squaredNorm();
  };

  ProjectionResult res;
  Vec5 delta = Vec5::Zero();
  double f = objective(delta);
  res.initial_residual = std::sqrt(f);

  constexpr double kStepTol = 1e-10;
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxHalvings = 40;
  for (int it = 0; it < params.max_iterations; ++it) {
    res.iterations = it + 1;
    Vec3 phi;
    const auto jq = residual_jacobian(offset(q0, delta, w), c, robot, phi);
    if (phi.norm() <= params.residual_tolerance) {
      res.converged = true;
      break;
    }
    // Chain rule to scaled coordinates: dq_i = d(delta_i) / w_i.
    const Eigen::Matrix<double, 3, kDof> j = jq * wv.cwiseInverse().asDiagonal();
    const Vec5 g = 2.0 * (j.transpose() * phi + params.lambda * delta);
    Eigen::Matrix<double, kDof, kDof> h = 2.0 * (j.transpose() * j);
    h.diagonal().array() += 2.0 * params.lambda + 1e-12;

    const Vec5 directions[2] = {-h.ldlt().solve(g), -g};
    bool moved = false;
    double step_norm = 0.0;
    for (const Vec5& p : directions) {
      double s = 1.0;
      for (int k = 0; k < kMaxHalvings; ++k, s *= 0.5) {
        const Vec5 cand = project_feasible(delta + s * p, params.rho, lo, hi);
        const Vec5 step = cand - delta;
        step_norm = step.norm();
        if (step_norm < kStepTol) break;
        const double fc = objective(cand);
        if (fc <= f + kArmijo * g.dot(step) && fc < f) {
          delta = cand;
          f = fc;
          moved = true;
          break;
        }
      }
      if (moved) break;
    }
    if (!moved || step_norm < kStepTol) {
      res.converged = true;
      break;
    }
  }

  res.q = offset(q0, delta, w);
  if (delta.isZero(0.0)) res.q = q0;
  res.objective = f;
  res.final_residual = lateral_residual(res.q, c, robot).norm();
  res.success = res.converged && res.final_residual <= res.initial_residual &&
                valid_in(res.q, scene.workspace, scene.obstacles, robot);
  return res;
}

std::vector<Configuration> local_sample(const Configuration& q_proj, const Vec3& c, const SceneGraph& scene,
                                        const RobotModel& robot, const LocalSamplingParams& params, Rng& rng) {
  params.validate();
  std::vector<Configuration> out{q_proj};
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int m = 0; m < params.M; ++m) {
    Configuration q = q_proj;
    for (int i = 0; i < kDof; ++i) {
      const double sigma = params.noise_scales[i] * robot.dof_weights[i];
      q[i] += sigma * gauss(rng);
    }
    q.theta = wrap_angle(q.theta);
    if (!config_valid(q, scene, robot)) continue;
    if (!in_fov(forward_kinematics(q, robot), c, robot)) continue;
    if (std::find(out.begin(), out.end(), q) != out.end()) continue;
    out.push_back(q);
  }
  return out;
}

std::size_t select_node_index(std::span<const Configuration> candidates, const SceneGraph& scene,
                              const PerceptionModel& model, const RobotModel& robot) {
  if (candidates.empty()) throw DomainError("select_node: empty candidate set");
  const auto costs = batch_cost(candidates, scene, model, robot);
  std::size_t best = 0;
  for (std::size_t i = 1; i < costs.size(); ++i) {
    if (costs[i] < costs[best]) best = i;
  }
  return best;
}

Configuration select_node(std::span<const Configuration> candidates, const SceneGraph& scene,
                          const PerceptionModel& model, const RobotModel& robot) {
  return candidates[select_node_index(candidates, scene, model, robot)];
}

Configuration perception_aware_sample(const SceneGraph& scene, const RobotModel& robot,
                                      const PerceptionModel& model, const SamplerParams& params, Rng& rng,
                                      SamplerStats* stats) {
  const auto objects = scene.monitored_objects();
  if (objects.empty()) throw DomainError("perception-aware sampling needs at least one monitored object");
  const CentroidSet centroids = extract_centroids(objects);
  SamplerStats local_stats;
  SamplerStats& st = stats ? *stats : local_stats;

  for (int attempt = 0; attempt <= params.max_retries; ++attempt) {
    const Configuration q0 = sample_free(scene.workspace, scene.obstacles, robot, rng);
    ++st.free_samples;
    std::vector<Configuration> candidates;
    for (const auto& entry : centroids.entries) {
      ++st.projections;
      const ProjectionResult pr = project_to_centroid(q0, entry.point, scene, robot, params.projection);
      if (!pr.success) {
        ++st.projection_failures;
        continue;
      }
      for (auto& q : local_sample(pr.q, entry.point, scene, robot, params.local, rng)) {
        candidates.push_back(q);
      }
    }
    if (candidates.empty()) continue;
    st.local_candidates += candidates.size();
    st.cost_evaluations += candidates.size();
    return select_node(candidates, scene, model, robot);
  }
  throw SamplingError("perception-aware sampling: every projection failed after " +
                      std::to_string(params.max_retries) + " retries");
}

}  // namespace sgprm
