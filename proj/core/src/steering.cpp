#include "sgprm/steering.hpp"

#include <cmath>
#include <string>

#include "sgprm/errors.hpp"

namespace sgprm {

const char* to_string(SteeringKind kind) {
  return kind == SteeringKind::kStraight ? "straight" : "reeds_shepp";
}

SteeringKind steering_kind_from_string(const std::string& name) {
  if (name == "straight") return SteeringKind::kStraight;
  if (name == "reeds_shepp") return SteeringKind::kReedsShepp;
  throw InvalidConfigurationError("unknown steering kind '" + name + "'");
}

void SteeringParams::validate() const {
  if (!(turning_radius > 0.0)) throw InvalidConfigurationError("turning_radius must be > 0");
  if (discretization < 2) throw InvalidConfigurationError("discretization K must be >= 2");
}

Configuration LocalMotion::sample(double t) const {
  if (t <= 0.0) return from_;
  if (t >= 1.0) return to_;
  Configuration q;
  q.pan = from_.pan + t * (to_.pan - from_.pan);
  q.tilt = from_.tilt + t * (to_.tilt - from_.tilt);
  if (kind_ == SteeringKind::kStraight) {
    q.x = from_.x + t * (to_.x - from_.x);
    q.y = from_.y + t * (to_.y - from_.y);
    q.theta = wrap_angle(from_.theta + t * angle_diff(from_.theta, to_.theta));
  } else {
    const Pose2 p = reeds_shepp_pose({from_.x, from_.y, from_.theta}, rs_, turning_radius_,
                                     t * rs_.total_length());
    q.x = p.x;
    q.y = p.y;
    q.theta = p.theta;
  }
  return q;
}

LocalMotion straight_line(const Configuration& qu, const Configuration& qv, const DofWeights& weights) {
  LocalMotion m;
  m.kind_ = SteeringKind::kStraight;
  m.from_ = qu;
  m.to_ = qv;
  m.motion_length_ = config_distance(qu, qv, weights);
  m.base_length_ = std::hypot(qv.x - qu.x, qv.y - qu.y);
  return m;
}

LocalMotion reeds_shepp(const Configuration& qu, const Configuration& qv, const SteeringParams& params,
                        const DofWeights& weights) {
  if (!(params.turning_radius > 0.0)) throw InvalidConfigurationError("turning_radius must be > 0");
  LocalMotion m;
  m.kind_ = SteeringKind::kReedsShepp;
  m.from_ = qu;
  m.to_ = qv;
  m.turning_radius_ = params.turning_radius;
  if (qu == qv) return m;
  m.rs_ = shortest_reeds_shepp({qu.x, qu.y, qu.theta}, {qv.x, qv.y, qv.theta}, params.turning_radius);
  m.base_length_ = m.rs_.total_length() * params.turning_radius;
  const double dp = weights[3] * (qv.pan - qu.pan);
  const double dt = weights[4] * (qv.tilt - qu.tilt);
  m.motion_length_ = m.base_length_ + std::sqrt(dp * dp + dt * dt);
  return m;
}

LocalMotion steer(const Configuration& qu, const Configuration& qv, const SteeringParams& params,
                  const DofWeights& weights) {
  return params.kind == SteeringKind::kStraight ? straight_line(qu, qv, weights)
                                                : reeds_shepp(qu, qv, params, weights);
}

std::vector<std::pair<double, Configuration>> discretize(const LocalMotion& motion, int K) {
  if (K < 2) throw DomainError("discretize: K must be >= 2, got " + std::to_string(K));
  std::vector<std::pair<double, Configuration>> out;
  out.reserve(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(K);
    out.emplace_back(t, motion.sample(t));
  }
  return out;
}

bool motion_collision_free(const LocalMotion& motion, std::span<const Obstacle> obstacles,
                           const RobotModel& robot, double resolution) {
  if (!(resolution > 0.0)) throw InvalidConfigurationError("collision resolution must be > 0");
  const double len = motion.base_length();
  const auto n = static_cast<long>(std::max(1.0, std::ceil(len / resolution)));
  for (long i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    if (config_in_collision(motion.sample(t), obstacles, robot)) return false;
  }
  return true;
}

}  // namespace sgprm
