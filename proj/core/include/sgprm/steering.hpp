#pragma once

// Local motions between two configurations and their discretization.

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sgprm/geometry.hpp"
#include "sgprm/reeds_shepp.hpp"

namespace sgprm {

enum class SteeringKind { kStraight, kReedsShepp };

const char* to_string(SteeringKind kind);
/// Accepts "straight" and "reeds_shepp"; throws InvalidConfigurationError otherwise.
SteeringKind steering_kind_from_string(const std::string& name);

struct SteeringParams {
  SteeringKind kind = SteeringKind::kStraight;
  double turning_radius = 0.5;  // meters, Reeds-Shepp only
  int discretization = 10;      // K

  void validate() const;
};

class LocalMotion {
 public:
  SteeringKind kind() const { return kind_; }
  const Configuration& from() const { return from_; }
  const Configuration& to() const { return to_; }
  /// Edge motion cost c_m.
  double motion_length() const { return motion_length_; }
  /// Planar path length travelled by the base, in meters.
  double base_length() const { return base_length_; }
  const ReedsSheppPath& rs_path() const { return rs_; }

  /// Configuration at t in [0, 1]; t = 0 and t = 1 return the endpoints exactly.
  Configuration sample(double t) const;

 private:
  friend LocalMotion straight_line(const Configuration&, const Configuration&, const DofWeights&);
  friend LocalMotion reeds_shepp(const Configuration&, const Configuration&, const SteeringParams&,
                                 const DofWeights&);

  SteeringKind kind_ = SteeringKind::kStraight;
  Configuration from_;
  Configuration to_;
  double motion_length_ = 0.0;
  double base_length_ = 0.0;
  double turning_radius_ = 0.0;
  ReedsSheppPath rs_;
};

/// Per-DoF linear interpolation, theta along the shorter arc.
LocalMotion straight_line(const Configuration& qu, const Configuration& qv,
                          const DofWeights& weights = kDefaultDofWeights);

/// Shortest Reeds-Shepp curve for (x, y, theta); pan and tilt follow linearly in
/// arc length. Length = base length + weighted pan/tilt displacement.
LocalMotion reeds_shepp(const Configuration& qu, const Configuration& qv, const SteeringParams& params,
                        const DofWeights& weights = kDefaultDofWeights);

/// Dispatches on params.kind.
LocalMotion steer(const Configuration& qu, const Configuration& qv, const SteeringParams& params,
                  const DofWeights& weights = kDefaultDofWeights);

/// K + 1 waypoints at t_k = k / K. Throws DomainError when K < 2.
std::vector<std::pair<double, Configuration>> discretize(const LocalMotion& motion, int K);

inline constexpr double kDefaultCollisionResolution = 0.05;
inline constexpr double kPathValidationResolution = 0.01;

/// Checks the base footprint at both endpoints and at points spaced at most
/// `resolution` meters apart in base arc length.
bool motion_collision_free(const LocalMotion& motion, std::span<const Obstacle> obstacles,
                           const RobotModel& robot, double resolution = kDefaultCollisionResolution);

}  // namespace sgprm
