#pragma once

// Configuration space of a planar mobile base carrying a pan-tilt camera,
// forward kinematics to the camera pose, and the visibility / collision
// primitives the planner is built on.

#include <array>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace sgprm {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr int kDof = 5;
inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Signed shortest rotation taking `from` to `to`, in (-pi, pi].
double angle_diff(double from, double to);

/// Robot state q = (x, y, theta, pan, tilt). Lengths in meters, angles in radians.
struct Configuration {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double pan = 0.0;
  double tilt = 0.0;

  double operator[](int i) const;
  double& operator[](int i);

  bool operator==(const Configuration&) const = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v, double tol = 1e-12) const { return v >= lo - tol && v <= hi + tol; }
  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
  double width() const { return hi - lo; }
};

/// Per-DoF weights of the configuration metric. Angular DoFs are scaled so the
/// norm reads as meters-equivalent.
using DofWeights = std::array<double, kDof>;
inline constexpr DofWeights kDefaultDofWeights{1.0, 1.0, 0.5, 0.25, 0.25};

struct RobotModel {
  double base_radius = 0.3;
  Vec3 camera_mount{0.0, 0.0, 1.2};  // camera center in the base frame
  Interval pan_limits{-2.0, 2.0};
  Interval tilt_limits{-1.0, 0.5};
  double fov_half_angle_h = 0.61;
  double fov_half_angle_v = 0.43;
  double max_range = 10.0;
  DofWeights dof_weights = kDefaultDofWeights;

  /// Throws InvalidConfigurationError when a field is out of range.
  void validate() const;
};

/// Camera frame: optical axis (forward), left, up. Right-handed.
struct CameraPose {
  Vec3 center = Vec3::Zero();
  Vec3 optical_axis = Vec3::UnitX();
  Vec3 up = Vec3::UnitZ();

  Vec3 left() const { return up.cross(optical_axis); }
  /// Columns are (optical_axis, left, up); maps camera-frame vectors to world.
  Mat3 rotation() const;
  Vec3 to_camera_frame(const Vec3& world_point) const;
  Vec3 direction_to_camera_frame(const Vec3& world_dir) const;
};

struct Box {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool contains(const Vec3& p, double tol = 0.0) const;
  Vec3 center() const { return 0.5 * (min + max); }
};

/// Vertical cylinder standing on z = z_min.
struct Cylinder {
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  double height = 0.0;
  double z_min = 0.0;
};

using Obstacle = std::variant<Box, Cylinder>;

/// Throws InvalidConfigurationError for inverted boxes or non-positive radii.
void validate_obstacle(const Obstacle& obstacle);

// --- metric -----------------------------------------------------------------

/// Per-DoF difference b - a, with theta differenced on the circle. Pan and tilt
/// are bounded joints and are differenced linearly.
std::array<double, kDof> config_delta(const Configuration& a, const Configuration& b);

/// Weighted Euclidean configuration distance.
double config_distance(const Configuration& a, const Configuration& b,
                       const DofWeights& weights = kDefaultDofWeights);

bool within_joint_limits(const Configuration& q, const RobotModel& robot, double tol = 1e-12);

// --- kinematics -------------------------------------------------------------

/// Camera pose for q. Throws InvalidConfigurationError if q violates joint limits.
CameraPose forward_kinematics(const Configuration& q, const RobotModel& robot);

/// Same map without the joint-limit check.
CameraPose forward_kinematics_unchecked(const Configuration& q, const RobotModel& robot);

/// Roll-free camera at `center` looking along heading `yaw` with elevation `pitch`.
CameraPose make_camera_pose(const Vec3& center, double yaw, double pitch);

/// Partial derivatives of camera center and optical axis w.r.t. (x, y, theta, pan, tilt).
struct CameraJacobian {
  Eigen::Matrix<double, 3, kDof> center;
  Eigen::Matrix<double, 3, kDof> axis;
};
CameraJacobian camera_jacobian(const Configuration& q, const RobotModel& robot);

/// (I - z z^T)(target - m): component of the camera-to-target vector orthogonal
/// to the optical axis.
Vec3 lateral_residual(const CameraPose& cam, const Vec3& target);
Vec3 lateral_residual(const Configuration& q, const Vec3& target, const RobotModel& robot);

// --- visibility and collision -----------------------------------------------

bool in_fov(const CameraPose& cam, const Vec3& point, const RobotModel& robot);

/// True iff the segment a-b meets the obstacle at a parameter strictly inside (0, 1).
bool segment_hits(const Obstacle& obstacle, const Vec3& a, const Vec3& b);

/// True iff the open segment from the camera center to `point` hits any obstacle.
bool occluded(const CameraPose& cam, const Vec3& point, std::span<const Obstacle> obstacles);

/// Distance from a ground-plane point to the obstacle's footprint (0 inside).
double footprint_distance(const Obstacle& obstacle, const Vec2& p);

/// Base disc at (x, y) overlaps the ground-plane footprint of some obstacle.
bool config_in_collision(const Configuration& q, std::span<const Obstacle> obstacles,
                         const RobotModel& robot);

}  // namespace sgprm
