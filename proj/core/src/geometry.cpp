#include "sgprm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgprm/errors.hpp"

namespace sgprm {

double wrap_angle(double a) {
  if (a > -kPi && a <= kPi) return a;
  double r = std::fmod(a + kPi, 2.0 * kPi);
  if (r <= 0.0) r += 2.0 * kPi;
  return r - kPi;
}

double angle_diff(double from, double to) { return wrap_angle(to - from); }

double Configuration::operator[](int i) const {
  switch (i) {
    case 0: return x;
    case 1: return y;
    case 2: return theta;
    case 3: return pan;
    default: return tilt;
  }
}

double& Configuration::operator[](int i) {
  switch (i) {
    case 0: return x;
    case 1: return y;
    case 2: return theta;
    case 3: return pan;
    default: return tilt;
  }
}

void RobotModel::validate() const {
  auto fail = [](const std::string& field) {
    throw InvalidConfigurationError("robot model: invalid " + field);
  };
  if (!(base_radius > 0.0)) fail("base_radius");
  if (!(fov_half_angle_h > 0.0 && fov_half_angle_h < kPi / 2)) fail("fov_half_angle_h");
  if (!(fov_half_angle_v > 0.0 && fov_half_angle_v < kPi / 2)) fail("fov_half_angle_v");
  if (!(max_range > 0.0)) fail("max_range");
  if (!(pan_limits.lo <= pan_limits.hi)) fail("pan_limits");
  if (!(tilt_limits.lo <= tilt_limits.hi)) fail("tilt_limits");
  if (tilt_limits.lo < -kPi / 2 || tilt_limits.hi > kPi / 2) fail("tilt_limits");
  for (double w : dof_weights) {
    if (!(w > 0.0)) fail("dof_weights");
  }
}

Mat3 CameraPose::rotation() const {
  Mat3 r;
  r.col(0) = optical_axis;
  r.col(1) = left();
  r.col(2) = up;
  return r;
}

Vec3 CameraPose::to_camera_frame(const Vec3& world_point) const {
  return rotation().transpose() * (world_point - center);
}

Vec3 CameraPose::direction_to_camera_frame(const Vec3& world_dir) const {
  return rotation().transpose() * world_dir;
}

bool Box::contains(const Vec3& p, double tol) const {
  return (p.array() >= min.array() - tol).all() && (p.array() <= max.array() + tol).all();
}

void validate_obstacle(const Obstacle& obstacle) {
  if (const auto* box = std::get_if<Box>(&obstacle)) {
    if (!(box->min.array() <= box->max.array()).all()) {
      throw InvalidConfigurationError("obstacle box: min corner exceeds max corner");
    }
  } else {
    const auto& cyl = std::get<Cylinder>(obstacle);
    if (!(cyl.radius > 0.0)) throw InvalidConfigurationError("obstacle cylinder: radius must be > 0");
    if (!(cyl.height >= 0.0)) throw InvalidConfigurationError("obstacle cylinder: negative height");
  }
}

std::array<double, kDof> config_delta(const Configuration& a, const Configuration& b) {
  return {b.x - a.x, b.y - a.y, angle_diff(a.theta, b.theta), b.pan - a.pan, b.tilt - a.tilt};
}

double config_distance(const Configuration& a, const Configuration& b, const DofWeights& weights) {
  const auto d = config_delta(a, b);
  double s = 0.0;
  for (int i = 0; i < kDof; ++i) s += (weights[i] * d[i]) * (weights[i] * d[i]);
  return std::sqrt(s);
}

bool within_joint_limits(const Configuration& q, const RobotModel& robot, double tol) {
  return robot.pan_limits.contains(q.pan, tol) && robot.tilt_limits.contains(q.tilt, tol) &&
         std::isfinite(q.x) && std::isfinite(q.y) && std::isfinite(q.theta);
}

CameraPose make_camera_pose(const Vec3& center, double yaw, double pitch) {
  const double cp = std::cos(yaw), sp = std::sin(yaw);
  const double cu = std::cos(pitch), su = std::sin(pitch);
  CameraPose cam;
  cam.center = center;
  cam.optical_axis = Vec3(cp * cu, sp * cu, su);
  cam.up = Vec3(-cp * su, -sp * su, cu);
  return cam;
}

CameraPose forward_kinematics_unchecked(const Configuration& q, const RobotModel& robot) {
  const double ct = std::cos(q.theta), st = std::sin(q.theta);
  const Vec3& m = robot.camera_mount;
  const Vec3 center(q.x + ct * m.x() - st * m.y(), q.y + st * m.x() + ct * m.y(), m.z());
  return make_camera_pose(center, q.theta + q.pan, q.tilt);
}

CameraPose forward_kinematics(const Configuration& q, const RobotModel& robot) {
  if (!within_joint_limits(q, robot)) {
    throw InvalidConfigurationError("configuration violates joint limits (pan=" +
                                    std::to_string(q.pan) + ", tilt=" + std::to_string(q.tilt) + ")");
  }
  return forward_kinematics_unchecked(q, robot);
}

CameraJacobian camera_jacobian(const Configuration& q, const RobotModel& robot) {
  const double ct = std::cos(q.theta), st = std::sin(q.theta);
  const double psi = q.theta + q.pan;
  const double cp = std::cos(psi), sp = std::sin(psi);
  const double cu = std::cos(q.tilt), su = std::sin(q.tilt);
  const Vec3& m = robot.camera_mount;

  CameraJacobian j;
  j.center.setZero();
  j.center(0, 0) = 1.0;
  j.center(1, 1) = 1.0;
  j.center(0, 2) = -st * m.x() - ct * m.y();
  j.center(1, 2) = ct * m.x() - st * m.y();

  j.axis.setZero();
  const Vec3 d_yaw(-sp * cu, cp * cu, 0.0);
  j.axis.col(2) = d_yaw;
  j.axis.col(3) = d_yaw;
  j.axis.col(4) = Vec3(-cp * su, -sp * su, cu);
  return j;
}

Vec3 lateral_residual(const CameraPose& cam, const Vec3& target) {
  const Vec3 d = target - cam.center;
  return d - cam.optical_axis * cam.optical_axis.dot(d);
}

Vec3 lateral_residual(const Configuration& q, const Vec3& target, const RobotModel& robot) {
  return lateral_residual(forward_kinematics_unchecked(q, robot), target);
}

bool in_fov(const CameraPose& cam, const Vec3& point, const RobotModel& robot) {
  const Vec3 v = point - cam.center;
  const double forward = v.dot(cam.optical_axis);
  if (forward <= 0.0) return false;
  if (v.norm() > robot.max_range) return false;
  const double horizontal = std::atan2(v.dot(cam.left()), forward);
  const double vertical = std::atan2(v.dot(cam.up), forward);
  return std::abs(horizontal) <= robot.fov_half_angle_h && std::abs(vertical) <= robot.fov_half_angle_v;
}

namespace {

constexpr double kSegmentEps = 1e-12;

// Clips [t0, t1] against lo <= origin + t * dir <= hi. Returns false when empty.
bool clip_slab(double origin, double dir, double lo, double hi, double& t0, double& t1) {
  if (std::abs(dir) < 1e-300) return origin >= lo && origin <= hi;
  double ta = (lo - origin) / dir;
  double tb = (hi - origin) / dir;
  if (ta > tb) std::swap(ta, tb);
  t0 = std::max(t0, ta);
  t1 = std::min(t1, tb);
  return t0 <= t1;
}

bool open_interval_overlap(double t0, double t1) {
  return t0 <= t1 && t0 < 1.0 - kSegmentEps && t1 > kSegmentEps;
}

}  // namespace

bool segment_hits(const Obstacle& obstacle, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  double t0 = 0.0, t1 = 1.0;
  if (const auto* box = std::get_if<Box>(&obstacle)) {
    for (int i = 0; i < 3; ++i) {
      if (!clip_slab(a[i], d[i], box->min[i], box->max[i], t0, t1)) return false;
    }
    return open_interval_overlap(t0, t1);
  }

  const auto& cyl = std::get<Cylinder>(obstacle);
  if (!clip_slab(a.z(), d.z(), cyl.z_min, cyl.z_min + cyl.height, t0, t1)) return false;
  const Vec2 o = a.head<2>() - cyl.center;
  const Vec2 dxy = d.head<2>();
  const double qa = dxy.squaredNorm();
  const double qb = 2.0 * o.dot(dxy);
  const double qc = o.squaredNorm() - cyl.radius * cyl.radius;
  if (qa < 1e-300) {
    if (qc > 0.0) return false;
  } else {
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc < 0.0) return false;
    const double sq = std::sqrt(disc);
    t0 = std::max(t0, (-qb - sq) / (2.0 * qa));
    t1 = std::min(t1, (-qb + sq) / (2.0 * qa));
  }
  return open_interval_overlap(t0, t1);
}

bool occluded(const CameraPose& cam, const Vec3& point, std::span<const Obstacle> obstacles) {
  return std::any_of(obstacles.begin(), obstacles.end(),
                     [&](const Obstacle& o) { return segment_hits(o, cam.center, point); });
}

double footprint_distance(const Obstacle& obstacle, const Vec2& p) {
  if (const auto* box = std::get_if<Box>(&obstacle)) {
    const double dx = std::max({box->min.x() - p.x(), 0.0, p.x() - box->max.x()});
    const double dy = std::max({box->min.y() - p.y(), 0.0, p.y() - box->max.y()});
    return std::hypot(dx, dy);
  }
  const auto& cyl = std::get<Cylinder>(obstacle);
  return std::max(0.0, (p - cyl.center).norm() - cyl.radius);
}

bool config_in_collision(const Configuration& q, std::span<const Obstacle> obstacles,
                         const RobotModel& robot) {
  const Vec2 p(q.x, q.y);
  return std::any_of(obstacles.begin(), obstacles.end(), [&](const Obstacle& o) {
    return footprint_distance(o, p) < robot.base_radius;
  });
}

}  // namespace sgprm
