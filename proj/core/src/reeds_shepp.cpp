#include "sgprm/reeds_shepp.hpp"

#include <cmath>
#include <limits>

#include "sgprm/geometry.hpp"

namespace sgprm {

namespace {

constexpr double kTwoPi = 2.0 * kPi;
constexpr double kZero = 10.0 * std::numeric_limits<double>::epsilon();
constexpr double kTieTolerance = 1e-9;

using S = RsSegment;
constexpr RsSegment L = S::kLeft;
constexpr RsSegment R = S::kRight;
constexpr RsSegment St = S::kStraight;
constexpr RsSegment N = S::kNop;

constexpr std::array<std::array<RsSegment, 5>, 18> kWords{{
    {L, R, L, N, N},    // 0
    {R, L, R, N, N},    // 1
    {L, R, L, R, N},    // 2
    {R, L, R, L, N},    // 3
    {L, R, St, L, N},   // 4
    {R, L, St, R, N},   // 5
    {L, St, R, L, N},   // 6
    {R, St, L, R, N},   // 7
    {L, R, St, R, N},   // 8
    {R, L, St, L, N},   // 9
    {R, St, R, L, N},   // 10
    {L, St, L, R, N},   // 11
    {L, St, R, N, N},   // 12
    {R, St, L, N, N},   // 13
    {L, St, L, N, N},   // 14
    {R, St, R, N, N},   // 15
    {L, R, St, L, R},   // 16
    {R, L, St, R, L},   // 17
}};

double mod2pi(double x) {
  double v = std::fmod(x, kTwoPi);
  if (v < -kPi) {
    v += kTwoPi;
  } else if (v > kPi) {
    v -= kTwoPi;
  }
  return v;
}

void polar(double x, double y, double& r, double& theta) {
  r = std::sqrt(x * x + y * y);
  theta = std::atan2(y, x);
}

void tau_omega(double u, double v, double xi, double eta, double phi, double& tau, double& omega) {
  const double delta = mod2pi(u - v);
  const double a = std::sin(u) - std::sin(delta);
  const double b = std::cos(u) - std::cos(delta) - 1.0;
  const double t1 = std::atan2(eta * a - xi * b, xi * a + eta * b);
  const double t2 = 2.0 * (std::cos(delta) - std::cos(v) - std::cos(u)) + 3.0;
  tau = (t2 < 0.0) ? mod2pi(t1 + kPi) : mod2pi(t1);
  omega = mod2pi(tau - u + v - phi);
}

// Elementary solvers, each for one base word in the normalized frame.

bool lp_sp_lp(double x, double y, double phi, double& t, double& u, double& v) {
  polar(x - std::sin(phi), y - 1.0 + std::cos(phi), u, t);
  if (t >= -kZero) {
    v = mod2pi(phi - t);
    if (v >= -kZero) return true;
  }
  return false;
}

bool lp_sp_rp(double x, double y, double phi, double& t, double& u, double& v) {
  double t1, u1;
  polar(x + std::sin(phi), y - 1.0 - std::cos(phi), u1, t1);
  u1 = u1 * u1;
  if (u1 >= 4.0) {
    u = std::sqrt(u1 - 4.0);
    const double theta = std::atan2(2.0, u);
    t = mod2pi(t1 + theta);
    v = mod2pi(t - phi);
    return t >= -kZero && v >= -kZero;
  }
  return false;
}

bool lp_rm_l(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x - std::sin(phi), eta = y - 1.0 + std::cos(phi);
  double u1, theta;
  polar(xi, eta, u1, theta);
  if (u1 <= 4.0) {
    u = -2.0 * std::asin(0.25 * u1);
    t = mod2pi(theta + 0.5 * u + kPi);
    v = mod2pi(phi - t + u);
    return t >= -kZero && u <= kZero;
  }
  return false;
}

bool lp_rup_lum_rm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi), eta = y - 1.0 - std::cos(phi);
  const double rho = 0.25 * (2.0 + std::sqrt(xi * xi + eta * eta));
  if (rho <= 1.0) {
    u = std::acos(rho);
    tau_omega(u, -u, xi, eta, phi, t, v);
    return t >= -kZero && v <= kZero;
  }
  return false;
}

bool lp_rum_lum_rp(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi), eta = y - 1.0 - std::cos(phi);
  const double rho = (20.0 - xi * xi - eta * eta) / 16.0;
  if (rho >= 0.0 && rho <= 1.0) {
    u = -std::acos(rho);
    if (u >= -0.5 * kPi) {
      tau_omega(u, u, xi, eta, phi, t, v);
      return t >= -kZero && v >= -kZero;
    }
  }
  return false;
}

bool lp_rm_sm_lm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x - std::sin(phi), eta = y - 1.0 + std::cos(phi);
  double rho, theta;
  polar(xi, eta, rho, theta);
  if (rho >= 2.0) {
    const double r = std::sqrt(rho * rho - 4.0);
    u = 2.0 - r;
    t = mod2pi(theta + std::atan2(r, -2.0));
    v = mod2pi(phi - 0.5 * kPi - t);
    return t >= -kZero && u <= kZero && v <= kZero;
  }
  return false;
}

bool lp_rm_sm_rm(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi), eta = y - 1.0 - std::cos(phi);
  double rho, theta;
  polar(-eta, xi, rho, theta);
  if (rho >= 2.0) {
    t = theta;
    u = 2.0 - rho;
    v = mod2pi(t + 0.5 * kPi - phi);
    return t >= -kZero && u <= kZero && v <= kZero;
  }
  return false;
}

bool lp_rm_s_lm_rp(double x, double y, double phi, double& t, double& u, double& v) {
  const double xi = x + std::sin(phi), eta = y - 1.0 - std::cos(phi);
  double rho, theta;
  polar(xi, eta, rho, theta);
  if (rho >= 2.0) {
    u = 4.0 - std::sqrt(rho * rho - 4.0);
    if (u <= kZero) {
      t = mod2pi(std::atan2((4.0 - u) * xi - 2.0 * eta, -2.0 * xi + (u - 4.0) * eta));
      v = mod2pi(t - phi);
      return t >= -kZero && v >= -kZero;
    }
  }
  return false;
}

class Selector {
 public:
  void offer(int word, double a, double b, double c, double d = 0.0, double e = 0.0) {
    ReedsSheppPath p;
    p.types = kWords[static_cast<std::size_t>(word)];
    p.lengths = {a, b, c, d, e};
    for (double& l : p.lengths) {
      if (std::abs(l) <= kZero) l = 0.0;
    }
    const double len = p.total_length();
    if (!best_.valid() || len < best_len_ - kTieTolerance ||
        (len <= best_len_ + kTieTolerance && p.word() < best_.word())) {
      best_ = p;
      best_len_ = len;
    }
  }
  const ReedsSheppPath& best() const { return best_; }

 private:
  ReedsSheppPath best_;
  double best_len_ = std::numeric_limits<double>::infinity();
};

void csc(double x, double y, double phi, Selector& sel) {
  double t, u, v;
  if (lp_sp_lp(x, y, phi, t, u, v)) sel.offer(14, t, u, v);
  if (lp_sp_lp(-x, y, -phi, t, u, v)) sel.offer(14, -t, -u, -v);
  if (lp_sp_lp(x, -y, -phi, t, u, v)) sel.offer(15, t, u, v);
  if (lp_sp_lp(-x, -y, phi, t, u, v)) sel.offer(15, -t, -u, -v);
  if (lp_sp_rp(x, y, phi, t, u, v)) sel.offer(12, t, u, v);
  if (lp_sp_rp(-x, y, -phi, t, u, v)) sel.offer(12, -t, -u, -v);
  if (lp_sp_rp(x, -y, -phi, t, u, v)) sel.offer(13, t, u, v);
  if (lp_sp_rp(-x, -y, phi, t, u, v)) sel.offer(13, -t, -u, -v);
}

void ccc(double x, double y, double phi, Selector& sel) {
  double t, u, v;
  if (lp_rm_l(x, y, phi, t, u, v)) sel.offer(0, t, u, v);
  if (lp_rm_l(-x, y, -phi, t, u, v)) sel.offer(0, -t, -u, -v);
  if (lp_rm_l(x, -y, -phi, t, u, v)) sel.offer(1, t, u, v);
  if (lp_rm_l(-x, -y, phi, t, u, v)) sel.offer(1, -t, -u, -v);
  // backwards
  const double xb = x * std::cos(phi) + y * std::sin(phi);
  const double yb = x * std::sin(phi) - y * std::cos(phi);
  if (lp_rm_l(xb, yb, phi, t, u, v)) sel.offer(0, v, u, t);
  if (lp_rm_l(-xb, yb, -phi, t, u, v)) sel.offer(0, -v, -u, -t);
  if (lp_rm_l(xb, -yb, -phi, t, u, v)) sel.offer(1, v, u, t);
  if (lp_rm_l(-xb, -yb, phi, t, u, v)) sel.offer(1, -v, -u, -t);
}

void cccc(double x, double y, double phi, Selector& sel) {
  double t, u, v;
  if (lp_rup_lum_rm(x, y, phi, t, u, v)) sel.offer(2, t, u, -u, v);
  if (lp_rup_lum_rm(-x, y, -phi, t, u, v)) sel.offer(2, -t, -u, u, -v);
  if (lp_rup_lum_rm(x, -y, -phi, t, u, v)) sel.offer(3, t, u, -u, v);
  if (lp_rup_lum_rm(-x, -y, phi, t, u, v)) sel.offer(3, -t, -u, u, -v);
  if (lp_rum_lum_rp(x, y, phi, t, u, v)) sel.offer(2, t, u, u, v);
  if (lp_rum_lum_rp(-x, y, -phi, t, u, v)) sel.offer(2, -t, -u, -u, -v);
  if (lp_rum_lum_rp(x, -y, -phi, t, u, v)) sel.offer(3, t, u, u, v);
  if (lp_rum_lum_rp(-x, -y, phi, t, u, v)) sel.offer(3, -t, -u, -u, -v);
}

void ccsc(double x, double y, double phi, Selector& sel) {
  constexpr double h = 0.5 * kPi;
  double t, u, v;
  if (lp_rm_sm_lm(x, y, phi, t, u, v)) sel.offer(4, t, -h, u, v);
  if (lp_rm_sm_lm(-x, y, -phi, t, u, v)) sel.offer(4, -t, h, -u, -v);
  if (lp_rm_sm_lm(x, -y, -phi, t, u, v)) sel.offer(5, t, -h, u, v);
  if (lp_rm_sm_lm(-x, -y, phi, t, u, v)) sel.offer(5, -t, h, -u, -v);
  if (lp_rm_sm_rm(x, y, phi, t, u, v)) sel.offer(8, t, -h, u, v);
  if (lp_rm_sm_rm(-x, y, -phi, t, u, v)) sel.offer(8, -t, h, -u, -v);
  if (lp_rm_sm_rm(x, -y, -phi, t, u, v)) sel.offer(9, t, -h, u, v);
  if (lp_rm_sm_rm(-x, -y, phi, t, u, v)) sel.offer(9, -t, h, -u, -v);
  // backwards
  const double xb = x * std::cos(phi) + y * std::sin(phi);
  const double yb = x * std::sin(phi) - y * std::cos(phi);
  if (lp_rm_sm_lm(xb, yb, phi, t, u, v)) sel.offer(6, v, u, -h, t);
  if (lp_rm_sm_lm(-xb, yb, -phi, t, u, v)) sel.offer(6, -v, -u, h, -t);
  if (lp_rm_sm_lm(xb, -yb, -phi, t, u, v)) sel.offer(7, v, u, -h, t);
  if (lp_rm_sm_lm(-xb, -yb, phi, t, u, v)) sel.offer(7, -v, -u, h, -t);
  if (lp_rm_sm_rm(xb, yb, phi, t, u, v)) sel.offer(10, v, u, -h, t);
  if (lp_rm_sm_rm(-xb, yb, -phi, t, u, v)) sel.offer(10, -v, -u, h, -t);
  if (lp_rm_sm_rm(xb, -yb, -phi, t, u, v)) sel.offer(11, v, u, -h, t);
  if (lp_rm_sm_rm(-xb, -yb, phi, t, u, v)) sel.offer(11, -v, -u, h, -t);
}

void ccscc(double x, double y, double phi, Selector& sel) {
  constexpr double h = 0.5 * kPi;
  double t, u, v;
  if (lp_rm_s_lm_rp(x, y, phi, t, u, v)) sel.offer(16, t, -h, u, -h, v);
  if (lp_rm_s_lm_rp(-x, y, -phi, t, u, v)) sel.offer(16, -t, h, -u, h, -v);
  if (lp_rm_s_lm_rp(x, -y, -phi, t, u, v)) sel.offer(17, t, -h, u, -h, v);
  if (lp_rm_s_lm_rp(-x, -y, phi, t, u, v)) sel.offer(17, -t, h, -u, h, -v);
}

}  // namespace

double ReedsSheppPath::total_length() const {
  double s = 0.0;
  for (double l : lengths) s += std::abs(l);
  return s;
}

std::string ReedsSheppPath::word() const {
  std::string w;
  for (std::size_t i = 0; i < types.size(); ++i) {
    if (types[i] == RsSegment::kNop) break;
    if (lengths[i] == 0.0) continue;
    w += types[i] == RsSegment::kLeft ? 'L' : (types[i] == RsSegment::kRight ? 'R' : 'S');
    w += lengths[i] < 0.0 ? '-' : '+';
  }
  return w;
}

ReedsSheppPath shortest_reeds_shepp(const Pose2& from, const Pose2& to, double turning_radius) {
  const double dx = to.x - from.x, dy = to.y - from.y;
  const double c = std::cos(from.theta), s = std::sin(from.theta);
  const double x = (c * dx + s * dy) / turning_radius;
  const double y = (-s * dx + c * dy) / turning_radius;
  const double phi = to.theta - from.theta;

  Selector sel;
  csc(x, y, phi, sel);
  ccc(x, y, phi, sel);
  cccc(x, y, phi, sel);
  ccsc(x, y, phi, sel);
  ccscc(x, y, phi, sel);
  return sel.best();
}

Pose2 reeds_shepp_pose(const Pose2& from, const ReedsSheppPath& path, double turning_radius, double arc) {
  double px = 0.0, py = 0.0, yaw = from.theta;
  double remaining = arc;
  for (std::size_t i = 0; i < 5 && remaining > 0.0; ++i) {
    double v;
    if (path.lengths[i] < 0.0) {
      v = std::max(-remaining, path.lengths[i]);
      remaining += v;
    } else {
      v = std::min(remaining, path.lengths[i]);
      remaining -= v;
    }
    const double phi = yaw;
    switch (path.types[i]) {
      case RsSegment::kLeft:
        px += std::sin(phi + v) - std::sin(phi);
        py += -std::cos(phi + v) + std::cos(phi);
        yaw = phi + v;
        break;
      case RsSegment::kRight:
        px += -std::sin(phi - v) + std::sin(phi);
        py += std::cos(phi - v) - std::cos(phi);
        yaw = phi - v;
        break;
      case RsSegment::kStraight:
        px += v * std::cos(phi);
        py += v * std::sin(phi);
        break;
      case RsSegment::kNop:
        break;
    }
  }
  return {from.x + px * turning_radius, from.y + py * turning_radius, wrap_angle(yaw)};
}

}  // namespace sgprm
