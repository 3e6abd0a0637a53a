#pragma once

// Brute-force shortest Reeds-Shepp length. Every word family is searched on a
// grid over its two free segment parameters, with the last arc solved from the
// goal heading; grid points near the goal position are polished by Newton
// steps on the two position equations.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

namespace sgprm::testing {

struct RsOraclePose {
  double x = 0, y = 0, th = 0;
};

// 'L', 'R' or 'S' with a signed unit-radius length.
struct RsOracleSeg {
  char type;
  double len;
};

inline RsOraclePose rs_oracle_step(RsOraclePose p, const RsOracleSeg& s) {
  switch (s.type) {
    case 'L':
      return {p.x + std::sin(p.th + s.len) - std::sin(p.th), p.y - std::cos(p.th + s.len) + std::cos(p.th),
              p.th + s.len};
    case 'R':
      return {p.x - std::sin(p.th - s.len) + std::sin(p.th), p.y + std::cos(p.th - s.len) - std::cos(p.th),
              p.th - s.len};
    default:
      return {p.x + s.len * std::cos(p.th), p.y + s.len * std::sin(p.th), p.th};
  }
}

inline double rs_oracle_wrap(double a) {
  constexpr double kTwoPi = 6.28318530717958647692;
  a = std::fmod(a, kTwoPi);
  if (a <= -kTwoPi / 2) a += kTwoPi;
  if (a > kTwoPi / 2) a -= kTwoPi;
  return a;
}

/// Shortest length from the origin (heading 0) to (gx, gy, gth) for a unit
/// turning radius.
inline double brute_force_rs_length(double gx, double gy, double gth, double grid_step = 0.02) {
  constexpr double kPi = 3.14159265358979323846;
  constexpr double kHalfPi = kPi / 2;

  // Slots: 'a' / 'b' free parameters, 'h' a quarter turn of either gear,
  // 'B' an arc of length |b| in either gear, 'z' the arc fixing the heading.
  // Adjacent arcs turn in opposite directions.
  struct Family {
    const char* letters;
    const char* slots;
  };
  const Family families[] = {
      {"CSC", "abz"}, {"CCC", "abz"}, {"CCCC", "abBz"}, {"CCSC", "ahbz"}, {"CSCC", "abhz"}, {"CCSCC", "ahbhz"},
  };
  const double straight_range = std::hypot(gx, gy) + 4.0;

  double best = std::numeric_limits<double>::infinity();
  std::vector<RsOracleSeg> segs;

  for (const Family& fam : families) {
    const int n = static_cast<int>(std::strlen(fam.letters));
    int signed_slots = 0;
    for (int i = 0; i < n; ++i) signed_slots += fam.slots[i] == 'h' || fam.slots[i] == 'B';

    // Direction choices: one bit per maximal run of adjacent arcs.
    int runs = 0;
    for (int i = 0; i < n; ++i) runs += fam.letters[i] == 'C' && (i == 0 || fam.letters[i - 1] != 'C');

    for (int dir_mask = 0; dir_mask < (1 << runs); ++dir_mask) {
      for (int sign_mask = 0; sign_mask < (1 << signed_slots); ++sign_mask) {
        for (int wrap_k = -1; wrap_k <= 1; ++wrap_k) {
          auto build = [&](double a, double b) {
            segs.clear();
            int run = -1, sign_i = 0;
            bool left = true;
            RsOraclePose p;
            for (int i = 0; i < n; ++i) {
              char type = 'S';
              if (fam.letters[i] == 'C') {
                if (i == 0 || fam.letters[i - 1] != 'C') {
                  ++run;
                  left = ((dir_mask >> run) & 1) == 0;
                } else {
                  left = !left;
                }
                type = left ? 'L' : 'R';
              }
              double len = 0.0;
              switch (fam.slots[i]) {
                case 'a': len = a; break;
                case 'b': len = b; break;
                case 'h': len = ((sign_mask >> sign_i++) & 1) ? -kHalfPi : kHalfPi; break;
                case 'B': len = ((sign_mask >> sign_i++) & 1) ? -std::abs(b) : std::abs(b); break;
                case 'z': {
                  const double need = rs_oracle_wrap(gth - p.th) + 2.0 * kPi * wrap_k;
                  len = type == 'L' ? need : -need;
                  break;
                }
              }
              segs.push_back({type, len});
              p = rs_oracle_step(p, segs.back());
            }
            return p;
          };
          auto residual = [&](double a, double b, double& ex, double& ey) {
            const RsOraclePose p = build(a, b);
            ex = p.x - gx;
            ey = p.y - gy;
          };
          auto length = [&] {
            double l = 0.0;
            for (const auto& s : segs) l += std::abs(s.len);
            return l;
          };
          auto range_of = [&](char slot) {
            for (int i = 0; i < n; ++i) {
              if (fam.slots[i] == slot) return fam.letters[i] == 'S' ? straight_range : kPi;
            }
            return 0.0;
          };

          const int na = static_cast<int>(std::ceil(range_of('a') / grid_step));
          const int nb = static_cast<int>(std::ceil(range_of('b') / grid_step));
          for (int ia = -na; ia <= na; ++ia) {
            for (int ib = -nb; ib <= nb; ++ib) {
              double a = ia * grid_step, b = ib * grid_step;
              double ex, ey;
              residual(a, b, ex, ey);
              if (std::hypot(ex, ey) > 10 * grid_step) continue;
              bool converged = false;
              for (int it = 0; it < 40 && !converged; ++it) {
                const double h = 1e-7;
                double ax, ay, bx, by;
                residual(a + h, b, ax, ay);
                residual(a, b + h, bx, by);
                const double j11 = (ax - ex) / h, j21 = (ay - ey) / h;
                const double j12 = (bx - ex) / h, j22 = (by - ey) / h;
                const double det = j11 * j22 - j12 * j21;
                if (std::abs(det) < 1e-14) break;
                a -= (j22 * ex - j12 * ey) / det;
                b -= (-j21 * ex + j11 * ey) / det;
                residual(a, b, ex, ey);
                converged = std::hypot(ex, ey) < 1e-11;
              }
              if (!converged) {
                residual(a, b, ex, ey);
                converged = std::hypot(ex, ey) < 1e-11;
              }
              if (converged) best = std::min(best, length());
            }
          }
        }
      }
    }
  }
  return best;
}

}  // namespace sgprm::testing
