#pragma once

// Shortest Reeds-Shepp paths (forward and reverse motion, bounded curvature)
// for the planar base, using the closed-form word families CSC, CCC, CCCC,
// CCSC and CCSCC together with their time-flip and reflection symmetries.

#include <array>
#include <cstdint>
#include <string>

namespace sgprm {

enum class RsSegment : std::uint8_t { kNop, kLeft, kStraight, kRight };

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

/// Segment lengths are signed (negative = reverse gear) and expressed for a
/// unit turning radius: radians for arcs, radius-units for straights.
struct ReedsSheppPath {
  std::array<RsSegment, 5> types{};
  std::array<double, 5> lengths{};

  double total_length() const;
  /// Letters and gear signs, e.g. "L+S+R-"; zero-length segments are omitted.
  std::string word() const;
  bool valid() const { return types[0] != RsSegment::kNop; }
};

/// Shortest path from `from` to `to` for the given turning radius. Equal-length
/// candidates (within 1e-9) are resolved by the lexicographically smaller word.
ReedsSheppPath shortest_reeds_shepp(const Pose2& from, const Pose2& to, double turning_radius);

/// Pose reached after travelling `arc` (unit-radius length, in [0, total]) along `path`.
Pose2 reeds_shepp_pose(const Pose2& from, const ReedsSheppPath& path, double turning_radius, double arc);

}  // namespace sgprm
