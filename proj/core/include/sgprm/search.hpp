#pragma once

// Graph search over a query view: the hop-count heuristic and A*.

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "sgprm/roadmap.hpp"

namespace sgprm {

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

struct HopField {
  std::vector<std::uint32_t> hops;  // kUnreachable when the goal set cannot be reached
  double c_min = 0.0;

  /// H_min(node) * c_min, shrunk by one part in 1e12 so that rounding can never
  /// break h(u) <= c(u, v) + h(v). Infinite for unreachable nodes.
  double h(std::size_t node) const;
};

/// Backward breadth-first hop counts from the goal set, and the minimum
/// normalized combined edge cost of the view.
HopField compute_hop_field(const QueryGraph& graph);

enum class HeuristicKind { kHop, kZero, kEuclidean };

const char* to_string(HeuristicKind kind);
HeuristicKind heuristic_kind_from_string(const std::string& name);

struct SearchResult {
  std::vector<std::uint32_t> nodes;  // start ... goal
  std::vector<std::uint32_t> edges;  // edge indices in the view, one per hop
  double cost = 0.0;                 // normalized combined
  std::size_t expanded = 0;
};

/// Minimum normalized-cost path from graph.start() to the goal set. Ties in the
/// open list are broken by lower h, then lower node index. Throws NoPathError.
/// kEuclidean uses the weighted configuration distance to the nearest goal
/// node scaled into the normalized motion range; it is not guaranteed consistent.
SearchResult astar(const QueryGraph& graph, HeuristicKind heuristic = HeuristicKind::kHop,
                   const DofWeights& weights = kDefaultDofWeights);

struct PathEdgeCost {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  double motion_cost = 0.0;
  double perception_cost = 0.0;
  double normalized_cost = 0.0;
};

struct PathResult {
  std::vector<std::uint32_t> node_sequence;
  std::vector<Configuration> waypoints;
  std::vector<PathEdgeCost> edge_costs;
  double motion_cost = 0.0;  // path length: sum of edge motion lengths
  double perception_cost = 0.0;
  double total_cost = 0.0;  // normalized combined
  std::size_t expanded = 0;
  double plan_time_s = 0.0;
  std::size_t invalid_edges = 0;  // edges failing the fine re-validation
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::string roadmap_hash;
};

struct PlanParams {
  double alpha = 1.0;
  HeuristicKind heuristic = HeuristicKind::kHop;
  double validation_resolution = kPathValidationResolution;
};

/// Attach start and goal, normalize, search and expand the edges into
/// waypoints (K + 1 samples for the first edge, K more for each later edge).
PathResult plan(const Roadmap& roadmap, const PlannerStrategy& strategy, const SceneGraph& scene,
                const RobotModel& robot, const Configuration& start, const GoalSpec& goal,
                const PlanParams& params);

/// Waypoints and costs for a search result on `graph`.
PathResult expand_path(const QueryGraph& graph, const SearchResult& result, const SceneGraph& scene,
                       const RobotModel& robot, double validation_resolution);

void save_path(const PathResult& path, const std::filesystem::path& file);
PathResult load_path(const std::filesystem::path& file);
std::string serialize_path(const PathResult& path);
PathResult parse_path(const std::string& text);

}  // namespace sgprm
