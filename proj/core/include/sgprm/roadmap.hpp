#pragma once

// Roadmap construction, query-time attachment of start and goal, cost
// normalization and roadmap files.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgprm/geometry.hpp"
#include "sgprm/perception.hpp"
#include "sgprm/rng.hpp"
#include "sgprm/sampling.hpp"
#include "sgprm/scenegraph.hpp"
#include "sgprm/steering.hpp"

namespace sgprm {

struct PlannerParams {
  std::size_t P = 300;  // node budget
  int k = 5;
  double alpha = 1.0;
  int K = 10;
  std::optional<double> time_limit;  // seconds; replaces the node budget when set
  SteeringParams steering;           // steering.discretization is ignored in favour of K
  double collision_resolution = kDefaultCollisionResolution;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

/// Sampler and pointwise perception channel of one planning method. The rest
/// of the pipeline (steering, collision checks, neighbours, normalization,
/// search) is shared by every method.
class PlannerStrategy {
 public:
  virtual ~PlannerStrategy() = default;

  virtual std::string name() const = 0;
  /// Draws one roadmap node. Must only use `rng` for randomness.
  virtual Configuration sample_node(Rng& rng, SamplerStats& stats) const = 0;
  /// Perception channel at each configuration.
  virtual std::vector<double> point_perception(std::span<const Configuration> qs) const = 0;
};

/// MOPS-PRM: perception-aware sampling and the weighted aggregate cost.
class MopsStrategy final : public PlannerStrategy {
 public:
  MopsStrategy(const SceneGraph& scene, const RobotModel& robot, std::shared_ptr<const PerceptionModel> model,
               SamplerParams params = {});

  std::string name() const override { return "mops_prm"; }
  Configuration sample_node(Rng& rng, SamplerStats& stats) const override;
  std::vector<double> point_perception(std::span<const Configuration> qs) const override;

 private:
  SceneGraph scene_;
  RobotModel robot_;
  std::shared_ptr<const PerceptionModel> model_;
  SamplerParams params_;
};

/// Left Riemann sum of the channel over K equal steps of the motion.
double edge_perception(const PlannerStrategy& strategy, const LocalMotion& motion, int K);

/// Same quadrature with the aggregate cost p(q).
double edge_perception_cost(const LocalMotion& motion, const SceneGraph& scene, const PerceptionModel& model,
                            const RobotModel& robot, int K);

struct EdgeCost {
  double motion = 0.0;
  double perception = 0.0;
  double combined = 0.0;  // motion + alpha * perception, raw
};
EdgeCost edge_cost(const LocalMotion& motion, const SceneGraph& scene, const PerceptionModel& model,
                   const RobotModel& robot, double alpha, int K);

struct RoadmapEdge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  double motion_cost = 0.0;
  double perception_cost = 0.0;

  bool operator==(const RoadmapEdge&) const = default;
};

/// Per-channel cost range over a set of edges. A cost c normalizes to
/// c / max, in [0, 1] for the nonnegative edge costs; 0 when max is 0.
struct NormBounds {
  double motion_min = 0.0;
  double motion_max = 0.0;
  double perception_min = 0.0;
  double perception_max = 0.0;
  bool empty = true;

  void include(const RoadmapEdge& e);
  double motion(double c) const;
  double perception(double c) const;
  double combined(const RoadmapEdge& e, double alpha) const { return motion(e.motion_cost) + alpha * perception(e.perception_cost); }

  bool operator==(const NormBounds&) const = default;
};

struct BuildMetadata {
  std::string method;
  std::uint64_t seed = 0;
  std::size_t requested_nodes = 0;
  int k = 0;
  double alpha = 0.0;
  int K = 0;
  SteeringKind steering = SteeringKind::kStraight;
  double turning_radius = 0.0;
  double collision_resolution = 0.0;
  double build_time_s = 0.0;
  std::size_t knn_queries = 0;
  std::size_t candidate_edges = 0;
  std::size_t collision_checks = 0;
  SamplerStats sampler;

  bool operator==(const BuildMetadata&) const = default;
};

struct Roadmap {
  std::vector<Configuration> nodes;
  std::vector<RoadmapEdge> edges;
  bool directed = false;  // Reeds-Shepp roadmaps store each direction separately
  NormBounds bounds;
  BuildMetadata metadata;

  SteeringParams steering() const;
  /// Local motion of a stored edge in its stored direction.
  LocalMotion edge_motion(const RoadmapEdge& e, const RobotModel& robot) const;

  bool operator==(const Roadmap&) const = default;
};

/// Node i is drawn from the random stream (seed, i); neighbours and edges are
/// merged in index order, so the result does not depend on the thread count.
Roadmap build_roadmap(const PlannerStrategy& strategy, const SceneGraph& scene, const RobotModel& robot,
                      const PlannerParams& params, std::uint64_t seed);

/// Indices of the k nearest entries of `nodes[0..limit)` to q, nearest first,
/// lower index first among equal distances.
std::vector<std::uint32_t> nearest_nodes(std::span<const Configuration> nodes, std::size_t limit,
                                         const Configuration& q, int k, const DofWeights& weights);

/// Number of stored edges whose motion is in collision at `resolution`.
std::size_t count_invalid_edges(const Roadmap& roadmap, const SceneGraph& scene, const RobotModel& robot,
                                double resolution);

// --- queries -------------------------------------------------------------------

struct GoalSpec {
  enum class Kind { kConfiguration, kRegion };
  Kind kind = Kind::kConfiguration;
  Configuration q;
  double radius = 0.0;  // kRegion: ball radius in the weighted norm

  static GoalSpec configuration(const Configuration& q) { return {Kind::kConfiguration, q, 0.0}; }
  static GoalSpec region(const Configuration& center, double radius) { return {Kind::kRegion, center, radius}; }
};

/// The roadmap plus start/goal attachment edges, with normalization bounds
/// recomputed over all of them. The roadmap itself is not modified.
class QueryGraph {
 public:
  struct Arc {
    std::uint32_t to;
    std::uint32_t edge;  // index into edge()
  };

  QueryGraph(const Roadmap& roadmap, const PlannerStrategy& strategy, const SceneGraph& scene,
             const RobotModel& robot, const Configuration& start, const GoalSpec& goal, double alpha);

  /// Plain view of the roadmap with explicit start node and goal set (no attachment).
  QueryGraph(const Roadmap& roadmap, std::uint32_t start, std::vector<std::uint32_t> goals, double alpha);

  std::size_t num_nodes() const { return configs_size_; }
  std::size_t num_edges() const { return roadmap_->edges.size() + extra_edges_.size(); }
  const RoadmapEdge& edge(std::size_t i) const;
  const Configuration& config(std::size_t node) const;
  const std::vector<Arc>& out_arcs(std::size_t node) const { return out_[node]; }
  const std::vector<Arc>& in_arcs(std::size_t node) const { return in_[node]; }

  std::uint32_t start() const { return start_; }
  const std::vector<std::uint32_t>& goals() const { return goals_; }
  bool is_goal(std::size_t node) const { return goal_flag_[node] != 0; }
  double alpha() const { return alpha_; }
  const NormBounds& bounds() const { return bounds_; }
  const Roadmap& roadmap() const { return *roadmap_; }
  std::span<const RoadmapEdge> attachment_edges() const { return extra_edges_; }

  /// Normalized combined cost of edge i.
  double cost(std::size_t i) const { return costs_[i]; }

 private:
  void finalize();

  const Roadmap* roadmap_;
  std::vector<Configuration> extra_nodes_;
  std::vector<RoadmapEdge> extra_edges_;
  std::size_t configs_size_ = 0;
  std::vector<std::vector<Arc>> out_;
  std::vector<std::vector<Arc>> in_;
  std::vector<double> costs_;
  std::uint32_t start_ = 0;
  std::vector<std::uint32_t> goals_;
  std::vector<char> goal_flag_;
  NormBounds bounds_;
  double alpha_ = 0.0;
};

// --- files ---------------------------------------------------------------------

inline constexpr int kRoadmapFormatVersion = 1;

void save_roadmap(const Roadmap& roadmap, const std::filesystem::path& path);
Roadmap load_roadmap(const std::filesystem::path& path);
std::string serialize_roadmap(const Roadmap& roadmap);
Roadmap parse_roadmap(const std::string& text);

/// FNV-1a over node coordinates and edge tables (bit patterns), as 16 hex digits.
std::string roadmap_hash(const Roadmap& roadmap);

}  // namespace sgprm
