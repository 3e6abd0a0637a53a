#include "sgprm/search.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <queue>

#include "json_util.hpp"
#include "sgprm/errors.hpp"

namespace sgprm {

using detail::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHeuristicShrink = 1.0 - 1e-12;

}  // namespace

double HopField::h(std::size_t node) const {
  const std::uint32_t n = hops[node];
  if (n == kUnreachable) return kInf;
  return static_cast<double>(n) * (c_min * kHeuristicShrink);
}

HopField compute_hop_field(const QueryGraph& graph) {
  if (graph.goals().empty()) throw DomainError("hop field: empty goal set");
  HopField f;
  f.hops.assign(graph.num_nodes(), kUnreachable);
  std::deque<std::uint32_t> queue;
  for (auto g : graph.goals()) {
    if (f.hops[g] != 0) {
      f.hops[g] = 0;
      queue.push_back(g);
    }
  }
  while (!queue.empty()) {
    const std::uint32_t v = queue.front();
    queue.pop_front();
    for (const auto& arc : graph.in_arcs(v)) {
      if (f.hops[arc.to] == kUnreachable) {
        f.hops[arc.to] = f.hops[v] + 1;
        queue.push_back(arc.to);
      }
    }
  }
  f.c_min = graph.num_edges() > 0 ? kInf : 0.0;
  for (std::size_t i = 0; i < graph.num_edges(); ++i) f.c_min = std::min(f.c_min, graph.cost(i));
  f.c_min = std::max(f.c_min, 0.0);
  return f;
}

const char* to_string(HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::kHop: return "hop";
    case HeuristicKind::kZero: return "zero";
    default: return "euclidean";
  }
}

HeuristicKind heuristic_kind_from_string(const std::string& name) {
  if (name == "hop") return HeuristicKind::kHop;
  if (name == "zero" || name == "dijkstra") return HeuristicKind::kZero;
  if (name == "euclidean") return HeuristicKind::kEuclidean;
  throw InvalidConfigurationError("unknown heuristic '" + name + "'");
}

SearchResult astar(const QueryGraph& graph, HeuristicKind heuristic, const DofWeights& weights) {
  const std::size_t n = graph.num_nodes();
  std::vector<double> h(n, 0.0);
  if (heuristic == HeuristicKind::kHop) {
    const HopField field = compute_hop_field(graph);
    for (std::size_t i = 0; i < n; ++i) h[i] = field.h(i);
  } else if (heuristic == HeuristicKind::kEuclidean) {
    const NormBounds& b = graph.bounds();
    const double range = b.empty ? 0.0 : b.motion_max;
    for (std::size_t i = 0; i < n; ++i) {
      double d = kInf;
      for (auto g : graph.goals()) d = std::min(d, config_distance(graph.config(i), graph.config(g), weights));
      h[i] = range > 0.0 ? d / range : 0.0;
    }
  }

  struct Entry {
    double f;
    double h;
    std::uint32_t node;
    bool operator>(const Entry& o) const {
      if (f != o.f) return f > o.f;
      if (h != o.h) return h > o.h;
      return node > o.node;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::vector<double> g(n, kInf);
  std::vector<std::uint32_t> parent(n, kUnreachable), parent_edge(n, kUnreachable);
  std::vector<char> closed(n, 0);

  const std::uint32_t s = graph.start();
  g[s] = 0.0;
  open.push({h[s], h[s], s});
  SearchResult res;
  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    const std::uint32_t u = top.node;
    if (closed[u]) continue;
    closed[u] = 1;
    ++res.expanded;
    if (graph.is_goal(u)) {
      res.cost = g[u];
      for (std::uint32_t v = u; v != kUnreachable; v = parent[v]) {
        res.nodes.push_back(v);
        if (parent_edge[v] != kUnreachable) res.edges.push_back(parent_edge[v]);
      }
      std::reverse(res.nodes.begin(), res.nodes.end());
      std::reverse(res.edges.begin(), res.edges.end());
      return res;
    }
    for (const auto& arc : graph.out_arcs(u)) {
      if (closed[arc.to] || h[arc.to] == kInf) continue;
      const double cand = g[u] + graph.cost(arc.edge);
      if (cand < g[arc.to]) {
        g[arc.to] = cand;
        parent[arc.to] = u;
        parent_edge[arc.to] = arc.edge;
        open.push({cand + h[arc.to], h[arc.to], arc.to});
      }
    }
  }
  throw NoPathError("no path from start to the goal set (" + std::to_string(res.expanded) + " nodes expanded)",
                    res.expanded);
}

PathResult expand_path(const QueryGraph& graph, const SearchResult& result, const SceneGraph& scene,
                       const RobotModel& robot, double validation_resolution) {
  PathResult p;
  p.node_sequence = result.nodes;
  p.total_cost = result.cost;
  p.expanded = result.expanded;
  p.alpha = graph.alpha();
  p.seed = graph.roadmap().metadata.seed;
  const SteeringParams steering = graph.roadmap().steering();
  const int K = std::max(graph.roadmap().metadata.K, 2);
  p.waypoints.push_back(graph.config(result.nodes.front()));
  for (std::size_t i = 0; i < result.edges.size(); ++i) {
    const RoadmapEdge& e = graph.edge(result.edges[i]);
    const std::uint32_t a = result.nodes[i], b = result.nodes[i + 1];
    const LocalMotion m = steer(graph.config(e.u), graph.config(e.v), steering, robot.dof_weights);
    auto pts = discretize(m, K);
    if (e.u != a) std::reverse(pts.begin(), pts.end());
    for (std::size_t k = 1; k < pts.size(); ++k) p.waypoints.push_back(pts[k].second);
    if (!motion_collision_free(m, scene.obstacles, robot, validation_resolution)) ++p.invalid_edges;
    p.edge_costs.push_back({a, b, e.motion_cost, e.perception_cost, graph.cost(result.edges[i])});
    p.motion_cost += e.motion_cost;
    p.perception_cost += e.perception_cost;
  }
  return p;
}

PathResult plan(const Roadmap& roadmap, const PlannerStrategy& strategy, const SceneGraph& scene,
                const RobotModel& robot, const Configuration& start, const GoalSpec& goal,
                const PlanParams& params) {
  const auto t0 = std::chrono::steady_clock::now();
  const QueryGraph graph(roadmap, strategy, scene, robot, start, goal, params.alpha);
  const SearchResult sr = astar(graph, params.heuristic, robot.dof_weights);
  PathResult p = expand_path(graph, sr, scene, robot, params.validation_resolution);
  p.roadmap_hash = roadmap_hash(roadmap);
  p.plan_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return p;
}

// --- files -------------------------------------------------------------------------

std::string serialize_path(const PathResult& p) {
  json wps = json::array();
  for (const auto& q : p.waypoints) wps.push_back({q.x, q.y, q.theta, q.pan, q.tilt});
  json edges = json::array();
  for (const auto& e : p.edge_costs) {
    edges.push_back({{"from", e.from},
                     {"to", e.to},
                     {"motion_cost", e.motion_cost},
                     {"perception_cost", e.perception_cost},
                     {"normalized_cost", e.normalized_cost}});
  }
  json j = {{"format", 1},
            {"kind", "path"},
            {"alpha", p.alpha},
            {"seed", p.seed},
            {"roadmap_hash", p.roadmap_hash},
            {"nodes", p.node_sequence},
            {"edges", edges},
            {"waypoints", wps},
            {"totals",
             {{"motion_cost", p.motion_cost},
              {"perception_cost", p.perception_cost},
              {"normalized_cost", p.total_cost}}},
            {"expanded", p.expanded},
            {"invalid_edges", p.invalid_edges},
            {"plan_time_s", p.plan_time_s}};
  return j.dump(1) + "\n";
}

PathResult parse_path(const std::string& text) {
  const json j = detail::parse_json_text(text, "path");
  detail::check_format(j, 1, "path");
  try {
    if (j.at("kind").get<std::string>() != "path") throw ParseError("path: wrong file kind");
    PathResult p;
    p.alpha = j.at("alpha").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.roadmap_hash = j.at("roadmap_hash").get<std::string>();
    p.node_sequence = j.at("nodes").get<std::vector<std::uint32_t>>();
    for (const auto& e : j.at("edges")) {
      p.edge_costs.push_back({e.at("from").get<std::uint32_t>(), e.at("to").get<std::uint32_t>(),
                              e.at("motion_cost").get<double>(), e.at("perception_cost").get<double>(),
                              e.at("normalized_cost").get<double>()});
    }
    for (const auto& q : j.at("waypoints")) {
      if (!q.is_array() || q.size() != 5) throw ParseError("path: waypoint must have 5 entries");
      p.waypoints.push_back({q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>(),
                             q[4].get<double>()});
    }
    const json& t = j.at("totals");
    p.motion_cost = t.at("motion_cost").get<double>();
    p.perception_cost = t.at("perception_cost").get<double>();
    p.total_cost = t.at("normalized_cost").get<double>();
    p.expanded = j.at("expanded").get<std::size_t>();
    p.invalid_edges = j.at("invalid_edges").get<std::size_t>();
    p.plan_time_s = j.at("plan_time_s").get<double>();
    if (p.waypoints.empty()) throw ParseError("path: no waypoints");
    return p;
  } catch (const json::exception& e) {
    throw ParseError(std::string("path: ") + e.what());
  }
}

void save_path(const PathResult& path, const std::filesystem::path& file) {
  detail::write_file(file, serialize_path(path));
}

PathResult load_path(const std::filesystem::path& file) { return parse_path(detail::read_file(file)); }

}  // namespace sgprm
