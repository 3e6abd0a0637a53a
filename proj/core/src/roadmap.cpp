#include "sgprm/roadmap.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <limits>

#include "json_util.hpp"
#include "sgprm/errors.hpp"
#include "sgprm/parallel.hpp"

namespace sgprm {

using detail::json;

void PlannerParams::validate() const {
  if (P < 1 && !time_limit) throw InvalidConfigurationError("node budget P must be >= 1");
  if (k < 1) throw InvalidConfigurationError("neighbour count k must be >= 1");
  if (!(alpha >= 0.0)) throw InvalidConfigurationError("alpha must be >= 0");
  if (K < 2) throw InvalidConfigurationError("discretization K must be >= 2");
  if (time_limit && !(*time_limit > 0.0)) throw InvalidConfigurationError("time limit must be > 0");
  if (!(collision_resolution > 0.0)) throw InvalidConfigurationError("collision resolution must be > 0");
  SteeringParams s = steering;
  s.discretization = K;
  s.validate();
}

// --- MOPS strategy ---------------------------------------------------------------

MopsStrategy::MopsStrategy(const SceneGraph& scene, const RobotModel& robot,
                           std::shared_ptr<const PerceptionModel> model, SamplerParams params)
    : scene_(scene), robot_(robot), model_(std::move(model)), params_(params) {
  if (!model_) throw InvalidConfigurationError("MopsStrategy: null perception model");
  params_.projection.validate();
  params_.local.validate();
}

Configuration MopsStrategy::sample_node(Rng& rng, SamplerStats& stats) const {
  return perception_aware_sample(scene_, robot_, *model_, params_, rng, &stats);
}

std::vector<double> MopsStrategy::point_perception(std::span<const Configuration> qs) const {
  return batch_cost(qs, scene_, *model_, robot_);
}

// --- edge costs ------------------------------------------------------------------

namespace {

std::vector<Configuration> quadrature_points(const LocalMotion& motion, int K) {
  if (K < 2) throw DomainError("edge quadrature: K must be >= 2");
  std::vector<Configuration> pts;
  pts.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) pts.push_back(motion.sample(static_cast<double>(k) / static_cast<double>(K)));
  return pts;
}

double riemann(const std::vector<double>& values, int K) {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(K);
}

}  // namespace

double edge_perception(const PlannerStrategy& strategy, const LocalMotion& motion, int K) {
  return riemann(strategy.point_perception(quadrature_points(motion, K)), K);
}

double edge_perception_cost(const LocalMotion& motion, const SceneGraph& scene, const PerceptionModel& model,
                            const RobotModel& robot, int K) {
  return riemann(batch_cost(quadrature_points(motion, K), scene, model, robot), K);
}

EdgeCost edge_cost(const LocalMotion& motion, const SceneGraph& scene, const PerceptionModel& model,
                   const RobotModel& robot, double alpha, int K) {
  EdgeCost c;
  c.motion = motion.motion_length();
  c.perception = edge_perception_cost(motion, scene, model, robot, K);
  c.combined = c.motion + alpha * c.perception;
  return c;
}

// --- normalization -----------------------------------------------------------------

void NormBounds::include(const RoadmapEdge& e) {
  if (empty) {
    motion_min = motion_max = e.motion_cost;
    perception_min = perception_max = e.perception_cost;
    empty = false;
    return;
  }
  motion_min = std::min(motion_min, e.motion_cost);
  motion_max = std::max(motion_max, e.motion_cost);
  perception_min = std::min(perception_min, e.perception_cost);
  perception_max = std::max(perception_max, e.perception_cost);
}

double NormBounds::motion(double c) const {
  if (empty) throw DomainError("cost normalization over an empty edge set");
  return motion_max > 0.0 ? c / motion_max : 0.0;
}

double NormBounds::perception(double c) const {
  if (empty) throw DomainError("cost normalization over an empty edge set");
  return perception_max > 0.0 ? c / perception_max : 0.0;
}

// --- build ---------------------------------------------------------------------------

SteeringParams Roadmap::steering() const {
  SteeringParams s;
  s.kind = metadata.steering;
  s.turning_radius = metadata.turning_radius > 0.0 ? metadata.turning_radius : s.turning_radius;
  s.discretization = metadata.K;
  return s;
}

LocalMotion Roadmap::edge_motion(const RoadmapEdge& e, const RobotModel& robot) const {
  return steer(nodes.at(e.u), nodes.at(e.v), steering(), robot.dof_weights);
}

std::vector<std::uint32_t> nearest_nodes(std::span<const Configuration> nodes, std::size_t limit,
                                         const Configuration& q, int k, const DofWeights& weights) {
  limit = std::min(limit, nodes.size());
  std::vector<std::pair<double, std::uint32_t>> d;
  d.reserve(limit);
  for (std::size_t j = 0; j < limit; ++j) {
    d.emplace_back(config_distance(q, nodes[j], weights), static_cast<std::uint32_t>(j));
  }
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 0)), d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kk), d.end());
  std::vector<std::uint32_t> out;
  out.reserve(kk);
  for (std::size_t i = 0; i < kk; ++i) out.push_back(d[i].second);
  return out;
}

Roadmap build_roadmap(const PlannerStrategy& strategy, const SceneGraph& scene, const RobotModel& robot,
                      const PlannerParams& params, std::uint64_t seed) {
  params.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const unsigned threads = resolve_threads(params.threads);
  SteeringParams steering = params.steering;
  steering.discretization = params.K;

  Roadmap rm;
  rm.directed = steering.kind == SteeringKind::kReedsShepp;
  BuildMetadata& meta = rm.metadata;
  meta.method = strategy.name();
  meta.seed = seed;
  meta.requested_nodes = params.P;
  meta.k = params.k;
  meta.alpha = params.alpha;
  meta.K = params.K;
  meta.steering = steering.kind;
  meta.turning_radius = steering.turning_radius;
  meta.collision_resolution = params.collision_resolution;

  // Nodes: one random stream per index.
  auto sample_range = [&](std::size_t begin, std::size_t end) {
    const std::size_t n = end - begin;
    std::vector<Configuration> qs(n);
    std::vector<SamplerStats> stats(n);
    parallel_for(n, threads, [&](std::size_t i) {
      Rng rng = make_stream(seed, begin + i);
      qs[i] = strategy.sample_node(rng, stats[i]);
    });
    for (std::size_t i = 0; i < n; ++i) {
      rm.nodes.push_back(qs[i]);
      meta.sampler += stats[i];
    }
  };
  if (params.time_limit) {
    const auto deadline = t0 + std::chrono::duration<double>(*params.time_limit);
    const std::size_t batch = std::max<std::size_t>(4, 2 * threads);
    do {
      sample_range(rm.nodes.size(), rm.nodes.size() + batch);
    } while (std::chrono::steady_clock::now() < deadline);
  } else {
    sample_range(0, params.P);
  }

  // Candidate edges from each node to its k nearest predecessors.
  const std::size_t n = rm.nodes.size();
  std::vector<std::vector<std::uint32_t>> nbrs(n);
  parallel_for(n, threads, [&](std::size_t i) {
    nbrs[i] = nearest_nodes(rm.nodes, i, rm.nodes[i], params.k, robot.dof_weights);
  });
  meta.knn_queries = n > 0 ? n - 1 : 0;
  std::vector<RoadmapEdge> candidates;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::uint32_t j : nbrs[i]) {
      candidates.push_back({static_cast<std::uint32_t>(i), j, 0.0, 0.0});
      if (rm.directed) candidates.push_back({j, static_cast<std::uint32_t>(i), 0.0, 0.0});
    }
  }
  meta.candidate_edges = candidates.size();
  meta.collision_checks = candidates.size();

  std::vector<char> keep(candidates.size(), 0);
  parallel_for(candidates.size(), threads, [&](std::size_t c) {
    RoadmapEdge& e = candidates[c];
    const LocalMotion m = steer(rm.nodes[e.u], rm.nodes[e.v], steering, robot.dof_weights);
    if (!motion_collision_free(m, scene.obstacles, robot, params.collision_resolution)) return;
    e.motion_cost = m.motion_length();
    e.perception_cost = edge_perception(strategy, m, params.K);
    keep[c] = 1;
  });
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (!keep[c]) continue;
    rm.edges.push_back(candidates[c]);
    rm.bounds.include(candidates[c]);
  }

  meta.build_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rm;
}

std::size_t count_invalid_edges(const Roadmap& roadmap, const SceneGraph& scene, const RobotModel& robot,
                                double resolution) {
  std::size_t bad = 0;
  for (const auto& e : roadmap.edges) {
    if (!motion_collision_free(roadmap.edge_motion(e, robot), scene.obstacles, robot, resolution)) ++bad;
  }
  return bad;
}

// --- query view ---------------------------------------------------------------------

QueryGraph::QueryGraph(const Roadmap& roadmap, std::uint32_t start, std::vector<std::uint32_t> goals, double alpha)
    : roadmap_(&roadmap), configs_size_(roadmap.nodes.size()), start_(start), goals_(std::move(goals)),
      alpha_(alpha) {
  if (start_ >= configs_size_) throw DomainError("query: start index out of range");
  for (auto g : goals_) {
    if (g >= configs_size_) throw DomainError("query: goal index out of range");
  }
  if (goals_.empty()) throw DomainError("query: empty goal set");
  finalize();
}

QueryGraph::QueryGraph(const Roadmap& roadmap, const PlannerStrategy& strategy, const SceneGraph& scene,
                       const RobotModel& robot, const Configuration& start, const GoalSpec& goal, double alpha)
    : roadmap_(&roadmap), alpha_(alpha) {
  if (!(alpha >= 0.0)) throw InvalidConfigurationError("alpha must be >= 0");
  const std::size_t n = roadmap.nodes.size();
  if (n == 0) throw NoPathError("query: roadmap has no nodes");
  if (!config_valid(start, scene, robot)) {
    throw InvalidConfigurationError("query: start configuration is not collision-free");
  }
  const SteeringParams steering = roadmap.steering();
  const int K = roadmap.metadata.K;
  const double res = roadmap.metadata.collision_resolution > 0.0 ? roadmap.metadata.collision_resolution
                                                                 : kDefaultCollisionResolution;
  const int k = std::max(roadmap.metadata.k, 1);

  auto attach = [&](std::uint32_t self, const Configuration& q, bool outgoing) {
    std::size_t added = 0;
    for (std::uint32_t j : nearest_nodes(roadmap.nodes, n, q, k, robot.dof_weights)) {
      const Configuration& a = outgoing ? q : roadmap.nodes[j];
      const Configuration& b = outgoing ? roadmap.nodes[j] : q;
      const LocalMotion m = steer(a, b, steering, robot.dof_weights);
      if (!motion_collision_free(m, scene.obstacles, robot, res)) continue;
      RoadmapEdge e;
      e.u = outgoing ? self : j;
      e.v = outgoing ? j : self;
      e.motion_cost = m.motion_length();
      e.perception_cost = edge_perception(strategy, m, K);
      extra_edges_.push_back(e);
      ++added;
    }
    return added;
  };

  start_ = static_cast<std::uint32_t>(n);
  extra_nodes_.push_back(start);
  if (attach(start_, start, true) == 0) throw NoPathError("query: start has no collision-free connection");

  if (goal.kind == GoalSpec::Kind::kConfiguration) {
    if (!config_valid(goal.q, scene, robot)) {
      throw InvalidConfigurationError("query: goal configuration is not collision-free");
    }
    const auto gi = static_cast<std::uint32_t>(n + 1);
    extra_nodes_.push_back(goal.q);
    if (attach(gi, goal.q, false) == 0) throw NoPathError("query: goal has no collision-free connection");
    goals_.push_back(gi);
    if (start == goal.q) goals_.push_back(start_);
  } else {
    if (!(goal.radius >= 0.0)) throw InvalidConfigurationError("query: goal radius must be >= 0");
    for (std::size_t i = 0; i < n; ++i) {
      if (config_distance(roadmap.nodes[i], goal.q, robot.dof_weights) <= goal.radius) {
        goals_.push_back(static_cast<std::uint32_t>(i));
      }
    }
    if (config_distance(start, goal.q, robot.dof_weights) <= goal.radius) goals_.push_back(start_);
    if (goals_.empty()) throw NoPathError("query: goal region contains no roadmap node");
  }
  configs_size_ = n + extra_nodes_.size();
  finalize();
}

const RoadmapEdge& QueryGraph::edge(std::size_t i) const {
  const std::size_t base = roadmap_->edges.size();
  return i < base ? roadmap_->edges[i] : extra_edges_[i - base];
}

const Configuration& QueryGraph::config(std::size_t node) const {
  const std::size_t base = roadmap_->nodes.size();
  return node < base ? roadmap_->nodes[node] : extra_nodes_.at(node - base);
}

void QueryGraph::finalize() {
  out_.assign(configs_size_, {});
  in_.assign(configs_size_, {});
  goal_flag_.assign(configs_size_, 0);
  for (auto g : goals_) goal_flag_[g] = 1;
  bounds_ = roadmap_->bounds;
  for (const auto& e : extra_edges_) bounds_.include(e);
  const std::size_t m = num_edges();
  costs_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const RoadmapEdge& e = edge(i);
    costs_[i] = bounds_.combined(e, alpha_);
    const auto idx = static_cast<std::uint32_t>(i);
    out_[e.u].push_back({e.v, idx});
    in_[e.v].push_back({e.u, idx});
    if (!roadmap_->directed) {
      out_[e.v].push_back({e.u, idx});
      in_[e.u].push_back({e.v, idx});
    }
  }
}

// --- files ----------------------------------------------------------------------------

std::string serialize_roadmap(const Roadmap& rm) {
  const BuildMetadata& m = rm.metadata;
  json meta = {
      {"method", m.method},
      {"seed", m.seed},
      {"requested_nodes", m.requested_nodes},
      {"k", m.k},
      {"alpha", m.alpha},
      {"K", m.K},
      {"steering", to_string(m.steering)},
      {"turning_radius", m.turning_radius},
      {"collision_resolution", m.collision_resolution},
      {"build_time_s", m.build_time_s},
      {"knn_queries", m.knn_queries},
      {"candidate_edges", m.candidate_edges},
      {"collision_checks", m.collision_checks},
      {"sampler",
       {{"free_samples", m.sampler.free_samples},
        {"projections", m.sampler.projections},
        {"projection_failures", m.sampler.projection_failures},
        {"local_candidates", m.sampler.local_candidates},
        {"cost_evaluations", m.sampler.cost_evaluations}}},
  };
  json nodes = json::array();
  for (const auto& q : rm.nodes) nodes.push_back({q.x, q.y, q.theta, q.pan, q.tilt});
  json edges = json::array();
  for (const auto& e : rm.edges) edges.push_back({e.u, e.v, e.motion_cost, e.perception_cost});
  json bounds = json::object();
  if (!rm.bounds.empty) {
    bounds = {{"motion", {rm.bounds.motion_min, rm.bounds.motion_max}},
              {"perception", {rm.bounds.perception_min, rm.bounds.perception_max}}};
  }
  json j = {{"format", kRoadmapFormatVersion}, {"kind", "roadmap"},   {"directed", rm.directed},
            {"metadata", meta},                {"bounds", bounds},    {"nodes", nodes},
            {"edges", edges}};
  return j.dump(1) + "\n";
}

Roadmap parse_roadmap(const std::string& text) {
  const std::string where = "roadmap";
  const json j = detail::parse_json_text(text, where);
  detail::check_format(j, kRoadmapFormatVersion, where);
  try {
    if (j.at("kind").get<std::string>() != "roadmap") throw ParseError("roadmap: wrong file kind");
    Roadmap rm;
    rm.directed = j.at("directed").get<bool>();
    const json& m = j.at("metadata");
    BuildMetadata& md = rm.metadata;
    md.method = m.at("method").get<std::string>();
    md.seed = m.at("seed").get<std::uint64_t>();
    md.requested_nodes = m.at("requested_nodes").get<std::size_t>();
    md.k = m.at("k").get<int>();
    md.alpha = m.at("alpha").get<double>();
    md.K = m.at("K").get<int>();
    md.steering = steering_kind_from_string(m.at("steering").get<std::string>());
    md.turning_radius = m.at("turning_radius").get<double>();
    md.collision_resolution = m.at("collision_resolution").get<double>();
    md.build_time_s = m.at("build_time_s").get<double>();
    md.knn_queries = m.at("knn_queries").get<std::size_t>();
    md.candidate_edges = m.at("candidate_edges").get<std::size_t>();
    md.collision_checks = m.at("collision_checks").get<std::size_t>();
    const json& s = m.at("sampler");
    md.sampler.free_samples = s.at("free_samples").get<std::size_t>();
    md.sampler.projections = s.at("projections").get<std::size_t>();
    md.sampler.projection_failures = s.at("projection_failures").get<std::size_t>();
    md.sampler.local_candidates = s.at("local_candidates").get<std::size_t>();
    md.sampler.cost_evaluations = s.at("cost_evaluations").get<std::size_t>();

    for (const auto& q : j.at("nodes")) {
      if (!q.is_array() || q.size() != 5) throw ParseError("roadmap: node must have 5 entries");
      rm.nodes.push_back({q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>(),
                          q[4].get<double>()});
    }
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 4) throw ParseError("roadmap: edge must have 4 entries");
      RoadmapEdge edge{e[0].get<std::uint32_t>(), e[1].get<std::uint32_t>(), e[2].get<double>(),
                       e[3].get<double>()};
      if (edge.u >= rm.nodes.size() || edge.v >= rm.nodes.size() || edge.u == edge.v) {
        throw ParseError("roadmap: edge endpoints out of range");
      }
      rm.edges.push_back(edge);
    }
    const json& b = j.at("bounds");
    if (b.contains("motion")) {
      rm.bounds.motion_min = b.at("motion").at(0).get<double>();
      rm.bounds.motion_max = b.at("motion").at(1).get<double>();
      rm.bounds.perception_min = b.at("perception").at(0).get<double>();
      rm.bounds.perception_max = b.at("perception").at(1).get<double>();
      rm.bounds.empty = false;
    }
    return rm;
  } catch (const json::exception& e) {
    throw ParseError(std::string("roadmap: ") + e.what());
  }
}

void save_roadmap(const Roadmap& roadmap, const std::filesystem::path& path) {
  detail::write_file(path, serialize_roadmap(roadmap));
}

Roadmap load_roadmap(const std::filesystem::path& path) {
  try {
    return parse_roadmap(detail::read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string roadmap_hash(const Roadmap& rm) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint8_t dir = rm.directed ? 1 : 0;
  feed(&dir, 1);
  for (const auto& q : rm.nodes) {
    for (int i = 0; i < kDof; ++i) {
      const double v = q[i];
      feed(&v, sizeof v);
    }
  }
  for (const auto& e : rm.edges) {
    feed(&e.u, sizeof e.u);
    feed(&e.v, sizeof e.v);
    feed(&e.motion_cost, sizeof e.motion_cost);
    feed(&e.perception_cost, sizeof e.perception_cost);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sgprm
