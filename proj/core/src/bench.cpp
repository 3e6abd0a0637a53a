#include "sgprm/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json_util.hpp"
#include "sgprm/errors.hpp"
#include "sgprm/parallel.hpp"

namespace sgprm {

using detail::json;

std::vector<Problem> generate_problems(const SceneGraph& scene, const RobotModel& robot, std::size_t n,
                                       std::uint64_t seed) {
  const Box& ws = scene.workspace;
  const int axis = (ws.max.x() - ws.min.x()) >= (ws.max.y() - ws.min.y()) ? 0 : 1;
  const double mid = 0.5 * (ws.min[axis] + ws.max[axis]);
  Box low = ws, high = ws;
  low.max[axis] = mid;
  high.min[axis] = mid;
  std::vector<Problem> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = make_stream(seed ^ 0x70726f626c656dULL, i);
    Problem p;
    p.start = sample_free(low, scene.obstacles, robot, rng);
    p.goal = sample_free(high, scene.obstacles, robot, rng);
    p.start.pan = p.start.tilt = 0.0;
    p.goal.pan = p.goal.tilt = 0.0;
    out.push_back(p);
  }
  return out;
}

void EvalParams::validate() const {
  if (frames < 2) throw InvalidConfigurationError("frame count must be >= 2");
  if (!(detection_threshold > 0.0 && detection_threshold <= 1.0)) {
    throw InvalidConfigurationError("detection threshold must be in (0, 1]");
  }
  if (gap_tolerance < 0) throw InvalidConfigurationError("gap tolerance must be >= 0");
}

std::vector<Configuration> resample_path(const std::vector<Configuration>& waypoints, int frames,
                                         const DofWeights& weights) {
  if (waypoints.empty()) throw DomainError("resample_path: empty path");
  if (frames < 2) throw DomainError("resample_path: need at least 2 frames");
  std::vector<double> cum(waypoints.size(), 0.0);
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    cum[i] = cum[i - 1] + config_distance(waypoints[i - 1], waypoints[i], weights);
  }
  const double total = cum.back();
  std::vector<Configuration> out;
  out.reserve(static_cast<std::size_t>(frames));
  std::size_t seg = 0;
  for (int f = 0; f < frames; ++f) {
    if (f == frames - 1) {
      out.push_back(waypoints.back());
      break;
    }
    const double s = total * static_cast<double>(f) / static_cast<double>(frames - 1);
    while (seg + 1 < waypoints.size() - 1 && cum[seg + 1] < s) ++seg;
    if (waypoints.size() == 1 || total <= 0.0) {
      out.push_back(waypoints.front());
      continue;
    }
    const double len = cum[seg + 1] - cum[seg];
    const double t = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
    out.push_back(straight_line(waypoints[seg], waypoints[seg + 1], weights).sample(t));
  }
  return out;
}

double tracked_fraction(const std::vector<char>& detected, int gap_tolerance) {
  const auto first = std::find(detected.begin(), detected.end(), char{1});
  if (first == detected.end()) return 0.0;
  std::size_t alive_count = 0, counted = 0;
  bool alive = false;
  int gap = 0;
  for (auto it = first; it != detected.end(); ++it) {
    ++counted;
    if (*it) {
      alive = true;
      gap = 0;
    } else {
      ++gap;
      alive = alive && gap <= gap_tolerance;
    }
    if (alive) ++alive_count;
  }
  return static_cast<double>(alive_count) / static_cast<double>(counted);
}

PathMetrics metrics_from_frames(std::vector<FrameRecord> frames, const SceneGraph& scene, int gap_tolerance) {
  PathMetrics m;
  const auto objects = scene.monitored_objects();
  std::size_t detections = 0;
  double score_sum = 0.0;
  for (const auto& fr : frames) {
    for (std::size_t o = 0; o < fr.detected.size(); ++o) {
      if (fr.detected[o]) {
        ++detections;
        score_sum += fr.scores[o];
      }
    }
  }
  if (!frames.empty()) m.avg_detected_objects = static_cast<double>(detections) / static_cast<double>(frames.size());
  m.avg_confidence = detections > 0 ? score_sum / static_cast<double>(detections) : 0.0;
  m.scaled_avg_confidence = m.avg_detected_objects * m.avg_confidence;

  double wsum = 0.0, tsum = 0.0;
  for (std::size_t o = 0; o < objects.size(); ++o) {
    std::vector<char> det;
    det.reserve(frames.size());
    for (const auto& fr : frames) det.push_back(fr.detected.at(o));
    tsum += objects[o].weight * tracked_fraction(det, gap_tolerance);
    wsum += objects[o].weight;
  }
  m.track_rate = wsum > 0.0 ? tsum / wsum : 0.0;
  m.frames = std::move(frames);
  return m;
}

PathMetrics evaluate_path(const PathResult& path, const SceneGraph& scene, const RobotModel& robot,
                          const OracleParams& oracle, const EvalParams& params) {
  params.validate();
  const auto objects = scene.monitored_objects();
  const auto qs = resample_path(path.waypoints, params.frames, robot.dof_weights);
  std::vector<FrameRecord> frames;
  frames.reserve(qs.size());
  for (std::size_t f = 0; f < qs.size(); ++f) {
    FrameRecord fr;
    fr.index = static_cast<int>(f);
    fr.q = qs[f];
    const CameraPose cam = forward_kinematics_unchecked(qs[f], robot);
    for (const auto& o : objects) {
      const double s = oracle_score(cam, o, scene.obstacles, oracle, robot);
      fr.scores.push_back(s);
      fr.detected.push_back(s >= params.detection_threshold ? 1 : 0);
    }
    frames.push_back(std::move(fr));
  }
  PathMetrics m = metrics_from_frames(std::move(frames), scene, params.gap_tolerance);
  m.path_length = path.motion_cost;
  return m;
}

// --- benchmark ---------------------------------------------------------------------

const MetricsRow* BenchmarkReport::aggregate(const std::string& method) const {
  for (const auto& r : rows) {
    if (r.method == method && r.problem_index < 0) return &r;
  }
  return nullptr;
}

BenchmarkReport run_benchmark(const ScenarioSpec& spec, std::shared_ptr<const PerceptionModel> model) {
  spec.eval.validate();
  spec.planner.validate();
  BenchmarkReport report;
  if (spec.problems == 0) return report;
  const auto problems = generate_problems(spec.scene, spec.robot, spec.problems, spec.seed);
  const unsigned threads = resolve_threads(spec.planner.threads);

  for (Method method : spec.methods) {
    const auto strategy = make_strategy(method, spec.scene, spec.robot, model, spec.sampler);
    const Roadmap rm = build_roadmap(*strategy, spec.scene, spec.robot, spec.planner, spec.seed);
    const double build_time = spec.record_timing ? rm.metadata.build_time_s : 0.0;

    std::vector<MetricsRow> rows(problems.size());
    parallel_for(problems.size(), threads, [&](std::size_t i) {
      MetricsRow& row = rows[i];
      row.scenario = spec.name;
      row.method = to_string(method);
      row.problem_index = static_cast<long>(i);
      row.seed = spec.seed;
      row.build_time_s = build_time;
      try {
        PlanParams pp;
        pp.alpha = spec.planner.alpha;
        const PathResult path = plan(rm, *strategy, spec.scene, spec.robot, problems[i].start,
                                     GoalSpec::configuration(problems[i].goal), pp);
        const PathMetrics m = evaluate_path(path, spec.scene, spec.robot, spec.oracle, spec.eval);
        row.solved = 1.0;
        row.avg_detected_objects = m.avg_detected_objects;
        row.track_rate = m.track_rate;
        row.avg_confidence = m.avg_confidence;
        row.scaled_avg_confidence = m.scaled_avg_confidence;
        row.path_length = m.path_length;
        row.plan_time_s = spec.record_timing ? path.plan_time_s : 0.0;
        if (path.invalid_edges > 0) row.failure = "fine re-validation flagged " + std::to_string(path.invalid_edges) + " edge(s)";
      } catch (const DomainError& e) {
        row.solved = 0.0;
        row.failure = e.what();
      }
    });

    MetricsRow agg;
    agg.scenario = spec.name;
    agg.method = to_string(method);
    agg.seed = spec.seed;
    agg.build_time_s = build_time;
    std::size_t solved = 0;
    for (const auto& r : rows) {
      if (r.solved == 0.0) continue;
      ++solved;
      agg.avg_detected_objects += r.avg_detected_objects;
      agg.track_rate += r.track_rate;
      agg.avg_confidence += r.avg_confidence;
      agg.scaled_avg_confidence += r.scaled_avg_confidence;
      agg.path_length += r.path_length;
      agg.plan_time_s += r.plan_time_s;
    }
    if (solved > 0) {
      const double n = static_cast<double>(solved);
      agg.avg_detected_objects /= n;
      agg.track_rate /= n;
      agg.avg_confidence /= n;
      agg.scaled_avg_confidence /= n;
      agg.path_length /= n;
      agg.plan_time_s /= n;
    }
    agg.solved = static_cast<double>(solved) / static_cast<double>(rows.size());
    for (auto& r : rows) report.rows.push_back(std::move(r));
    report.rows.push_back(std::move(agg));
  }
  return report;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string metrics_csv(const BenchmarkReport& report) {
  std::string out =
      "scenario,method,problem_index,solved,avg_detected_objects,track_rate,avg_confidence,"
      "scaled_avg_confidence,path_length,build_time_s,plan_time_s,seed\n";
  for (const auto& r : report.rows) {
    out += csv_field(r.scenario) + "," + csv_field(r.method) + "," +
           (r.problem_index < 0 ? std::string("all") : std::to_string(r.problem_index)) + "," + fmt(r.solved) +
           "," + fmt(r.avg_detected_objects) + "," + fmt(r.track_rate) + "," + fmt(r.avg_confidence) + "," +
           fmt(r.scaled_avg_confidence) + "," + fmt(r.path_length) + "," + fmt(r.build_time_s) + "," +
           fmt(r.plan_time_s) + "," + std::to_string(r.seed) + "\n";
  }
  return out;
}

std::string metrics_json(const BenchmarkReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json j = {{"scenario", r.scenario},
              {"method", r.method},
              {"problem_index", r.problem_index < 0 ? json("all") : json(r.problem_index)},
              {"solved", r.solved},
              {"avg_detected_objects", r.avg_detected_objects},
              {"track_rate", r.track_rate},
              {"avg_confidence", r.avg_confidence},
              {"scaled_avg_confidence", r.scaled_avg_confidence},
              {"path_length", r.path_length},
              {"build_time_s", r.build_time_s},
              {"plan_time_s", r.plan_time_s},
              {"seed", r.seed}};
    if (!r.failure.empty()) j["failure"] = r.failure;
    rows.push_back(std::move(j));
  }
  return json{{"format", 1}, {"kind", "metrics"}, {"rows", rows}}.dump(1) + "\n";
}

void save_metrics(const BenchmarkReport& report, const std::filesystem::path& csv_path) {
  detail::write_file(csv_path, metrics_csv(report));
  std::filesystem::path json_path = csv_path;
  json_path.replace_extension(".json");
  detail::write_file(json_path, metrics_json(report));
}

// --- scaling sweep ------------------------------------------------------------------

SceneGraph with_monitored_prefix(const SceneGraph& scene, std::size_t n) {
  SceneGraph s = scene;
  std::size_t seen = 0;
  for (auto& o : s.objects) {
    if (!o.monitored()) continue;
    if (seen++ >= n) o.weight = 0.0;
  }
  return s;
}

std::vector<SweepRow> run_scaling_sweep(const SweepSpec& spec, const std::shared_ptr<const PerceptionModel>& model) {
  if (spec.node_counts.empty() && spec.object_counts.empty()) throw DomainError("sweep: empty grid");
  spec.eval.validate();
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (auto p : spec.node_counts) cells.emplace_back(p, spec.fixed_objects);
  for (auto n : spec.object_counts) cells.emplace_back(spec.fixed_nodes, n);

  std::vector<SweepRow> rows;
  for (const auto& [P, N] : cells) {
    const SceneGraph scene = with_monitored_prefix(spec.scene, N);
    for (std::uint64_t seed : spec.seeds) {
      PlannerParams pp = spec.planner;
      pp.P = P;
      MopsStrategy strategy(scene, spec.robot, model, spec.sampler);
      const Roadmap rm = build_roadmap(strategy, scene, spec.robot, pp, seed);
      SweepRow row;
      row.P = P;
      row.N = N;
      row.seed = seed;
      row.nodes = rm.nodes.size();
      row.edges = rm.edges.size();
      row.build_time_s = spec.record_timing ? rm.metadata.build_time_s : 0.0;
      const auto problems = generate_problems(scene, spec.robot, spec.problems, seed);
      std::size_t solved = 0;
      double plan_time = 0.0, dbar = 0.0;
      for (const auto& pr : problems) {
        try {
          PlanParams plan_params;
          plan_params.alpha = pp.alpha;
          const PathResult path =
              plan(rm, strategy, scene, spec.robot, pr.start, GoalSpec::configuration(pr.goal), plan_params);
          const PathMetrics m = evaluate_path(path, scene, spec.robot, spec.oracle, spec.eval);
          ++solved;
          plan_time += path.plan_time_s;
          dbar += m.avg_detected_objects;
        } catch (const DomainError&) {
        }
      }
      if (solved > 0) {
        row.avg_detected_objects = dbar / static_cast<double>(solved);
        row.plan_time_s = spec.record_timing ? plan_time / static_cast<double>(solved) : 0.0;
      }
      row.solve_rate = problems.empty() ? 0.0 : static_cast<double>(solved) / static_cast<double>(problems.size());
      rows.push_back(row);
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "P,N,seed,nodes,edges,build_time_s,plan_time_s,avg_detected_objects,solve_rate\n";
  for (const auto& r : rows) {
    out += std::to_string(r.P) + "," + std::to_string(r.N) + "," + std::to_string(r.seed) + "," +
           std::to_string(r.nodes) + "," + std::to_string(r.edges) + "," + fmt(r.build_time_s) + "," +
           fmt(r.plan_time_s) + "," + fmt(r.avg_detected_objects) + "," + fmt(r.solve_rate) + "\n";
  }
  return out;
}

}  // namespace sgprm
