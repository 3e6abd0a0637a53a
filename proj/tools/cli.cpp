#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "sgprm/baselines.hpp"
#include "sgprm/bench.hpp"
#include "sgprm/costmap.hpp"
#include "sgprm/errors.hpp"
#include "sgprm/perception.hpp"
#include "sgprm/roadmap.hpp"
#include "sgprm/scenegraph.hpp"
#include "sgprm/search.hpp"

namespace sgprm::cli {

namespace {

struct Common {
  std::uint64_t seed = 0;
  std::string scene;
  std::string out;
  std::string robot;
  std::string model;
  unsigned threads = 0;
  bool no_timing = false;
};

struct Planner {
  std::size_t P = 300;
  int k = 5;
  double alpha = 1.0;
  int K = 10;
  std::string steering = "straight";
  double turning_radius = 0.5;
  std::optional<double> time_limit;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Master random seed")->default_val(0);
  sub->add_option("--scene", c.scene, "Scene file (JSON)")->required();
  sub->add_option("--out", c.out, "Output file")->required();
  sub->add_option("--robot", c.robot, "Robot file (JSON); built-in defaults if omitted");
  sub->add_option("--model", c.model, "Costmap model file; the detector oracle is used if omitted");
  sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->default_val(0);
  sub->add_flag("--no-timing", c.no_timing, "Write zero for wall-clock fields");
}

void add_planner(CLI::App* sub, Planner& p) {
  sub->add_option("--P", p.P, "Node budget")->default_val(300)->check(CLI::PositiveNumber);
  sub->add_option("--k", p.k, "Neighbours per node")->default_val(5)->check(CLI::PositiveNumber);
  sub->add_option("--alpha", p.alpha, "Perception weight")->default_val(1.0)->check(CLI::NonNegativeNumber);
  sub->add_option("--K", p.K, "Edge discretization")->default_val(10)->check(CLI::Range(2, 1000000));
  sub->add_option("--steering", p.steering, "straight | reeds_shepp")
      ->default_val("straight")
      ->check(CLI::IsMember({"straight", "reeds_shepp"}));
  sub->add_option("--turning-radius", p.turning_radius, "Reeds-Shepp turning radius (m)")->default_val(0.5);
  sub->add_option("--time-limit", p.time_limit, "Sampling time limit in seconds (overrides --P)");
}

PlannerParams planner_params(const Planner& p, const Common& c) {
  PlannerParams pp;
  pp.P = p.P;
  pp.k = p.k;
  pp.alpha = p.alpha;
  pp.K = p.K;
  pp.steering.kind = steering_kind_from_string(p.steering);
  pp.steering.turning_radius = p.turning_radius;
  pp.time_limit = p.time_limit;
  pp.threads = c.threads;
  return pp;
}

RobotModel load_robot_or_default(const Common& c) {
  if (c.robot.empty()) return RobotModel{};
  return load_robot(c.robot);
}

std::shared_ptr<const PerceptionModel> load_model(const Common& c, const SceneGraph& scene, const RobotModel& robot) {
  if (c.model.empty()) return std::make_shared<OracleCostModel>(scene.obstacles, OracleParams{}, robot);
  return std::make_shared<CostmapModel>(load_costmap(c.model));
}

Configuration parse_config(const std::string& text, const char* what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw InvalidConfigurationError(std::string(what) + ": not a number: '" + item + "'");
    }
  }
  if (v.size() != 5) throw InvalidConfigurationError(std::string(what) + ": expected x,y,theta,pan,tilt");
  return {v[0], v[1], v[2], v[3], v[4]};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot write " + path);
  f << text;
  if (!f) throw DomainError("write failed for " + path);
}

std::string fmt(const char* pattern, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Perception-aware probabilistic roadmap planner", "sgprm"};
  app.require_subcommand(1);

  // gen-dataset
  Common gd;
  std::size_t count = 10000;
  auto* gen = app.add_subcommand("gen-dataset", "Sample oracle-labelled camera poses");
  add_common(gen, gd);
  gen->add_option("--count", count, "Number of samples")->default_val(10000)->check(CLI::PositiveNumber);

  // train-costmap
  Common tc;
  std::string dataset;
  TrainConfig train;
  bool full_scale = false;
  auto* trn = app.add_subcommand("train-costmap", "Fit the neural costmap to a dataset");
  add_common(trn, tc);
  trn->add_option("--dataset", dataset, "Dataset CSV")->required();
  trn->add_option("--epochs", train.epochs, "Training epochs")->default_val(train.epochs)->check(CLI::PositiveNumber);
  trn->add_option("--batch", train.batch_size, "Mini-batch size")->default_val(train.batch_size)->check(CLI::PositiveNumber);
  trn->add_option("--lr", train.learning_rate, "Learning rate")->default_val(train.learning_rate);
  trn->add_option("--hidden", train.hidden_sizes, "Hidden layer widths")->delimiter(',');
  trn->add_flag("--full-scale", full_scale, "Five 256-unit hidden layers");

  // build-prm
  Common bp;
  Planner bpp;
  std::string method_name = "mops_prm";
  auto* bld = app.add_subcommand("build-prm", "Build a roadmap");
  add_common(bld, bp);
  add_planner(bld, bpp);
  bld->add_option("--method", method_name, "mops_prm or a baseline name")->default_val("mops_prm");

  // plan
  Common pl;
  std::string roadmap_file, start_text, goal_text, region_text, heuristic = "hop";
  std::optional<double> plan_alpha;
  auto* pln = app.add_subcommand("plan", "Query a roadmap");
  add_common(pln, pl);
  pln->add_option("--roadmap", roadmap_file, "Roadmap file")->required();
  pln->add_option("--start", start_text, "Start x,y,theta,pan,tilt")->required();
  auto* goal_opt = pln->add_option("--goal", goal_text, "Goal x,y,theta,pan,tilt");
  auto* region_opt = pln->add_option("--goal-region", region_text, "Goal ball x,y,theta,pan,tilt,radius");
  goal_opt->excludes(region_opt);
  pln->add_option("--alpha", plan_alpha, "Perception weight (roadmap value if omitted)");
  pln->add_option("--heuristic", heuristic, "hop | zero | euclidean")
      ->default_val("hop")
      ->check(CLI::IsMember({"hop", "zero", "dijkstra", "euclidean"}));

  // eval-path
  Common ev;
  std::string path_file;
  EvalParams eval;
  auto* evl = app.add_subcommand("eval-path", "Detection and tracking metrics of a path");
  add_common(evl, ev);
  evl->add_option("--path", path_file, "Path file")->required();
  evl->add_option("--frames", eval.frames, "Frames along the path")->default_val(eval.frames);
  evl->add_option("--tau", eval.detection_threshold, "Detection threshold")->default_val(eval.detection_threshold);
  evl->add_option("--gap", eval.gap_tolerance, "Tracker gap tolerance (frames)")->default_val(eval.gap_tolerance);

  // benchmark
  Common bm;
  Planner bmp;
  std::size_t problems = 20;
  std::string name;
  std::vector<std::string> methods;
  auto* bch = app.add_subcommand("benchmark", "Compare all methods on random problems");
  add_common(bch, bm);
  add_planner(bch, bmp);
  bch->add_option("--problems", problems, "Number of start/goal problems")->default_val(20);
  bch->add_option("--name", name, "Scenario name (scene file stem if omitted)");
  bch->add_option("--methods", methods, "Subset of methods")->delimiter(',');
  bch->add_option("--frames", eval.frames, "Frames along each path")->default_val(eval.frames);

  // sweep
  Common sw;
  Planner swp;
  SweepSpec sweep;
  std::size_t sweep_seeds = 5;
  auto* swe = app.add_subcommand("sweep", "Build time and detections versus roadmap size and object count");
  add_common(swe, sw);
  add_planner(swe, swp);
  swe->add_option("--nodes", sweep.node_counts, "Roadmap sizes at fixed object count")->delimiter(',');
  swe->add_option("--objects", sweep.object_counts, "Object counts at fixed roadmap size")->delimiter(',');
  swe->add_option("--fixed-objects", sweep.fixed_objects, "Object count for the size sweep")->default_val(5);
  swe->add_option("--fixed-nodes", sweep.fixed_nodes, "Roadmap size for the object sweep")->default_val(300);
  swe->add_option("--seeds", sweep_seeds, "Seeds per cell")->default_val(5)->check(CLI::PositiveNumber);
  swe->add_option("--problems", sweep.problems, "Problems per cell")->default_val(5);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return 0;
    const auto chosen = app.get_subcommands();
    err << (chosen.empty() ? app.help() : chosen.front()->help());
    return 2;
  }

  try {
    if (*gen) {
      const SceneGraph scene = load_scene(gd.scene);
      const RobotModel robot = load_robot_or_default(gd);
      const auto samples = generate_dataset(scene, robot, OracleParams{}, count, gd.seed);
      save_dataset(samples, gd.out);
      out << "gen-dataset: wrote " << samples.size() << " samples to " << gd.out << "\n";
    } else if (*trn) {
      const SceneGraph scene = load_scene(tc.scene);
      const auto samples = load_dataset(dataset);
      TrainConfig cfg = full_scale ? TrainConfig::full_scale() : train;
      if (full_scale) {
        cfg.epochs = train.epochs;
        cfg.batch_size = train.batch_size;
        cfg.learning_rate = train.learning_rate;
      }
      cfg.seed = tc.seed;
      auto [model, report] = train_costmap(samples, scene, cfg);
      save_costmap(model, tc.out);
      out << "train-costmap: " << samples.size() << " samples, held-out mse "
          << fmt("%.6g", report.holdout_mse.back()) << ", model written to " << tc.out << "\n";
    } else if (*bld) {
      const SceneGraph scene = load_scene(bp.scene);
      const RobotModel robot = load_robot_or_default(bp);
      const auto model = load_model(bp, scene, robot);
      const auto strategy = make_strategy(method_from_string(method_name), scene, robot, model);
      Roadmap rm = build_roadmap(*strategy, scene, robot, planner_params(bpp, bp), bp.seed);
      if (bp.no_timing) rm.metadata.build_time_s = 0.0;
      save_roadmap(rm, bp.out);
      out << "build-prm: " << method_name << " " << rm.nodes.size() << " nodes, " << rm.edges.size()
          << " edges, hash " << roadmap_hash(rm) << ", written to " << bp.out << "\n";
    } else if (*pln) {
      const SceneGraph scene = load_scene(pl.scene);
      const RobotModel robot = load_robot_or_default(pl);
      const Roadmap rm = load_roadmap(roadmap_file);
      const auto model = load_model(pl, scene, robot);
      const auto strategy = make_strategy(method_from_string(rm.metadata.method), scene, robot, model);
      GoalSpec goal;
      if (!goal_text.empty()) {
        goal = GoalSpec::configuration(parse_config(goal_text, "--goal"));
      } else if (!region_text.empty()) {
        const auto pos = region_text.rfind(',');
        if (pos == std::string::npos) throw InvalidConfigurationError("--goal-region: expected 6 numbers");
        double radius = 0.0;
        try {
          radius = std::stod(region_text.substr(pos + 1));
        } catch (const std::logic_error&) {
          throw InvalidConfigurationError("--goal-region: bad radius");
        }
        goal = GoalSpec::region(parse_config(region_text.substr(0, pos), "--goal-region"), radius);
      } else {
        err << "plan: one of --goal or --goal-region is required\n";
        return 2;
      }
      PlanParams pp;
      pp.alpha = plan_alpha.value_or(rm.metadata.alpha);
      pp.heuristic = heuristic_kind_from_string(heuristic);
      PathResult path = plan(rm, *strategy, scene, robot, parse_config(start_text, "--start"), goal, pp);
      path.seed = pl.seed;
      if (pl.no_timing) path.plan_time_s = 0.0;
      save_path(path, pl.out);
      out << "plan: " << path.node_sequence.size() << " nodes, cost " << fmt("%.6g", path.total_cost)
          << ", length " << fmt("%.6g", path.motion_cost) << ", written to " << pl.out << "\n";
    } else if (*evl) {
      const SceneGraph scene = load_scene(ev.scene);
      const RobotModel robot = load_robot_or_default(ev);
      const PathResult path = load_path(path_file);
      const PathMetrics m = evaluate_path(path, scene, robot, OracleParams{}, eval);
      std::ostringstream js;
      js << "{\n \"format\": 1,\n \"kind\": \"path_metrics\",\n"
         << " \"avg_detected_objects\": " << fmt("%.17g", m.avg_detected_objects) << ",\n"
         << " \"track_rate\": " << fmt("%.17g", m.track_rate) << ",\n"
         << " \"avg_confidence\": " << fmt("%.17g", m.avg_confidence) << ",\n"
         << " \"scaled_avg_confidence\": " << fmt("%.17g", m.scaled_avg_confidence) << ",\n"
         << " \"path_length\": " << fmt("%.17g", m.path_length) << ",\n"
         << " \"frames\": " << m.frames.size() << "\n}\n";
      write_text(ev.out, js.str());
      out << "eval-path: D=" << fmt("%.4f", m.avg_detected_objects) << " track=" << fmt("%.4f", m.track_rate)
          << " C=" << fmt("%.4f", m.avg_confidence) << ", written to " << ev.out << "\n";
    } else if (*bch) {
      ScenarioSpec spec;
      spec.scene = load_scene(bm.scene);
      spec.robot = load_robot_or_default(bm);
      spec.name = name.empty() ? std::filesystem::path(bm.scene).stem().string() : name;
      spec.planner = planner_params(bmp, bm);
      spec.problems = problems;
      spec.seed = bm.seed;
      spec.eval = eval;
      spec.record_timing = !bm.no_timing;
      if (!methods.empty()) {
        spec.methods.clear();
        for (const auto& m : methods) spec.methods.push_back(method_from_string(m));
      }
      const auto model = load_model(bm, spec.scene, spec.robot);
      const BenchmarkReport report = run_benchmark(spec, model);
      save_metrics(report, bm.out);
      out << "benchmark: " << spec.methods.size() << " methods x " << problems << " problems";
      for (Method m : spec.methods) {
        if (const auto* row = report.aggregate(to_string(m))) {
          out << "; " << to_string(m) << " D=" << fmt("%.3f", row->avg_detected_objects)
              << " solved=" << fmt("%.2f", row->solved);
        }
      }
      out << ", written to " << bm.out << "\n";
    } else if (*swe) {
      sweep.scene = load_scene(sw.scene);
      sweep.robot = load_robot_or_default(sw);
      sweep.planner = planner_params(swp, sw);
      sweep.record_timing = !sw.no_timing;
      sweep.seeds.clear();
      for (std::size_t i = 0; i < sweep_seeds; ++i) sweep.seeds.push_back(sw.seed + i);
      const auto model = load_model(sw, sweep.scene, sweep.robot);
      const auto rows = run_scaling_sweep(sweep, model);
      write_text(sw.out, sweep_csv(rows));
      out << "sweep: " << rows.size() << " rows written to " << sw.out << "\n";
    }
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace sgprm::cli
