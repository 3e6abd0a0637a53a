#pragma once

// Benchmark harness: start/goal problems, frame-based path evaluation with a
// gap-tolerant continuity tracker, the method comparison table and the
// roadmap-size / object-count sweep.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "sgprm/baselines.hpp"
#include "sgprm/perception.hpp"
#include "sgprm/roadmap.hpp"
#include "sgprm/search.hpp"

namespace sgprm {

struct Problem {
  Configuration start;
  Configuration goal;
};

/// Starts in the lower half of the workspace's longest axis, goals in the upper
/// half; pan and tilt zero. Deterministic per seed.
std::vector<Problem> generate_problems(const SceneGraph& scene, const RobotModel& robot, std::size_t n,
                                       std::uint64_t seed);

struct EvalParams {
  int frames = 50;
  double detection_threshold = 0.25;
  int gap_tolerance = 3;

  void validate() const;
};

struct FrameRecord {
  int index = 0;
  Configuration q;
  std::vector<double> scores;    // per monitored object, file order
  std::vector<char> detected;    // scores[i] >= detection_threshold
};

struct PathMetrics {
  double avg_detected_objects = 0.0;
  double track_rate = 0.0;
  double avg_confidence = 0.0;
  double scaled_avg_confidence = 0.0;
  double path_length = 0.0;
  std::vector<FrameRecord> frames;
};

/// `frames` configurations equally spaced in weighted configuration arc length
/// along the waypoint polyline.
std::vector<Configuration> resample_path(const std::vector<Configuration>& waypoints, int frames,
                                         const DofWeights& weights);

/// Fraction of frames, counted from the first detection, on which the track is
/// alive: detected, or alive on the previous frame with the current run of
/// misses no longer than `gap_tolerance`. Zero if never detected.
double tracked_fraction(const std::vector<char>& detected, int gap_tolerance);

/// Detection, tracking and confidence metrics from frame records.
PathMetrics metrics_from_frames(std::vector<FrameRecord> frames, const SceneGraph& scene, int gap_tolerance);

PathMetrics evaluate_path(const PathResult& path, const SceneGraph& scene, const RobotModel& robot,
                          const OracleParams& oracle, const EvalParams& params);

struct ScenarioSpec {
  std::string name = "scenario";
  SceneGraph scene;
  RobotModel robot;
  PlannerParams planner;
  SamplerParams sampler;
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  std::size_t problems = 20;
  std::uint64_t seed = 0;
  EvalParams eval;
  OracleParams oracle;
  bool record_timing = true;
};

struct MetricsRow {
  std::string scenario;
  std::string method;
  long problem_index = -1;  // -1 marks the aggregate row
  double solved = 0.0;      // 0/1 per problem, solve rate on the aggregate row
  double avg_detected_objects = 0.0;
  double track_rate = 0.0;
  double avg_confidence = 0.0;
  double scaled_avg_confidence = 0.0;
  double path_length = 0.0;
  double build_time_s = 0.0;
  double plan_time_s = 0.0;
  std::uint64_t seed = 0;
  std::string failure;
};

struct BenchmarkReport {
  std::vector<MetricsRow> rows;

  /// Aggregate row of `method`, or nullptr.
  const MetricsRow* aggregate(const std::string& method) const;
};

/// Builds one roadmap per method from the same seed, solves every problem and
/// evaluates the solved paths with the detector oracle.
BenchmarkReport run_benchmark(const ScenarioSpec& spec, std::shared_ptr<const PerceptionModel> model);

std::string metrics_csv(const BenchmarkReport& report);
std::string metrics_json(const BenchmarkReport& report);
void save_metrics(const BenchmarkReport& report, const std::filesystem::path& csv_path);

struct SweepRow {
  std::size_t P = 0;
  std::size_t N = 0;
  std::uint64_t seed = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double build_time_s = 0.0;
  double plan_time_s = 0.0;
  double avg_detected_objects = 0.0;
  double solve_rate = 0.0;
};

struct SweepSpec {
  SceneGraph scene;  // objects beyond the first N are set to weight 0
  RobotModel robot;
  PlannerParams planner;
  SamplerParams sampler;
  std::vector<std::size_t> node_counts{50, 150, 300};
  std::size_t fixed_objects = 5;
  std::vector<std::size_t> object_counts{2, 5, 8};
  std::size_t fixed_nodes = 300;
  std::vector<std::uint64_t> seeds{0};
  std::size_t problems = 5;
  EvalParams eval;
  OracleParams oracle;
  bool record_timing = true;
};

/// Sweeps P at N = fixed_objects, then N at P = fixed_nodes, once per seed.
std::vector<SweepRow> run_scaling_sweep(const SweepSpec& spec, const std::shared_ptr<const PerceptionModel>& model);

/// Scene with only the first n objects monitored (weight 0 for the rest).
SceneGraph with_monitored_prefix(const SceneGraph& scene, std::size_t n);

std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace sgprm
