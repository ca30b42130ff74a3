#ifndef NETMY_BENCHMARK_HPP
#define NETMY_BENCHMARK_HPP

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "netmy/baselines.hpp"
#include "netmy/metrics.hpp"
#include "netmy/neural_field.hpp"
#include "netmy/scene.hpp"

namespace netmy {

/// Runs fn(i) for i in [0, n) on `jobs` worker threads. Tasks must be
/// independent; results identical for any worker count.
void parallel_for(int jobs, long n, const std::function<void(long)>& fn);

struct SolveOptions {
  std::string method = "netmy";  // netmy | tikhonov | admm | splat | lbfgs
  OperatorKind invert_op = OperatorKind::F2;
  double epochs_scale = 1.0;
  uint64_t seed = 0;

  TrainingSchedule netmy_schedule;
  LossWeights netmy_weights;
  TikhonovConfig tikhonov;
  AdmmConfig admm;
  SplatConfig splat;
  LbfgsSolverConfig lbfgs;

  nlohmann::json to_json() const;
};

const std::vector<std::string>& known_methods();

/// Dispatches to the chosen solver with the iteration budget scaled by
/// epochs_scale. Inversion is restricted to F1/F2.
SolverResult solve_scene(const Scene& scene, const SolveOptions& options);

/// Metrics of a stored result against the scene's ground truth. The predicted
/// spectrum for the noise-map MSE is re-synthesized under the inversion
/// operator from the (scale-corrected) reconstruction.
MetricsReport evaluate_result(const Scene& scene, const SolverResult& result, OperatorKind invert_op,
                              const MetricsParams& params = {});

struct EvalRow {
  int scene_index = 0;
  std::string scene_class;
  std::string method;
  std::string op;
  int seed_index = 0;
  bool ok = false;
  std::string error;
  MetricsReport metrics;
  double wall_seconds = 0.0;
};

struct AggregateRow {
  std::string method, op;
  int n_rows = 0, n_failed = 0;
  // per metric: mean over seed-level means, 95% CI half-width over seeds
  std::map<std::string, double> mean, ci;
};

struct BenchmarkSpec {
  int n_scenes = 32;
  std::vector<std::string> methods{"netmy", "tikhonov", "admm", "splat"};
  std::vector<OperatorKind> operators{OperatorKind::F1, OperatorKind::F2};
  int n_seeds = 1;
  uint64_t base_seed = 1;
  double epochs_scale = 1.0;
  OperatorKind gen_op = OperatorKind::F3;
  double noise_level = 0.01;
  GridGeometry geometry;
  int jobs = 1;
  SolveOptions solver_defaults;  // per-method configs (method/op fields ignored)

  nlohmann::json to_json() const;
};

struct BenchmarkResult {
  std::vector<EvalRow> rows;
  std::vector<AggregateRow> aggregates;
  double wall_seconds = 0.0;
  double cpu_task_seconds = 0.0;  // summed per-run wall time across workers
};

/// generate -> solve grid -> evaluate -> aggregate. Writes everything under
/// out_dir (dataset/, runs/, metrics/, summary.csv, summary.txt,
/// config.json). Individual run failures are recorded, not fatal.
BenchmarkResult run_benchmark(const BenchmarkSpec& spec, const std::filesystem::path& out_dir);

/// Aggregation used by run_benchmark and cmd_evaluate: mean and 95% CI over
/// seed-level means per (method, operator).
std::vector<AggregateRow> aggregate_rows(const std::vector<EvalRow>& rows);

void write_rows_csv(const std::vector<EvalRow>& rows, const std::filesystem::path& path);
void write_summary(const std::vector<AggregateRow>& aggregates, const std::filesystem::path& csv_path,
                   const std::filesystem::path& txt_path);

}  // namespace netmy

#endif
