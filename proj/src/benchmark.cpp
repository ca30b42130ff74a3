#include "netmy/benchmark.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "netmy/io.hpp"

namespace netmy {

void parallel_for(int jobs, long n, const std::function<void(long)>& fn) {
  if (jobs < 1) jobs = 1;
  if (jobs == 1 || n <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          long i = next.fetch_add(1);
          if (i >= n) break;
          fn(i);
        }
      } catch (...) {
        errors[static_cast<size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

nlohmann::json SolveOptions::to_json() const {
  nlohmann::json j;
  j["method"] = method;
  j["invert_operator"] = operator_name(invert_op);
  j["epochs_scale"] = epochs_scale;
  j["seed"] = seed;
  j["netmy"] = netmy_schedule.to_json();
  j["netmy_weights"] = {{"fidelity", netmy_weights.fidelity}, {"nm", netmy_weights.nm},
                        {"ds", netmy_weights.ds},             {"l1_sparsity", netmy_weights.l1_sparsity},
                        {"l1_extra", netmy_weights.l1_extra}, {"tv", netmy_weights.tv}};
  j["tikhonov"] = {{"epochs", tikhonov.epochs}, {"lr", tikhonov.lr}, {"l2_weight", tikhonov.l2_weight},
                   {"weight_decay", tikhonov.weight_decay}, {"rho_init", tikhonov.rho_init}};
  j["admm"] = {{"outer_cycles", admm.outer_cycles}, {"inner_iters", admm.inner_iters},
               {"inner_lr", admm.inner_lr},         {"mu", admm.mu},
               {"l1_weight", admm.l1_weight},       {"stop_linf", admm.stop_linf},
               {"reset_inner_state", admm.reset_inner_state}};
  j["splat"] = {{"k_init", splat.k_init}, {"cap", splat.cap}, {"iters", splat.iters}, {"lr", splat.lr}};
  j["lbfgs"] = {{"history", lbfgs.opts.history}, {"max_iters", lbfgs.opts.max_iters}};
  return j;
}

const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> m{"netmy", "tikhonov", "admm", "splat", "lbfgs"};
  return m;
}

SolverResult solve_scene(const Scene& scene, const SolveOptions& options) {
  if (options.invert_op == OperatorKind::F3)
    throw InvalidInputError("solve_scene: inversion is restricted to F1/F2");
  auto scaled_long = [&](long v) {
    long s = static_cast<long>(std::llround(v * options.epochs_scale));
    return s < 1 ? 1L : s;
  };

  if (options.method == "netmy") {
    TrainingSchedule sched = options.netmy_schedule;
    sched.scale_epochs(options.epochs_scale);
    return run_netmy(scene.observed, options.invert_op, sched, options.netmy_weights, options.seed, scene.gamma);
  }
  if (options.method == "tikhonov") {
    TikhonovConfig cfg = options.tikhonov;
    cfg.epochs = scaled_long(cfg.epochs);
    return run_tikhonov(scene.observed, options.invert_op, cfg, options.seed, scene.gamma);
  }
  if (options.method == "admm") {
    AdmmConfig cfg = options.admm;
    cfg.outer_cycles = static_cast<int>(scaled_long(cfg.outer_cycles));
    return run_admm(scene.observed, options.invert_op, cfg, options.seed, scene.gamma);
  }
  if (options.method == "splat") {
    SplatConfig cfg = options.splat;
    cfg.iters = scaled_long(cfg.iters);
    return run_gaussian_splat(scene.observed, options.invert_op, cfg, options.seed, scene.gamma);
  }
  if (options.method == "lbfgs") {
    LbfgsSolverConfig cfg = options.lbfgs;
    cfg.opts.max_iters = static_cast<int>(scaled_long(cfg.opts.max_iters));
    return run_lbfgs(scene.observed, options.invert_op, cfg, options.seed, scene.gamma);
  }
  throw InvalidInputError("solve_scene: unknown method '" + options.method + "'");
}

MetricsReport evaluate_result(const Scene& scene, const SolverResult& result, OperatorKind invert_op,
                              const MetricsParams& params) {
  KernelStack stack(scene.geometry);
  Spectrum pred = invert_op == OperatorKind::F2
                      ? forward_f2(result.rho_hat, result.omega_hat, stack, scene.freqs, scene.gamma)
                      : forward_f1(result.rho_hat, result.omega_hat, stack, scene.freqs, scene.gamma);
  return compute_metrics(result.rho_hat, scene.rho_true, pred, scene.observed, params);
}

nlohmann::json BenchmarkSpec::to_json() const {
  nlohmann::json ops = nlohmann::json::array();
  for (OperatorKind op : operators) ops.push_back(operator_name(op));
  return {{"n_scenes", n_scenes},
          {"methods", methods},
          {"operators", ops},
          {"n_seeds", n_seeds},
          {"base_seed", base_seed},
          {"epochs_scale", epochs_scale},
          {"gen_operator", operator_name(gen_op)},
          {"noise_level", noise_level},
          {"geometry",
           {{"height", geometry.height},
            {"width", geometry.width},
            {"spacing", geometry.spacing},
            {"standoff", geometry.standoff}}},
          {"jobs", jobs},
          {"solver_defaults", solver_defaults.to_json()}};
}

std::vector<AggregateRow> aggregate_rows(const std::vector<EvalRow>& rows) {
  // metric extractors
  const std::vector<std::pair<std::string, std::function<double(const MetricsReport&)>>> fields = {
      {"gmsd", [](const MetricsReport& m) { return m.gmsd; }},
      {"hungarian_f1", [](const MetricsReport& m) { return m.hungarian_f1; }},
      {"swd", [](const MetricsReport& m) { return m.swd; }},
      {"density_mse", [](const MetricsReport& m) { return m.density_mse; }},
      {"masked_ssim", [](const MetricsReport& m) { return m.masked_ssim; }},
      {"noise_mse", [](const MetricsReport& m) { return m.noise_mse; }},
  };

  std::map<std::pair<std::string, std::string>, std::map<int, std::vector<const EvalRow*>>> grouped;
  std::map<std::pair<std::string, std::string>, int> failed;
  for (const EvalRow& r : rows) {
    if (!r.ok) {
      ++failed[{r.method, r.op}];
      grouped[{r.method, r.op}];  // ensure the group exists
      continue;
    }
    grouped[{r.method, r.op}][r.seed_index].push_back(&r);
  }

  std::vector<AggregateRow> out;
  for (const auto& [key, by_seed] : grouped) {
    AggregateRow agg;
    agg.method = key.first;
    agg.op = key.second;
    agg.n_failed = failed.count(key) ? failed[key] : 0;
    for (const auto& [field, get] : fields) {
      std::vector<double> seed_means;
      int n_rows = 0;
      for (const auto& [seed_idx, rws] : by_seed) {
        double acc = 0.0;
        int n = 0;
        for (const EvalRow* r : rws) {
          double v = get(r->metrics);
          if (std::isfinite(v)) {
            acc += v;
            ++n;
          }
        }
        if (n) {
          seed_means.push_back(acc / n);
          n_rows += n;
        }
      }
      agg.n_rows = n_rows;
      if (seed_means.empty()) continue;
      double mean = 0.0;
      for (double v : seed_means) mean += v;
      mean /= seed_means.size();
      double var = 0.0;
      for (double v : seed_means) var += (v - mean) * (v - mean);
      double sd = seed_means.size() > 1 ? std::sqrt(var / (seed_means.size() - 1)) : 0.0;
      agg.mean[field] = mean;
      agg.ci[field] = 1.96 * sd / std::sqrt(static_cast<double>(seed_means.size()));
    }
    out.push_back(std::move(agg));
  }
  return out;
}

void write_rows_csv(const std::vector<EvalRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string());
  out << "scene,class,method,operator,seed,ok,gmsd,hungarian_f1,swd,density_mse,masked_ssim,noise_mse,"
         "pred_peaks,true_peaks,matched,wall_seconds,error\n";
  for (const EvalRow& r : rows) {
    out << r.scene_index << ',' << r.scene_class << ',' << r.method << ',' << r.op << ',' << r.seed_index << ','
        << (r.ok ? 1 : 0) << ',';
    if (r.ok) {
      const MetricsReport& m = r.metrics;
      out << m.gmsd << ',' << m.hungarian_f1 << ',' << m.swd << ',' << m.density_mse << ',' << m.masked_ssim
          << ',' << m.noise_mse << ',' << m.pred_peaks << ',' << m.true_peaks << ',' << m.matched;
    } else {
      out << ",,,,,,,,";
    }
    out << ',' << r.wall_seconds << ',' << '"' << r.error << '"' << "\n";
  }
}

void write_summary(const std::vector<AggregateRow>& aggregates, const std::filesystem::path& csv_path,
                   const std::filesystem::path& txt_path) {
  const std::vector<std::string> fields = {"gmsd", "hungarian_f1", "swd", "density_mse", "masked_ssim",
                                           "noise_mse"};
  {
    std::ofstream out(csv_path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + csv_path.string());
    out << "method,operator,n,failed";
    for (const auto& f : fields) out << ',' << f << "_mean," << f << "_ci";
    out << "\n";
    for (const AggregateRow& a : aggregates) {
      out << a.method << ',' << a.op << ',' << a.n_rows << ',' << a.n_failed;
      for (const auto& f : fields) {
        out << ',';
        if (a.mean.count(f)) out << a.mean.at(f);
        out << ',';
        if (a.ci.count(f)) out << a.ci.at(f);
      }
      out << "\n";
    }
  }
  {
    std::ofstream out(txt_path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + txt_path.string());
    char line[256];
    std::snprintf(line, sizeof(line), "%-10s %-4s %4s %6s %10s %14s %10s %12s %12s %10s\n", "method", "op", "n",
                  "failed", "gmsd", "hungarian_f1", "swd", "density_mse", "masked_ssim", "noise_mse");
    out << line;
    for (const AggregateRow& a : aggregates) {
      auto val = [&](const std::string& f) { return a.mean.count(f) ? a.mean.at(f) : std::nan(""); };
      std::snprintf(line, sizeof(line), "%-10s %-4s %4d %6d %10.4f %14.4f %10.4f %12.6f %12.4f %10.4f\n",
                    a.method.c_str(), a.op.c_str(), a.n_rows, a.n_failed, val("gmsd"), val("hungarian_f1"),
                    val("swd"), val("density_mse"), val("masked_ssim"), val("noise_mse"));
      out << line;
    }
  }
}

BenchmarkResult run_benchmark(const BenchmarkSpec& spec, const std::filesystem::path& out_dir) {
  auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(out_dir);
  write_json(out_dir / "config.json", spec.to_json());

  // dataset (shared by every method / operator / seed)
  DatasetSpec ds;
  ds.n = spec.n_scenes;
  ds.geometry = spec.geometry;
  ds.op = spec.gen_op;
  ds.noise_level = spec.noise_level;
  ds.seed = spec.base_seed;
  generate_dataset(ds, out_dir / "dataset");

  std::vector<Scene> scenes;
  for (int i = 0; i < spec.n_scenes; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%04d", i);
    scenes.push_back(load_scene(out_dir / "dataset" / name));
  }

  struct Task {
    int scene_idx, seed_idx;
    std::string method;
    OperatorKind op;
  };
  std::vector<Task> tasks;
  for (const std::string& m : spec.methods)
    for (OperatorKind op : spec.operators)
      for (int k = 0; k < spec.n_seeds; ++k)
        for (int i = 0; i < spec.n_scenes; ++i) tasks.push_back({i, k, m, op});

  std::vector<EvalRow> rows(tasks.size());
  std::atomic<long> done{0};
  std::atomic<double> cpu_acc{0.0};

  parallel_for(spec.jobs, static_cast<long>(tasks.size()), [&](long ti) {
    const Task& t = tasks[ti];
    EvalRow& row = rows[ti];
    row.scene_index = t.scene_idx;
    row.scene_class = scenes[t.scene_idx].cls.name();
    row.method = t.method;
    row.op = operator_name(t.op);
    row.seed_index = t.seed_idx;

    char run_name[96];
    std::snprintf(run_name, sizeof(run_name), "%s_%s_seed%d", t.method.c_str(), operator_name(t.op).c_str(),
                  t.seed_idx);
    char scene_name[32];
    std::snprintf(scene_name, sizeof(scene_name), "scene_%04d", t.scene_idx);
    std::filesystem::path run_dir = out_dir / "runs" / run_name / scene_name;

    SolveOptions opt = spec.solver_defaults;
    opt.method = t.method;
    opt.invert_op = t.op;
    opt.epochs_scale = spec.epochs_scale;
    opt.seed = spec.base_seed + 1000003ULL * static_cast<uint64_t>(t.seed_idx) + static_cast<uint64_t>(t.scene_idx);

    auto task_t0 = std::chrono::steady_clock::now();
    try {
      SolverResult result = solve_scene(scenes[t.scene_idx], opt);
      save_result(result, run_dir);
      row.metrics = evaluate_result(scenes[t.scene_idx], result, t.op);
      write_json(run_dir / "metrics.json", row.metrics.to_json());
      row.ok = true;
      row.wall_seconds = result.wall_seconds;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
      row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - task_t0).count();
      std::filesystem::create_directories(run_dir);
      write_json(run_dir / "error.json", {{"error", e.what()}});
    }
    double expect = cpu_acc.load();
    double add = std::chrono::duration<double>(std::chrono::steady_clock::now() - task_t0).count();
    while (!cpu_acc.compare_exchange_weak(expect, expect + add)) {
    }
    long d = done.fetch_add(1) + 1;
    std::fprintf(stderr, "[benchmark] %ld/%zu %s/%s seed%d scene%d %s\n", d, tasks.size(), t.method.c_str(),
                 operator_name(t.op).c_str(), t.seed_idx, t.scene_idx, row.ok ? "ok" : "FAILED");
  });

  BenchmarkResult res;
  res.rows = std::move(rows);
  res.aggregates = aggregate_rows(res.rows);
  res.cpu_task_seconds = cpu_acc.load();

  std::filesystem::create_directories(out_dir / "metrics");
  write_rows_csv(res.rows, out_dir / "metrics" / "per_sample.csv");
  write_summary(res.aggregates, out_dir / "summary.csv", out_dir / "summary.txt");
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace netmy
