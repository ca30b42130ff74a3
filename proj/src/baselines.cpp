#include "netmy/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

#include "netmy/optim.hpp"
#include "netmy/rng.hpp"

namespace netmy {

namespace {

using Eigen::VectorXd;

ScalarField field_from_segment(const VectorXd& x, long offset, int rows, int cols) {
  ScalarField f(rows, cols);
  for (long i = 0; i < f.size(); ++i) f[i] = x[offset + i];
  return f;
}

void segment_from_field(VectorXd& x, long offset, const ScalarField& f) {
  for (long i = 0; i < f.size(); ++i) x[offset + i] = f[i];
}

void finish_with_scale_correction(SolverResult& r, const Spectrum& obs, OperatorKind op,
                                  const KernelStack& kernels, double gamma) {
  try {
    auto [scaled, alpha] = scale_correction(r.rho_hat, r.omega_hat, obs, op, kernels, gamma);
    r.rho_hat = std::move(scaled);
    r.alpha = alpha;
  } catch (const SolverError&) {
    // an all-zero reconstruction has no predicted energy to anchor on
    r.alpha = 1.0;
    r.config["scale_correction_degenerate"] = true;
  }
}

}  // namespace

double implied_single_pixel_amplitude(const Spectrum& obs, OperatorKind op, const KernelStack& kernels,
                                      double gamma) {
  const GridGeometry& g = kernels.geometry();
  ScalarField impulse(g.height, g.width, 0.0);
  impulse.at(g.height / 2, g.width / 2) = 1.0;
  ScalarField omega(g.height, g.width, 2.0);
  Spectrum unit = op == OperatorKind::F2 ? forward_f2(impulse, omega, kernels, obs.freqs, gamma)
                                         : forward_f1(impulse, omega, kernels, obs.freqs, gamma);
  double e1 = unit.total_energy();
  double eobs = obs.total_energy();
  if (!(e1 > 0.0)) throw SolverError("implied_single_pixel_amplitude: unit response has no energy");
  double ratio = std::max(eobs, 0.0) / e1;
  return op == OperatorKind::F2 ? ratio : std::sqrt(ratio);
}

SolverResult run_tikhonov(const Spectrum& obs, OperatorKind op, const TikhonovConfig& config, uint64_t seed,
                          double gamma) {
  auto t0 = std::chrono::steady_clock::now();
  const GridGeometry& g = obs.geometry;
  KernelStack stack(g);
  Objective objective(obs, op, stack, gamma, config.weights, Stage::coarse);

  const long n = g.pixels();
  VectorXd x(2 * n);
  x.head(n).setConstant(config.rho_init);
  x.tail(n).setConstant(config.omega_init);

  AdamW opt;
  opt.decoupled = false;  // classic Adam: L2 folded into the gradient
  opt.reset(x.size());

  SolverResult r;
  r.config = {{"solver", "tikhonov"}, {"operator", operator_name(op)}, {"epochs", config.epochs},
              {"lr", config.lr},      {"weight_decay", config.weight_decay}, {"l2_weight", config.l2_weight},
              {"rho_init", config.rho_init}, {"seed", seed}, {"gamma", gamma}};

  ScalarField d_rho, d_omega;
  VectorXd grad(2 * n);
  for (long t = 0; t < config.epochs; ++t) {
    ScalarField rho = field_from_segment(x, 0, g.height, g.width);
    ScalarField omega = field_from_segment(x, n, g.height, g.width);
    LossBreakdown bd = objective.eval(rho, omega, &d_rho, &d_omega);
    double l2 = 0.0;
    for (long i = 0; i < n; ++i) l2 += rho[i] * rho[i];
    bd.total += config.l2_weight * l2;
    if (!std::isfinite(bd.total)) throw SolverError("run_tikhonov: NaN loss at epoch " + std::to_string(t));
    for (long i = 0; i < n; ++i) {
      grad[i] = d_rho[i] + 2.0 * config.l2_weight * rho[i];
      grad[n + i] = d_omega[i];
    }
    opt.step(x, grad, config.lr, config.weight_decay, config.clip);
    for (long i = 0; i < n; ++i)
      if (x[i] < 0.0) x[i] = 0.0;  // negativity clamp
    r.trace.push_back(bd);
    ++r.iterations;
  }

  r.rho_hat = field_from_segment(x, 0, g.height, g.width);
  r.omega_hat = field_from_segment(x, n, g.height, g.width);
  finish_with_scale_correction(r, obs, op, stack, gamma);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

SolverResult run_admm(const Spectrum& obs, OperatorKind op, const AdmmConfig& config, uint64_t seed,
                      double gamma) {
  auto t0 = std::chrono::steady_clock::now();
  const GridGeometry& g = obs.geometry;
  KernelStack stack(g);

  LossWeights smooth = baseline_weights();
  smooth.fidelity = config.fidelity_weight;
  smooth.l1_sparsity = 0.0;  // nonsmooth part lives in the z-prox
  smooth.l1_extra = 0.0;
  smooth.tv = config.tv_weight;
  Objective objective(obs, op, stack, gamma, smooth, Stage::coarse);

  const long n = g.pixels();
  double rho_max = config.rho_max_factor * implied_single_pixel_amplitude(obs, op, stack, gamma);

  VectorXd x(2 * n);
  x.head(n).setConstant(config.rho_init);
  x.tail(n).setConstant(config.omega_init);
  ScalarField z(g.height, g.width, config.rho_init);
  ScalarField u(g.height, g.width, 0.0);

  AdamW opt;
  opt.decoupled = false;
  opt.reset(x.size());

  SolverResult r;
  r.config = {{"solver", "admm"},   {"operator", operator_name(op)}, {"outer_cycles", config.outer_cycles},
              {"inner_iters", config.inner_iters}, {"mu", config.mu}, {"l1_weight", config.l1_weight},
              {"rho_max", rho_max}, {"seed", seed}, {"gamma", gamma}};

  const double shrink = config.l1_weight / config.mu;
  double linf = std::numeric_limits<double>::infinity();
  bool converged = false;
  ScalarField d_rho, d_omega;
  VectorXd grad(2 * n);

  for (int cycle = 0; cycle < config.outer_cycles && !converged; ++cycle) {
    if (config.reset_inner_state) opt.reset(x.size());
    for (int it = 0; it < config.inner_iters; ++it) {
      ScalarField rho = field_from_segment(x, 0, g.height, g.width);
      ScalarField omega = field_from_segment(x, n, g.height, g.width);
      LossBreakdown bd = objective.eval(rho, omega, &d_rho, &d_omega);
      double pen = 0.0;
      for (long i = 0; i < n; ++i) {
        double d = rho[i] - z[i] + u[i];
        pen += d * d;
        grad[i] = d_rho[i] + config.mu * d;
        grad[n + i] = d_omega[i];
      }
      bd.total += 0.5 * config.mu * pen;
      if (!std::isfinite(bd.total))
        throw SolverError("run_admm: NaN loss at cycle " + std::to_string(cycle));
      opt.step(x, grad, config.inner_lr, 0.0, config.clip);
      r.trace.push_back(bd);
      ++r.iterations;
    }

    // z-update: box-projected soft threshold of rho + u; dual ascent on u
    linf = 0.0;
    for (long i = 0; i < n; ++i) {
      double v = x[i] + u[i];
      double s = v > shrink ? v - shrink : (v < -shrink ? v + shrink : 0.0);
      s = std::clamp(s, 0.0, rho_max);
      z[i] = s;
      u[i] += x[i] - z[i];
      linf = std::max(linf, std::abs(x[i] - z[i]));
    }
    if (linf < config.stop_linf) converged = true;
  }

  r.config["primal_residual_linf"] = linf;
  r.config["max_cycles_reached"] = !converged;

  r.rho_hat = z;  // the box-feasible split variable
  r.omega_hat = field_from_segment(x, n, g.height, g.width);
  finish_with_scale_correction(r, obs, op, stack, gamma);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

ScalarField rasterize_splats(const std::vector<SplatPrimitive>& splats, int rows, int cols) {
  ScalarField f(rows, cols, 0.0);
  for (const SplatPrimitive& s : splats) {
    for (int r = 0; r < rows; ++r) {
      double dy = (r - s.cy) / s.sy;
      for (int c = 0; c < cols; ++c) {
        double dx = (c - s.cx) / s.sx;
        f.at(r, c) += s.amplitude * std::exp(-0.5 * (dy * dy + dx * dx));
      }
    }
  }
  return f;
}

namespace {

// flat layout per primitive: cy, cx, log sy, log sx, amplitude
VectorXd pack_splats(const std::vector<SplatPrimitive>& s, const ScalarField& omega) {
  VectorXd x(5 * static_cast<long>(s.size()) + omega.size());
  for (size_t k = 0; k < s.size(); ++k) {
    x[5 * k + 0] = s[k].cy;
    x[5 * k + 1] = s[k].cx;
    x[5 * k + 2] = std::log(s[k].sy);
    x[5 * k + 3] = std::log(s[k].sx);
    x[5 * k + 4] = s[k].amplitude;
  }
  segment_from_field(x, 5 * static_cast<long>(s.size()), omega);
  return x;
}

std::vector<SplatPrimitive> unpack_splats(const VectorXd& x, size_t count) {
  std::vector<SplatPrimitive> s(count);
  for (size_t k = 0; k < count; ++k) {
    s[k].cy = x[5 * k + 0];
    s[k].cx = x[5 * k + 1];
    s[k].sy = std::exp(x[5 * k + 2]);
    s[k].sx = std::exp(x[5 * k + 3]);
    s[k].amplitude = x[5 * k + 4];
  }
  return s;
}

}  // namespace

SolverResult run_gaussian_splat(const Spectrum& obs, OperatorKind op, const SplatConfig& config, uint64_t seed,
                                double gamma) {
  auto t0 = std::chrono::steady_clock::now();
  const GridGeometry& g = obs.geometry;
  KernelStack stack(g);
  Objective objective(obs, op, stack, gamma, config.weights, Stage::coarse);
  Rng rng(seed);

  // jittered-grid initialization
  std::vector<SplatPrimitive> splats;
  int side = static_cast<int>(std::round(std::sqrt(static_cast<double>(config.k_init))));
  for (int i = 0; i < config.k_init; ++i) {
    int gr = i / side, gc = i % side;
    SplatPrimitive s;
    s.cy = (gr + 0.5) * g.height / side + rng.uniform(-1.0, 1.0);
    s.cx = (gc + 0.5) * g.width / side + rng.uniform(-1.0, 1.0);
    s.sy = s.sx = config.init_sigma_px;
    s.amplitude = config.init_amp;
    splats.push_back(s);
  }
  ScalarField omega(g.height, g.width, config.omega_init);

  SolverResult r;
  r.config = {{"solver", "splat"}, {"operator", operator_name(op)}, {"iters", config.iters},
              {"k_init", config.k_init}, {"cap", config.cap}, {"lr", config.lr}, {"seed", seed},
              {"gamma", gamma}};

  VectorXd x = pack_splats(splats, omega);
  AdamW opt;
  opt.decoupled = false;
  opt.reset(x.size());

  size_t max_count = 0;
  for (long t = 1; t <= config.iters; ++t) {
    size_t kcount = splats.size();
    splats = unpack_splats(x, kcount);
    for (SplatPrimitive& s : splats) s.amplitude = std::max(s.amplitude, 0.0);
    omega = field_from_segment(x, 5 * static_cast<long>(kcount), g.height, g.width);

    ScalarField rho = rasterize_splats(splats, g.height, g.width);
    ScalarField d_rho, d_omega;
    LossBreakdown bd = objective.eval(rho, omega, &d_rho, &d_omega);
    if (!std::isfinite(bd.total)) throw SolverError("run_gaussian_splat: NaN loss at iter " + std::to_string(t));
    r.trace.push_back(bd);
    ++r.iterations;

    // analytic chain rule through the rasterization
    VectorXd grad = VectorXd::Zero(x.size());
    for (size_t k = 0; k < kcount; ++k) {
      const SplatPrimitive& s = splats[k];
      double gcy = 0.0, gcx = 0.0, glsy = 0.0, glsx = 0.0, ga = 0.0;
      for (int rr = 0; rr < g.height; ++rr) {
        double ddy = (rr - s.cy) / s.sy;
        for (int cc = 0; cc < g.width; ++cc) {
          double ddx = (cc - s.cx) / s.sx;
          double e = std::exp(-0.5 * (ddy * ddy + ddx * ddx));
          double w = d_rho.at(rr, cc);
          ga += w * e;
          double ae = s.amplitude * e * w;
          gcy += ae * ddy / s.sy;
          gcx += ae * ddx / s.sx;
          glsy += ae * ddy * ddy;
          glsx += ae * ddx * ddx;
        }
      }
      grad[5 * k + 0] = gcy;
      grad[5 * k + 1] = gcx;
      grad[5 * k + 2] = glsy;
      grad[5 * k + 3] = glsx;
      grad[5 * k + 4] = ga;
    }
    for (long i = 0; i < omega.size(); ++i) grad[5 * static_cast<long>(kcount) + i] = d_omega[i];

    opt.step(x, grad, config.lr, 0.0, config.clip);
    for (size_t k = 0; k < kcount; ++k) x[5 * k + 4] = std::max(x[5 * k + 4], 0.0);

    // prune / split / clone / merge
    if (t % config.schedule_every == 0 && t < config.iters) {
      std::vector<SplatPrimitive> cur = unpack_splats(x, kcount);
      omega = field_from_segment(x, 5 * static_cast<long>(kcount), g.height, g.width);
      double amax = 0.0;
      for (const auto& s : cur) amax = std::max(amax, s.amplitude);

      std::vector<double> gstats;
      for (size_t k = 0; k < kcount; ++k)
        gstats.push_back(std::hypot(grad[5 * k + 0], grad[5 * k + 1]));
      std::vector<double> sorted = gstats;
      std::sort(sorted.begin(), sorted.end());
      double med = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];

      std::vector<SplatPrimitive> next;
      for (size_t k = 0; k < cur.size(); ++k) {
        SplatPrimitive s = cur[k];
        if (s.amplitude < config.prune_amp_frac * amax) continue;  // prune
        double smax = std::max(s.sy, s.sx);
        if (smax > config.split_sigma_px) {  // split along the wider axis
          SplatPrimitive a = s, b = s;
          a.amplitude = b.amplitude = 0.5 * s.amplitude;
          if (s.sy >= s.sx) {
            a.cy -= 0.5 * s.sy;
            b.cy += 0.5 * s.sy;
            a.sy = b.sy = s.sy / 1.6;
          } else {
            a.cx -= 0.5 * s.sx;
            b.cx += 0.5 * s.sx;
            a.sx = b.sx = s.sx / 1.6;
          }
          next.push_back(a);
          next.push_back(b);
          continue;
        }
        if (med > 0.0 && gstats[k] > config.clone_grad_factor * med) {  // clone toward the gradient
          SplatPrimitive c = s;
          double gn = gstats[k];
          c.cy -= 0.5 * grad[5 * k + 0] / gn;
          c.cx -= 0.5 * grad[5 * k + 1] / gn;
          c.amplitude = s.amplitude *= 0.5;
          next.push_back(s);
          next.push_back(c);
          continue;
        }
        next.push_back(s);
      }

      // merge close pairs
      for (size_t i = 0; i < next.size(); ++i) {
        for (size_t j = i + 1; j < next.size();) {
          double d = std::hypot(next[i].cy - next[j].cy, next[i].cx - next[j].cx);
          if (d < config.merge_dist_px) {
            double wsum = next[i].amplitude + next[j].amplitude;
            if (wsum > 0.0) {
              double wi = next[i].amplitude / wsum, wj = next[j].amplitude / wsum;
              next[i].cy = wi * next[i].cy + wj * next[j].cy;
              next[i].cx = wi * next[i].cx + wj * next[j].cx;
              next[i].sy = wi * next[i].sy + wj * next[j].sy;
              next[i].sx = wi * next[i].sx + wj * next[j].sx;
            }
            next[i].amplitude = wsum;
            next.erase(next.begin() + static_cast<long>(j));
          } else {
            ++j;
          }
        }
      }

      if (next.size() > static_cast<size_t>(config.cap)) {  // keep the strongest
        std::stable_sort(next.begin(), next.end(),
                         [](const SplatPrimitive& a, const SplatPrimitive& b) { return a.amplitude > b.amplitude; });
        next.resize(config.cap);
      }
      if (next.empty()) {  // restart from one central primitive
        SplatPrimitive s;
        s.cy = 0.5 * g.height;
        s.cx = 0.5 * g.width;
        s.sy = s.sx = 2.0;
        s.amplitude = 1.0;
        next.push_back(s);
      }
      splats = next;
      x = pack_splats(splats, omega);
      opt.reset(x.size());  // moment state cannot follow a reshaped primitive set
    }
    max_count = std::max(max_count, splats.size());
  }

  splats = unpack_splats(x, splats.size());
  for (SplatPrimitive& s : splats) s.amplitude = std::max(s.amplitude, 0.0);
  r.config["max_primitive_count"] = max_count;
  r.rho_hat = rasterize_splats(splats, g.height, g.width);
  r.omega_hat = field_from_segment(x, 5 * static_cast<long>(splats.size()), g.height, g.width);
  finish_with_scale_correction(r, obs, op, stack, gamma);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

LbfgsReport lbfgs_minimize(const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& fg,
                           Eigen::VectorXd& x, const LbfgsOptions& options, const Eigen::VectorXd* lower,
                           const Eigen::VectorXd* upper) {
  const long n = x.size();
  auto project = [&](VectorXd& v) {
    if (lower)
      for (long i = 0; i < n; ++i) v[i] = std::max(v[i], (*lower)[i]);
    if (upper)
      for (long i = 0; i < n; ++i) v[i] = std::min(v[i], (*upper)[i]);
  };
  auto active_set = [&](const VectorXd& v) {
    std::vector<bool> a(static_cast<size_t>(n), false);
    for (long i = 0; i < n; ++i) {
      bool lo = lower && v[i] <= (*lower)[i];
      bool hi = upper && v[i] >= (*upper)[i];
      a[static_cast<size_t>(i)] = lo || hi;
    }
    return a;
  };

  project(x);
  VectorXd g(n);
  double f = fg(x, g);
  std::deque<VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<bool> act = active_set(x);

  LbfgsReport rep;
  for (int iter = 0; iter < options.max_iters; ++iter) {
    if (g.norm() < options.grad_tol) {
      rep.converged = true;
      break;
    }

    // two-loop recursion
    VectorXd q = g;
    std::vector<double> alpha(s_hist.size());
    for (long i = static_cast<long>(s_hist.size()) - 1; i >= 0; --i) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      double gamma_scale = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma_scale;
    }
    for (size_t i = 0; i < s_hist.size(); ++i) {
      double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    VectorXd d = -q;
    if (d.dot(g) >= 0.0) d = -g;  // enforce descent

    // strong Wolfe line search (bracket + zoom)
    double dg0 = d.dot(g);
    double step = 1.0;
    double f_new = f;
    VectorXd x_new = x, g_new = g;
    bool ls_ok = false;
    {
      double lo = 0.0, hi = 0.0;
      double f_lo = f, dg_lo = dg0;
      double prev_step = 0.0, prev_f = f, prev_dg = dg0;
      bool bracketed = false;
      for (int tries = 0; tries < 25 && !bracketed; ++tries) {
        x_new = x + step * d;
        f_new = fg(x_new, g_new);
        double dg = d.dot(g_new);
        if (f_new > f + options.c1 * step * dg0 || (tries > 0 && f_new >= prev_f)) {
          lo = prev_step;
          hi = step;
          f_lo = prev_f;
          dg_lo = prev_dg;
          bracketed = true;
          break;
        }
        if (std::abs(dg) <= -options.c2 * dg0) {
          ls_ok = true;
          break;
        }
        if (dg >= 0.0) {
          lo = step;
          hi = prev_step;
          f_lo = f_new;
          dg_lo = dg;
          bracketed = true;
          break;
        }
        prev_step = step;
        prev_f = f_new;
        prev_dg = dg;
        step *= 2.0;
      }
      if (bracketed && !ls_ok) {
        for (int z = 0; z < 30; ++z) {
          step = 0.5 * (lo + hi);
          x_new = x + step * d;
          f_new = fg(x_new, g_new);
          double dg = d.dot(g_new);
          if (f_new > f + options.c1 * step * dg0 || f_new >= f_lo) {
            hi = step;
          } else {
            if (std::abs(dg) <= -options.c2 * dg0) {
              ls_ok = true;
              break;
            }
            if (dg * (hi - lo) >= 0.0) hi = lo;
            lo = step;
            f_lo = f_new;
            dg_lo = dg;
          }
          if (std::abs(hi - lo) < 1e-16) break;
        }
      }
    }
    if (!ls_ok) {
      // fixed small fallback step, then continue
      ++rep.line_search_failures;
      step = options.fallback_step;
      x_new = x + step * d;
      f_new = fg(x_new, g_new);
    }

    project(x_new);
    // projection invalidates the trial gradient when it actually clips
    VectorXd x_proj_diff = x_new - (x + step * d);
    if (x_proj_diff.squaredNorm() > 0.0) f_new = fg(x_new, g_new);

    VectorXd s = x_new - x;
    VectorXd y = g_new - g;
    std::vector<bool> act_new = active_set(x_new);
    bool active_changed = act_new != act;

    x = x_new;
    f = f_new;
    g = g_new;
    act = act_new;
    ++rep.iterations;

    if (active_changed) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      continue;
    }
    double sy = s.dot(y);
    if (sy > 1e-12) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
  }
  return rep;
}

SolverResult run_lbfgs(const Spectrum& obs, OperatorKind op, const LbfgsSolverConfig& config, uint64_t seed,
                       double gamma) {
  auto t0 = std::chrono::steady_clock::now();
  const GridGeometry& g = obs.geometry;
  KernelStack stack(g);
  Objective objective(obs, op, stack, gamma, config.weights, Stage::coarse);
  const long n = g.pixels();

  SolverResult r;
  r.config = {{"solver", "lbfgs"}, {"operator", operator_name(op)}, {"history", config.opts.history},
              {"max_iters", config.opts.max_iters}, {"seed", seed}, {"gamma", gamma}};

  VectorXd x(2 * n);
  x.head(n).setConstant(config.rho_init);
  x.tail(n).setConstant(config.omega_init);
  VectorXd lower = VectorXd::Constant(2 * n, -std::numeric_limits<double>::infinity());
  lower.head(n).setZero();

  auto fg = [&](const VectorXd& v, VectorXd& grad) {
    ScalarField rho = field_from_segment(v, 0, g.height, g.width);
    for (long i = 0; i < n; ++i) rho[i] = std::max(rho[i], 0.0);  // guard line-search probes
    ScalarField omega = field_from_segment(v, n, g.height, g.width);
    ScalarField d_rho, d_omega;
    LossBreakdown bd = objective.eval(rho, omega, &d_rho, &d_omega);
    for (long i = 0; i < n; ++i) {
      grad[i] = v[i] < 0.0 ? 0.0 : d_rho[i];
      grad[n + i] = d_omega[i];
    }
    r.trace.push_back(bd);
    return bd.total;
  };

  LbfgsReport rep = lbfgs_minimize(fg, x, config.opts, &lower, nullptr);
  r.iterations = rep.iterations;
  r.config["converged"] = rep.converged;
  r.config["line_search_failures"] = rep.line_search_failures;

  r.rho_hat = field_from_segment(x, 0, g.height, g.width);
  r.omega_hat = field_from_segment(x, n, g.height, g.width);
  finish_with_scale_correction(r, obs, op, stack, gamma);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace netmy
