#include "netmy/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "netmy/objective.hpp"
#include "netmy/rng.hpp"

namespace netmy {

namespace {

ScalarField unit_rescale(const ScalarField& f) {
  double m = f.max();
  ScalarField out = f;
  if (m > 0.0) out *= 1.0 / m;
  return out;
}

// Prewitt gradient magnitude, zero padding at the border.
ScalarField prewitt_magnitude(const ScalarField& f) {
  const int H = f.rows(), W = f.cols();
  ScalarField g(H, W);
  auto v = [&](int r, int c) { return (r < 0 || r >= H || c < 0 || c >= W) ? 0.0 : f.at(r, c); };
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c) {
      double gx = 0.0, gy = 0.0;
      for (int d = -1; d <= 1; ++d) {
        gx += v(r + d, c + 1) - v(r + d, c - 1);
        gy += v(r + 1, c + d) - v(r - 1, c + d);
      }
      gx /= 3.0;
      gy /= 3.0;
      g.at(r, c) = std::sqrt(gx * gx + gy * gy);
    }
  return g;
}

}  // namespace

double gmsd(const ScalarField& pred, const ScalarField& truth) {
  if (!pred.same_shape(truth)) throw InvalidInputError("gmsd: shape mismatch");
  constexpr double c = 170.0 / (255.0 * 255.0);  // canonical stability constant in the unit range
  ScalarField gp = prewitt_magnitude(unit_rescale(pred));
  ScalarField gt = prewitt_magnitude(unit_rescale(truth));
  const long n = gp.size();
  double mean = 0.0;
  ScalarField gms(pred.rows(), pred.cols());
  for (long i = 0; i < n; ++i) {
    gms[i] = (2.0 * gp[i] * gt[i] + c) / (gp[i] * gp[i] + gt[i] * gt[i] + c);
    mean += gms[i];
  }
  mean /= n;
  double var = 0.0;
  for (long i = 0; i < n; ++i) {
    double d = gms[i] - mean;
    var += d * d;
  }
  return std::sqrt(var / n);
}

std::vector<std::pair<int, int>> extract_peaks(const ScalarField& field, double rel_threshold) {
  const int H = field.rows(), W = field.cols();
  double m = field.max();
  if (!(m > 0.0)) return {};
  double thresh = rel_threshold * m;

  // candidate = no strictly greater 8-neighbor, at/above threshold
  std::vector<char> cand(static_cast<size_t>(H) * W, 0);
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c) {
      double v = field.at(r, c);
      if (v < thresh || v <= 0.0) continue;
      bool ok = true;
      for (int dr = -1; dr <= 1 && ok; ++dr)
        for (int dc = -1; dc <= 1 && ok; ++dc) {
          if (!dr && !dc) continue;
          int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= H || cc < 0 || cc >= W) continue;
          if (field.at(rr, cc) > v) ok = false;
        }
      if (ok) cand[static_cast<size_t>(r) * W + c] = 1;
    }

  // group equal-valued candidate plateaus; emit rounded centroids
  std::vector<std::pair<int, int>> peaks;
  std::vector<char> seen(static_cast<size_t>(H) * W, 0);
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c) {
      size_t idx = static_cast<size_t>(r) * W + c;
      if (!cand[idx] || seen[idx]) continue;
      double v = field.at(r, c);
      std::vector<std::pair<int, int>> comp;
      std::vector<std::pair<int, int>> stack{{r, c}};
      seen[idx] = 1;
      while (!stack.empty()) {
        auto [cr, cc] = stack.back();
        stack.pop_back();
        comp.emplace_back(cr, cc);
        for (int dr = -1; dr <= 1; ++dr)
          for (int dc = -1; dc <= 1; ++dc) {
            int nr = cr + dr, nc = cc + dc;
            if (nr < 0 || nr >= H || nc < 0 || nc >= W) continue;
            size_t ni = static_cast<size_t>(nr) * W + nc;
            if (!seen[ni] && cand[ni] && field.at(nr, nc) == v) {
              seen[ni] = 1;
              stack.emplace_back(nr, nc);
            }
          }
      }
      double sr = 0.0, sc = 0.0;
      for (auto [pr, pc] : comp) {
        sr += pr;
        sc += pc;
      }
      peaks.emplace_back(static_cast<int>(std::lround(sr / comp.size())),
                         static_cast<int>(std::lround(sc / comp.size())));
    }
  std::sort(peaks.begin(), peaks.end());
  return peaks;
}

std::vector<int> solve_assignment(const std::vector<std::vector<double>>& cost) {
  // Hungarian algorithm with potentials (shortest augmenting paths), O(n^3).
  const int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  const double INF = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, INF);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = -1;
      double delta = INF;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

HungarianMatch hungarianf1_impl(const std::vector<std::pair<int, int>>& pred,
                                const std::vector<std::pair<int, int>>& truth, double radius) {
  HungarianMatch out;
  const int P = static_cast<int>(pred.size());
  const int T = static_cast<int>(truth.size());
  if (P == 0 && T == 0) return out;  // degenerate case scores 0
  if (P == 0 || T == 0) {
    out.fp = P;
    out.fn = T;
    return out;
  }

  // Padded square: unmatched entities pair with zero-cost dummies at a fixed
  // price; forbidden pairs cost more than two unmatched entities so the
  // solver maximizes match count first, then total distance.
  const double kUnmatched = 1e6;
  const double kForbidden = 4e6;
  const int N = P + T;
  std::vector<std::vector<double>> cost(N, std::vector<double>(N, 0.0));
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (i < P && j < T) {
        double d = std::hypot(static_cast<double>(pred[i].first - truth[j].first),
                              static_cast<double>(pred[i].second - truth[j].second));
        cost[i][j] = d <= radius ? d : kForbidden;
      } else if (i < P || j < T) {
        cost[i][j] = kUnmatched;
      }
    }
  std::vector<int> assign = solve_assignment(cost);
  for (int i = 0; i < P; ++i) {
    int j = assign[i];
    if (j >= 0 && j < T && cost[i][j] < kUnmatched) {
      ++out.tp;
      out.pairs.emplace_back(i, j);
    }
  }
  out.fp = P - out.tp;
  out.fn = T - out.tp;
  out.f1 = 2.0 * out.tp / (2.0 * out.tp + out.fp + out.fn);
  return out;
}

HungarianMatch hungarian_f1(const std::vector<std::pair<int, int>>& pred_peaks,
                            const std::vector<std::pair<int, int>>& true_peaks, double radius) {
  return hungarianf1_impl(pred_peaks, true_peaks, radius);
}

double wasserstein1d(std::vector<std::pair<double, double>> a, std::vector<std::pair<double, double>> b) {
  auto norm = [](std::vector<std::pair<double, double>>& v) {
    double s = 0.0;
    for (auto& [x, w] : v) s += w;
    if (!(s > 0.0)) throw DegenerateInputError("wasserstein1d: zero total mass");
    for (auto& [x, w] : v) w /= s;
    std::sort(v.begin(), v.end());
  };
  norm(a);
  norm(b);

  // quantile-function integral over the merged breakpoints
  double acc = 0.0, q = 0.0;
  size_t ia = 0, ib = 0;
  double ca = a[0].second, cb = b[0].second;
  while (q < 1.0 - 1e-15 && ia < a.size() && ib < b.size()) {
    double nq = std::min(ca, cb);
    double seg = nq - q;
    if (seg > 0.0) {
      double d = a[ia].first - b[ib].first;
      acc += seg * d * d;
      q = nq;
    }
    if (ca <= cb && ia + 1 <= a.size()) {
      ++ia;
      if (ia < a.size()) ca += a[ia].second;
    } else {
      ++ib;
      if (ib < b.size()) cb += b[ib].second;
    }
  }
  return std::sqrt(std::max(acc, 0.0));
}

double sliced_wasserstein(const ScalarField& pred, const ScalarField& truth, int n_projections, uint64_t seed) {
  if (!pred.same_shape(truth)) throw InvalidInputError("sliced_wasserstein: shape mismatch");
  double sp = 0.0, st = 0.0;
  for (long i = 0; i < pred.size(); ++i) {
    sp += pred[i];
    st += truth[i];
  }
  if (!(sp > 0.0) || !(st > 0.0)) throw DegenerateInputError("sliced_wasserstein: zero-mass field");

  // gather nonzero atoms once
  std::vector<std::pair<double, double>> ap, at;  // (position placeholder, weight) filled per direction
  std::vector<std::pair<int, int>> pp, pt;
  std::vector<double> wp, wt;
  for (int r = 0; r < pred.rows(); ++r)
    for (int c = 0; c < pred.cols(); ++c) {
      if (pred.at(r, c) != 0.0) {
        pp.emplace_back(r, c);
        wp.push_back(pred.at(r, c));
      }
      if (truth.at(r, c) != 0.0) {
        pt.emplace_back(r, c);
        wt.push_back(truth.at(r, c));
      }
    }

  Rng rng(seed);
  double acc = 0.0;
  for (int k = 0; k < n_projections; ++k) {
    double phi = rng.uniform(0.0, 6.283185307179586476925286766559);
    double ux = std::cos(phi), uy = std::sin(phi);
    ap.clear();
    at.clear();
    for (size_t i = 0; i < pp.size(); ++i) ap.emplace_back(ux * pp[i].second + uy * pp[i].first, wp[i]);
    for (size_t i = 0; i < pt.size(); ++i) at.emplace_back(ux * pt[i].second + uy * pt[i].first, wt[i]);
    acc += wasserstein1d(std::move(ap), std::move(at));
  }
  return acc / n_projections;
}

double density_mse(const ScalarField& pred, const ScalarField& truth) {
  if (!pred.same_shape(truth)) throw InvalidInputError("density_mse: shape mismatch");
  double acc = 0.0;
  for (long i = 0; i < pred.size(); ++i) {
    double d = pred[i] - truth[i];
    acc += d * d;
  }
  return acc / pred.size();
}

double masked_ssim(const ScalarField& pred, const ScalarField& truth) {
  if (!pred.same_shape(truth)) throw InvalidInputError("masked_ssim: shape mismatch");
  const int H = pred.rows(), W = pred.cols();
  const int half = 3;  // 7x7 window
  double L = truth.max();
  if (!(L > 0.0)) L = 1.0;
  const double c1 = (0.01 * L) * (0.01 * L);
  const double c2 = (0.03 * L) * (0.03 * L);

  double acc = 0.0;
  long count = 0;
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c) {
      if (!(truth.at(r, c) > 0.0)) continue;
      double mp = 0.0, mt = 0.0;
      int n = 0;
      int r0 = std::max(0, r - half), r1 = std::min(H - 1, r + half);
      int c0 = std::max(0, c - half), c1c = std::min(W - 1, c + half);
      for (int rr = r0; rr <= r1; ++rr)
        for (int cc = c0; cc <= c1c; ++cc) {
          mp += pred.at(rr, cc);
          mt += truth.at(rr, cc);
          ++n;
        }
      mp /= n;
      mt /= n;
      double vp = 0.0, vt = 0.0, cov = 0.0;
      for (int rr = r0; rr <= r1; ++rr)
        for (int cc = c0; cc <= c1c; ++cc) {
          double dp = pred.at(rr, cc) - mp, dt = truth.at(rr, cc) - mt;
          vp += dp * dp;
          vt += dt * dt;
          cov += dp * dt;
        }
      vp /= n;
      vt /= n;
      cov /= n;
      acc += ((2.0 * mp * mt + c1) * (2.0 * cov + c2)) / ((mp * mp + mt * mt + c1) * (vp + vt + c2));
      ++count;
    }
  return count ? acc / count : 0.0;
}

double noise_mse(const Spectrum& pred, const Spectrum& obs) {
  ScalarField np = noise_map(pred), no = noise_map(obs);
  return density_mse(np, no);
}

nlohmann::json MetricsReport::to_json() const {
  return {{"gmsd", gmsd},       {"hungarian_f1", hungarian_f1},
          {"swd", swd},         {"density_mse", density_mse},
          {"masked_ssim", masked_ssim}, {"noise_mse", noise_mse},
          {"pred_peaks", pred_peaks},   {"true_peaks", true_peaks},
          {"matched", matched}};
}

MetricsReport compute_metrics(const ScalarField& rho_hat, const ScalarField& rho_true, const Spectrum& pred_spec,
                              const Spectrum& obs_spec, const MetricsParams& params) {
  MetricsReport rep;
  rep.gmsd = gmsd(rho_hat, rho_true);
  auto pk_pred = extract_peaks(rho_hat, params.peak_rel_threshold);
  auto pk_true = extract_peaks(rho_true, params.peak_rel_threshold);
  HungarianMatch m = hungarian_f1(pk_pred, pk_true, params.match_radius);
  rep.hungarian_f1 = m.f1;
  rep.pred_peaks = static_cast<int>(pk_pred.size());
  rep.true_peaks = static_cast<int>(pk_true.size());
  rep.matched = m.tp;
  try {
    rep.swd = sliced_wasserstein(rho_hat, rho_true, params.swd_projections, params.swd_seed);
  } catch (const DegenerateInputError&) {
    rep.swd = std::numeric_limits<double>::quiet_NaN();
  }
  rep.density_mse = density_mse(rho_hat, rho_true);
  rep.masked_ssim = masked_ssim(rho_hat, rho_true);
  rep.noise_mse = noise_mse(pred_spec, obs_spec);
  return rep;
}

}  // namespace netmy
