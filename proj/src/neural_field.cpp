#include "netmy/neural_field.hpp"

#include <chrono>
#include <cmath>

#include "netmy/io.hpp"
#include "netmy/optim.hpp"
#include "netmy/rng.hpp"

namespace netmy {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;

// tanh through the vectorized exp path; exact to ~3 ulp and an order of
// magnitude faster than the scalar libm fallback Eigen uses for doubles.
inline Eigen::ArrayXXd fast_tanh(const Eigen::ArrayXXd& x) { return 1.0 - 2.0 / ((2.0 * x).exp() + 1.0); }

inline Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& x) { return 1.0 / (1.0 + (-x).exp()); }

inline Eigen::ArrayXd softplus(const Eigen::ArrayXd& x) {
  // log(1 + e^x), linear beyond the overflow knee
  return (x > 30.0).select(x, (x.exp() + 1.0).log());
}
}  // namespace

double cosine_lr(long epoch, long total, double eta_base, double floor_frac) {
  double eta_min = floor_frac * eta_base;
  if (total <= 0) return eta_base;
  double c = 0.5 * (1.0 + std::cos(kPi * static_cast<double>(epoch) / static_cast<double>(total)));
  return eta_min + (eta_base - eta_min) * c;
}

double anneal_weight(int k, double beta) {
  double t = beta - k;
  if (t < 0.0) t = 0.0;
  if (t > 1.0) t = 1.0;
  return 0.5 * (1.0 - std::cos(kPi * t));
}

Eigen::VectorXd encode_point(double x, double y, double beta, int octaves) {
  Eigen::VectorXd e(2 + 4 * octaves);
  e[0] = x;
  e[1] = y;
  double fx = kPi * x, fy = kPi * y;
  for (int k = 0; k < octaves; ++k) {
    double w = anneal_weight(k, beta);
    double sx = std::pow(2.0, k) * fx, sy = std::pow(2.0, k) * fy;
    e[2 + 4 * k + 0] = w * std::sin(sx);
    e[2 + 4 * k + 1] = w * std::cos(sx);
    e[2 + 4 * k + 2] = w * std::sin(sy);
    e[2 + 4 * k + 3] = w * std::cos(sy);
  }
  return e;
}

CoordinateGrid::CoordinateGrid(int rows, int cols, int octaves) : rows_(rows), cols_(cols), octaves_(octaves) {
  if (rows < 1 || cols < 1 || octaves < 0) throw InvalidInputError("CoordinateGrid: bad shape");
  table_.resize(n(), encoded_dim());
  long i = 0;
  for (int r = 0; r < rows; ++r) {
    double y = -1.0 + 2.0 * (r + 0.5) / rows;
    for (int c = 0; c < cols; ++c, ++i) {
      double x = -1.0 + 2.0 * (c + 0.5) / cols;
      table_(i, 0) = x;
      table_(i, 1) = y;
      for (int k = 0; k < octaves; ++k) {
        double s = std::pow(2.0, k) * kPi;
        table_(i, 2 + 4 * k + 0) = std::sin(s * x);
        table_(i, 2 + 4 * k + 1) = std::cos(s * x);
        table_(i, 2 + 4 * k + 2) = std::sin(s * y);
        table_(i, 2 + 4 * k + 3) = std::cos(s * y);
      }
    }
  }
}

void CoordinateGrid::encode(double beta, Eigen::MatrixXd& E) const {
  E = table_;
  for (int k = 0; k < octaves_; ++k) E.middleCols(2 + 4 * k, 4) *= anneal_weight(k, beta);
}

long MlpConfig::param_count() const {
  long p = 0;
  for (int l = 1; l <= layers; ++l) p += static_cast<long>(layer_in(l)) * layer_out(l) + layer_out(l);
  return p;
}

MlpParams::MlpParams(const MlpConfig& cfg) : cfg_(cfg) {
  if (cfg.layers < 1 || cfg.hidden < 1 || cfg.skip_layer == 1 || cfg.skip_layer > cfg.layers ||
      cfg.skip_layer < 0)
    throw InvalidInputError("MlpConfig: invalid architecture");
  theta_ = Eigen::VectorXd::Zero(cfg.param_count());
  long off = 0;
  for (int l = 1; l <= cfg.layers; ++l) {
    w_off_.push_back(off);
    off += static_cast<long>(cfg.layer_in(l)) * cfg.layer_out(l);
    b_off_.push_back(off);
    off += cfg.layer_out(l);
  }
}

MlpParams MlpParams::init(const MlpConfig& cfg, uint64_t seed) {
  MlpParams p(cfg);
  Rng rng(seed);
  for (int l = 1; l <= cfg.layers; ++l) {
    double bound = 1.0 / std::sqrt(static_cast<double>(cfg.layer_in(l)));
    auto w = p.weight(l);
    for (long c = 0; c < w.cols(); ++c)
      for (long r = 0; r < w.rows(); ++r) w(r, c) = rng.uniform(-bound, bound);
    auto b = p.bias(l);
    for (long i = 0; i < b.size(); ++i) b[i] = rng.uniform(-bound, bound);
  }
  return p;
}

Eigen::Map<const Eigen::MatrixXd> MlpParams::weight(int l) const {
  return {theta_.data() + w_off_[l - 1], cfg_.layer_in(l), cfg_.layer_out(l)};
}
Eigen::Map<const Eigen::VectorXd> MlpParams::bias(int l) const {
  return {theta_.data() + b_off_[l - 1], cfg_.layer_out(l)};
}
Eigen::Map<Eigen::MatrixXd> MlpParams::weight(int l) {
  return {theta_.data() + w_off_[l - 1], cfg_.layer_in(l), cfg_.layer_out(l)};
}
Eigen::Map<Eigen::VectorXd> MlpParams::bias(int l) {
  return {theta_.data() + b_off_[l - 1], cfg_.layer_out(l)};
}

NetmyModel::NetmyModel(const MlpConfig& mlp, const HeadConfig& heads, const CoordinateGrid* grid)
    : cfg_(mlp), heads_(heads), grid_(grid) {
  if (!grid) throw InvalidInputError("NetmyModel: null grid");
  if (grid->encoded_dim() != mlp.input_dim)
    throw InvalidInputError("NetmyModel: encoder dimension does not match MLP input");
  if (mlp.out_dim != 3) throw InvalidInputError("NetmyModel: the head transform expects 3 output channels");
  hidden_.resize(mlp.layers - 1);
}

FieldOutput NetmyModel::forward(const MlpParams& params, double beta) {
  if (!params.flat().allFinite()) throw SolverError("NetmyModel::forward: non-finite parameters");
  const long n = grid_->n();
  grid_->encode(beta, enc_);

  const Eigen::MatrixXd* x = &enc_;
  Eigen::MatrixXd skip_in;
  for (int l = 1; l < cfg_.layers; ++l) {
    Eigen::MatrixXd z = (*x) * params.weight(l);
    z.rowwise() += params.bias(l).transpose();
    hidden_[l - 1] = fast_tanh(z.array());
    if (l + 1 == cfg_.skip_layer) {
      skip_in.resize(n, cfg_.hidden + cfg_.input_dim);
      skip_in << hidden_[l - 1], enc_;
      x = &skip_in;
    } else {
      x = &hidden_[l - 1];
    }
  }
  out_ = (*x) * params.weight(cfg_.layers);
  out_.rowwise() += params.bias(cfg_.layers).transpose();

  softplus_ = softplus(out_.col(0).array());
  sig_gate_ = sigmoid(out_.col(1).array());
  sig_omega_ = sigmoid(out_.col(2).array());
  rho_ = softplus_ * sig_gate_;

  double rho_max = rho_.maxCoeff();
  mask_ = (rho_ > heads_.tau * rho_max).cast<double>();

  FieldOutput f;
  f.rho = ScalarField(grid_->rows(), grid_->cols());
  f.omega = ScalarField(grid_->rows(), grid_->cols());
  f.mask = ScalarField(grid_->rows(), grid_->cols());
  double span = heads_.omega_max - heads_.omega_min;
  for (long i = 0; i < n; ++i) {
    f.rho[i] = rho_[i];
    f.mask[i] = mask_[i];
    f.omega[i] = mask_[i] * (heads_.omega_min + span * sig_omega_[i]);
  }
  return f;
}

void NetmyModel::backward(const MlpParams& params, const ScalarField& d_rho, const ScalarField& d_omega,
                          Eigen::VectorXd& grad) const {
  const long n = grid_->n();
  if (d_rho.size() != n || d_omega.size() != n) throw InvalidInputError("NetmyModel::backward: field size mismatch");
  if (grad.size() != params.flat().size()) throw InvalidInputError("NetmyModel::backward: grad size mismatch");

  Eigen::ArrayXd g_rho = Eigen::Map<const Eigen::ArrayXd>(d_rho.data(), n);
  Eigen::ArrayXd g_omega = Eigen::Map<const Eigen::ArrayXd>(d_omega.data(), n);

  double span = heads_.omega_max - heads_.omega_min;
  Eigen::MatrixXd dz(n, 3);
  dz.col(0) = (g_rho * sig_gate_ * sigmoid(out_.col(0).array())).matrix();  // d softplus = sigmoid
  dz.col(1) = (g_rho * softplus_ * sig_gate_ * (1.0 - sig_gate_)).matrix();
  dz.col(2) = (g_omega * mask_ * span * sig_omega_ * (1.0 - sig_omega_)).matrix();

  for (int l = cfg_.layers; l >= 1; --l) {
    // input to layer l
    const Eigen::MatrixXd* x = nullptr;
    Eigen::MatrixXd skip_in;
    if (l == 1) {
      x = &enc_;
    } else if (l == cfg_.skip_layer) {
      skip_in.resize(n, cfg_.hidden + cfg_.input_dim);
      skip_in << hidden_[l - 2], enc_;
      x = &skip_in;
    } else {
      x = &hidden_[l - 2];
    }

    Eigen::Map<Eigen::MatrixXd> dW(grad.data() + params.weight_offset(l), cfg_.layer_in(l), cfg_.layer_out(l));
    Eigen::Map<Eigen::VectorXd> db(grad.data() + params.bias_offset(l), cfg_.layer_out(l));
    dW.noalias() += x->transpose() * dz;
    db.noalias() += dz.colwise().sum().transpose();

    if (l == 1) break;
    Eigen::MatrixXd dx = dz * params.weight(l).transpose();
    // encoded input carries no parameter dependence; drop its slice at the skip
    Eigen::MatrixXd dh = l == cfg_.skip_layer ? dx.leftCols(cfg_.hidden) : std::move(dx);
    dz = dh.array() * (1.0 - hidden_[l - 2].array().square());
  }
}

void NetmyModel::jvp(const MlpParams& params, const Eigen::VectorXd& v, ScalarField& d_rho_out,
                     ScalarField& d_omega_out) const {
  const long n = grid_->n();
  if (v.size() != params.flat().size()) throw InvalidInputError("NetmyModel::jvp: tangent size mismatch");

  auto vw = [&](int l) {
    return Eigen::Map<const Eigen::MatrixXd>(v.data() + params.weight_offset(l), cfg_.layer_in(l),
                                             cfg_.layer_out(l));
  };
  auto vb = [&](int l) {
    return Eigen::Map<const Eigen::VectorXd>(v.data() + params.bias_offset(l), cfg_.layer_out(l));
  };

  Eigen::MatrixXd dx;  // tangent of the layer input; empty means zero (the encoding is constant)
  Eigen::MatrixXd dz;
  for (int l = 1; l <= cfg_.layers; ++l) {
    const Eigen::MatrixXd* x_in = nullptr;
    Eigen::MatrixXd skip_in;
    if (l == 1) {
      x_in = &enc_;
    } else if (l == cfg_.skip_layer) {
      skip_in.resize(n, cfg_.hidden + cfg_.input_dim);
      skip_in << hidden_[l - 2], enc_;
      x_in = &skip_in;
    } else {
      x_in = &hidden_[l - 2];
    }

    dz.noalias() = (*x_in) * vw(l);
    dz.rowwise() += vb(l).transpose();
    if (dx.size() != 0) {
      if (l == cfg_.skip_layer) {
        dz.noalias() += dx * params.weight(l).topRows(cfg_.hidden);
      } else {
        dz.noalias() += dx * params.weight(l);
      }
    }
    if (l < cfg_.layers) {
      dx = dz.array() * (1.0 - hidden_[l - 1].array().square());
    }
  }

  // dz now holds the tangent of the raw logits
  double span = heads_.omega_max - heads_.omega_min;
  Eigen::ArrayXd t_rho = dz.col(0).array() * sigmoid(out_.col(0).array()) * sig_gate_ +
                         dz.col(1).array() * softplus_ * sig_gate_ * (1.0 - sig_gate_);
  Eigen::ArrayXd t_omega = dz.col(2).array() * mask_ * span * sig_omega_ * (1.0 - sig_omega_);

  d_rho_out = ScalarField(grid_->rows(), grid_->cols());
  d_omega_out = ScalarField(grid_->rows(), grid_->cols());
  for (long i = 0; i < n; ++i) {
    d_rho_out[i] = t_rho[i];
    d_omega_out[i] = t_omega[i];
  }
}

Eigen::VectorXd param_gradient(NetmyModel& model, const MlpParams& params, double beta, const Objective& objective) {
  FieldOutput f = model.forward(params, beta);
  ScalarField d_rho, d_omega;
  objective.eval(f.rho, f.omega, &d_rho, &d_omega);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params.flat().size());
  model.backward(params, d_rho, d_omega, grad);
  return grad;
}

void TrainingSchedule::scale_epochs(double factor) {
  if (!(factor > 0.0)) throw InvalidInputError("scale_epochs: factor must be > 0");
  auto scale = [factor](long e) {
    long s = static_cast<long>(std::llround(static_cast<double>(e) * factor));
    return s < 1 ? 1 : s;
  };
  stage1.epochs = scale(stage1.epochs);
  stage2.epochs = scale(stage2.epochs);
}

nlohmann::json TrainingSchedule::to_json() const {
  return {
      {"stage1", {{"resolution", stage1.resolution}, {"epochs", stage1.epochs}, {"lr", stage1.lr}}},
      {"stage2", {{"resolution", stage2.resolution}, {"epochs", stage2.epochs}, {"lr", stage2.lr}}},
      {"weight_decay", weight_decay},
      {"grad_clip", grad_clip},
      {"lr_floor_frac", lr_floor_frac},
      {"tau", heads.tau},
      {"omega_band", {heads.omega_min, heads.omega_max}},
      {"mlp",
       {{"input_dim", mlp.input_dim},
        {"hidden", mlp.hidden},
        {"layers", mlp.layers},
        {"skip_layer", mlp.skip_layer},
        {"param_count", mlp.param_count()}}},
      {"adam", {{"beta1", adam_beta1}, {"beta2", adam_beta2}, {"eps", adam_eps}}},
      {"grad_through_max", grad_through_max},
  };
}

Spectrum downsample_spectrum(const Spectrum& obs, int factor) {
  if (factor == 1) return obs;
  const GridGeometry& g = obs.geometry;
  if (factor < 1 || g.height % factor || g.width % factor)
    throw InvalidInputError("downsample_spectrum: factor must divide the grid");
  GridGeometry gd = g;
  gd.height = g.height / factor;
  gd.width = g.width / factor;
  gd.spacing = g.spacing * factor;
  Spectrum out(obs.freqs, gd);
  double inv = 1.0 / (factor * factor);
  for (int f = 0; f < obs.nf(); ++f) {
    const double* src = obs.plane(f);
    double* dst = out.plane(f);
    for (int r = 0; r < gd.height; ++r)
      for (int c = 0; c < gd.width; ++c) {
        double acc = 0.0;
        for (int dr = 0; dr < factor; ++dr)
          for (int dc = 0; dc < factor; ++dc) acc += src[(r * factor + dr) * g.width + (c * factor + dc)];
        dst[r * gd.width + c] = acc * inv;
      }
  }
  return out;
}

SolverResult run_netmy(const Spectrum& obs, OperatorKind op, const TrainingSchedule& schedule,
                       const LossWeights& weights, uint64_t seed, double gamma) {
  if (op != OperatorKind::F1 && op != OperatorKind::F2)
    throw InvalidInputError("run_netmy: inversion operator must be F1 or F2");
  if (obs.geometry.height != schedule.stage2.resolution || obs.geometry.width != schedule.stage2.resolution)
    throw InvalidInputError("run_netmy: observation resolution must match stage 2");

  auto t_start = std::chrono::steady_clock::now();
  const int octaves = (schedule.mlp.input_dim - 2) / 4;

  MlpParams params = MlpParams::init(schedule.mlp, seed);
  AdamW opt;
  opt.beta1 = schedule.adam_beta1;
  opt.beta2 = schedule.adam_beta2;
  opt.eps = schedule.adam_eps;
  opt.reset(params.flat().size());

  SolverResult result;
  result.config = schedule.to_json();
  result.config["weights"] = {{"fidelity", weights.fidelity}, {"nm", weights.nm},       {"ds", weights.ds},
                              {"l1_sparsity", weights.l1_sparsity}, {"l1_extra", weights.l1_extra},
                              {"tv", weights.tv}};
  result.config["seed"] = seed;
  result.config["operator"] = operator_name(op);
  result.config["solver"] = "netmy";
  result.config["gamma"] = gamma;

  Eigen::VectorXd grad(params.flat().size());
  ScalarField d_rho, d_omega;
  FieldOutput fields;

  for (int stage_idx = 0; stage_idx < 2; ++stage_idx) {
    const StageConfig& st = stage_idx == 0 ? schedule.stage1 : schedule.stage2;
    const Stage stage_tag = stage_idx == 0 ? Stage::coarse : Stage::fine;

    int factor = obs.geometry.height / st.resolution;
    Spectrum stage_obs = downsample_spectrum(obs, factor);
    KernelStack stack(stage_obs.geometry);
    ObjectiveOptions oo;
    oo.grad_through_max = schedule.grad_through_max;
    Objective objective(stage_obs, op, stack, gamma, weights, stage_tag, oo);

    CoordinateGrid grid(st.resolution, st.resolution, octaves);
    NetmyModel model(schedule.mlp, schedule.heads, &grid);

    for (long t = 1; t <= st.epochs; ++t) {
      double beta = static_cast<double>(octaves) * static_cast<double>(t) / static_cast<double>(st.epochs);
      double lr = cosine_lr(t - 1, st.epochs, st.lr, schedule.lr_floor_frac);

      fields = model.forward(params, beta);
      LossBreakdown bd = objective.eval(fields.rho, fields.omega, &d_rho, &d_omega);
      if (!std::isfinite(bd.total)) {
        throw SolverError("run_netmy: NaN loss at stage " + std::to_string(stage_idx + 1) + " epoch " +
                          std::to_string(t) + " (fidelity=" + std::to_string(bd.fidelity) +
                          ", nm=" + std::to_string(bd.nm) + ", ds=" + std::to_string(bd.ds) + ")");
      }
      grad.setZero();
      model.backward(params, d_rho, d_omega, grad);
      opt.step(params.flat(), grad, lr, schedule.weight_decay, schedule.grad_clip);
      result.trace.push_back(bd);
      ++result.iterations;
    }

    if (stage_idx == 1) {
      // final fields at full annealing
      fields = model.forward(params, static_cast<double>(octaves));
      result.rho_hat = fields.rho;
      result.omega_hat = fields.omega;
      auto [scaled, alpha] = scale_correction(fields.rho, fields.omega, obs, op, stack, gamma);
      result.rho_hat = std::move(scaled);
      result.alpha = alpha;
    }
  }

  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

void save_result(const SolverResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_field_f64(dir / "rho_hat.f64", r.rho_hat);
  write_field_f64(dir / "omega_hat.f64", r.omega_hat);
  nlohmann::json j;
  j["alpha"] = r.alpha;
  j["iterations"] = r.iterations;
  j["wall_seconds"] = r.wall_seconds;
  j["shape"] = {r.rho_hat.rows(), r.rho_hat.cols()};
  j["config"] = r.config;
  nlohmann::json trace = nlohmann::json::array();
  for (const LossBreakdown& b : r.trace)
    trace.push_back({b.fidelity, b.nm, b.ds, b.l1, b.tv, b.total});
  j["trace_terms"] = {"fidelity", "nm", "ds", "l1", "tv", "total"};
  j["trace"] = trace;
  write_json(dir / "result.json", j);
}

SolverResult load_result(const std::filesystem::path& dir) {
  nlohmann::json j = read_json(dir / "result.json");
  SolverResult r;
  int rows = j.at("shape")[0], cols = j.at("shape")[1];
  r.rho_hat = read_field_f64(dir / "rho_hat.f64", rows, cols);
  r.omega_hat = read_field_f64(dir / "omega_hat.f64", rows, cols);
  r.alpha = j.at("alpha");
  r.iterations = j.at("iterations");
  r.wall_seconds = j.at("wall_seconds");
  r.config = j.at("config");
  for (const auto& t : j.at("trace")) {
    LossBreakdown b;
    b.fidelity = t[0];
    b.nm = t[1];
    b.ds = t[2];
    b.l1 = t[3];
    b.tv = t[4];
    b.total = t[5];
    r.trace.push_back(b);
  }
  return r;
}

}  // namespace netmy
