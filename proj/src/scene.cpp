#include "netmy/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "netmy/io.hpp"
#include "netmy/rng.hpp"

namespace netmy {

namespace {
constexpr int kMaxAttempts = 10000;
constexpr double kOmegaMin = 1.5, kOmegaMax = 2.5;  // GHz, Larmor band
constexpr double kAmpMin = 0.5, kAmpMax = 1.0;
}  // namespace

const std::array<SceneClass, 8>& SceneClass::all() {
  static const std::array<SceneClass, 8> classes = {{
      {CountBand::few, SepBand::close},
      {CountBand::few, SepBand::medium},
      {CountBand::few, SepBand::far},
      {CountBand::medium, SepBand::close},
      {CountBand::medium, SepBand::medium},
      {CountBand::medium, SepBand::far},
      {CountBand::many, SepBand::close},
      {CountBand::many, SepBand::far},
  }};
  return classes;
}

std::string SceneClass::name() const {
  std::string c = count == CountBand::few ? "few" : count == CountBand::medium ? "medium" : "many";
  std::string s = separation == SepBand::close ? "close" : separation == SepBand::medium ? "medium" : "far";
  return c + "/" + s;
}

SceneClass SceneClass::parse(const std::string& name) {
  for (const SceneClass& c : all()) {
    if (c.name() == name) return c;
    std::string alt = c.name();
    std::replace(alt.begin(), alt.end(), '/', '_');
    if (alt == name) return c;
  }
  throw InvalidInputError("unknown scene class: " + name);
}

double psf_width(double z0, double k) {
  if (!(z0 > 0.0) || k < 0.0) throw InvalidInputError("psf_width: need z0 > 0, k >= 0");
  return 2.0 * z0 * std::sqrt(std::log(2.0) / (k * z0 + 3.0));
}

std::pair<int, int> count_band_range(CountBand b) {
  switch (b) {
    case CountBand::few: return {1, 3};
    case CountBand::medium: return {4, 12};
    case CountBand::many: return {20, 40};
  }
  return {1, 1};
}

std::pair<double, double> separation_band_range(SepBand b, const GridGeometry& g) {
  double z0 = g.standoff;
  switch (b) {
    case SepBand::close:
      // psf_width(z0, 0) can fall below one pixel pitch, which single-pixel
      // sources cannot realize; the band is clamped to the grid quantum.
      return {0.0, std::max(psf_width(z0, 0.0), g.spacing)};
    case SepBand::medium: return {z0, 2.0 * z0};
    case SepBand::far: return {3.0 * z0, std::numeric_limits<double>::infinity()};
  }
  return {0.0, 0.0};
}

double min_pairwise_separation(const Scene& scene) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < scene.sources.size(); ++i)
    for (size_t j = i + 1; j < scene.sources.size(); ++j) {
      double dr = (scene.sources[i].row - scene.sources[j].row) * scene.geometry.spacing;
      double dc = (scene.sources[i].col - scene.sources[j].col) * scene.geometry.spacing;
      best = std::min(best, std::hypot(dr, dc));
    }
  return best;
}

namespace {

double min_sep_nm(const std::vector<std::pair<int, int>>& pos, const GridGeometry& g) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < pos.size(); ++i)
    for (size_t j = i + 1; j < pos.size(); ++j) {
      double dr = (pos[i].first - pos[j].first) * g.spacing;
      double dc = (pos[i].second - pos[j].second) * g.spacing;
      best = std::min(best, std::hypot(dr, dc));
    }
  return best;
}

bool in_interior(int r, int c, const GridGeometry& g) {
  return r >= 1 && r < g.height - 1 && c >= 1 && c < g.width - 1;
}

// Places K distinct interior pixels whose pairwise separation is everywhere
// >= floor_nm. Dart throwing with a global attempt budget.
std::vector<std::pair<int, int>> place_with_floor(int k, double floor_nm, const GridGeometry& g, Rng& rng,
                                                  int& attempts) {
  std::vector<std::pair<int, int>> pos;
  while (static_cast<int>(pos.size()) < k) {
    if (++attempts > kMaxAttempts)
      throw SolverError("sample_scene: placement exceeded 10000 attempts (class infeasible on this grid)");
    int r = static_cast<int>(rng.uniform_int(1, g.height - 2));
    int c = static_cast<int>(rng.uniform_int(1, g.width - 2));
    bool ok = true;
    for (const auto& p : pos) {
      double d = std::hypot((p.first - r) * g.spacing, (p.second - c) * g.spacing);
      if (d < floor_nm || (p.first == r && p.second == c)) {
        ok = false;
        break;
      }
    }
    if (ok) pos.emplace_back(r, c);
  }
  return pos;
}

}  // namespace

Scene sample_scene(SceneClass cls, const GridGeometry& geometry, uint64_t rng_seed) {
  geometry.validate();
  Rng rng(rng_seed);
  Scene scene;
  scene.geometry = geometry;
  scene.cls = cls;
  scene.seed = rng_seed;

  auto [kmin, kmax] = count_band_range(cls.count);
  int k = static_cast<int>(rng.uniform_int(kmin, kmax));
  auto [sep_lo, sep_hi] = separation_band_range(cls.separation, geometry);

  int attempts = 0;
  std::vector<std::pair<int, int>> pos;
  switch (cls.separation) {
    case SepBand::far:
      pos = place_with_floor(k, sep_lo, geometry, rng, attempts);
      break;
    case SepBand::medium: {
      // All pairs at least z0 apart, then guarantee the minimum lands inside
      // [z0, 2 z0] by moving one source next to another when needed.
      pos = place_with_floor(k, sep_lo, geometry, rng, attempts);
      if (k >= 2 && min_sep_nm(pos, geometry) > sep_hi) {
        for (;;) {
          if (++attempts > kMaxAttempts)
            throw SolverError("sample_scene: placement exceeded 10000 attempts (class infeasible on this grid)");
          size_t anchor = static_cast<size_t>(rng.uniform_int(0, k - 1));
          // offsets whose length is within [z0, 2 z0] on this grid pitch
          std::vector<std::pair<int, int>> offs;
          int max_px = static_cast<int>(std::floor(sep_hi / geometry.spacing));
          for (int dr = -max_px; dr <= max_px; ++dr)
            for (int dc = -max_px; dc <= max_px; ++dc) {
              double d = std::hypot(dr * geometry.spacing, dc * geometry.spacing);
              if (d >= sep_lo && d <= sep_hi) offs.emplace_back(dr, dc);
            }
          if (offs.empty())
            throw SolverError("sample_scene: medium separation band is empty on this grid");
          auto [dr, dc] = offs[static_cast<size_t>(rng.uniform_int(0, static_cast<long>(offs.size()) - 1))];
          int r = pos[anchor].first + dr, c = pos[anchor].second + dc;
          if (!in_interior(r, c, geometry)) continue;
          size_t victim = (anchor + 1) % pos.size();
          auto save = pos[victim];
          pos[victim] = {r, c};
          double m = min_sep_nm(pos, geometry);
          if (m >= sep_lo && m <= sep_hi) break;
          pos[victim] = save;
        }
      }
      break;
    }
    case SepBand::close: {
      // Distinct pixels everywhere, then force at least one pair to sit at
      // the band's upper edge (one pixel pitch on coarse grids).
      pos = place_with_floor(k, 0.0, geometry, rng, attempts);
      if (k >= 2 && min_sep_nm(pos, geometry) > sep_hi) {
        for (;;) {
          if (++attempts > kMaxAttempts)
            throw SolverError("sample_scene: placement exceeded 10000 attempts (class infeasible on this grid)");
          size_t anchor = static_cast<size_t>(rng.uniform_int(0, k - 1));
          const std::array<std::pair<int, int>, 4> nb = {{{0, 1}, {1, 0}, {0, -1}, {-1, 0}}};
          auto [dr, dc] = nb[static_cast<size_t>(rng.uniform_int(0, 3))];
          int r = pos[anchor].first + dr, c = pos[anchor].second + dc;
          if (!in_interior(r, c, geometry)) continue;
          bool dup = false;
          size_t victim = (anchor + 1) % pos.size();
          for (size_t i = 0; i < pos.size(); ++i)
            if (i != victim && pos[i] == std::make_pair(r, c)) dup = true;
          if (dup) continue;
          pos[victim] = {r, c};
          break;
        }
      }
      break;
    }
  }

  scene.rho_true = ScalarField(geometry.height, geometry.width, 0.0);
  scene.omega_true = ScalarField(geometry.height, geometry.width, 0.0);
  for (auto [r, c] : pos) {
    Source s;
    s.row = r;
    s.col = c;
    s.amplitude = rng.uniform(kAmpMin, kAmpMax);
    s.omega = rng.uniform(kOmegaMin, kOmegaMax);
    scene.sources.push_back(s);
    scene.rho_true.at(r, c) = s.amplitude;
    scene.omega_true.at(r, c) = s.omega;
  }
  return scene;
}

void synthesize_observation(Scene& scene, OperatorKind op, const FrequencyGrid& freqs, double gamma,
                            double noise_level, uint64_t noise_seed) {
  scene.freqs = freqs;
  scene.gamma = gamma;
  scene.generator_op = op;
  scene.noise_level = noise_level;

  Spectrum clean;
  if (op == OperatorKind::F3) {
    std::vector<SourcePixel> srcs;
    for (const Source& s : scene.sources) srcs.push_back({s.row, s.col, s.amplitude});
    clean = forward_f3(scene.rho_true, scene.omega_true, scene.geometry, freqs, gamma, &srcs);
  } else {
    KernelStack stack(scene.geometry);
    clean = op == OperatorKind::F2 ? forward_f2(scene.rho_true, scene.omega_true, stack, freqs, gamma)
                                   : forward_f1(scene.rho_true, scene.omega_true, stack, freqs, gamma);
  }
  scene.observed = add_sensor_noise(clean, noise_level, noise_seed);
}

namespace {

nlohmann::json geometry_json(const GridGeometry& g) {
  return {{"height", g.height},
          {"width", g.width},
          {"spacing", g.spacing},
          {"standoff", g.standoff},
          {"mu0_over_4pi", g.mu0_over_4pi}};
}

GridGeometry geometry_from_json(const nlohmann::json& j) {
  GridGeometry g;
  g.height = j.at("height");
  g.width = j.at("width");
  g.spacing = j.at("spacing");
  g.standoff = j.at("standoff");
  g.mu0_over_4pi = j.at("mu0_over_4pi");
  return g;
}

}  // namespace

void save_scene(const Scene& scene, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_field_f64(dir / "rho.f64", scene.rho_true);
  write_field_f64(dir / "omega.f64", scene.omega_true);
  write_f64(dir / "spectrum.f64", scene.observed.data.data(), scene.observed.data.size());

  nlohmann::json meta;
  meta["geometry"] = geometry_json(scene.geometry);
  meta["freqs"] = scene.freqs.values;
  meta["gamma"] = scene.gamma;
  meta["class"] = scene.cls.name();
  meta["generator_operator"] = operator_name(scene.generator_op);
  meta["noise_level"] = scene.noise_level;
  meta["seed"] = scene.seed;
  meta["shapes"] = {{"rho", {scene.geometry.height, scene.geometry.width}},
                    {"omega", {scene.geometry.height, scene.geometry.width}},
                    {"spectrum", {scene.freqs.count(), scene.geometry.height, scene.geometry.width}}};
  nlohmann::json srcs = nlohmann::json::array();
  for (const Source& s : scene.sources)
    srcs.push_back({{"row", s.row}, {"col", s.col}, {"amplitude", s.amplitude}, {"omega", s.omega}});
  meta["sources"] = srcs;
  write_json(dir / "meta.json", meta);
}

Scene load_scene(const std::filesystem::path& dir) {
  nlohmann::json meta = read_json(dir / "meta.json");
  Scene scene;
  scene.geometry = geometry_from_json(meta.at("geometry"));
  scene.freqs = FrequencyGrid(meta.at("freqs").get<std::vector<double>>());
  scene.gamma = meta.at("gamma");
  scene.cls = SceneClass::parse(meta.at("class").get<std::string>());
  scene.generator_op = parse_operator(meta.at("generator_operator").get<std::string>());
  scene.noise_level = meta.at("noise_level");
  scene.seed = meta.at("seed");
  for (const auto& s : meta.at("sources"))
    scene.sources.push_back({s.at("row"), s.at("col"), s.at("amplitude"), s.at("omega")});

  scene.rho_true = read_field_f64(dir / "rho.f64", scene.geometry.height, scene.geometry.width);
  scene.omega_true = read_field_f64(dir / "omega.f64", scene.geometry.height, scene.geometry.width);
  scene.observed = Spectrum(scene.freqs, scene.geometry);
  scene.observed.data = read_f64(dir / "spectrum.f64", scene.observed.data.size());
  return scene;
}

nlohmann::json generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<SceneClass> mix = spec.class_mix;
  if (mix.empty()) mix.assign(SceneClass::all().begin(), SceneClass::all().end());

  nlohmann::json scenes = nlohmann::json::array();
  for (int i = 0; i < spec.n; ++i) {
    SceneClass cls = mix[i % mix.size()];
    uint64_t scene_seed = spec.seed + static_cast<uint64_t>(i);
    Scene scene = sample_scene(cls, spec.geometry, scene_seed);
    // independent noise stream, offset so it never collides with placement
    synthesize_observation(scene, spec.op, spec.freqs, spec.gamma, spec.noise_level,
                           scene_seed ^ 0x9e3779b97f4a7c15ULL);
    char name[32];
    std::snprintf(name, sizeof(name), "scene_%04d", i);
    save_scene(scene, out_dir / name);
    scenes.push_back({{"dir", name}, {"class", cls.name()}, {"seed", scene_seed}, {"sources", scene.sources.size()}});
  }

  nlohmann::json manifest;
  manifest["n"] = spec.n;
  manifest["geometry"] = geometry_json(spec.geometry);
  manifest["freqs"] = spec.freqs.values;
  manifest["gamma"] = spec.gamma;
  manifest["operator"] = operator_name(spec.op);
  manifest["noise_level"] = spec.noise_level;
  manifest["seed"] = spec.seed;
  nlohmann::json mixnames = nlohmann::json::array();
  for (const SceneClass& c : mix) mixnames.push_back(c.name());
  manifest["class_mix"] = mixnames;
  manifest["scenes"] = scenes;
  write_json(out_dir / "manifest.json", manifest);
  return manifest;
}

}  // namespace netmy
