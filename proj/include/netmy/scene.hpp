#ifndef NETMY_SCENE_HPP
#define NETMY_SCENE_HPP

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "netmy/field.hpp"
#include "netmy/operators.hpp"

#include "json.hpp"

namespace netmy {

enum class CountBand { few, medium, many };
enum class SepBand { close, medium, far };

/// One of the eight benchmark scene classes. The count x separation grid is
/// not full: many/medium is not part of the benchmark.
struct SceneClass {
  CountBand count;
  SepBand separation;

  static const std::array<SceneClass, 8>& all();
  static SceneClass parse(const std::string& name);  // throws on unknown names
  std::string name() const;

  bool operator==(const SceneClass&) const = default;
};

struct Source {
  int row, col;
  double amplitude;
  double omega;  // GHz
};

struct Scene {
  GridGeometry geometry;
  FrequencyGrid freqs;
  double gamma = 0.5;

  ScalarField rho_true;
  ScalarField omega_true;  // 0 off-support
  std::vector<Source> sources;
  SceneClass cls{CountBand::few, SepBand::far};

  Spectrum observed;
  OperatorKind generator_op = OperatorKind::F3;
  double noise_level = 0.0;
  uint64_t seed = 0;
};

/// Effective point-spread width 2 z0 sqrt(ln 2 / (k z0 + 3)) in nm.
double psf_width(double z0, double k);

/// Count band limits (inclusive).
std::pair<int, int> count_band_range(CountBand b);

/// Minimum-pairwise-separation band [lo, hi] in nm for a geometry; hi may be
/// infinite. The close band's upper edge is the PSF width clamped below by one
/// pixel so that single-pixel sources on a coarse grid can realize it.
std::pair<double, double> separation_band_range(SepBand b, const GridGeometry& g);

/// Draws ground truth only (no observation). Deterministic given the seed.
/// Throws SolverError if placement exceeds 10,000 attempts.
Scene sample_scene(SceneClass cls, const GridGeometry& geometry, uint64_t rng_seed);

/// Synthesizes scene.observed with the chosen operator plus sensor noise.
void synthesize_observation(Scene& scene, OperatorKind op, const FrequencyGrid& freqs, double gamma,
                            double noise_level, uint64_t noise_seed);

/// Minimum pairwise center-to-center separation in nm (infinity for < 2 sources).
double min_pairwise_separation(const Scene& scene);

void save_scene(const Scene& scene, const std::filesystem::path& dir);
Scene load_scene(const std::filesystem::path& dir);

struct DatasetSpec {
  int n = 8;
  std::vector<SceneClass> class_mix;  // cycled over samples; empty = all eight
  GridGeometry geometry;
  FrequencyGrid freqs = FrequencyGrid::uniform(1.0, 3.0, 50);
  double gamma = 0.5;
  OperatorKind op = OperatorKind::F3;
  double noise_level = 0.01;
  uint64_t seed = 1;
};

/// Writes n scenes under out_dir as scene_%04d/ plus manifest.json; returns
/// the manifest. Scene i derives its generator seed as seed + i.
nlohmann::json generate_dataset(const DatasetSpec& spec, const std::filesystem::path& out_dir);

}  // namespace netmy

#endif
