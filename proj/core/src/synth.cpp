#include "optboost/synth.hpp"

#include <cmath>
#include <random>
#include <string>

namespace optboost {

SynthKind parse_synth_kind(std::string_view name) {
  if (name == "two_gaussians") return SynthKind::kTwoGaussians;
  if (name == "rudin3") return SynthKind::kRudin3;
  if (name == "xor_grid") return SynthKind::kXorGrid;
  throw DataError("unknown synthetic dataset kind '" + std::string(name) + "'");
}

std::string_view to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::kTwoGaussians: return "two_gaussians";
    case SynthKind::kRudin3: return "rudin3";
    case SynthKind::kXorGrid: return "xor_grid";
  }
  return "unknown";
}

Dataset make_two_gaussians(std::size_t m, double separation, std::uint64_t seed) {
  if (m < 2) throw DataError("two_gaussians needs m >= 2");
  if (!std::isfinite(separation) || separation < 0.0) {
    throw DataError("two_gaussians needs a finite separation >= 0");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> features;
  std::vector<Label> labels;
  features.reserve(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    const Label y = i % 2 == 0 ? 1 : -1;
    const double centre = 0.5 * separation * y;
    features.push_back(centre + normal(rng));
    features.push_back(centre + normal(rng));
    labels.push_back(y);
  }
  return Dataset(std::move(features), 2, std::move(labels), {"x0", "x1"});
}

Dataset make_rudin3() {
  // Example 0 is lowest on both features; example 1 highest on x1 and
  // example 2 highest on x0, so each one sits alone at the end of a split.
  return Dataset({1.0, 1.0, 2.0, 3.0, 3.0, 2.0}, 2, {1, 1, 1}, {"x0", "x1"});
}

Dataset make_xor_grid(std::size_t per_side, double jitter, std::uint64_t seed) {
  if (per_side < 2) throw DataError("xor_grid needs per_side >= 2");
  if (!(jitter >= 0.0 && jitter < 1.0)) throw DataError("xor_grid needs jitter in [0, 1)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> offset(-0.5, 0.5);
  const double cell = 1.0 / static_cast<double>(per_side);
  std::vector<double> features;
  std::vector<Label> labels;
  for (std::size_t a = 0; a < per_side; ++a) {
    for (std::size_t b = 0; b < per_side; ++b) {
      const double x = (static_cast<double>(a) + 0.5 + jitter * offset(rng)) * cell;
      const double y = (static_cast<double>(b) + 0.5 + jitter * offset(rng)) * cell;
      features.push_back(x);
      features.push_back(y);
      labels.push_back(((x < 0.5) != (y < 0.5)) ? -1 : 1);
    }
  }
  return Dataset(std::move(features), 2, std::move(labels), {"x0", "x1"});
}

Dataset synthesize(SynthKind kind, const SynthParams& params, std::uint64_t seed) {
  switch (kind) {
    case SynthKind::kTwoGaussians:
      return make_two_gaussians(params.m, params.separation, seed);
    case SynthKind::kRudin3:
      return make_rudin3();
    case SynthKind::kXorGrid:
      return make_xor_grid(params.per_side, params.jitter, seed);
  }
  throw DataError("unknown synthetic dataset kind");
}

void synth(SynthKind kind, const SynthParams& params, std::uint64_t seed,
           const std::filesystem::path& out) {
  save_csv(synthesize(kind, params, seed), out);
}

}  // namespace optboost
