#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>

#include "optboost/dataset.hpp"

namespace optboost {

enum class SynthKind { kTwoGaussians, kRudin3, kXorGrid };

// Throws DataError for unknown names.
SynthKind parse_synth_kind(std::string_view name);
std::string_view to_string(SynthKind kind);

struct SynthParams {
  // two_gaussians: m examples, labels alternating +1/-1, unit-variance
  // Gaussians in 2D centred at +-(separation/2, separation/2).
  std::size_t m = 200;
  double separation = 2.0;
  // xor_grid: per_side^2 points on a jittered grid in the unit square,
  // labelled by which diagonal pair of quadrants they fall in.
  std::size_t per_side = 6;
  double jitter = 0.25;
};

Dataset make_two_gaussians(std::size_t m, double separation, std::uint64_t seed);

// Three positive examples in 2D whose pruned stump matrix is exactly the
// three single-misclassification rows.
Dataset make_rudin3();

Dataset make_xor_grid(std::size_t per_side, double jitter, std::uint64_t seed);

Dataset synthesize(SynthKind kind, const SynthParams& params, std::uint64_t seed);

// synthesize + save_csv.
void synth(SynthKind kind, const SynthParams& params, std::uint64_t seed,
           const std::filesystem::path& out);

}  // namespace optboost
