#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "optboost/dataset.hpp"
#include "optboost/dynamics.hpp"
#include "optboost/stumps.hpp"

namespace optboost {

inline constexpr std::size_t kMarginHistogramBins = 200;

struct MarginSnapshot {
  std::size_t T = 0;
  std::vector<double> beta;  // signed margin per training example
  double min_margin = 0.0;
  // Equal-width bins over [-1, 1]; bin k covers [-1 + k w, -1 + (k+1) w).
  std::vector<std::size_t> histogram;
};

// beta(i) = margin_numerator(i) / alpha_sum. Throws std::invalid_argument
// when no round has been taken.
MarginSnapshot margins(const Checkpoint& state);
MarginSnapshot margins(const Trajectory& trajectory);

std::vector<std::size_t> margin_histogram(std::span<const double> beta,
                                          std::size_t bins = kMarginHistogramBins);
// Lower edge of histogram bin k.
double histogram_bin_lower(std::size_t k, std::size_t bins = kMarginHistogramBins);

std::vector<std::pair<std::size_t, double>> min_margin_trace(
    std::span<const MarginSnapshot> snapshots);

struct TieGapRecord {
  std::size_t t = 0;
  double gap = std::numeric_limits<double>::infinity();
  std::size_t merged_away = 0;
};

// Error of the best row outside the selected row's equivalence class minus
// the selected row's error; +inf if every row is equivalent to it.
TieGapRecord tie_gap(const DichotomyMatrix& m, std::span<const double> w, double eps);

struct BirkhoffCheckpoint {
  std::size_t T = 0;
  double mean = 0.0;
  double drift = 0.0;  // |mean_T - mean_{floor(T/2)}|
};

struct BirkhoffAverage {
  std::vector<double> running_mean;
  std::vector<BirkhoffCheckpoint> checkpoints;  // T = 2, 4, 8, ... and the end
};

BirkhoffAverage birkhoff_average(std::span<const double> series);

struct RowFrequency {
  std::size_t row = 0;
  std::size_t count = 0;
  double count_fraction = 0.0;  // count / T
  double mass_fraction = 0.0;   // alpha mass / sum of alpha
};

// Rows selected at least once, most frequent first (ties: lower row first).
std::vector<RowFrequency> selection_frequencies(const Checkpoint& state);

// L1 distance between two count-fraction vectors, indexed by row.
double frequency_l1(const Checkpoint& a, const Checkpoint& b);

// (T, distinct rows selected in rounds 1..T) for every round.
std::vector<std::pair<std::size_t, std::size_t>> unique_hypothesis_trace(
    const Trajectory& trajectory);

inline constexpr double kSupportWeightTolerance = 1e-8;
inline constexpr double kSupportMarginTolerance = 1e-2;

struct SupportVectorReport {
  std::vector<std::size_t> support_set;  // union of both criteria
  std::vector<std::size_t> by_weight;    // w_{T+1}(i) > weight_tol
  std::vector<std::size_t> by_margin;    // beta(i) - min_margin < margin_tol
  bool criteria_agree = false;
  bool has_positive = false;
  bool has_negative = false;
  std::vector<double> final_weight;
  std::vector<double> margin_distance;  // beta(i) - min_margin
  double min_margin = 0.0;
  double weighted_margin = 0.0;  // sum_i w_{T+1}(i) beta(i)
};

SupportVectorReport support_vectors(const WeightVector& final_weight,
                                    const MarginSnapshot& snapshot,
                                    std::span<const Label> labels,
                                    double weight_tol = kSupportWeightTolerance,
                                    double margin_tol = kSupportMarginTolerance);

struct Cycle {
  std::size_t start = 0;   // first round t of the periodic stretch
  std::size_t period = 0;
};

// Smallest p <= max_period such that d(w_t, w_{t+p}) < tol and the selected
// rows repeat with period p over the final 3p states of `states` (which must
// be consecutive rounds with a selected row each). The start is extended
// backwards while the condition keeps holding.
std::optional<Cycle> cycle_detect(std::span<const WeightSnapshot> states,
                                  double tol, std::size_t max_period);

// Replays `period` steps of the boosting map from w and returns d(w, A^p(w)),
// or +inf if the replay halts.
double cycle_replay_distance(const DichotomyMatrix& m, const WeightVector& w,
                             std::size_t period, double tie_tol = 0.0);

// (1/T) F_T(x) = sum_eta (alpha_mass(eta) / T) h_eta(x).
double score(std::span<const double> x, std::span<const double> alpha_mass,
             std::size_t T, std::span<const Stump> representatives);
double score(std::span<const double> x, const Checkpoint& state,
             std::span<const Stump> representatives);

struct TestErrorPoint {
  std::size_t T = 0;
  double error = 0.0;
  std::size_t zero_scores = 0;  // counted as errors
};

std::vector<TestErrorPoint> generalization_curve(
    std::span<const Checkpoint> checkpoints, const Dataset& test,
    std::span<const Stump> representatives);

}  // namespace optboost
