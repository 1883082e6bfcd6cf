#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "optboost/stumps.hpp"

namespace optboost {

// Raised when a map is evaluated outside its domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A point of the probability simplex over the training examples.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::vector<double> values) : values_(std::move(values)) {}

  static WeightVector uniform(std::size_t m);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }

  double sum() const;
  // Nonnegative entries summing to 1 within tol.
  bool on_simplex(double tol = 1e-12) const;

  bool operator==(const WeightVector&) const = default;

 private:
  std::vector<double> values_;
};

// d(a, b) = sum_i |a(i) - b(i)|.
double l1_distance(std::span<const double> a, std::span<const double> b);

// Sum of w(i) over the examples the row misclassifies.
double err(std::span<const std::uint8_t> row, std::span<const double> w);

struct Selection {
  std::size_t row = 0;
  std::vector<std::size_t> ties;  // rows within tie_tol of the minimum
  double min_error = 0.0;
};

// Lowest-index row among those with error <= min error + tie_tol.
Selection ada_select(const DichotomyMatrix& m, std::span<const double> w,
                     double tie_tol = 0.0);
Selection ada_select_from_errors(std::span<const double> errors, double tie_tol);

// Hypothetical update assuming `row` is selected: misclassified entries are
// scaled by 1/(2 err), the others by 1/(2 (1 - err)), then renormalized.
// Throws DomainError when err is 0 or 1.
WeightVector t_update(std::span<const std::uint8_t> row, const WeightVector& w);

// Vote weight 1/2 ln((1 - eps) / eps). Throws DomainError outside (0, 1/2).
double alpha(double eps);

// Minimum error above this triggers the no-weak-learning halt.
inline constexpr double kNoWeakLearningTolerance = 1e-12;

struct RoundRecord {
  std::size_t t = 0;
  std::size_t selected_row = 0;
  double eps = 0.0;
  double alpha = 0.0;
  // Error gap to the best non-equivalent row; +inf when every other row is
  // equivalent; empty when not computed.
  std::optional<double> tie_gap;
  std::size_t tie_count = 1;
  std::size_t merged_away = 0;
  double min_row_error = 0.0;

  bool operator==(const RoundRecord&) const = default;
};

struct HaltReason {
  enum class Kind { kCompleted, kZeroError, kNoWeakLearning, kNumericFailure };
  Kind kind = Kind::kCompleted;
  std::size_t row = 0;  // perfect row for kZeroError
  std::size_t t = 0;    // round at which the halt happened

  bool completed() const { return kind == Kind::kCompleted; }
  bool operator==(const HaltReason&) const = default;
};

std::string to_string(HaltReason::Kind kind);

struct StepResult {
  HaltReason halt;     // kCompleted when the step was taken
  WeightVector next;   // empty unless the step was taken
  RoundRecord record;  // t is left 0; the runner fills it in
};

// One application of the boosting map: select, update, record eps and alpha.
StepResult a_update(const DichotomyMatrix& m, const WeightVector& w,
                    double tie_tol = 0.0);

struct UniformInit {};
struct RandomSimplexInit {
  std::uint64_t seed = 0;
};
using InitMode = std::variant<UniformInit, RandomSimplexInit>;

// Uniform weights, or a flat-Dirichlet draw (normalized unit exponentials).
WeightVector init_weight(const InitMode& mode, std::size_t m);

// Rounds at which weights are stored: every round up to dense_until, then
// per_decade log-spaced rounds per factor of ten.
struct SnapshotSchedule {
  std::size_t dense_until = 1000;
  std::size_t per_decade = 20;

  std::vector<std::size_t> rounds_up_to(std::size_t last) const;
};

struct WeightSnapshot {
  std::size_t t = 0;  // w_t, the weight entering round t
  WeightVector w;
  std::optional<std::size_t> selected_row;  // row chosen at w_t, if a round ran

  bool operator==(const WeightSnapshot&) const = default;
};

// Cumulative state after T rounds.
struct Checkpoint {
  std::size_t T = 0;
  std::vector<double> margin_numerator;  // sum_t alpha_t (1 - 2 eta_t(i))
  double alpha_sum = 0.0;
  std::vector<std::size_t> selection_count;
  std::vector<double> alpha_mass;
  WeightVector next_weight;  // w_{T+1}

  bool operator==(const Checkpoint&) const = default;
};

struct Trajectory {
  WeightVector initial_weight;
  std::vector<RoundRecord> rounds;
  std::vector<double> margin_numerator;
  double alpha_sum = 0.0;
  std::vector<std::size_t> selection_count;
  std::vector<double> alpha_mass;
  std::vector<WeightSnapshot> weight_snapshots;
  std::vector<Checkpoint> checkpoints;
  // The last tail_length states (w_t with the row chosen there), contiguous.
  std::vector<WeightSnapshot> tail;
  WeightVector final_weight;
  // Minimum over rounds of min_eta eta . w_t, overall and for t > burn_in,
  // with burn_in = rows + 1. The latter is +inf if no round passed burn-in.
  double min_error_overall = std::numeric_limits<double>::infinity();
  double min_error_after_burn_in = std::numeric_limits<double>::infinity();
  std::size_t burn_in = 0;

  std::size_t rounds_completed() const { return rounds.size(); }
  // State after the last completed round as a checkpoint.
  Checkpoint current_checkpoint() const;

  bool operator==(const Trajectory&) const = default;
};

struct RoundView {
  const RoundRecord& record;
  const WeightVector& before;  // w_t
  const WeightVector& after;   // w_{t+1}
};
using RoundHook = std::function<void(const RoundView&)>;

struct RunOptions {
  std::size_t rounds = 1;
  double tie_tol = 0.0;
  // When set, each round's tie gap is computed with this equivalence eps.
  std::optional<double> equivalence_eps;
  SnapshotSchedule snapshots;
  // Rounds T (ascending) after which a Checkpoint is stored.
  std::vector<std::size_t> checkpoints;
  std::size_t tail_length = 0;
  RoundHook hook;
  std::size_t hook_every = 1;
};

struct RunResult {
  Trajectory trajectory;
  HaltReason halt;
};

// Iterates the boosting map from w1 for up to options.rounds rounds. On a
// halt the trajectory holds every round completed before it.
RunResult run(const DichotomyMatrix& m, const WeightVector& w1,
              const RunOptions& options);

// Gap between the best row and the best row outside its equivalence class.
// Returns +inf when no such row exists.
double tie_gap_from_errors(std::span<const double> errors,
                           std::span<const std::size_t> class_of,
                           std::size_t best);

}  // namespace optboost
