#include "optboost/dynamics.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>

namespace optboost {

WeightVector WeightVector::uniform(std::size_t m) {
  if (m == 0) throw std::invalid_argument("weight vector needs m >= 1");
  return WeightVector(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

double WeightVector::sum() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0);
}

bool WeightVector::on_simplex(double tol) const {
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) return false;
  }
  return std::abs(sum() - 1.0) <= tol;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

double err(std::span<const std::uint8_t> row, std::span<const double> w) {
  assert(row.size() == w.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) sum += row[i] ? w[i] : 0.0;
  return sum;
}

Selection ada_select_from_errors(std::span<const double> errors, double tie_tol) {
  if (errors.empty()) throw std::invalid_argument("ada_select on an empty matrix");
  Selection sel;
  sel.min_error = *std::min_element(errors.begin(), errors.end());
  const double cutoff = sel.min_error + tie_tol;
  for (std::size_t r = 0; r < errors.size(); ++r) {
    if (errors[r] <= cutoff) sel.ties.push_back(r);
  }
  // NaN errors compare false everywhere.
  if (sel.ties.empty()) sel.ties.push_back(0);
  sel.row = sel.ties.front();
  return sel;
}

Selection ada_select(const DichotomyMatrix& m, std::span<const double> w,
                     double tie_tol) {
  std::vector<double> errors(m.rows());
  m.errors(w, errors);
  return ada_select_from_errors(errors, tie_tol);
}

namespace {

// Applies the hypothetical update for a row whose error is already known.
// Returns false if the result is not a finite point of the simplex.
bool apply_update(std::span<const std::uint8_t> row, std::span<const double> w,
                  double e, std::vector<double>& out) {
  const double wrong = 0.5 / e;
  const double right = 0.5 / (1.0 - e);
  out.resize(w.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    out[i] = w[i] * (row[i] ? wrong : right);
    total += out[i];
  }
  if (!std::isfinite(total) || !(total > 0.0)) return false;
  for (double& v : out) v /= total;
  return true;
}

}  // namespace

WeightVector t_update(std::span<const std::uint8_t> row, const WeightVector& w) {
  if (row.size() != w.size()) throw std::invalid_argument("row/weight size mismatch");
  const double e = err(row, w.values());
  if (!(e > 0.0 && e < 1.0)) {
    throw DomainError("t_update needs 0 < err < 1, got " + std::to_string(e));
  }
  std::vector<double> out;
  if (!apply_update(row, w.values(), e, out)) {
    throw DomainError("t_update produced a non-finite weight");
  }
  return WeightVector(std::move(out));
}

double alpha(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) {
    throw DomainError("alpha needs 0 < eps < 1/2, got " + std::to_string(eps));
  }
  return 0.5 * std::log((1.0 - eps) / eps);
}

std::string to_string(HaltReason::Kind kind) {
  switch (kind) {
    case HaltReason::Kind::kCompleted: return "completed";
    case HaltReason::Kind::kZeroError: return "zero_error";
    case HaltReason::Kind::kNoWeakLearning: return "no_weak_learning";
    case HaltReason::Kind::kNumericFailure: return "numeric_failure";
  }
  return "unknown";
}

namespace {

// Shared by a_update and the runner, which reuses its error buffer.
StepResult step_from_errors(const DichotomyMatrix& m, const WeightVector& w,
                            std::span<const double> errors, double tie_tol) {
  StepResult step;
  const Selection sel = ada_select_from_errors(errors, tie_tol);
  step.record.selected_row = sel.row;
  step.record.tie_count = sel.ties.size();
  step.record.min_row_error = sel.min_error;
  step.record.eps = errors[sel.row];

  if (!std::all_of(errors.begin(), errors.end(), [](double e) { return std::isfinite(e); })) {
    step.halt = {HaltReason::Kind::kNumericFailure, sel.row, 0};
    return step;
  }
  if (sel.min_error <= 0.0) {
    const auto zero = std::find(errors.begin(), errors.end(), sel.min_error);
    step.halt = {HaltReason::Kind::kZeroError,
                 static_cast<std::size_t>(zero - errors.begin()), 0};
    return step;
  }
  if (step.record.eps > 0.5 - kNoWeakLearningTolerance) {
    step.halt = {HaltReason::Kind::kNoWeakLearning, sel.row, 0};
    return step;
  }
  step.record.alpha = alpha(step.record.eps);
  std::vector<double> next;
  if (!std::isfinite(step.record.alpha) ||
      !apply_update(m.row(sel.row), w.values(), step.record.eps, next)) {
    step.halt = {HaltReason::Kind::kNumericFailure, sel.row, 0};
    return step;
  }
  step.next = WeightVector(std::move(next));
  return step;
}

}  // namespace

StepResult a_update(const DichotomyMatrix& m, const WeightVector& w,
                    double tie_tol) {
  if (w.size() != m.examples()) throw std::invalid_argument("weight size mismatch");
  std::vector<double> errors(m.rows());
  m.errors(w.values(), errors);
  return step_from_errors(m, w, errors, tie_tol);
}

WeightVector init_weight(const InitMode& mode, std::size_t m) {
  if (m < 2) throw std::invalid_argument("init_weight needs m >= 2");
  if (std::holds_alternative<UniformInit>(mode)) return WeightVector::uniform(m);
  std::mt19937_64 rng(std::get<RandomSimplexInit>(mode).seed);
  std::exponential_distribution<double> exponential(1.0);
  std::vector<double> w(m);
  double total = 0.0;
  for (double& v : w) {
    v = exponential(rng);
    total += v;
  }
  for (double& v : w) v /= total;
  return WeightVector(std::move(w));
}

std::vector<std::size_t> SnapshotSchedule::rounds_up_to(std::size_t last) const {
  std::vector<std::size_t> out;
  for (std::size_t t = 1; t <= std::min(dense_until, last); ++t) out.push_back(t);
  if (per_decade > 0) {
    const double base = static_cast<double>(std::max<std::size_t>(dense_until, 1));
    for (std::size_t k = 1;; ++k) {
      const double r = std::round(
          base * std::pow(10.0, static_cast<double>(k) / static_cast<double>(per_decade)));
      if (r > static_cast<double>(last)) break;
      const auto t = static_cast<std::size_t>(r);
      if (out.empty() || t > out.back()) out.push_back(t);
    }
  }
  if (last > 0 && (out.empty() || out.back() != last)) out.push_back(last);
  return out;
}

Checkpoint Trajectory::current_checkpoint() const {
  return Checkpoint{rounds.size(), margin_numerator, alpha_sum,
                    selection_count, alpha_mass,       final_weight};
}

double tie_gap_from_errors(std::span<const double> errors,
                           std::span<const std::size_t> class_of,
                           std::size_t best) {
  double second = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < errors.size(); ++r) {
    if (class_of[r] != class_of[best]) second = std::min(second, errors[r]);
  }
  if (std::isinf(second)) return second;
  return std::max(0.0, second - errors[best]);
}

RunResult run(const DichotomyMatrix& m, const WeightVector& w1,
              const RunOptions& options) {
  if (options.rounds < 1) throw std::invalid_argument("run needs T >= 1");
  if (m.empty()) throw std::invalid_argument("run needs a nonempty matrix");
  if (w1.size() != m.examples()) throw std::invalid_argument("weight size mismatch");
  if (!std::is_sorted(options.checkpoints.begin(), options.checkpoints.end())) {
    throw std::invalid_argument("checkpoints must be ascending");
  }

  RunResult result;
  Trajectory& tr = result.trajectory;
  tr.initial_weight = w1;
  tr.margin_numerator.assign(m.examples(), 0.0);
  tr.selection_count.assign(m.rows(), 0);
  tr.alpha_mass.assign(m.rows(), 0.0);
  tr.burn_in = m.rows() + 1;
  tr.rounds.reserve(options.rounds);

  const auto snapshot_rounds = options.snapshots.rounds_up_to(options.rounds);
  auto next_snapshot = snapshot_rounds.begin();
  auto next_checkpoint = options.checkpoints.begin();

  std::optional<EquivalenceIndex> equivalence;
  if (options.equivalence_eps) equivalence.emplace(m, *options.equivalence_eps);

  std::deque<WeightSnapshot> tail;
  std::vector<double> errors(m.rows());
  WeightVector w = w1;

  for (std::size_t t = 1; t <= options.rounds; ++t) {
    m.errors(w.values(), errors);
    StepResult step = step_from_errors(m, w, errors, options.tie_tol);

    tr.min_error_overall = std::min(tr.min_error_overall, step.record.min_row_error);
    if (t > tr.burn_in) {
      tr.min_error_after_burn_in =
          std::min(tr.min_error_after_burn_in, step.record.min_row_error);
    }
    const bool took_step = step.halt.completed();
    if (next_snapshot != snapshot_rounds.end() && *next_snapshot == t) {
      tr.weight_snapshots.push_back(
          {t, w, took_step ? std::optional(step.record.selected_row) : std::nullopt});
      ++next_snapshot;
    }
    if (!took_step) {
      result.halt = step.halt;
      result.halt.t = t;
      break;
    }

    RoundRecord& rec = step.record;
    rec.t = t;
    if (equivalence) {
      const auto& class_of = equivalence->update(w.values());
      rec.tie_gap = tie_gap_from_errors(errors, class_of, rec.selected_row);
      rec.merged_away = equivalence->merged_away();
    }

    auto row = m.row(rec.selected_row);
    for (std::size_t i = 0; i < row.size(); ++i) {
      tr.margin_numerator[i] += row[i] ? -rec.alpha : rec.alpha;
    }
    tr.alpha_sum += rec.alpha;
    ++tr.selection_count[rec.selected_row];
    tr.alpha_mass[rec.selected_row] += rec.alpha;

    if (options.tail_length > 0) {
      tail.push_back({t, w, rec.selected_row});
      if (tail.size() > options.tail_length) tail.pop_front();
    }
    if (options.hook && t % std::max<std::size_t>(options.hook_every, 1) == 0) {
      options.hook(RoundView{rec, w, step.next});
    }
    tr.rounds.push_back(rec);
    w = std::move(step.next);

    while (next_checkpoint != options.checkpoints.end() && *next_checkpoint <= t) {
      if (*next_checkpoint == t) {
        tr.checkpoints.push_back(Checkpoint{t, tr.margin_numerator, tr.alpha_sum,
                                            tr.selection_count, tr.alpha_mass, w});
      }
      ++next_checkpoint;
    }
  }

  tr.final_weight = w;
  tr.tail.assign(std::make_move_iterator(tail.begin()),
                 std::make_move_iterator(tail.end()));
  if (tr.weight_snapshots.empty() ||
      tr.weight_snapshots.back().t != tr.rounds.size() + 1) {
    tr.weight_snapshots.push_back({tr.rounds.size() + 1, w, std::nullopt});
  }
  if (result.halt.completed()) result.halt.t = tr.rounds.size();
  return result;
}

}  // namespace optboost
