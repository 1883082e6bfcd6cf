#include "optboost/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace optboost {

std::vector<std::size_t> margin_histogram(std::span<const double> beta,
                                          std::size_t bins) {
  std::vector<std::size_t> counts(bins, 0);
  const double width = 2.0 / static_cast<double>(bins);
  for (double b : beta) {
    auto k = static_cast<std::ptrdiff_t>(std::floor((b + 1.0) / width));
    k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    ++counts[static_cast<std::size_t>(k)];
  }
  return counts;
}

double histogram_bin_lower(std::size_t k, std::size_t bins) {
  return -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(bins);
}

MarginSnapshot margins(const Checkpoint& state) {
  if (state.T == 0 || !(state.alpha_sum > 0.0)) {
    throw std::invalid_argument("margins need at least one round");
  }
  MarginSnapshot snap;
  snap.T = state.T;
  snap.beta.resize(state.margin_numerator.size());
  for (std::size_t i = 0; i < snap.beta.size(); ++i) {
    snap.beta[i] = state.margin_numerator[i] / state.alpha_sum;
  }
  snap.min_margin = *std::min_element(snap.beta.begin(), snap.beta.end());
  snap.histogram = margin_histogram(snap.beta);
  return snap;
}

MarginSnapshot margins(const Trajectory& trajectory) {
  return margins(trajectory.current_checkpoint());
}

std::vector<std::pair<std::size_t, double>> min_margin_trace(
    std::span<const MarginSnapshot> snapshots) {
  if (snapshots.empty()) throw std::invalid_argument("min_margin_trace needs snapshots");
  std::vector<std::pair<std::size_t, double>> trace;
  trace.reserve(snapshots.size());
  for (const auto& s : snapshots) trace.emplace_back(s.T, s.min_margin);
  return trace;
}

TieGapRecord tie_gap(const DichotomyMatrix& m, std::span<const double> w, double eps) {
  if (m.empty()) throw std::invalid_argument("tie_gap on an empty matrix");
  EquivalenceIndex index(m, eps);
  const auto& class_of = index.update(w);
  std::vector<double> errors(m.rows());
  m.errors(w, errors);
  const std::size_t best = ada_select_from_errors(errors, 0.0).row;
  TieGapRecord rec;
  rec.gap = tie_gap_from_errors(errors, class_of, best);
  rec.merged_away = index.merged_away();
  return rec;
}

BirkhoffAverage birkhoff_average(std::span<const double> series) {
  if (series.empty()) throw std::invalid_argument("birkhoff_average needs data");
  BirkhoffAverage out;
  out.running_mean.resize(series.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < series.size(); ++t) {
    sum += series[t];
    out.running_mean[t] = sum / static_cast<double>(t + 1);
  }
  auto add = [&](std::size_t T) {
    out.checkpoints.push_back(
        {T, out.running_mean[T - 1],
         std::abs(out.running_mean[T - 1] - out.running_mean[T / 2 - 1])});
  };
  std::size_t T = 2;
  for (; T <= series.size(); T *= 2) add(T);
  if (series.size() >= 2 && out.checkpoints.back().T != series.size()) {
    add(series.size());
  }
  return out;
}

std::vector<RowFrequency> selection_frequencies(const Checkpoint& state) {
  if (state.T == 0) throw std::invalid_argument("selection_frequencies needs T >= 1");
  std::vector<RowFrequency> out;
  for (std::size_t r = 0; r < state.selection_count.size(); ++r) {
    if (state.selection_count[r] == 0) continue;
    out.push_back({r, state.selection_count[r],
                   static_cast<double>(state.selection_count[r]) /
                       static_cast<double>(state.T),
                   state.alpha_mass[r] / state.alpha_sum});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.count > b.count;
  });
  return out;
}

double frequency_l1(const Checkpoint& a, const Checkpoint& b) {
  if (a.selection_count.size() != b.selection_count.size() || a.T == 0 || b.T == 0) {
    throw std::invalid_argument("incompatible checkpoints");
  }
  double d = 0.0;
  for (std::size_t r = 0; r < a.selection_count.size(); ++r) {
    d += std::abs(static_cast<double>(a.selection_count[r]) / static_cast<double>(a.T) -
                  static_cast<double>(b.selection_count[r]) / static_cast<double>(b.T));
  }
  return d;
}

std::vector<std::pair<std::size_t, std::size_t>> unique_hypothesis_trace(
    const Trajectory& trajectory) {
  std::vector<std::pair<std::size_t, std::size_t>> trace;
  trace.reserve(trajectory.rounds.size());
  std::vector<bool> seen(trajectory.selection_count.size(), false);
  std::size_t distinct = 0;
  for (const auto& rec : trajectory.rounds) {
    if (!seen[rec.selected_row]) {
      seen[rec.selected_row] = true;
      ++distinct;
    }
    trace.emplace_back(rec.t, distinct);
  }
  return trace;
}

SupportVectorReport support_vectors(const WeightVector& final_weight,
                                    const MarginSnapshot& snapshot,
                                    std::span<const Label> labels,
                                    double weight_tol, double margin_tol) {
  const std::size_t m = snapshot.beta.size();
  if (final_weight.size() != m || labels.size() != m) {
    throw std::invalid_argument("support_vectors: size mismatch");
  }
  SupportVectorReport rep;
  rep.min_margin = snapshot.min_margin;
  rep.final_weight.assign(final_weight.values().begin(), final_weight.values().end());
  rep.margin_distance.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    rep.margin_distance[i] = snapshot.beta[i] - snapshot.min_margin;
    rep.weighted_margin += final_weight[i] * snapshot.beta[i];
    const bool heavy = final_weight[i] > weight_tol;
    const bool tight = rep.margin_distance[i] < margin_tol;
    if (heavy) rep.by_weight.push_back(i);
    if (tight) rep.by_margin.push_back(i);
    if (heavy || tight) {
      rep.support_set.push_back(i);
      (labels[i] > 0 ? rep.has_positive : rep.has_negative) = true;
    }
  }
  rep.criteria_agree = rep.by_weight == rep.by_margin;
  return rep;
}

std::optional<Cycle> cycle_detect(std::span<const WeightSnapshot> states,
                                  double tol, std::size_t max_period) {
  const std::size_t n = states.size();
  auto repeats = [&](std::size_t j, std::size_t p) {
    return states[j].selected_row == states[j + p].selected_row &&
           l1_distance(states[j].w.values(), states[j + p].w.values()) < tol;
  };
  for (std::size_t p = 1; p <= max_period && 4 * p <= n; ++p) {
    bool periodic = true;
    for (std::size_t j = n - 4 * p; j + p < n && periodic; ++j) {
      periodic = repeats(j, p);
    }
    if (!periodic) continue;
    std::size_t first = n - 4 * p;
    while (first > 0 && repeats(first - 1, p)) --first;
    return Cycle{states[first].t, p};
  }
  return std::nullopt;
}

double cycle_replay_distance(const DichotomyMatrix& m, const WeightVector& w,
                             std::size_t period, double tie_tol) {
  WeightVector current = w;
  for (std::size_t k = 0; k < period; ++k) {
    StepResult step = a_update(m, current, tie_tol);
    if (!step.halt.completed()) return std::numeric_limits<double>::infinity();
    current = std::move(step.next);
  }
  return l1_distance(current.values(), w.values());
}

double score(std::span<const double> x, std::span<const double> alpha_mass,
             std::size_t T, std::span<const Stump> representatives) {
  if (T == 0) throw std::invalid_argument("score needs T >= 1");
  if (alpha_mass.size() != representatives.size()) {
    throw std::invalid_argument("score: one representative per row required");
  }
  double f = 0.0;
  for (std::size_t r = 0; r < alpha_mass.size(); ++r) {
    if (alpha_mass[r] != 0.0) f += alpha_mass[r] * representatives[r].predict(x);
  }
  return f / static_cast<double>(T);
}

double score(std::span<const double> x, const Checkpoint& state,
             std::span<const Stump> representatives) {
  return score(x, state.alpha_mass, state.T, representatives);
}

std::vector<TestErrorPoint> generalization_curve(
    std::span<const Checkpoint> checkpoints, const Dataset& test,
    std::span<const Stump> representatives) {
  if (test.size() == 0) throw std::invalid_argument("empty test set");
  std::vector<TestErrorPoint> curve;
  for (const auto& cp : checkpoints) {
    TestErrorPoint point{cp.T, 0.0, 0};
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      const double s = score(test.row(i), cp, representatives);
      if (s == 0.0) {
        ++point.zero_scores;
        ++wrong;
      } else if ((s > 0.0 ? 1 : -1) != test.label(i)) {
        ++wrong;
      }
    }
    point.error = static_cast<double>(wrong) / static_cast<double>(test.size());
    curve.push_back(point);
  }
  return curve;
}

}  // namespace optboost
