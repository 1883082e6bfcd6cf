#include "optboost/geometry.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace optboost {

namespace {

// Affine error functions whose coefficients agree to this are treated as
// identical when clipping segments.
constexpr double kAffineTolerance = 1e-12;

}  // namespace

bool RhoInterval::empty() const {
  if (lo > hi) return true;
  return lo == hi && (lo_open || hi_open);
}

bool RhoInterval::contains(double rho, double slack) const {
  if (slack > 0.0) return rho >= lo - slack && rho <= hi + slack;
  const bool above = lo_open ? rho > lo : rho >= lo;
  const bool below = hi_open ? rho < hi : rho <= hi;
  return above && below;
}

Decomposition decompose(std::span<const double> w,
                        std::span<const std::uint8_t> row) {
  assert(w.size() == row.size());
  Decomposition d;
  d.minus.resize(w.size());
  d.plus.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    d.minus[i] = row[i] ? w[i] : 0.0;
    d.plus[i] = row[i] ? 0.0 : w[i];
  }
  return d;
}

std::vector<double> SegmentPreimage::point(double r) const {
  std::vector<double> p(minus.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = 2.0 * r * minus[i] + 2.0 * (1.0 - r) * plus[i];
  }
  return p;
}

std::optional<SegmentPreimage> t_inverse(std::span<const std::uint8_t> row,
                                         std::span<const double> w,
                                         std::size_t row_index) {
  if (std::abs(err(row, w) - 0.5) > kHalfErrorTolerance) return std::nullopt;
  auto parts = decompose(w, row);
  return SegmentPreimage{row_index, RhoInterval{0.0, 1.0, false, false},
                         std::move(parts.minus), std::move(parts.plus)};
}

Affine err_along(std::span<const std::uint8_t> other, const SegmentPreimage& seg) {
  const double on_minus = err(other, seg.minus);
  const double on_plus = err(other, seg.plus);
  return Affine{2.0 * (on_minus - on_plus), 2.0 * on_plus};
}

namespace {

// Intersects the interval with { rho : rho <= f(rho) } (strict: <).
// Returns false once the interval is known to be empty.
bool clip(RhoInterval& interval, const Affine& f, bool strict) {
  const double c = 1.0 - f.slope;
  const double b = f.intercept;
  if (std::abs(c) <= kAffineTolerance) {
    if (b > kAffineTolerance) return true;
    if (b < -kAffineTolerance) return false;
    return !strict;
  }
  const double bound = b / c;
  if (c > 0.0) {
    if (bound < interval.hi) {
      interval.hi = bound;
      interval.hi_open = strict;
    } else if (bound == interval.hi) {
      interval.hi_open = interval.hi_open || strict;
    }
  } else {
    if (bound > interval.lo) {
      interval.lo = bound;
      interval.lo_open = strict;
    } else if (bound == interval.lo) {
      interval.lo_open = interval.lo_open || strict;
    }
  }
  return !interval.empty();
}

}  // namespace

std::vector<SegmentPreimage> a_inverse(const DichotomyMatrix& m,
                                       std::span<const double> w) {
  if (w.size() != m.examples()) throw std::invalid_argument("weight size mismatch");
  std::vector<SegmentPreimage> out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto seg = t_inverse(m.row(r), w, r);
    if (!seg) continue;
    seg->rho.lo_open = true;  // rho = 0 means a zero-error row
    bool alive = true;
    for (std::size_t s = 0; s < m.rows() && alive; ++s) {
      if (s == r) continue;
      // A lower-index row wins ties, so r must beat it strictly.
      alive = clip(seg->rho, err_along(m.row(s), *seg), s < r);
    }
    if (alive && !seg->rho.empty()) out.push_back(std::move(*seg));
  }
  return out;
}

std::optional<PreimageLocation> locate_preimage(
    std::span<const SegmentPreimage> segments, std::span<const double> w_prev,
    const DichotomyMatrix& m, double tol) {
  std::optional<PreimageLocation> best;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& seg = segments[k];
    const double rho = err(m.row(seg.row), w_prev);
    if (!seg.rho.contains(rho, tol)) continue;
    const double distance = l1_distance(seg.point(rho), w_prev);
    if (distance > tol) continue;
    if (!best || distance < best->distance) best = PreimageLocation{k, rho, distance};
  }
  return best;
}

Region region_of(const DichotomyMatrix& m, std::span<const double> w) {
  std::vector<double> errors(m.rows());
  m.errors(w, errors);
  Selection sel = ada_select_from_errors(errors, 0.0);
  Region region;
  region.selected_row = sel.row;
  region.ties = std::move(sel.ties);
  region.in_sigma0 = sel.min_error > 0.0;
  return region;
}

double interior_sample(const RhoInterval& interval, std::size_t k, std::size_t n) {
  return interval.lo + (interval.hi - interval.lo) *
                           (static_cast<double>(k) + 0.5) / static_cast<double>(n);
}

Epsilon0Report epsilon0_check(const DichotomyMatrix& m, std::span<const double> w,
                              std::size_t samples) {
  const auto segments = a_inverse(m, w);
  if (segments.empty()) throw std::invalid_argument("w has no preimage");

  std::vector<double> at_w(m.rows());
  m.errors(w, at_w);
  const double min_at_w = *std::min_element(at_w.begin(), at_w.end());

  Epsilon0Report report;
  std::vector<double> at_prev(m.rows());
  const std::size_t S = segments.size();
  for (std::size_t s = 0; s < S; ++s) {
    const std::size_t count = samples / S + (s < samples % S ? 1 : 0);
    for (std::size_t k = 0; k < count; ++k) {
      const auto prev = segments[s].point(interior_sample(segments[s].rho, k, count));
      m.errors(prev, at_prev);
      ++report.points;
      bool violated = false;
      for (std::size_t r = 0; r < m.rows(); ++r) {
        if (at_prev[r] > 2.0 * at_w[r] + 1e-12) violated = true;
        if (at_w[r] > 0.0) report.max_ratio = std::max(report.max_ratio, at_prev[r] / at_w[r]);
      }
      const double selected = at_prev[ada_select_from_errors(at_prev, 0.0).row];
      if (selected > 2.0 * min_at_w + 1e-12) violated = true;
      if (min_at_w > 0.0) {
        report.max_selected_ratio = std::max(report.max_selected_ratio, selected / min_at_w);
      }
      if (violated) ++report.violations;
    }
  }
  return report;
}

std::string segments_to_json(std::span<const SegmentPreimage> segments) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& seg : segments) {
    out.push_back({{"row", seg.row},
                   {"rho_lo", seg.rho.lo},
                   {"rho_hi", seg.rho.hi},
                   {"lo_open", seg.rho.lo_open},
                   {"hi_open", seg.rho.hi_open},
                   {"lower_endpoint", seg.lower_endpoint()},
                   {"upper_endpoint", seg.upper_endpoint()}});
  }
  return out.dump(2);
}

}  // namespace optboost
