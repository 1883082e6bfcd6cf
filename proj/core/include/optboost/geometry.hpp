#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "optboost/dynamics.hpp"

namespace optboost {

// Tolerance for |eta . w - 1/2| when deciding that w can have a preimage
// through row eta.
inline constexpr double kHalfErrorTolerance = 1e-10;

struct RhoInterval {
  double lo = 0.0;
  double hi = 1.0;
  bool lo_open = false;
  bool hi_open = false;

  bool empty() const;
  bool contains(double rho, double slack = 0.0) const;
  bool operator==(const RhoInterval&) const = default;
};

// Misclassified and correctly classified parts of w with respect to a row.
struct Decomposition {
  std::vector<double> minus;  // w(i) eta(i)
  std::vector<double> plus;   // w(i) (1 - eta(i))
};

Decomposition decompose(std::span<const double> w, std::span<const std::uint8_t> row);

// The line w(rho) = 2 rho w_minus + 2 (1 - rho) w_plus through the preimages
// of some w under the hypothetical update of `row`, restricted to `rho`.
struct SegmentPreimage {
  std::size_t row = 0;
  RhoInterval rho;
  std::vector<double> minus;
  std::vector<double> plus;

  std::vector<double> point(double r) const;
  std::vector<double> lower_endpoint() const { return point(rho.lo); }
  std::vector<double> upper_endpoint() const { return point(rho.hi); }
};

// Full segment for rho in [0, 1], or nothing if eta . w is not 1/2. The
// endpoints are limits only: the forward map is undefined at rho = 0 and 1.
std::optional<SegmentPreimage> t_inverse(std::span<const std::uint8_t> row,
                                         std::span<const double> w,
                                         std::size_t row_index = 0);

// err(other, seg.point(rho)) = slope * rho + intercept.
struct Affine {
  double slope = 0.0;
  double intercept = 0.0;
  double operator()(double rho) const { return slope * rho + intercept; }
};

Affine err_along(std::span<const std::uint8_t> other, const SegmentPreimage& seg);

// Preimages of w under the boosting map: each row with error 1/2 at w
// contributes its segment clipped to the rho where that row is the one
// selected (lowest index wins ties) and rho > 0. Empty segments are dropped.
std::vector<SegmentPreimage> a_inverse(const DichotomyMatrix& m,
                                       std::span<const double> w);

struct PreimageLocation {
  std::size_t segment = 0;
  double rho = 0.0;
  double distance = 0.0;  // d(w', seg.point(rho))
};

// Finds the segment on which w_prev lies, taking rho = err(seg.row, w_prev)
// and accepting the closest match within tol.
std::optional<PreimageLocation> locate_preimage(
    std::span<const SegmentPreimage> segments, std::span<const double> w_prev,
    const DichotomyMatrix& m, double tol);

struct Region {
  std::size_t selected_row = 0;
  std::vector<std::size_t> ties;
  bool in_sigma0 = false;  // every row has positive error
};

Region region_of(const DichotomyMatrix& m, std::span<const double> w);

struct Epsilon0Report {
  std::size_t points = 0;
  std::size_t violations = 0;
  // Largest err(eta', w') / err(eta', w) over rows with err(eta', w) > 0.
  double max_ratio = 0.0;
  // Largest err(selected at w', w') / min_eta err(eta, w).
  double max_selected_ratio = 0.0;
};

// Samples `samples` points spread evenly over the interiors of a_inverse(w)
// and checks err(eta', w') <= 2 err(eta', w) + 1e-12 for every row, plus the
// same bound for the row selected at w' against the minimum error at w.
Epsilon0Report epsilon0_check(const DichotomyMatrix& m, std::span<const double> w,
                              std::size_t samples);

// Interior sample k of n on an interval (midpoints of n equal cells).
double interior_sample(const RhoInterval& interval, std::size_t k, std::size_t n);

// JSON array with row id, interval bounds and openness, and endpoints.
std::string segments_to_json(std::span<const SegmentPreimage> segments);

}  // namespace optboost
