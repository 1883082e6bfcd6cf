#pragma once

// Reference AdaBoost over decision stumps, written from the usual
// multiplicative form w <- w exp(-alpha y h(x)) / Z. Shares no code with the
// library so that agreement is evidence, not tautology.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

struct OracleStump {
  std::size_t feature;
  double threshold;
  int sign;
};

class TextbookAdaBoost {
 public:
  // x is row-major, m rows of d values; y holds -1 / +1.
  TextbookAdaBoost(std::vector<double> x, std::size_t d, std::vector<int> y)
      : x_(std::move(x)), d_(d), y_(std::move(y)), w_(y_.size(), 1.0 / y_.size()) {
    const std::size_t m = y_.size();
    for (std::size_t j = 0; j < d_; ++j) {
      std::vector<double> v;
      for (std::size_t i = 0; i < m; ++i) v.push_back(x_[i * d_ + j]);
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        const double t = v[k] + (v[k + 1] - v[k]) / 2.0;
        stumps_.push_back({j, t, +1});
        stumps_.push_back({j, t, -1});
      }
    }
  }

  void set_weights(std::vector<double> w) { w_ = std::move(w); }
  const std::vector<double>& weights() const { return w_; }

  int h(const OracleStump& s, std::size_t i) const {
    return x_[i * d_ + s.feature] > s.threshold ? s.sign : -s.sign;
  }

  // One boosting round; returns false if the weighted error is 0 or >= 1/2.
  bool round() {
    const std::size_t m = y_.size();
    double best = std::numeric_limits<double>::infinity();
    std::size_t pick = 0;
    for (std::size_t s = 0; s < stumps_.size(); ++s) {
      double e = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        if (h(stumps_[s], i) != y_[i]) e += w_[i];
      }
      if (e < best) {
        best = e;
        pick = s;
      }
    }
    if (best <= 0.0 || best >= 0.5) return false;
    last_eps_ = best;
    last_alpha_ = 0.5 * std::log((1.0 - best) / best);
    double z = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      w_[i] *= std::exp(-last_alpha_ * y_[i] * h(stumps_[pick], i));
      z += w_[i];
    }
    for (double& v : w_) v /= z;
    return true;
  }

  double last_eps() const { return last_eps_; }
  double last_alpha() const { return last_alpha_; }

 private:
  std::vector<double> x_;
  std::size_t d_;
  std::vector<int> y_;
  std::vector<double> w_;
  std::vector<OracleStump> stumps_;
  double last_eps_ = 0.0;
  double last_alpha_ = 0.0;
};

}  // namespace oracle
