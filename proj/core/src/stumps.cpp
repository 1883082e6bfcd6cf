#include "optboost/stumps.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "csv_format.hpp"

namespace optboost {

std::vector<Stump> enumerate_stumps(const Dataset& ds,
                                    const StumpOptions& options) {
  std::vector<Stump> stumps;
  if (options.include_constant) {
    const double minus_inf = -std::numeric_limits<double>::infinity();
    stumps.push_back({0, minus_inf, 1});
    stumps.push_back({0, minus_inf, -1});
  }
  std::vector<double> values(ds.size());
  for (std::size_t j = 0; j < ds.num_features(); ++j) {
    for (std::size_t i = 0; i < ds.size(); ++i) values[i] = ds.feature(i, j);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      const double lo = values[k];
      const double hi = values[k + 1];
      double mid = lo + (hi - lo) / 2.0;
      // Adjacent doubles: the midpoint can round up onto hi.
      if (!(mid < hi)) mid = lo;
      stumps.push_back({j, mid, 1});
      stumps.push_back({j, mid, -1});
    }
  }
  if (stumps.empty()) throw DataError("empty hypothesis space");
  return stumps;
}

std::vector<std::uint8_t> dichotomy_of(const Stump& h, const Dataset& ds) {
  std::vector<std::uint8_t> bits(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    bits[i] = h.predict(ds.row(i)) != ds.label(i) ? 1 : 0;
  }
  return bits;
}

DichotomyMatrix::DichotomyMatrix(std::size_t num_examples,
                                 std::vector<std::uint8_t> bits,
                                 std::vector<Stump> representatives)
    : rows_(num_examples == 0 ? 0 : bits.size() / num_examples),
      examples_(num_examples),
      bits_(std::move(bits)),
      representatives_(std::move(representatives)) {
  if (num_examples == 0 || bits_.size() % num_examples != 0) {
    throw std::invalid_argument("bit matrix size is not a multiple of examples");
  }
  if (!representatives_.empty() && representatives_.size() != rows_) {
    throw std::invalid_argument("need one representative per row");
  }
  for (auto b : bits_) {
    if (b > 1) throw std::invalid_argument("matrix entries must be 0 or 1");
  }
}

DichotomyMatrix DichotomyMatrix::from_rows(
    const std::vector<std::vector<std::uint8_t>>& rows,
    std::vector<Stump> representatives) {
  if (rows.empty()) throw std::invalid_argument("matrix needs at least one row");
  const std::size_t m = rows.front().size();
  std::vector<std::uint8_t> bits;
  bits.reserve(rows.size() * m);
  for (const auto& r : rows) {
    if (r.size() != m) throw std::invalid_argument("ragged matrix rows");
    bits.insert(bits.end(), r.begin(), r.end());
  }
  return DichotomyMatrix(m, std::move(bits), std::move(representatives));
}

double DichotomyMatrix::error(std::size_t r, std::span<const double> w) const {
  const std::uint8_t* bits = bits_.data() + r * examples_;
  double sum = 0.0;
  for (std::size_t i = 0; i < examples_; ++i) {
    sum += bits[i] ? w[i] : 0.0;
  }
  return sum;
}

void DichotomyMatrix::errors(std::span<const double> w,
                             std::span<double> out) const {
  assert(w.size() == examples_ && out.size() == rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = error(r, w);
}

DichotomyMatrix DichotomyMatrix::select_rows(
    std::span<const std::size_t> keep) const {
  std::vector<std::uint8_t> bits;
  bits.reserve(keep.size() * examples_);
  std::vector<Stump> reps;
  for (std::size_t r : keep) {
    auto src = row(r);
    bits.insert(bits.end(), src.begin(), src.end());
    if (has_representatives()) reps.push_back(representatives_[r]);
  }
  return DichotomyMatrix(examples_, std::move(bits), std::move(reps));
}

PerfectHypothesisError::PerfectHypothesisError(const Stump& stump)
    : std::runtime_error("perfect hypothesis exists: feature " +
                         std::to_string(stump.feature) + ", threshold " +
                         detail::format_double(stump.threshold) +
                         ", polarity " + std::to_string(stump.polarity)),
      stump_(stump) {}

DichotomyMatrix deduplicate(const DichotomyMatrix& m) {
  std::unordered_map<std::string, std::size_t> seen;
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto bits = m.row(r);
    std::string key(bits.begin(), bits.end());
    if (seen.emplace(std::move(key), r).second) keep.push_back(r);
  }
  return m.select_rows(keep);
}

namespace {

using Packed = std::vector<std::uint64_t>;

std::vector<Packed> pack_rows(const DichotomyMatrix& m) {
  const std::size_t words = (m.examples() + 63) / 64;
  std::vector<Packed> packed(m.rows(), Packed(words, 0));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto bits = m.row(r);
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (bits[i]) packed[r][i / 64] |= std::uint64_t{1} << (i % 64);
    }
  }
  return packed;
}

// True if b's set is a strict subset of a's.
bool strictly_contains(const Packed& a, const Packed& b) {
  bool equal = true;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (b[k] & ~a[k]) return false;
    if (a[k] != b[k]) equal = false;
  }
  return !equal;
}

}  // namespace

DichotomyMatrix prune(const DichotomyMatrix& m) {
  const auto packed = pack_rows(m);
  std::vector<int> weight(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (auto word : packed[r]) weight[r] += std::popcount(word);
  }
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    bool dominated = false;
    for (std::size_t s = 0; s < m.rows() && !dominated; ++s) {
      dominated = s != r && weight[s] < weight[r] &&
                  strictly_contains(packed[r], packed[s]);
    }
    if (!dominated) keep.push_back(r);
  }
  assert(!keep.empty() || m.rows() == 0);
  return m.select_rows(keep);
}

DichotomyMatrix build_matrix(const Dataset& ds, std::span<const Stump> stumps) {
  if (stumps.empty()) throw DataError("empty hypothesis space");
  std::vector<std::uint8_t> bits;
  bits.reserve(stumps.size() * ds.size());
  for (const Stump& h : stumps) {
    auto row = dichotomy_of(h, ds);
    if (std::none_of(row.begin(), row.end(), [](auto b) { return b != 0; })) {
      throw PerfectHypothesisError(h);
    }
    bits.insert(bits.end(), row.begin(), row.end());
  }
  DichotomyMatrix all(ds.size(), std::move(bits),
                      std::vector<Stump>(stumps.begin(), stumps.end()));
  DichotomyMatrix pruned = prune(deduplicate(all));
  // An all-ones row survives pruning only when it is the sole row.
  for (std::size_t r = 0; r < pruned.rows(); ++r) {
    auto row = pruned.row(r);
    if (std::all_of(row.begin(), row.end(), [](auto b) { return b == 1; })) {
      throw DataError("hypothesis space reduces to an always-wrong row");
    }
  }
  return pruned;
}

EquivalenceIndex::EquivalenceIndex(const DichotomyMatrix& m, double eps)
    : matrix_(&m),
      eps_(eps),
      parent_(m.rows()),
      class_of_(m.rows()) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  std::iota(class_of_.begin(), class_of_.end(), std::size_t{0});
}

std::size_t EquivalenceIndex::find(std::size_t r) {
  while (parent_[r] != r) {
    parent_[r] = parent_[parent_[r]];
    r = parent_[r];
  }
  return r;
}

void EquivalenceIndex::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return;
  if (b < a) std::swap(a, b);
  parent_[b] = a;
}

const std::vector<std::size_t>& EquivalenceIndex::update(
    std::span<const double> w) {
  const DichotomyMatrix& m = *matrix_;
  const std::size_t n = m.rows();
  std::iota(class_of_.begin(), class_of_.end(), std::size_t{0});
  merged_away_ = 0;
  if (eps_ <= 0.0 || n < 2) return class_of_;

  significant_.clear();
  sorted_examples_.clear();
  for (std::size_t i = 0; i < w.size(); ++i) {
    (w[i] >= eps_ ? significant_ : sorted_examples_).push_back(i);
  }
  std::stable_sort(sorted_examples_.begin(), sorted_examples_.end(),
                   [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });
  double negligible_total = 0.0;
  std::size_t negligible = 0;
  while (negligible < sorted_examples_.size() &&
         negligible_total + w[sorted_examples_[negligible]] < eps_) {
    negligible_total += w[sorted_examples_[negligible]];
    ++negligible;
  }
  borderline_.assign(sorted_examples_.begin() + negligible, sorted_examples_.end());
  std::sort(borderline_.begin(), borderline_.end());

  auto compare_on = [&](const std::vector<std::size_t>& coords, std::size_t a,
                        std::size_t b) {
    auto ra = m.row(a);
    auto rb = m.row(b);
    for (std::size_t i : coords) {
      if (ra[i] != rb[i]) return ra[i] < rb[i] ? -1 : 1;
    }
    return 0;
  };

  order_.resize(n);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    int c = compare_on(significant_, a, b);
    if (c == 0) c = compare_on(borderline_, a, b);
    return c != 0 ? c < 0 : a < b;
  });

  std::iota(parent_.begin(), parent_.end(), std::size_t{0});

  auto exact_mass = [&](std::size_t a, std::size_t b) {
    auto ra = m.row(a);
    auto rb = m.row(b);
    double mass = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
      if (ra[i] != rb[i]) mass += w[i];
    }
    return mass;
  };

  // Runs of equal significant projection; inside them, groups of equal
  // borderline projection.
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::size_t begin = 0;
  while (begin < n) {
    std::size_t end = begin + 1;
    while (end < n && compare_on(significant_, order_[begin], order_[end]) == 0) {
      ++end;
    }
    groups.clear();
    std::size_t g = begin;
    while (g < end) {
      std::size_t h = g + 1;
      while (h < end && compare_on(borderline_, order_[g], order_[h]) == 0) {
        unite(order_[g], order_[h]);
        ++h;
      }
      groups.emplace_back(g, h);
      g = h;
    }
    for (std::size_t x = 0; x < groups.size(); ++x) {
      for (std::size_t y = x + 1; y < groups.size(); ++y) {
        const std::size_t lead_x = order_[groups[x].first];
        const std::size_t lead_y = order_[groups[y].first];
        auto rx = m.row(lead_x);
        auto ry = m.row(lead_y);
        double border_mass = 0.0;
        for (std::size_t i : borderline_) {
          if (rx[i] != ry[i]) border_mass += w[i];
        }
        if (border_mass >= eps_) continue;
        if (border_mass + negligible_total < eps_) {
          unite(lead_x, lead_y);
          continue;
        }
        for (std::size_t a = groups[x].first; a < groups[x].second; ++a) {
          for (std::size_t b = groups[y].first; b < groups[y].second; ++b) {
            if (exact_mass(order_[a], order_[b]) < eps_) unite(order_[a], order_[b]);
          }
        }
      }
    }
    begin = end;
  }

  for (std::size_t r = 0; r < n; ++r) {
    class_of_[r] = find(r);
    if (class_of_[r] != r) ++merged_away_;
  }
  return class_of_;
}

std::vector<std::size_t> equivalence_classes(const DichotomyMatrix& m,
                                             std::span<const double> w,
                                             double eps) {
  EquivalenceIndex index(m, eps);
  return index.update(w);
}

MergeReport merge_equivalent(const DichotomyMatrix& m, std::span<const double> w,
                             double eps) {
  const auto class_of = equivalence_classes(m, w, eps);
  MergeReport report;
  std::vector<std::vector<std::size_t>> members(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    members[class_of[r]].push_back(r);
    if (class_of[r] == r) report.kept_rows.push_back(r);
  }
  for (std::size_t r : report.kept_rows) {
    if (members[r].size() > 1) report.merged_classes.push_back(members[r]);
  }
  report.merged = m.select_rows(report.kept_rows);
  return report;
}

void write_matrix_csv(const DichotomyMatrix& m,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto bits = m.row(r);
    for (std::size_t i = 0; i < bits.size(); ++i) {
      out << (i ? "," : "") << static_cast<int>(bits[i]);
    }
    out << '\n';
  }
}

void write_representatives_json(const DichotomyMatrix& m,
                                const std::filesystem::path& path) {
  nlohmann::json reps = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    nlohmann::json entry{{"row", r}};
    if (m.has_representatives()) {
      const Stump& h = m.representative(r);
      entry["feature_index"] = h.feature;
      entry["threshold"] = std::isfinite(h.threshold)
                               ? nlohmann::json(h.threshold)
                               : nlohmann::json("-inf");
      entry["polarity"] = h.polarity;
    }
    reps.push_back(std::move(entry));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << reps.dump(2) << '\n';
}

}  // namespace optboost
