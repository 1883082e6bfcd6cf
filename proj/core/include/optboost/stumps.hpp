#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "optboost/dataset.hpp"

namespace optboost {

// Decision stump: predicts `polarity` when x[feature] > threshold, else
// -polarity. A threshold of -infinity yields a constant hypothesis.
struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;

  int predict(std::span<const double> x) const {
    return x[feature] > threshold ? polarity : -polarity;
  }
  bool operator==(const Stump&) const = default;
};

struct StumpOptions {
  // Adds the two constant hypotheses (threshold -inf, both polarities).
  bool include_constant = false;
};

// Thresholds at midpoints of consecutive distinct sorted values of each
// feature, both polarities. Order: feature, threshold ascending, +1 before -1.
// Throws DataError("empty hypothesis space") if nothing is produced.
std::vector<Stump> enumerate_stumps(const Dataset& ds,
                                    const StumpOptions& options = {});

// Bit i is 1 iff h misclassifies example i.
std::vector<std::uint8_t> dichotomy_of(const Stump& h, const Dataset& ds);

// Error matrix over a fixed sample. Row r holds a 0/1 entry per example,
// 1 meaning misclassified. Each row may carry the hypothesis that produced it.
class DichotomyMatrix {
 public:
  DichotomyMatrix() = default;

  // `bits` is row-major with `num_examples` entries per row. Representatives
  // are either empty or one per row.
  DichotomyMatrix(std::size_t num_examples, std::vector<std::uint8_t> bits,
                  std::vector<Stump> representatives = {});

  static DichotomyMatrix from_rows(
      const std::vector<std::vector<std::uint8_t>>& rows,
      std::vector<Stump> representatives = {});

  std::size_t rows() const { return rows_; }
  std::size_t examples() const { return examples_; }
  bool empty() const { return rows_ == 0; }

  std::span<const std::uint8_t> row(std::size_t r) const {
    return {bits_.data() + r * examples_, examples_};
  }
  bool has_representatives() const { return !representatives_.empty(); }
  const Stump& representative(std::size_t r) const { return representatives_[r]; }
  std::span<const Stump> representatives() const { return representatives_; }

  // Weighted error of row r: sum of w(i) over misclassified i.
  double error(std::size_t r, std::span<const double> w) const;

  // Errors of every row, summed left to right over the examples.
  void errors(std::span<const double> w, std::span<double> out) const;

  // Keeps the listed rows (in the given order) with their representatives.
  DichotomyMatrix select_rows(std::span<const std::size_t> keep) const;

  bool operator==(const DichotomyMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t examples_ = 0;
  std::vector<std::uint8_t> bits_;
  std::vector<Stump> representatives_;
};

// Thrown by build_matrix when some hypothesis makes no training mistakes.
class PerfectHypothesisError : public std::runtime_error {
 public:
  explicit PerfectHypothesisError(const Stump& stump);
  const Stump& stump() const { return stump_; }

 private:
  Stump stump_;
};

// Keeps the first occurrence of each distinct row.
DichotomyMatrix deduplicate(const DichotomyMatrix& m);

// Removes every row whose misclassified set strictly contains another row's.
// Surviving rows keep their relative order.
DichotomyMatrix prune(const DichotomyMatrix& m);

// Evaluates every stump, deduplicates (earliest stump represents its row),
// refuses an all-zero row, prunes dominated rows.
DichotomyMatrix build_matrix(const Dataset& ds, std::span<const Stump> stumps);

// Rows r, s are related when the weight on the examples where they disagree
// is below eps; classes are the transitive closure. Entry r of the result is
// the lowest row index of r's class. With eps == 0 every row is its own class.
std::vector<std::size_t> equivalence_classes(const DichotomyMatrix& m,
                                             std::span<const double> w,
                                             double eps);

// Reusable evaluator of equivalence_classes for a sequence of weights.
// Examples are split into significant ones (w(i) >= eps), negligible ones
// (the smallest weights, jointly below eps) and the borderline rest. Rows
// that differ on a significant example are never related and rows that
// differ only on negligible ones always are; only pairs differing on
// borderline examples need an exact sum. The matrix must outlive the index.
class EquivalenceIndex {
 public:
  EquivalenceIndex(const DichotomyMatrix& m, double eps);

  const std::vector<std::size_t>& update(std::span<const double> w);

  // Rows merged into a lower-index row by the last update.
  std::size_t merged_away() const { return merged_away_; }

 private:
  std::size_t find(std::size_t r);
  void unite(std::size_t a, std::size_t b);

  const DichotomyMatrix* matrix_;
  double eps_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> significant_;
  std::vector<std::size_t> borderline_;
  std::vector<std::size_t> sorted_examples_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> class_of_;
  std::size_t merged_away_ = 0;
};

struct MergeReport {
  DichotomyMatrix merged;
  // Surviving original row index for each row of `merged`.
  std::vector<std::size_t> kept_rows;
  // Every class with more than one member, members ascending.
  std::vector<std::vector<std::size_t>> merged_classes;
};

// Replaces each equivalence class by its lowest-index row.
MergeReport merge_equivalent(const DichotomyMatrix& m, std::span<const double> w,
                             double eps);

// Matrix dump: one CSV line of bits per row, plus JSON of representatives.
void write_matrix_csv(const DichotomyMatrix& m, const std::filesystem::path& path);
void write_representatives_json(const DichotomyMatrix& m,
                                const std::filesystem::path& path);

}  // namespace optboost
