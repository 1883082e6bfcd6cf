#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace optboost {

// Raised for malformed or unusable input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Class labels are stored as -1 / +1.
using Label = int;

// A fixed training sample: m examples with d real features each.
// Immutable after construction.
class Dataset {
 public:
  Dataset() = default;

  // `features` is row-major, size() * num_features values.
  // Throws DataError when the invariants do not hold.
  Dataset(std::vector<double> features, std::size_t num_features,
          std::vector<Label> labels,
          std::vector<std::string> feature_names = {});

  std::size_t size() const { return labels_.size(); }
  std::size_t num_features() const { return num_features_; }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * num_features_, num_features_};
  }
  double feature(std::size_t i, std::size_t j) const {
    return features_[i * num_features_ + j];
  }
  Label label(std::size_t i) const { return labels_[i]; }
  std::span<const Label> labels() const { return labels_; }
  std::span<const double> features() const { return features_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }

  bool has_both_labels() const;
  std::size_t count_label(Label y) const;

  // Rows in the given order. Throws DataError if fewer than 2 indices.
  Dataset subset(std::span<const std::size_t> indices) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<double> features_;
  std::size_t num_features_ = 0;
  std::vector<Label> labels_;
  std::vector<std::string> feature_names_;
};

// Column holding the label: zero-based index or header name.
using LabelColumn = std::variant<std::size_t, std::string>;

// Raw label text -> -1 / +1.
using LabelMapping = std::map<std::string, Label>;

// Mapping for files whose label column already holds -1 / 1.
LabelMapping signed_label_mapping();

// Comma-separated, '.' decimal, optional header line. A header is assumed
// when the label column is given by name, or when any feature cell of the
// first line does not parse as a number. Row order is preserved.
Dataset load_csv(const std::filesystem::path& path,
                 const LabelColumn& label_column,
                 const LabelMapping& mapping);

// Writes a header (feature names, then "label") and one line per example with
// shortest round-trip formatting, so load_csv(save_csv(ds)) is bit-exact.
void save_csv(const Dataset& ds, const std::filesystem::path& path);

// Random train/test partition. The test part gets round(test_fraction * m)
// examples; both parts keep the original relative order. Throws DataError if
// either part is empty or the training part has a single label.
std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction,
                                  std::uint64_t seed);

}  // namespace optboost
