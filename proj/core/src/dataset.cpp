#include "optboost/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "csv_format.hpp"

namespace optboost {

Dataset::Dataset(std::vector<double> features, std::size_t num_features,
                 std::vector<Label> labels,
                 std::vector<std::string> feature_names)
    : features_(std::move(features)),
      num_features_(num_features),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)) {
  if (num_features_ == 0) throw DataError("dataset needs at least one feature");
  if (labels_.size() < 2) throw DataError("dataset needs at least 2 rows");
  if (features_.size() != labels_.size() * num_features_) {
    throw DataError("feature matrix size does not match rows x features");
  }
  if (!feature_names_.empty() && feature_names_.size() != num_features_) {
    throw DataError("feature name count does not match feature count");
  }
  for (Label y : labels_) {
    if (y != 1 && y != -1) throw DataError("labels must be -1 or +1");
  }
  for (double v : features_) {
    if (!std::isfinite(v)) throw DataError("non-finite feature value");
  }
}

bool Dataset::has_both_labels() const {
  return count_label(1) > 0 && count_label(-1) > 0;
}

std::size_t Dataset::count_label(Label y) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), y));
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> features;
  std::vector<Label> labels;
  features.reserve(indices.size() * num_features_);
  labels.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= size()) throw DataError("subset index out of range");
    auto r = row(i);
    features.insert(features.end(), r.begin(), r.end());
    labels.push_back(labels_[i]);
  }
  return Dataset(std::move(features), num_features_, std::move(labels),
                 feature_names_);
}

LabelMapping signed_label_mapping() {
  return {{"-1", -1}, {"1", 1}, {"+1", 1}};
}

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (lines.empty() && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (detail::trim(line).empty()) continue;
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path,
                 const LabelColumn& label_column,
                 const LabelMapping& mapping) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw DataError("empty file " + path.string());

  const auto first = detail::split_csv_line(lines.front());
  const std::size_t width = first.size();
  if (width < 2) throw DataError("need at least one feature and a label column");

  std::size_t label_index = 0;
  bool has_header = false;
  if (const auto* name = std::get_if<std::string>(&label_column)) {
    auto it = std::find(first.begin(), first.end(), *name);
    if (it == first.end()) throw DataError("missing label column '" + *name + "'");
    label_index = static_cast<std::size_t>(it - first.begin());
    has_header = true;
  } else {
    label_index = std::get<std::size_t>(label_column);
    if (label_index >= width) throw DataError("missing label column");
    for (std::size_t j = 0; j < width; ++j) {
      if (j != label_index && !detail::parse_double(first[j])) has_header = true;
    }
  }

  std::vector<std::string> names;
  if (has_header) {
    for (std::size_t j = 0; j < width; ++j) {
      if (j != label_index) names.push_back(first[j]);
    }
  }

  std::vector<double> features;
  std::vector<Label> labels;
  for (std::size_t n = has_header ? 1 : 0; n < lines.size(); ++n) {
    const auto cells = detail::split_csv_line(lines[n]);
    const std::string where = " at line " + std::to_string(n + 1);
    if (cells.size() != width) throw DataError("wrong number of columns" + where);
    for (std::size_t j = 0; j < width; ++j) {
      if (j == label_index) {
        auto it = mapping.find(cells[j]);
        if (it == mapping.end()) {
          throw DataError("unknown label value '" + cells[j] + "'" + where);
        }
        labels.push_back(it->second);
        continue;
      }
      auto value = detail::parse_double(cells[j]);
      if (!value) {
        throw DataError("non-numeric feature '" + cells[j] + "'" + where);
      }
      if (!std::isfinite(*value)) {
        throw DataError("non-finite feature '" + cells[j] + "'" + where);
      }
      features.push_back(*value);
    }
  }
  if (labels.size() < 2) throw DataError("fewer than 2 rows in " + path.string());
  return Dataset(std::move(features), width - 1, std::move(labels),
                 std::move(names));
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (std::size_t j = 0; j < ds.num_features(); ++j) {
    out << (ds.feature_names().empty() ? "x" + std::to_string(j)
                                       : ds.feature_names()[j])
        << ',';
  }
  out << "label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.row(i)) out << detail::format_double(v) << ',';
    out << ds.label(i) << '\n';
  }
  if (!out) throw DataError("write failed for " + path.string());
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction,
                                  std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw DataError("test fraction must lie in (0, 1)");
  }
  const std::size_t m = ds.size();
  const auto n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(m)));
  if (n_test == 0 || n_test >= m) throw DataError("degenerate split: empty part");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::size_t> test(order.begin(), order.begin() + n_test);
  std::vector<std::size_t> train(order.begin() + n_test, order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());

  // A single training example cannot form a Dataset; report it as degenerate.
  if (train.size() < 2 || test.size() < 2) {
    throw DataError("degenerate split: part smaller than 2 examples");
  }
  Dataset train_ds = ds.subset(train);
  if (!train_ds.has_both_labels()) {
    throw DataError("degenerate split: training part has a single label");
  }
  return {std::move(train_ds), ds.subset(test)};
}

}  // namespace optboost
