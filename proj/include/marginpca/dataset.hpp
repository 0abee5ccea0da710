#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "marginpca/matrix.hpp"

namespace marginpca {

enum class SourceFormat { csv, svmlight, memory };

/// Two-class dataset: dense N×D features with labels in {-1,+1}.
/// Construct through make(), which enforces the invariants (both classes
/// present, finite features, N >= 2, D >= 1).
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::string name;
  SourceFormat source_format = SourceFormat::memory;

  static Dataset make(Matrix features, std::vector<int> labels, std::string name,
                      SourceFormat format = SourceFormat::memory);

  std::size_t n() const { return features.rows(); }
  std::size_t d() const { return features.cols(); }

  std::size_t count_label(int label) const;
  /// Ascending row indices of the given class.
  std::vector<std::size_t> class_indices(int label) const;
};

/// Label column selector for CSV inputs: 0-based index, column name
/// (requires a header row), or the last column.
struct LabelColumn {
  static LabelColumn index(std::size_t i) { return LabelColumn{i}; }
  static LabelColumn name(std::string n) { return LabelColumn{std::move(n)}; }
  static LabelColumn last() { return LabelColumn{Last{}}; }

  struct Last {};
  std::variant<std::size_t, std::string, Last> which;
};

Dataset load_csv(const std::string& path, const LabelColumn& label_column,
                 const std::string& dataset_name = "");

Dataset load_svmlight(const std::string& path, const std::string& dataset_name = "");

/// Features at full precision (%.17g) with the label as the last column;
/// reloading reproduces the dataset bit-exactly.
void save_csv(const Dataset& ds, const std::string& path);

/// Map two distinct raw labels onto {-1,+1}: the smaller value (numeric when
/// both sides parse as numbers, lexicographic otherwise) becomes -1.
std::vector<int> normalize_labels(const std::vector<std::string>& raw);

struct SplitPlan {
  std::uint64_t master_seed = 0;
  std::uint64_t split_index = 0;
  double train_fraction = 0.8;
};

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Stratified train/test partition: each class contributes exactly
/// floor(train_fraction * N_c) training rows, chosen by a seeded permutation
/// that depends only on (master_seed, split_index).
SplitIndices stratified_split_indices(const Dataset& ds, const SplitPlan& plan);

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, const SplitPlan& plan);

/// Rows of ds given by ascending indices.
Dataset subset_rows(const Dataset& ds, const std::vector<std::size_t>& rows);

/// Count of gram-matrix eigenvalues above 1e-10 times the largest one.
/// Uses the min(N,D)-sized gram matrix.
std::size_t numerical_rank(const Matrix& x);

/// Column z-scoring (mean 0, sample std 1; constant columns are centered
/// only). Optional preprocessing, off by default everywhere.
Dataset standardize_features(const Dataset& ds);

}  // namespace marginpca
