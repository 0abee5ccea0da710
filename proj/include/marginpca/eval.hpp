#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "marginpca/classifiers.hpp"
#include "marginpca/dataset.hpp"
#include "marginpca/reducers.hpp"

namespace marginpca {

enum class CvMode { whole_dataset, per_split };

struct ExperimentConfig {
  std::vector<Scheme> schemes;
  std::vector<std::size_t> target_dims;
  std::vector<ClassifierKind> classifiers;
  std::size_t n_splits = 50;
  double train_fraction = 0.8;
  std::uint64_t master_seed = 0;
  CvMode cv_mode = CvMode::whole_dataset;
  std::size_t jobs = 1;
};

/// One cell result; the unit of every downstream statistic. test_error is
/// exactly misclassified/test_size.
struct ExperimentRecord {
  Scheme scheme;
  std::size_t k = 0;
  ClassifierKind classifier;
  std::size_t split_index = 0;
  double test_error = 0.0;
  std::size_t misclassified = 0;
  std::size_t test_size = 0;
};

/// The two standard target dimensions: (⌊D/6⌋, ⌊D/3⌋) when N > D, else
/// (⌊R/4⌋, ⌊R/2⌋) with R the numerical rank of the split-0 training matrix.
/// Both clamped to at least 1.
std::pair<std::size_t, std::size_t> auto_target_dims(const Dataset& ds, double train_fraction,
                                                     std::uint64_t master_seed);

/// Hyperparameters actually used by a run, for the manifest.
struct ResolvedHyper {
  std::optional<double> svm_c;
  std::optional<double> logreg_lambda;
  bool two_fold_fallback = false;
};

std::vector<ExperimentRecord> run_experiment(const Dataset& ds, const ExperimentConfig& cfg,
                                             ResolvedHyper* hyper_out = nullptr);

struct SummaryRow {
  Scheme scheme;
  std::size_t k = 0;
  ClassifierKind classifier;
  std::size_t n = 0;
  double mean_pct = 0.0;
  double std_pct = 0.0;   // sample std (n−1); meaningless when n < 2
  bool std_defined = false;
};

std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records);

/// Exact one-sided sign test. Pairs with equal errors are discarded; with
/// w wins among n informative pairs, p = P[Bin(n, ½) ≥ w], computed exactly
/// for n ≤ 62 and in long double beyond. n = 0 gives p = 1.
double sign_test(const std::vector<double>& variant_errors,
                 const std::vector<double>& baseline_errors);

/// Tail probability P[Bin(n, ½) ≥ w]; building block of sign_test.
double binomial_tail_half(std::size_t wins, std::size_t n);

struct MarginSample {
  Vector values;  // one signed margin per row
};

/// γ̂ᵢ = yᵢ(wᵀxᵢ + b)/‖w‖ — signed Euclidean distance to the hyperplane,
/// positive when the point is on its own side. Linear classifiers only.
MarginSample margin_distribution(const Matrix& x, const std::vector<int>& y,
                                 const TrainedClassifier& c);

/// Half-up display rounding to one decimal, as used by the summary tables.
double round_half_up_1dp(double x);

/// JSON-lines serialization of records (one object per line).
std::string records_to_jsonl(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> records_from_jsonl(const std::string& text);

}  // namespace marginpca
