#include "marginpca/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "marginpca/baselines.hpp"
#include "marginpca/errors.hpp"
#include "marginpca/rng.hpp"

namespace marginpca {

std::pair<std::size_t, std::size_t> auto_target_dims(const Dataset& ds, double train_fraction,
                                                     std::uint64_t master_seed) {
  std::size_t k1, k2;
  if (ds.n() > ds.d()) {
    k1 = ds.d() / 6;
    k2 = ds.d() / 3;
  } else {
    SplitPlan plan{master_seed, 0, train_fraction};
    SplitIndices idx = stratified_split_indices(ds, plan);
    const std::size_t rank = numerical_rank(subset_rows(ds, idx.train).features);
    k1 = rank / 4;
    k2 = rank / 2;
  }
  return {std::max<std::size_t>(1, k1), std::max<std::size_t>(1, k2)};
}

namespace {

struct FittedReducer {
  std::optional<ProjectionModel> model;
  std::optional<FeatureSelection> selection;
};

FittedReducer fit_scheme(const Dataset& train, Scheme scheme, std::size_t k) {
  FittedReducer f;
  switch (scheme) {
    case Scheme::pca: f.model = fit_pca(train, k); break;
    case Scheme::mpca0: f.model = fit_mpca0(train, k); break;
    case Scheme::mpca1a: f.model = fit_mpca1(train, k, CenterStat::mean); break;
    case Scheme::mpca1b: f.model = fit_mpca1(train, k, CenterStat::medoid); break;
    case Scheme::mpca2: f.model = fit_mpca2(train, k); break;
    case Scheme::pls: f.model = fit_pls(train, k); break;
    case Scheme::lasso: f.selection = fit_lasso_select(train, k); break;
  }
  return f;
}

Matrix reduce_with(const FittedReducer& f, const Matrix& x) {
  if (f.model) return transform(*f.model, x);
  return select_columns(x, f.selection->indices);
}

TrainedClassifier train_kind(ClassifierKind kind, const Matrix& x, const std::vector<int>& y,
                             const ResolvedHyper& hyper) {
  switch (kind) {
    case ClassifierKind::fld: return train_fld(x, y);
    case ClassifierKind::logreg: return train_logreg(x, y, *hyper.logreg_lambda);
    case ClassifierKind::svm: return train_svm(x, y, *hyper.svm_c);
    case ClassifierKind::gnb: return train_gnb(x, y);
  }
  throw_config("UnknownClassifier", "unhandled classifier kind");
}

bool needs_hyper(const std::vector<ClassifierKind>& kinds, ClassifierKind which) {
  return std::find(kinds.begin(), kinds.end(), which) != kinds.end();
}

ResolvedHyper resolve_hyper(const Dataset& ds, const std::vector<ClassifierKind>& kinds,
                            std::uint64_t seed) {
  ResolvedHyper hyper;
  if (needs_hyper(kinds, ClassifierKind::svm)) {
    HyperParams hp = cv_select(ds, ClassifierKind::svm, default_grid(), seed);
    hyper.svm_c = hp.value;
    hyper.two_fold_fallback = hyper.two_fold_fallback || hp.two_fold_fallback;
  }
  if (needs_hyper(kinds, ClassifierKind::logreg)) {
    HyperParams hp = cv_select(ds, ClassifierKind::logreg, default_grid(), seed);
    hyper.logreg_lambda = hp.value;
    hyper.two_fold_fallback = hyper.two_fold_fallback || hp.two_fold_fallback;
  }
  return hyper;
}

int scheme_order(Scheme s) { return static_cast<int>(s); }
int classifier_order(ClassifierKind k) { return static_cast<int>(k); }

}  // namespace

std::vector<ExperimentRecord> run_experiment(const Dataset& ds, const ExperimentConfig& cfg,
                                             ResolvedHyper* hyper_out) {
  if (cfg.n_splits < 1) throw_config("InvalidConfig", "n_splits must be >= 1");
  if (cfg.schemes.empty()) throw_config("InvalidConfig", "no schemes configured");
  if (cfg.classifiers.empty()) throw_config("InvalidConfig", "no classifiers configured");
  if (cfg.target_dims.empty()) throw_config("InvalidConfig", "no target dimensions configured");
  for (std::size_t k : cfg.target_dims)
    if (k < 1) throw_config("InvalidConfig", "target dimensions must be >= 1");

  ResolvedHyper shared_hyper;
  if (cfg.cv_mode == CvMode::whole_dataset)
    shared_hyper = resolve_hyper(ds, cfg.classifiers, mix(cfg.master_seed, 0xcf));
  if (hyper_out) *hyper_out = shared_hyper;

  std::vector<std::vector<ExperimentRecord>> per_split(cfg.n_splits);

  auto run_split = [&](std::size_t split) {
    SplitPlan plan{cfg.master_seed, split, cfg.train_fraction};
    auto [train, test] = stratified_split(ds, plan);

    ResolvedHyper hyper = shared_hyper;
    if (cfg.cv_mode == CvMode::per_split)
      hyper = resolve_hyper(train, cfg.classifiers, mix(mix(cfg.master_seed, split), 0xcf));

    std::vector<ExperimentRecord>& out = per_split[split];
    for (Scheme scheme : cfg.schemes) {
      for (std::size_t k : cfg.target_dims) {
        try {
          FittedReducer reducer = fit_scheme(train, scheme, k);
          Matrix train_reduced = reduce_with(reducer, train.features);
          Matrix test_reduced = reduce_with(reducer, test.features);
          for (ClassifierKind kind : cfg.classifiers) {
            TrainedClassifier c = train_kind(kind, train_reduced, train.labels, hyper);
            std::vector<int> pred = predict(c, test_reduced);
            ExperimentRecord rec;
            rec.scheme = scheme;
            rec.k = k;
            rec.classifier = kind;
            rec.split_index = split;
            rec.test_size = test.n();
            rec.misclassified = 0;
            for (std::size_t i = 0; i < pred.size(); ++i)
              if (pred[i] != test.labels[i]) ++rec.misclassified;
            rec.test_error =
                static_cast<double>(rec.misclassified) / static_cast<double>(rec.test_size);
            out.push_back(rec);
          }
        } catch (const Error& e) {
          throw Error(e.kind(), e.code(),
                      std::string(e.what()) + " [dataset=" + ds.name +
                          " scheme=" + scheme_name(scheme) + " k=" + std::to_string(k) +
                          " split=" + std::to_string(split) + "]");
        }
      }
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, cfg.jobs);
  if (jobs == 1 || cfg.n_splits == 1) {
    for (std::size_t s = 0; s < cfg.n_splits; ++s) run_split(s);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&]() {
      for (;;) {
        const std::size_t s = next.fetch_add(1);
        if (s >= cfg.n_splits) return;
        try {
          run_split(s);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < std::min(jobs, cfg.n_splits); ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::vector<ExperimentRecord> records;
  for (const auto& chunk : per_split) records.insert(records.end(), chunk.begin(), chunk.end());
  std::sort(records.begin(), records.end(),
            [](const ExperimentRecord& a, const ExperimentRecord& b) {
              if (a.scheme != b.scheme) return scheme_order(a.scheme) < scheme_order(b.scheme);
              if (a.k != b.k) return a.k < b.k;
              if (a.classifier != b.classifier)
                return classifier_order(a.classifier) < classifier_order(b.classifier);
              return a.split_index < b.split_index;
            });
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records) {
  if (records.empty()) throw_config("EmptyRecords", "nothing to summarize");
  std::map<std::tuple<int, std::size_t, int>, std::vector<double>> groups;
  for (const ExperimentRecord& r : records)
    groups[{scheme_order(r.scheme), r.k, classifier_order(r.classifier)}].push_back(r.test_error);

  std::vector<SummaryRow> rows;
  for (const auto& [key, errors] : groups) {
    SummaryRow row;
    row.scheme = static_cast<Scheme>(std::get<0>(key));
    row.k = std::get<1>(key);
    row.classifier = static_cast<ClassifierKind>(std::get<2>(key));
    row.n = errors.size();
    double mean = 0.0;
    for (double e : errors) mean += e;
    mean /= static_cast<double>(errors.size());
    row.mean_pct = 100.0 * mean;
    if (errors.size() >= 2) {
      double ss = 0.0;
      for (double e : errors) ss += (e - mean) * (e - mean);
      row.std_pct = 100.0 * std::sqrt(ss / static_cast<double>(errors.size() - 1));
      row.std_defined = true;
    }
    rows.push_back(row);
  }
  return rows;
}

double binomial_tail_half(std::size_t wins, std::size_t n) {
  if (wins > n) throw_config("InvalidArguments", "wins cannot exceed n");
  if (n == 0) return 1.0;

  if (n <= 62) {
    // Σ_{k=w}^{n} C(n,k) fits well inside 128 bits; the division by 2^n is
    // then a single correctly rounded step
    unsigned __int128 sum = 0;
    unsigned __int128 coeff = 1;  // C(n, w), built multiplicatively
    for (std::size_t i = 1; i <= wins; ++i)
      coeff = coeff * (n - wins + i) / i;
    for (std::size_t k = wins; k <= n; ++k) {
      sum += coeff;
      if (k < n) coeff = coeff * (n - k) / (k + 1);
    }
    return static_cast<double>(static_cast<long double>(sum) /
                               std::pow(2.0L, static_cast<long double>(n)));
  }

  // large-n fallback: log-space terms in long double
  long double p = 0.0L;
  for (std::size_t k = wins; k <= n; ++k) {
    const long double log_term = lgammal(static_cast<long double>(n + 1)) -
                                 lgammal(static_cast<long double>(k + 1)) -
                                 lgammal(static_cast<long double>(n - k + 1)) -
                                 static_cast<long double>(n) * 0.6931471805599453094L;
    p += expl(log_term);
  }
  return static_cast<double>(std::min(p, 1.0L));
}

double sign_test(const std::vector<double>& variant_errors,
                 const std::vector<double>& baseline_errors) {
  if (variant_errors.size() != baseline_errors.size() || variant_errors.empty())
    throw_config("LengthMismatch", "sign test needs equal-length non-empty pairings");
  std::size_t wins = 0, informative = 0;
  for (std::size_t i = 0; i < variant_errors.size(); ++i) {
    if (variant_errors[i] == baseline_errors[i]) continue;  // ties are discarded
    ++informative;
    if (variant_errors[i] < baseline_errors[i]) ++wins;
  }
  return binomial_tail_half(wins, informative);
}

MarginSample margin_distribution(const Matrix& x, const std::vector<int>& y,
                                 const TrainedClassifier& c) {
  if (c.kind == ClassifierKind::gnb)
    throw_config("NotLinearClassifier", "margins need a hyperplane classifier");
  const double wn = norm2(c.w);
  if (wn == 0.0) throw_numeric("ZeroWeightVector", "margins undefined for w = 0");
  if (x.cols() != c.w.size())
    throw_numeric("DimensionMismatch", "margin_distribution feature count mismatch");
  MarginSample out;
  out.values.resize(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* row = x.row_ptr(i);
    double s = c.b;
    for (std::size_t j = 0; j < x.cols(); ++j) s += c.w[j] * row[j];
    out.values[i] = y[i] * s / wn;
  }
  return out;
}

double round_half_up_1dp(double x) {
  return std::floor(x * 10.0 + 0.5) / 10.0;
}

std::string records_to_jsonl(const std::vector<ExperimentRecord>& records) {
  std::ostringstream out;
  for (const ExperimentRecord& r : records) {
    nlohmann::json j;
    j["scheme"] = scheme_name(r.scheme);
    j["k"] = r.k;
    j["classifier"] = classifier_name(r.classifier);
    j["split"] = r.split_index;
    j["test_error"] = r.test_error;
    j["misclassified"] = r.misclassified;
    j["test_size"] = r.test_size;
    out << j.dump() << '\n';
  }
  return out.str();
}

std::vector<ExperimentRecord> records_from_jsonl(const std::string& text) {
  std::vector<ExperimentRecord> records;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw_data("MalformedRecords", "line " + std::to_string(line_no) + " does not parse");
    try {
      ExperimentRecord r;
      r.scheme = scheme_from_name(j.at("scheme").get<std::string>());
      r.k = j.at("k").get<std::size_t>();
      r.classifier = classifier_from_name(j.at("classifier").get<std::string>());
      r.split_index = j.at("split").get<std::size_t>();
      r.test_error = j.at("test_error").get<double>();
      r.misclassified = j.at("misclassified").get<std::size_t>();
      r.test_size = j.at("test_size").get<std::size_t>();
      records.push_back(r);
    } catch (const nlohmann::json::exception& e) {
      throw_data("MalformedRecords", "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

}  // namespace marginpca
