// marginpca: fit margin-preserving PCA variants, run benchmark experiments,
// and compare schemes with exact sign tests.
//
// Subcommands: reduce | experiment | signtest | theory
// Exit codes: 0 ok, 2 bad configuration, 3 bad data, 4 numerical failure.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "marginpca/baselines.hpp"
#include "marginpca/classifiers.hpp"
#include "marginpca/dataset.hpp"
#include "marginpca/errors.hpp"
#include "marginpca/eval.hpp"
#include "marginpca/reducers.hpp"
#include "marginpca/rng.hpp"
#include "marginpca/theory.hpp"
#include "marginpca/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace marginpca;

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::data: return 3;
    case ErrorKind::numeric: return 4;
  }
  return 1;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

/// Display form of a mean/std cell: half-up rounded to one decimal.
std::string pct_1dp(double pct) {
  const double r = round_half_up_1dp(pct);
  return fmt("%.1f", r);
}

LabelColumn parse_label_column(const std::string& s) {
  if (s.empty() || s == "last") return LabelColumn::last();
  if (std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
    return LabelColumn::index(std::stoul(s));
  return LabelColumn::name(s);
}

Dataset load_any(const std::string& path, const std::string& format,
                 const std::string& label_column, const std::string& name) {
  if (format == "csv") return load_csv(path, parse_label_column(label_column), name);
  if (format == "svmlight") return load_svmlight(path, name);
  throw_config("UnknownFormat", "format must be csv or svmlight, got '" + format + "'");
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw_data("IoError", "cannot write " + path.string());
  out << content;
  if (!out) throw_data("IoError", "failed writing " + path.string());
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// ---------------------------------------------------------------- reduce

struct ReduceOptions {
  std::string input, format = "csv", label_column = "last", scheme, output, name;
  std::size_t k = 0;
  bool standardize = false;
};

int run_reduce(const ReduceOptions& opt) {
  if (opt.k < 1) throw_config("InvalidK", "--k must be >= 1");
  Scheme scheme = scheme_from_name(opt.scheme);
  Dataset ds = load_any(opt.input, opt.format, opt.label_column, opt.name);
  if (opt.standardize) ds = standardize_features(ds);

  Matrix reduced;
  std::string model_json;
  if (scheme == Scheme::lasso) {
    FeatureSelection sel = fit_lasso_select(ds, opt.k);
    json j;
    j["schema"] = "marginpca.selection/1";
    j["scheme"] = "lasso";
    j["k"] = sel.indices.size();
    j["d"] = ds.d();
    j["indices"] = sel.indices;
    j["lambda_used"] = sel.lambda_used;
    j["path_exhausted"] = sel.path_exhausted;
    model_json = j.dump(2) + "\n";
    reduced = select_columns(ds.features, sel.indices);
  } else {
    ProjectionModel model;
    switch (scheme) {
      case Scheme::pca: model = fit_pca(ds, opt.k); break;
      case Scheme::mpca0: model = fit_mpca0(ds, opt.k); break;
      case Scheme::mpca1a: model = fit_mpca1(ds, opt.k, CenterStat::mean); break;
      case Scheme::mpca1b: model = fit_mpca1(ds, opt.k, CenterStat::medoid); break;
      case Scheme::mpca2: model = fit_mpca2(ds, opt.k); break;
      case Scheme::pls: model = fit_pls(ds, opt.k); break;
      default: break;
    }
    model_json = model_to_json(model);
    reduced = transform(model, ds.features);
  }

  write_file(opt.output + ".model.json", model_json);
  Dataset out = Dataset::make(std::move(reduced), ds.labels, ds.name, SourceFormat::memory);
  save_csv(out, opt.output + ".reduced.csv");
  std::cout << "wrote " << opt.output << ".model.json and " << opt.output << ".reduced.csv\n";
  return 0;
}

// ------------------------------------------------------------- experiment

struct ParsedConfig {
  Dataset dataset;
  ExperimentConfig cfg;
  json echo;
  std::vector<std::string> scheme_names;
};

std::uint64_t parse_seed(const json& j, const char* key, std::uint64_t fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<std::uint64_t>();
}

ParsedConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_data("IoError", "cannot open config " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw_config("MalformedConfig", "config JSON does not parse: " + path);

  ParsedConfig out;
  out.echo = j;
  try {
    const json& dsj = j.at("dataset");
    fs::path data_path = dsj.at("path").get<std::string>();
    if (data_path.is_relative()) data_path = fs::path(path).parent_path() / data_path;
    const std::string format = dsj.value("format", std::string("csv"));
    const std::string label_column = dsj.value("label_column", std::string("last"));
    const std::string name = dsj.value("name", std::string(""));
    out.dataset = load_any(data_path.string(), format, label_column, name);

    if (dsj.contains("expect")) {
      const json& e = dsj.at("expect");
      if (e.contains("n") && e.at("n").get<std::size_t>() != out.dataset.n())
        throw_data("UnexpectedShape", "expected n=" + e.at("n").dump() + ", loaded " +
                                          std::to_string(out.dataset.n()));
      if (e.contains("d") && e.at("d").get<std::size_t>() != out.dataset.d())
        throw_data("UnexpectedShape", "expected d=" + e.at("d").dump() + ", loaded " +
                                          std::to_string(out.dataset.d()));
      if (e.contains("counts")) {
        const auto counts = e.at("counts").get<std::vector<std::size_t>>();
        if (counts.size() != 2 || counts[0] != out.dataset.count_label(-1) ||
            counts[1] != out.dataset.count_label(+1))
          throw_data("UnexpectedShape",
                     "expected class counts " + e.at("counts").dump() + ", loaded " +
                         std::to_string(out.dataset.count_label(-1)) + "/" +
                         std::to_string(out.dataset.count_label(+1)));
      }
    }
    if (j.value("standardize", false)) out.dataset = standardize_features(out.dataset);

    for (const auto& s : j.at("schemes").get<std::vector<std::string>>()) {
      out.cfg.schemes.push_back(scheme_from_name(s));
      out.scheme_names.push_back(s);
    }
    for (const auto& c : j.at("classifiers").get<std::vector<std::string>>())
      out.cfg.classifiers.push_back(classifier_from_name(c));

    out.cfg.n_splits = j.value("n_splits", std::size_t{50});
    out.cfg.train_fraction = j.value("train_fraction", 0.8);
    out.cfg.master_seed = parse_seed(j, "master_seed", 0);
    const std::string cv = j.value("cv_mode", std::string("whole_dataset"));
    if (cv == "whole_dataset")
      out.cfg.cv_mode = CvMode::whole_dataset;
    else if (cv == "per_split")
      out.cfg.cv_mode = CvMode::per_split;
    else
      throw_config("MalformedConfig", "cv_mode must be whole_dataset or per_split");

    if (const char* env = std::getenv("MARGINPCA_SEED")) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (end == env || *end != '\0')
        throw_config("MalformedConfig", "MARGINPCA_SEED is not an integer");
      out.cfg.master_seed = v;
    }

    const json& dims = j.at("target_dims");
    if (dims.is_string() && dims.get<std::string>() == "auto") {
      auto [k1, k2] =
          auto_target_dims(out.dataset, out.cfg.train_fraction, out.cfg.master_seed);
      out.cfg.target_dims = (k1 == k2) ? std::vector<std::size_t>{k1}
                                       : std::vector<std::size_t>{k1, k2};
    } else {
      out.cfg.target_dims = dims.get<std::vector<std::size_t>>();
    }
  } catch (const json::exception& e) {
    throw_config("MalformedConfig", std::string("config ") + path + ": " + e.what());
  }
  return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "scheme,k,classifier,n_splits,mean_pct,std_pct,mean_raw,std_raw\n";
  for (const SummaryRow& r : rows) {
    out << scheme_name(r.scheme) << ',' << r.k << ',' << classifier_name(r.classifier) << ','
        << r.n << ',' << pct_1dp(r.mean_pct) << ','
        << (r.std_defined ? pct_1dp(r.std_pct) : std::string("-")) << ','
        << fmt("%.17g", r.mean_pct) << ','
        << (r.std_defined ? fmt("%.17g", r.std_pct) : std::string("-")) << '\n';
  }
  return out.str();
}

using CellKey = std::tuple<std::string, std::size_t, std::string>;  // scheme, k, classifier

std::map<CellKey, std::map<std::size_t, double>> group_records(
    const std::vector<ExperimentRecord>& records) {
  std::map<CellKey, std::map<std::size_t, double>> groups;
  for (const ExperimentRecord& r : records)
    groups[{scheme_name(r.scheme), r.k, classifier_name(r.classifier)}][r.split_index] =
        r.test_error;
  return groups;
}

struct SignRow {
  std::size_t k;
  std::string classifier, variant, baseline;
  std::size_t wins = 0, ties = 0, informative = 0;
  double p = 1.0;
};

SignRow make_sign_row(std::size_t k, const std::string& classifier, const std::string& variant,
                      const std::string& baseline, const std::map<std::size_t, double>& var_errs,
                      const std::map<std::size_t, double>& base_errs) {
  if (var_errs.size() != base_errs.size())
    throw_config("UnpairedSplits", "split sets differ for " + variant + " vs " + baseline);
  std::vector<double> v, b;
  for (const auto& [split, err] : var_errs) {
    auto it = base_errs.find(split);
    if (it == base_errs.end())
      throw_config("UnpairedSplits", "split " + std::to_string(split) + " missing from baseline");
    v.push_back(err);
    b.push_back(it->second);
  }
  SignRow row{k, classifier, variant, baseline};
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == b[i])
      ++row.ties;
    else {
      ++row.informative;
      if (v[i] < b[i]) ++row.wins;
    }
  }
  row.p = sign_test(v, b);
  return row;
}

std::string signtest_csv(const std::vector<SignRow>& rows) {
  std::ostringstream out;
  out << "k,classifier,variant,baseline,wins,ties,n,p_value,significant\n";
  for (const SignRow& r : rows)
    out << r.k << ',' << r.classifier << ',' << r.variant << ',' << r.baseline << ',' << r.wins
        << ',' << r.ties << ',' << r.informative << ',' << fmt("%.5g", r.p) << ','
        << (r.p < 0.05 ? "true" : "false") << '\n';
  return out.str();
}

std::vector<SignRow> sign_rows_vs_baseline(const std::vector<ExperimentRecord>& records,
                                           const std::string& baseline) {
  auto groups = group_records(records);
  std::vector<SignRow> rows;
  for (const auto& [key, var_errs] : groups) {
    const auto& [scheme, k, classifier] = key;
    if (scheme == baseline) continue;
    auto base = groups.find({baseline, k, classifier});
    if (base == groups.end()) continue;
    rows.push_back(make_sign_row(k, classifier, scheme, baseline, var_errs, base->second));
  }
  return rows;
}

struct ExperimentOptions {
  std::string config_path;
  std::string output_dir = ".";
  std::size_t jobs = 1;
  bool dry_run = false;
};

int run_experiment_cmd(const ExperimentOptions& opt) {
  ParsedConfig parsed = load_experiment_config(opt.config_path);
  parsed.cfg.jobs = opt.jobs;

  const std::size_t cells = parsed.cfg.n_splits * parsed.cfg.schemes.size() *
                            parsed.cfg.target_dims.size() * parsed.cfg.classifiers.size();
  if (opt.dry_run) {
    std::cout << "dataset " << parsed.dataset.name << ": n=" << parsed.dataset.n()
              << " d=" << parsed.dataset.d() << "\ntarget_dims:";
    for (std::size_t k : parsed.cfg.target_dims) std::cout << ' ' << k;
    std::cout << "\ncells: " << cells << "\n";
    return 0;
  }

  ResolvedHyper hyper;
  std::vector<ExperimentRecord> records = run_experiment(parsed.dataset, parsed.cfg, &hyper);
  std::vector<SummaryRow> rows = summarize(records);
  std::vector<SignRow> sign_rows = sign_rows_vs_baseline(records, "pca");

  fs::create_directories(opt.output_dir);
  const fs::path dir(opt.output_dir);
  write_file(dir / "records.jsonl", records_to_jsonl(records));
  write_file(dir / "summary.csv", summary_csv(rows));
  write_file(dir / "signtests.csv", signtest_csv(sign_rows));

  json manifest;
  manifest["schema"] = "marginpca.manifest/1";
  manifest["version"] = kVersion;
  manifest["generated_at"] = utc_timestamp();
  manifest["config"] = parsed.echo;
  manifest["resolved"]["target_dims"] = parsed.cfg.target_dims;
  manifest["resolved"]["master_seed"] = parsed.cfg.master_seed;
  if (hyper.svm_c) manifest["resolved"]["svm_c"] = *hyper.svm_c;
  if (hyper.logreg_lambda) manifest["resolved"]["logreg_lambda"] = *hyper.logreg_lambda;
  manifest["resolved"]["cv_two_fold_fallback"] = hyper.two_fold_fallback;
  manifest["outputs"] = {{"records", (dir / "records.jsonl").string()},
                         {"summary", (dir / "summary.csv").string()},
                         {"signtests", (dir / "signtests.csv").string()}};
  manifest["cells"] = json::array();
  for (Scheme s : parsed.cfg.schemes)
    for (std::size_t k : parsed.cfg.target_dims)
      for (ClassifierKind c : parsed.cfg.classifiers)
        manifest["cells"].push_back({{"scheme", scheme_name(s)},
                                     {"k", k},
                                     {"classifier", classifier_name(c)},
                                     {"splits", parsed.cfg.n_splits},
                                     {"status", "ok"}});
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");

  std::cout << "wrote " << cells << " cells to " << dir.string() << "\n";
  return 0;
}

// -------------------------------------------------------------- signtest

struct SigntestOptions {
  std::string records, records_a, records_b, baseline = "pca", output;
};

std::vector<ExperimentRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_data("IoError", "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return records_from_jsonl(buffer.str());
}

int run_signtest(const SigntestOptions& opt) {
  std::vector<SignRow> rows;
  if (!opt.records.empty()) {
    rows = sign_rows_vs_baseline(read_records(opt.records), opt.baseline);
  } else if (!opt.records_a.empty() && !opt.records_b.empty()) {
    auto a = group_records(read_records(opt.records_a));
    auto b = group_records(read_records(opt.records_b));
    auto single_scheme = [](const std::map<CellKey, std::map<std::size_t, double>>& g,
                            const std::string& which) {
      std::set<std::string> names;
      for (const auto& [key, _] : g) names.insert(std::get<0>(key));
      if (names.size() != 1)
        throw_config("AmbiguousRecords", which + " must contain exactly one scheme");
      return *names.begin();
    };
    const std::string scheme_a = single_scheme(a, "--records-a");
    const std::string scheme_b = single_scheme(b, "--records-b");
    for (const auto& [key, var_errs] : a) {
      const auto& [scheme, k, classifier] = key;
      auto it = b.find({scheme_b, k, classifier});
      if (it == b.end())
        throw_config("UnpairedCells", "no (k=" + std::to_string(k) + ", " + classifier +
                                          ") group in --records-b");
      rows.push_back(make_sign_row(k, classifier, scheme_a, scheme_b, var_errs, it->second));
    }
  } else {
    throw_config("MalformedConfig", "pass --records FILE or both --records-a and --records-b");
  }

  std::cout << "k  classifier  variant  baseline  wins  ties  n  p\n";
  for (const SignRow& r : rows)
    std::cout << r.k << "  " << r.classifier << "  " << r.variant << "  " << r.baseline << "  "
              << r.wins << "  " << r.ties << "  " << r.informative << "  " << fmt("%.5g", r.p)
              << (r.p < 0.05 ? "  *" : "") << "\n";
  if (!opt.output.empty()) write_file(opt.output, signtest_csv(rows));
  return 0;
}

// ---------------------------------------------------------------- theory

struct TheoryOptions {
  std::size_t d = 5;
  double a = 1.0;
  double pi_plus = 0.5;
  std::string lambdas;         // comma list; default 1..D
  std::string n_list = "2000";  // comma list
  std::size_t trials = 50;
  std::uint64_t seed = 0;
  std::string schemes = "pca,mpca0,mpca1a,mpca1b";
  std::string output;
};

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int run_theory(const TheoryOptions& opt) {
  if (opt.trials < 1) throw_config("InvalidTrials", "--trials must be >= 1");

  Vector lambdas;
  if (opt.lambdas.empty()) {
    for (std::size_t j = 1; j <= opt.d; ++j) lambdas.push_back(static_cast<double>(j));
  } else {
    for (const std::string& tok : split_commas(opt.lambdas)) lambdas.push_back(std::stod(tok));
    if (lambdas.size() != opt.d)
      throw_config("InvalidModel", "--lambdas must list exactly --d values");
  }
  ToyModel model = axis_aligned_model(opt.pi_plus, opt.a, lambdas);

  std::vector<std::size_t> sizes;
  for (const std::string& tok : split_commas(opt.n_list)) sizes.push_back(std::stoul(tok));
  if (sizes.empty()) throw_config("InvalidModel", "--n must list at least one sample size");

  std::vector<Scheme> schemes;
  for (const std::string& tok : split_commas(opt.schemes)) schemes.push_back(scheme_from_name(tok));

  auto moment_of = [](Scheme s) -> std::optional<MomentScheme> {
    switch (s) {
      case Scheme::pca: return MomentScheme::pca;
      case Scheme::mpca0: return MomentScheme::mpca0;
      case Scheme::mpca1a:
      case Scheme::mpca1b: return MomentScheme::mpca1;
      default: return std::nullopt;
    }
  };

  std::ostringstream csv;
  csv << "scheme,n,pi_plus,rate,frobenius_gap\n";
  bool invariants_ok = true;

  for (Scheme scheme : schemes) {
    for (std::size_t n : sizes) {
      const double rate = coordinate_selection_rate(model, scheme, n, opt.trials,
                                                    mix(opt.seed, static_cast<std::uint64_t>(n)));
      std::string gap_text;
      const std::optional<MomentScheme> ms = moment_of(scheme);
      if (ms) {
        const double gap =
            moment_gap(model, *ms, n, mix(opt.seed, 0x9a00 + static_cast<std::uint64_t>(n)));
        gap_text = fmt("%.6g", gap);
        const double bound = 10.0 / std::sqrt(static_cast<double>(n));
        if (gap > bound) {
          std::cerr << "invariant failed: " << scheme_name(scheme) << " n=" << n
                    << " moment gap " << gap << " exceeds " << bound << "\n";
          invariants_ok = false;
        }
        // when the analytic diagonal has a clear winner, the Monte Carlo
        // rate must agree with the argmax prediction
        SymMatrix analytic = analytic_moment(model, *ms);
        std::size_t argmax = 0;
        double top = analytic(0, 0), second = -1.0;
        for (std::size_t j = 1; j < analytic.dim(); ++j) {
          const double v = analytic(j, j);
          if (v > top) {
            second = top;
            top = v;
            argmax = j;
          } else if (v > second) {
            second = v;
          }
        }
        if (second > 0.0 && top > 1.1 * second) {
          const bool predicted_first = (argmax == 0);
          if (predicted_first && rate < 0.95) {
            std::cerr << "invariant failed: " << scheme_name(scheme) << " n=" << n << " rate "
                      << rate << " < 0.95 despite analytic argmax on coordinate 1\n";
            invariants_ok = false;
          }
          if (!predicted_first && rate > 0.05) {
            std::cerr << "invariant failed: " << scheme_name(scheme) << " n=" << n << " rate "
                      << rate << " > 0.05 despite analytic argmax off coordinate 1\n";
            invariants_ok = false;
          }
        }
      }
      csv << scheme_name(scheme) << ',' << n << ',' << fmt("%.6g", opt.pi_plus) << ','
          << fmt("%.6g", rate) << ',' << gap_text << '\n';
    }
  }

  if (opt.output.empty())
    std::cout << csv.str();
  else
    write_file(opt.output, csv.str());
  if (!invariants_ok) throw_numeric("InvariantFailure", "theory self-test failed");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"margin-preserving PCA toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  ReduceOptions reduce_opt;
  CLI::App* reduce = app.add_subcommand("reduce", "fit a scheme and project a dataset");
  reduce->add_option("--input", reduce_opt.input, "input data file")->required();
  reduce->add_option("--format", reduce_opt.format, "csv or svmlight");
  reduce->add_option("--label-column", reduce_opt.label_column,
                     "label column: index, name, or 'last'");
  reduce->add_option("--scheme", reduce_opt.scheme,
                     "pca|mpca0|mpca1a|mpca1b|mpca2|pls|lasso")->required();
  reduce->add_option("--k", reduce_opt.k, "target dimension")->required();
  reduce->add_option("--output", reduce_opt.output, "output path prefix")->required();
  reduce->add_option("--name", reduce_opt.name, "dataset name override");
  reduce->add_flag("--standardize", reduce_opt.standardize, "z-score features first");

  ExperimentOptions exp_opt;
  CLI::App* experiment = app.add_subcommand("experiment", "run a benchmark from a JSON config");
  experiment->add_option("config", exp_opt.config_path, "experiment config JSON")->required();
  experiment->add_option("--output-dir", exp_opt.output_dir, "directory for result files");
  experiment->add_option("--jobs", exp_opt.jobs, "parallel workers (outputs are identical)");
  experiment->add_flag("--dry-run", exp_opt.dry_run, "print the cell count and exit");

  SigntestOptions sign_opt;
  CLI::App* signtest = app.add_subcommand("signtest", "exact paired sign tests");
  signtest->add_option("--records", sign_opt.records, "records.jsonl with baseline included");
  signtest->add_option("--baseline", sign_opt.baseline, "baseline scheme (default pca)");
  signtest->add_option("--records-a", sign_opt.records_a, "variant records.jsonl");
  signtest->add_option("--records-b", sign_opt.records_b, "baseline records.jsonl");
  signtest->add_option("--output", sign_opt.output, "also write the table as CSV");

  TheoryOptions theory_opt;
  CLI::App* theory = app.add_subcommand("theory", "two-Gaussian model checks");
  theory->add_option("--d", theory_opt.d, "dimension (default 5)");
  theory->add_option("--a", theory_opt.a, "class-mean offset (default 1)");
  theory->add_option("--pi-plus", theory_opt.pi_plus, "positive-class probability");
  theory->add_option("--lambdas", theory_opt.lambdas, "comma list, default 1..D");
  theory->add_option("--n", theory_opt.n_list, "comma list of sample sizes");
  theory->add_option("--trials", theory_opt.trials, "Monte Carlo trials per cell");
  theory->add_option("--seed", theory_opt.seed, "base seed");
  theory->add_option("--schemes", theory_opt.schemes, "comma list of schemes");
  theory->add_option("--output", theory_opt.output, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
    if (reduce->parsed()) return run_reduce(reduce_opt);
    if (experiment->parsed()) return run_experiment_cmd(exp_opt);
    if (signtest->parsed()) return run_signtest(sign_opt);
    if (theory->parsed()) return run_theory(theory_opt);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
