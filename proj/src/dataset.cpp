#include "marginpca/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "marginpca/errors.hpp"
#include "marginpca/linalg.hpp"
#include "marginpca/rng.hpp"

namespace marginpca {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_double(const std::string& s, double* out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  if (end != begin + s.size() || errno == ERANGE) return false;
  *out = v;
  return true;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_data("IoError", "cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::string basename_no_ext(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::string base = (slash == std::string::npos) ? path : path.substr(slash + 1);
  std::size_t dot = base.find_last_of('.');
  return (dot == std::string::npos) ? base : base.substr(0, dot);
}

}  // namespace

Dataset Dataset::make(Matrix features, std::vector<int> labels, std::string name,
                      SourceFormat format) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  if (n < 2) throw_data("TooFewRows", "dataset needs at least 2 rows, got " + std::to_string(n));
  if (d < 1) throw_data("NoFeatures", "dataset needs at least 1 feature column");
  if (labels.size() != n) throw_data("LabelCountMismatch", "labels do not match row count");
  std::size_t n_neg = 0, n_pos = 0;
  for (int y : labels) {
    if (y == -1)
      ++n_neg;
    else if (y == 1)
      ++n_pos;
    else
      throw_data("InvalidLabel", "labels must be -1 or +1");
  }
  if (n_neg == 0 || n_pos == 0) throw_data("NotTwoClasses", "a class is empty");
  for (double v : features.data())
    if (!std::isfinite(v)) throw_data("NonFiniteFeature", "feature matrix has a non-finite value");
  Dataset ds;
  ds.features = std::move(features);
  ds.labels = std::move(labels);
  ds.name = std::move(name);
  ds.source_format = format;
  return ds;
}

std::size_t Dataset::count_label(int label) const {
  std::size_t c = 0;
  for (int y : labels)
    if (y == label) ++c;
  return c;
}

std::vector<std::size_t> Dataset::class_indices(int label) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) idx.push_back(i);
  return idx;
}

std::vector<int> normalize_labels(const std::vector<std::string>& raw) {
  if (raw.empty()) throw_data("NotTwoClasses", "no labels");
  std::vector<std::string> distinct;
  for (const std::string& s : raw)
    if (std::find(distinct.begin(), distinct.end(), s) == distinct.end()) distinct.push_back(s);
  if (distinct.size() != 2)
    throw_data("NotTwoClasses",
               "expected exactly 2 distinct label values, got " + std::to_string(distinct.size()));

  double a = 0.0, b = 0.0;
  bool negative_is_first;
  if (parse_double(distinct[0], &a) && parse_double(distinct[1], &b)) {
    if (a == b) throw_data("NotTwoClasses", "label values are numerically equal");
    negative_is_first = a < b;
  } else {
    negative_is_first = distinct[0] < distinct[1];
  }
  const std::string& neg = negative_is_first ? distinct[0] : distinct[1];

  std::vector<int> out;
  out.reserve(raw.size());
  for (const std::string& s : raw) out.push_back(s == neg ? -1 : +1);
  return out;
}

Dataset load_csv(const std::string& path, const LabelColumn& label_column,
                 const std::string& dataset_name) {
  std::vector<std::string> lines = read_lines(path);
  std::vector<std::vector<std::string>> rows;
  for (const std::string& line : lines) {
    if (trim(line).empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw_data("IoError", "no rows in " + path);

  const std::size_t width = rows.front().size();
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].size() != width)
      throw_data("RaggedRows", "row " + std::to_string(i + 1) + " has " +
                                   std::to_string(rows[i].size()) + " cells, expected " +
                                   std::to_string(width));
  if (width < 2) throw_data("NoFeatures", "need at least one feature column plus the label");

  // resolve the label column; a name selector forces a header row
  std::size_t label_idx;
  bool header = false;
  if (std::holds_alternative<std::string>(label_column.which)) {
    const std::string& want = std::get<std::string>(label_column.which);
    header = true;
    auto it = std::find(rows.front().begin(), rows.front().end(), want);
    if (it == rows.front().end())
      throw_data("IoError", "label column '" + want + "' not found in header");
    label_idx = static_cast<std::size_t>(it - rows.front().begin());
  } else {
    label_idx = std::holds_alternative<std::size_t>(label_column.which)
                    ? std::get<std::size_t>(label_column.which)
                    : width - 1;
    if (label_idx >= width) throw_data("IoError", "label column index out of range");
    // header sniff: a first row whose feature cells are not all numeric
    double ignored;
    for (std::size_t j = 0; j < width && !header; ++j)
      if (j != label_idx && !parse_double(rows.front()[j], &ignored)) header = true;
  }

  const std::size_t first_data = header ? 1 : 0;
  if (rows.size() <= first_data) throw_data("TooFewRows", "no data rows in " + path);

  const std::size_t n = rows.size() - first_data;
  const std::size_t d = width - 1;
  Matrix features(n, d);
  std::vector<std::string> raw_labels;
  raw_labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<std::string>& row = rows[first_data + i];
    std::size_t out_j = 0;
    for (std::size_t j = 0; j < width; ++j) {
      if (j == label_idx) continue;
      double v;
      if (!parse_double(row[j], &v) || !std::isfinite(v))
        throw_data("NonNumericFeature", "row " + std::to_string(first_data + i + 1) +
                                            ", column " + std::to_string(j + 1) + ": '" +
                                            row[j] + "'");
      features(i, out_j++) = v;
    }
    raw_labels.push_back(row[label_idx]);
  }

  std::vector<int> labels = normalize_labels(raw_labels);
  std::string name = dataset_name.empty() ? basename_no_ext(path) : dataset_name;
  return Dataset::make(std::move(features), std::move(labels), std::move(name),
                       SourceFormat::csv);
}

Dataset load_svmlight(const std::string& path, const std::string& dataset_name) {
  std::vector<std::string> lines = read_lines(path);
  std::vector<std::string> raw_labels;
  std::vector<std::vector<std::pair<std::size_t, double>>> sparse_rows;
  std::size_t max_index = 0;

  for (std::size_t li = 0; li < lines.size(); ++li) {
    std::string line = lines[li];
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    std::istringstream ss(line);
    std::string token;
    ss >> token;
    double label_value;
    if (!parse_double(token, &label_value))
      throw_data("MalformedLine", "line " + std::to_string(li + 1) + ": bad label '" + token + "'");
    raw_labels.push_back(token);

    std::vector<std::pair<std::size_t, double>> entries;
    std::size_t prev_index = 0;
    while (ss >> token) {
      std::size_t colon = token.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 >= token.size())
        throw_data("MalformedLine",
                   "line " + std::to_string(li + 1) + ": bad pair '" + token + "'");
      double index_value, value;
      if (!parse_double(token.substr(0, colon), &index_value) || index_value < 1.0 ||
          index_value != std::floor(index_value))
        throw_data("MalformedLine",
                   "line " + std::to_string(li + 1) + ": bad index in '" + token + "'");
      if (!parse_double(token.substr(colon + 1), &value) || !std::isfinite(value))
        throw_data("MalformedLine",
                   "line " + std::to_string(li + 1) + ": bad value in '" + token + "'");
      const std::size_t index = static_cast<std::size_t>(index_value);
      if (index == prev_index)
        throw_data("DuplicateIndex",
                   "line " + std::to_string(li + 1) + ": index " + std::to_string(index) +
                       " repeats");
      if (index < prev_index)
        throw_data("MalformedLine", "line " + std::to_string(li + 1) +
                                        ": indices must be strictly increasing");
      prev_index = index;
      max_index = std::max(max_index, index);
      entries.emplace_back(index, value);
    }
    sparse_rows.push_back(std::move(entries));
  }

  if (sparse_rows.empty()) throw_data("IoError", "no rows in " + path);
  if (max_index == 0) throw_data("NoFeatures", "no feature entries in " + path);

  Matrix features(sparse_rows.size(), max_index);
  for (std::size_t i = 0; i < sparse_rows.size(); ++i)
    for (const auto& [index, value] : sparse_rows[i]) features(i, index - 1) = value;

  std::vector<int> labels = normalize_labels(raw_labels);
  std::string name = dataset_name.empty() ? basename_no_ext(path) : dataset_name;
  return Dataset::make(std::move(features), std::move(labels), std::move(name),
                       SourceFormat::svmlight);
}

void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_data("IoError", "cannot write " + path);
  char buf[40];
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t j = 0; j < ds.d(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.features(i, j));
      out << buf << ',';
    }
    out << ds.labels[i] << '\n';
  }
  if (!out) throw_data("IoError", "failed writing " + path);
}

SplitIndices stratified_split_indices(const Dataset& ds, const SplitPlan& plan) {
  if (!(plan.train_fraction > 0.0 && plan.train_fraction < 1.0))
    throw_config("InvalidFraction", "train_fraction must be in (0,1)");

  Rng rng(mix(plan.master_seed, plan.split_index));
  SplitIndices out;
  for (int label : {-1, +1}) {
    std::vector<std::size_t> idx = ds.class_indices(label);
    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(plan.train_fraction * static_cast<double>(idx.size())));
    if (n_train < 1 || n_train >= idx.size())
      throw_data("ClassTooSmall", "class " + std::to_string(label) + " with " +
                                      std::to_string(idx.size()) +
                                      " rows cannot be split at fraction " +
                                      std::to_string(plan.train_fraction));
    rng.shuffle(idx);
    out.train.insert(out.train.end(), idx.begin(), idx.begin() + n_train);
    out.test.insert(out.test.end(), idx.begin() + n_train, idx.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

Dataset subset_rows(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Matrix features(rows.size(), ds.d());
  std::vector<int> labels(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double* src = ds.features.row_ptr(rows[i]);
    std::copy(src, src + ds.d(), features.row_ptr(i));
    labels[i] = ds.labels[rows[i]];
  }
  return Dataset::make(std::move(features), std::move(labels), ds.name, SourceFormat::memory);
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, const SplitPlan& plan) {
  SplitIndices idx = stratified_split_indices(ds, plan);
  return {subset_rows(ds, idx.train), subset_rows(ds, idx.test)};
}

std::size_t numerical_rank(const Matrix& x) {
  if (x.rows() == 0 || x.cols() == 0) throw_numeric("EmptyInput", "numerical_rank of empty matrix");
  SymMatrix gram = (x.cols() <= x.rows()) ? gram_accumulate_rows(x)
                                          : gram_accumulate_rows(transpose(x));
  return rank_from_eigenvalues(sym_eig_all(gram));
}

Dataset standardize_features(const Dataset& ds) {
  const std::size_t n = ds.n(), d = ds.d();
  Vector mean = column_means(ds.features);
  Vector scale(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = ds.features(i, j) - mean[j];
      ss += c * c;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd > 0.0) scale[j] = sd;
  }
  Matrix z(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) z(i, j) = (ds.features(i, j) - mean[j]) / scale[j];
  return Dataset::make(std::move(z), ds.labels, ds.name, ds.source_format);
}

}  // namespace marginpca
