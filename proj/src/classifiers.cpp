#include "marginpca/classifiers.hpp"

#include <algorithm>
#include <cmath>

#include "marginpca/errors.hpp"
#include "marginpca/linalg.hpp"
#include "marginpca/rng.hpp"

namespace marginpca {

const char* classifier_name(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::fld: return "fld";
    case ClassifierKind::logreg: return "logreg";
    case ClassifierKind::svm: return "svm";
    case ClassifierKind::gnb: return "gnb";
  }
  return "?";
}

ClassifierKind classifier_from_name(const std::string& name) {
  for (ClassifierKind k :
       {ClassifierKind::fld, ClassifierKind::logreg, ClassifierKind::svm, ClassifierKind::gnb})
    if (name == classifier_name(k)) return k;
  throw_config("UnknownClassifier", "no classifier named '" + name + "'");
}

namespace {

void check_both_classes(const std::vector<int>& y) {
  bool neg = false, pos = false;
  for (int v : y) (v == -1 ? neg : pos) = true;
  if (!neg || !pos) throw_data("NotTwoClasses", "training labels must include -1 and +1");
}

Vector class_mean(const Matrix& x, const std::vector<int>& y, int label) {
  Vector mu(x.cols(), 0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (y[i] != label) continue;
    const double* row = x.row_ptr(i);
    for (std::size_t j = 0; j < x.cols(); ++j) mu[j] += row[j];
    ++count;
  }
  for (double& v : mu) v /= static_cast<double>(count);
  return mu;
}

/// log(1 + exp(u)) without overflow.
double log1pexp(double u) {
  if (u > 35.0) return u;
  if (u < -35.0) return std::exp(u);
  return std::log1p(std::exp(u));
}

double sigmoid(double u) {
  if (u >= 0.0) {
    const double e = std::exp(-u);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(u);
  return e / (1.0 + e);
}

}  // namespace

TrainedClassifier train_fld(const Matrix& x, const std::vector<int>& y) {
  check_both_classes(y);
  const std::size_t k = x.cols();
  Vector mu_neg = class_mean(x, y, -1);
  Vector mu_pos = class_mean(x, y, +1);

  SymMatrix sw(k);
  {
    Matrix scatter(k, k);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const Vector& mu = (y[i] == -1) ? mu_neg : mu_pos;
      const double* row = x.row_ptr(i);
      for (std::size_t a = 0; a < k; ++a) {
        const double da = row[a] - mu[a];
        for (std::size_t b = 0; b <= a; ++b) scatter(a, b) += da * (row[b] - mu[b]);
      }
    }
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b <= a; ++b) sw.set(a, b, scatter(a, b));
  }

  Vector diff(k);
  for (std::size_t j = 0; j < k; ++j) diff[j] = mu_pos[j] - mu_neg[j];

  TrainedClassifier c;
  c.kind = ClassifierKind::fld;
  const double tr = sw.trace();
  if (tr == 0.0) {
    // no within-class spread at all; the mean difference is the only signal
    c.w = diff;
  } else {
    const double ridge = 1e-6 * tr / static_cast<double>(k);
    SymMatrix reg(k);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b <= a; ++b) reg.set(a, b, sw(a, b) + (a == b ? ridge : 0.0));
    c.w = solve_spd(reg, diff);
  }
  Vector midpoint(k);
  for (std::size_t j = 0; j < k; ++j) midpoint[j] = 0.5 * (mu_pos[j] + mu_neg[j]);
  c.b = -dot(c.w, midpoint);
  return c;
}

double logreg_objective(const Matrix& x, const std::vector<int>& y, const Vector& w, double b,
                        double lambda) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* row = x.row_ptr(i);
    double s = b;
    for (std::size_t j = 0; j < x.cols(); ++j) s += w[j] * row[j];
    loss += log1pexp(-y[i] * s);
  }
  return loss + 0.5 * lambda * dot(w, w);
}

Vector logreg_gradient(const Matrix& x, const std::vector<int>& y, const Vector& w, double b,
                       double lambda) {
  const std::size_t k = x.cols();
  Vector g(k + 1, 0.0);  // last slot is the bias derivative
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* row = x.row_ptr(i);
    double s = b;
    for (std::size_t j = 0; j < k; ++j) s += w[j] * row[j];
    const double coeff = -y[i] * sigmoid(-y[i] * s);
    for (std::size_t j = 0; j < k; ++j) g[j] += coeff * row[j];
    g[k] += coeff;
  }
  for (std::size_t j = 0; j < k; ++j) g[j] += lambda * w[j];
  return g;
}

double svm_objective(const Matrix& x, const std::vector<int>& y, const Vector& w, double b,
                     double c) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* row = x.row_ptr(i);
    double s = b;
    for (std::size_t j = 0; j < x.cols(); ++j) s += w[j] * row[j];
    const double slack = 1.0 - y[i] * s;
    if (slack > 0.0) loss += slack * slack;
  }
  return 0.5 * (dot(w, w) + b * b) + c * loss;
}

Vector svm_gradient(const Matrix& x, const std::vector<int>& y, const Vector& w, double b,
                    double c) {
  const std::size_t k = x.cols();
  Vector g(k + 1, 0.0);
  for (std::size_t j = 0; j < k; ++j) g[j] = w[j];
  g[k] = b;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* row = x.row_ptr(i);
    double s = b;
    for (std::size_t j = 0; j < k; ++j) s += w[j] * row[j];
    const double slack = 1.0 - y[i] * s;
    if (slack > 0.0) {
      const double coeff = -2.0 * c * slack * y[i];
      for (std::size_t j = 0; j < k; ++j) g[j] += coeff * row[j];
      g[k] += coeff;
    }
  }
  return g;
}

namespace {

struct NewtonProblem {
  const Matrix& x;
  const std::vector<int>& y;
  double reg;  // lambda for logreg, C for svm
  bool svm;
};

double objective(const NewtonProblem& p, const Vector& theta) {
  Vector w(theta.begin(), theta.end() - 1);
  const double b = theta.back();
  return p.svm ? svm_objective(p.x, p.y, w, b, p.reg)
               : logreg_objective(p.x, p.y, w, b, p.reg);
}

Vector gradient(const NewtonProblem& p, const Vector& theta) {
  Vector w(theta.begin(), theta.end() - 1);
  const double b = theta.back();
  return p.svm ? svm_gradient(p.x, p.y, w, b, p.reg)
               : logreg_gradient(p.x, p.y, w, b, p.reg);
}

/// Hessian over θ = (w, b); for the squared hinge this is the generalized
/// Hessian over the active set. Both are positive definite.
SymMatrix hessian(const NewtonProblem& p, const Vector& theta) {
  const std::size_t k = p.x.cols();
  const std::size_t m = k + 1;
  Matrix h(m, m);
  for (std::size_t i = 0; i < p.x.rows(); ++i) {
    const double* row = p.x.row_ptr(i);
    double s = theta[k];
    for (std::size_t j = 0; j < k; ++j) s += theta[j] * row[j];
    double weight;
    if (p.svm) {
      weight = (1.0 - p.y[i] * s > 0.0) ? 2.0 * p.reg : 0.0;
    } else {
      const double sig = sigmoid(p.y[i] * s);
      weight = sig * (1.0 - sig);
    }
    if (weight == 0.0) continue;
    for (std::size_t a = 0; a < m; ++a) {
      const double xa = (a < k) ? row[a] : 1.0;
      for (std::size_t b = 0; b <= a; ++b) {
        const double xb = (b < k) ? row[b] : 1.0;
        h(a, b) += weight * xa * xb;
      }
    }
  }
  if (p.svm) {
    for (std::size_t a = 0; a < m; ++a) h(a, a) += 1.0;  // ½‖θ‖² term
  } else {
    for (std::size_t a = 0; a < k; ++a) h(a, a) += p.reg;  // bias unpenalized
    h(k, k) += 1e-12;  // keep the Cholesky factorizable when all σ(1−σ) underflow
  }
  SymMatrix sym(m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b <= a; ++b) sym.set(a, b, h(a, b));
  return sym;
}

TrainedClassifier newton_solve(const NewtonProblem& p, double grad_tol, int max_iter) {
  const std::size_t m = p.x.cols() + 1;
  Vector theta(m, 0.0);
  bool converged = false;

  for (int iter = 0; iter < max_iter; ++iter) {
    Vector g = gradient(p, theta);
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::fabs(v));
    if (gmax <= grad_tol) {
      converged = true;
      break;
    }
    Vector rhs(m);
    for (std::size_t j = 0; j < m; ++j) rhs[j] = -g[j];
    Vector step = solve_spd(hessian(p, theta), rhs);

    // Armijo backtracking
    const double f0 = objective(p, theta);
    const double slope = dot(g, step);
    double alpha = 1.0;
    Vector candidate(m);
    for (int ls = 0; ls < 60; ++ls) {
      for (std::size_t j = 0; j < m; ++j) candidate[j] = theta[j] + alpha * step[j];
      if (objective(p, candidate) <= f0 + 1e-4 * alpha * slope) break;
      alpha *= 0.5;
    }
    theta = candidate;
  }

  TrainedClassifier c;
  c.kind = p.svm ? ClassifierKind::svm : ClassifierKind::logreg;
  c.w.assign(theta.begin(), theta.end() - 1);
  c.b = theta.back();
  c.converged = converged;
  return c;
}

}  // namespace

TrainedClassifier train_logreg(const Matrix& x, const std::vector<int>& y, double lambda) {
  check_both_classes(y);
  if (!(lambda > 0.0)) throw_config("InvalidLambda", "lambda must be positive");
  return newton_solve(NewtonProblem{x, y, lambda, false}, 1e-6, 1000);
}

TrainedClassifier train_svm(const Matrix& x, const std::vector<int>& y, double c) {
  check_both_classes(y);
  if (!(c > 0.0)) throw_config("InvalidC", "C must be positive");
  return newton_solve(NewtonProblem{x, y, c, true}, 1e-5, 1000);
}

TrainedClassifier train_gnb(const Matrix& x, const std::vector<int>& y) {
  check_both_classes(y);
  const std::size_t n = x.rows(), k = x.cols();

  // variance floor from the pooled per-feature variance
  Vector total_mean = column_means(x);
  double mean_feature_variance = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = x(i, j) - total_mean[j];
      ss += c * c;
    }
    mean_feature_variance += ss / static_cast<double>(n);
  }
  mean_feature_variance /= static_cast<double>(k);
  const double floor = std::max(1e-12, 1e-9 * mean_feature_variance);

  GnbParams params;
  auto fill = [&](int label, Vector& mean, Vector& var, double& prior) {
    mean = class_mean(x, y, label);
    var.assign(k, 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] != label) continue;
      ++count;
      const double* row = x.row_ptr(i);
      for (std::size_t j = 0; j < k; ++j) {
        const double c = row[j] - mean[j];
        var[j] += c * c;
      }
    }
    for (std::size_t j = 0; j < k; ++j) var[j] = std::max(var[j] / count, floor);
    prior = static_cast<double>(count) / static_cast<double>(n);
  };
  fill(-1, params.mean_neg, params.var_neg, params.prior_neg);
  fill(+1, params.mean_pos, params.var_pos, params.prior_pos);

  TrainedClassifier c;
  c.kind = ClassifierKind::gnb;
  c.gnb = std::move(params);
  return c;
}

namespace {

double gnb_log_likelihood(const Vector& mean, const Vector& var, const double* row,
                          std::size_t k) {
  double ll = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double d = row[j] - mean[j];
    ll += -0.5 * std::log(2.0 * 3.14159265358979323846 * var[j]) - 0.5 * d * d / var[j];
  }
  return ll;
}

}  // namespace

std::vector<int> predict(const TrainedClassifier& c, const Matrix& x) {
  std::vector<int> out(x.rows());
  if (c.kind == ClassifierKind::gnb) {
    const GnbParams& p = *c.gnb;
    const std::size_t k = p.mean_neg.size();
    if (x.cols() != k) throw_numeric("DimensionMismatch", "predict: feature count mismatch");
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const double* row = x.row_ptr(i);
      const double neg = std::log(p.prior_neg) + gnb_log_likelihood(p.mean_neg, p.var_neg, row, k);
      const double pos = std::log(p.prior_pos) + gnb_log_likelihood(p.mean_pos, p.var_pos, row, k);
      out[i] = (pos >= neg) ? +1 : -1;
    }
    return out;
  }
  if (x.cols() != c.w.size()) throw_numeric("DimensionMismatch", "predict: feature count mismatch");
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* row = x.row_ptr(i);
    double s = c.b;
    for (std::size_t j = 0; j < x.cols(); ++j) s += c.w[j] * row[j];
    out[i] = (s >= 0.0) ? +1 : -1;
  }
  return out;
}

std::vector<double> default_grid() {
  return {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
}

HyperParams cv_select(const Dataset& ds, ClassifierKind kind, const std::vector<double>& grid,
                      std::uint64_t seed) {
  if (grid.empty()) throw_config("EmptyGrid", "cv_select needs a non-empty grid");
  if (kind != ClassifierKind::svm && kind != ClassifierKind::logreg)
    throw_config("NoHyperparameter", "cv_select applies to svm and logreg only");

  const std::size_t n_neg = ds.count_label(-1);
  const std::size_t n_pos = ds.count_label(+1);
  const std::size_t min_class = std::min(n_neg, n_pos);
  std::size_t n_folds = 5;
  bool fell_back = false;
  if (min_class < 5) {
    n_folds = 2;
    fell_back = true;
    if (min_class < 2)
      throw_data("ClassTooSmall", "cannot cross-validate with a single-member class");
  }

  // stratified fold assignment from a seeded per-class permutation
  std::vector<std::size_t> fold_of(ds.n());
  Rng rng(mix(seed, 0xf01d5));
  for (int label : {-1, +1}) {
    std::vector<std::size_t> idx = ds.class_indices(label);
    rng.shuffle(idx);
    for (std::size_t pos = 0; pos < idx.size(); ++pos) fold_of[idx[pos]] = pos % n_folds;
  }

  auto cv_error = [&](double value) {
    std::size_t misclassified = 0;
    for (std::size_t fold = 0; fold < n_folds; ++fold) {
      std::vector<std::size_t> train_rows, test_rows;
      for (std::size_t i = 0; i < ds.n(); ++i)
        (fold_of[i] == fold ? test_rows : train_rows).push_back(i);
      Dataset train = subset_rows(ds, train_rows);
      Dataset test = subset_rows(ds, test_rows);
      TrainedClassifier c = (kind == ClassifierKind::svm)
                                ? train_svm(train.features, train.labels, value)
                                : train_logreg(train.features, train.labels, value);
      std::vector<int> pred = predict(c, test.features);
      for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i] != test.labels[i]) ++misclassified;
    }
    return static_cast<double>(misclassified) / static_cast<double>(ds.n());
  };

  // iterate from the strongest regularization so that strict improvement is
  // required to move to a weaker one (ties keep the stronger choice)
  std::vector<double> order(grid);
  std::sort(order.begin(), order.end());
  if (kind == ClassifierKind::logreg) std::reverse(order.begin(), order.end());

  double best_value = order.front();
  double best_error = cv_error(order.front());
  for (std::size_t i = 1; i < order.size(); ++i) {
    const double err = cv_error(order[i]);
    if (err < best_error) {
      best_error = err;
      best_value = order[i];
    }
  }

  HyperParams out;
  out.value = best_value;
  out.grid = grid;
  out.two_fold_fallback = fell_back;
  return out;
}

}  // namespace marginpca
