#include "marginpca/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "marginpca/errors.hpp"

namespace marginpca {

ProjectionModel fit_pls(const Dataset& ds, std::size_t k) {
  if (k < 1) throw_config("InvalidK", "target dimension must be >= 1");
  const std::size_t n = ds.n(), d = ds.d();

  Vector mu = column_means(ds.features);
  Matrix xc = subtract_row_vector(ds.features, mu);

  double ybar = 0.0;
  for (int y : ds.labels) ybar += y;
  ybar /= static_cast<double>(n);
  Vector yc(n);
  for (std::size_t i = 0; i < n; ++i) yc[i] = ds.labels[i] - ybar;
  if (norm2(yc) == 0.0) throw_numeric("DegenerateTarget", "target has no variance");

  Matrix weights(k, d);   // w_a
  Matrix loadings(k, d);  // p_a
  Vector score_energy(k);
  double first_weight_norm = 0.0;

  for (std::size_t a = 0; a < k; ++a) {
    // w = Xcᵀ yc on the deflated matrices
    Vector w(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = xc.row_ptr(i);
      const double yi = yc[i];
      for (std::size_t j = 0; j < d; ++j) w[j] += yi * row[j];
    }
    const double wn = norm2(w);
    if (a == 0) first_weight_norm = wn;
    if (wn == 0.0 || wn <= 1e-12 * first_weight_norm)
      throw_numeric("KExceedsRank", "pls: no usable direction " + std::to_string(a + 1) +
                                        " of " + std::to_string(k));
    for (double& v : w) v /= wn;

    Vector t = matvec(xc, w);
    const double tt = dot(t, t);
    if (tt <= 0.0)
      throw_numeric("KExceedsRank", "pls: degenerate score at component " + std::to_string(a + 1));

    Vector p(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = xc.row_ptr(i);
      const double ti = t[i];
      for (std::size_t j = 0; j < d; ++j) p[j] += ti * row[j];
    }
    for (double& v : p) v /= tt;
    const double q = dot(yc, t) / tt;

    for (std::size_t i = 0; i < n; ++i) {  // deflate
      double* row = xc.row_ptr(i);
      const double ti = t[i];
      for (std::size_t j = 0; j < d; ++j) row[j] -= ti * p[j];
      yc[i] -= q * ti;
    }

    std::copy(w.begin(), w.end(), weights.row_ptr(a));
    std::copy(p.begin(), p.end(), loadings.row_ptr(a));
    score_energy[a] = tt;
  }

  // directions R = W (PᵀW)⁻¹ map the *original* centered data onto the
  // scores; PᵀW is unit upper triangular, so back-substitute column by column
  Matrix u(k, k);  // u(a,b) = p_aᵀ w_b
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += loadings(a, j) * weights(b, j);
      u(a, b) = s;
    }
  Matrix directions(k, d);  // row a = r_a
  for (std::size_t a = 0; a < k; ++a) {
    Vector r(weights.row_ptr(a), weights.row_ptr(a) + d);
    for (std::size_t b = 0; b < a; ++b) {
      const double c = u(b, a);
      for (std::size_t j = 0; j < d; ++j) r[j] -= c * directions(b, j);
    }
    std::copy(r.begin(), r.end(), directions.row_ptr(a));
  }

  ProjectionModel m;
  m.scheme = Scheme::pls;
  m.k = k;
  m.d = d;
  m.p = std::move(directions);
  m.eigenvalues = std::move(score_energy);
  m.center = std::move(mu);
  return m;
}

Matrix lasso_standardize_columns(const Matrix& x) {
  const std::size_t n = x.rows(), d = x.cols();
  Vector mu = column_means(x);
  Matrix z(n, d);
  for (std::size_t j = 0; j < d; ++j) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = x(i, j) - mu[j];
      ss += c * c;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    const double inv = (sd > 0.0) ? 1.0 / sd : 0.0;  // constant columns go to zero
    for (std::size_t i = 0; i < n; ++i) z(i, j) = (x(i, j) - mu[j]) * inv;
  }
  return z;
}

double lasso_objective(const Matrix& x, const Vector& y, const Vector& beta, double lambda) {
  const std::size_t n = x.rows(), d = x.cols();
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = 0.0;
    const double* row = x.row_ptr(i);
    for (std::size_t j = 0; j < d; ++j) f += row[j] * beta[j];
    const double r = y[i] - f;
    rss += r * r;
  }
  double l1 = 0.0;
  for (double b : beta) l1 += std::fabs(b);
  return 0.5 * rss + lambda * l1;
}

Vector lasso_fit(const Matrix& x, const Vector& y, double lambda, const Vector* warm) {
  const std::size_t n = x.rows(), d = x.cols();
  Vector beta = warm ? *warm : Vector(d, 0.0);

  Vector col_energy(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x(i, j) * x(i, j);
    col_energy[j] = s;
  }

  Vector residual(y);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = x.row_ptr(i);
    double f = 0.0;
    for (std::size_t j = 0; j < d; ++j) f += row[j] * beta[j];
    residual[i] -= f;
  }

  double max_energy = 1.0;
  for (double e : col_energy) max_energy = std::max(max_energy, e);
  // a per-coordinate change of δ leaves a KKT residual of about δ·‖x_j‖²,
  // so scale the stopping threshold to keep the KKT check at 1e-6 honest
  const double tol = 1e-7 / max_energy;

  for (int sweep = 0; sweep < 100000; ++sweep) {
    double max_change = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (col_energy[j] == 0.0) continue;
      double rho = col_energy[j] * beta[j];
      for (std::size_t i = 0; i < n; ++i) rho += x(i, j) * residual[i];
      double next;
      if (rho > lambda)
        next = (rho - lambda) / col_energy[j];
      else if (rho < -lambda)
        next = (rho + lambda) / col_energy[j];
      else
        next = 0.0;
      const double change = next - beta[j];
      if (change != 0.0) {
        for (std::size_t i = 0; i < n; ++i) residual[i] -= change * x(i, j);
        beta[j] = next;
        max_change = std::max(max_change, std::fabs(change));
      }
    }
    if (max_change <= tol) break;
  }
  return beta;
}

FeatureSelection fit_lasso_select(const Dataset& ds, std::size_t k) {
  if (k < 1) throw_config("InvalidK", "target dimension must be >= 1");
  if (k > ds.d())
    throw_numeric("KExceedsRank", "lasso: k exceeds the number of features");
  const std::size_t n = ds.n(), d = ds.d();

  Matrix z = lasso_standardize_columns(ds.features);
  double ybar = 0.0;
  for (int y : ds.labels) ybar += y;
  ybar /= static_cast<double>(n);
  Vector yc(n);
  for (std::size_t i = 0; i < n; ++i) yc[i] = ds.labels[i] - ybar;

  double lambda_max = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += z(i, j) * yc[i];
    lambda_max = std::max(lambda_max, std::fabs(s));
  }
  if (lambda_max == 0.0) throw_numeric("DegenerateTarget", "lasso: all correlations vanish");

  const int path_points = 100;
  const double ratio = 1e-3;
  Vector beta(d, 0.0);
  auto pick = [&](double lambda) {
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < d; ++j)
      if (beta[j] != 0.0) active.push_back(j);
    // k largest |β|, magnitude ties to the lowest index
    std::stable_sort(active.begin(), active.end(), [&](std::size_t a, std::size_t b) {
      return std::fabs(beta[a]) > std::fabs(beta[b]);
    });
    if (active.size() > k) active.resize(k);
    std::sort(active.begin(), active.end());
    FeatureSelection out;
    out.indices = std::move(active);
    out.lambda_used = lambda;
    return out;
  };

  double lambda = lambda_max;
  for (int p = 0; p < path_points; ++p) {
    lambda = lambda_max * std::pow(ratio, static_cast<double>(p) / (path_points - 1));
    beta = lasso_fit(z, yc, lambda, &beta);
    std::size_t active = 0;
    for (double b : beta)
      if (b != 0.0) ++active;
    if (active >= k) return pick(lambda);
  }
  FeatureSelection out = pick(lambda);
  out.path_exhausted = true;
  return out;
}

Matrix select_columns(const Matrix& x, const std::vector<std::size_t>& indices) {
  Matrix out(x.rows(), indices.size());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < indices.size(); ++j) out(i, j) = x(i, indices[j]);
  return out;
}

}  // namespace marginpca
