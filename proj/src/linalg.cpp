#include "marginpca/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "marginpca/errors.hpp"

namespace marginpca {

SymMatrix::SymMatrix(const Matrix& m) : dim_(m.rows()), a_(m.rows() * m.rows(), 0.0) {
  if (m.rows() != m.cols()) throw_numeric("NotSquare", "SymMatrix needs a square input");
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double v = 0.5 * (m(i, j) + m(j, i));
      a_[i * dim_ + j] = v;
      a_[j * dim_ + i] = v;
    }
}

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

double SymMatrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) s += a_[i * dim_ + i];
  return s;
}

Matrix SymMatrix::to_matrix() const {
  Matrix m(dim_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(i, j) = a_[i * dim_ + j];
  return m;
}

namespace {

/// Accumulates Σ z zᵀ in a lower-triangle buffer, then mirrors it.
class GramBuilder {
 public:
  explicit GramBuilder(std::size_t d) : d_(d), lower_(d * d, 0.0) {}

  void add(const double* z) {
    for (std::size_t i = 0; i < d_; ++i) {
      const double zi = z[i];
      double* row = lower_.data() + i * d_;
      for (std::size_t j = 0; j <= i; ++j) row[j] += zi * z[j];
    }
  }

  SymMatrix build() const {
    SymMatrix a(d_);
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t j = 0; j <= i; ++j) a.set(i, j, lower_[i * d_ + j]);
    return a;
  }

 private:
  std::size_t d_;
  std::vector<double> lower_;
};

}  // namespace

SymMatrix gram_accumulate(const std::vector<Vector>& vectors) {
  if (vectors.empty()) throw_numeric("EmptyInput", "gram_accumulate needs at least one vector");
  const std::size_t d = vectors.front().size();
  if (d == 0) throw_numeric("EmptyInput", "gram_accumulate needs non-empty vectors");
  GramBuilder builder(d);
  for (const Vector& z : vectors) {
    if (z.size() != d)
      throw_numeric("DimensionMismatch", "gram_accumulate saw vectors of mixed dimension");
    builder.add(z.data());
  }
  return builder.build();
}

SymMatrix gram_accumulate_rows(const Matrix& z) {
  if (z.rows() == 0 || z.cols() == 0)
    throw_numeric("EmptyInput", "gram_accumulate_rows needs a non-empty matrix");
  GramBuilder builder(z.cols());
  for (std::size_t i = 0; i < z.rows(); ++i) builder.add(z.row_ptr(i));
  return builder.build();
}

namespace {

/// Cyclic Jacobi with the classic threshold schedule. Diagonalizes in place;
/// v accumulates the rotations (columns end up as eigenvectors).
/// Returns false if the rotation budget is exhausted before convergence.
bool jacobi(std::vector<double>& a, std::size_t n, std::vector<double>& d,
            std::vector<double>& v) {
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

  v.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
  d.resize(n);
  std::vector<double> b(n), z(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) b[i] = d[i] = at(i, i);

  const long rotation_budget = 100L * static_cast<long>(n) * static_cast<long>(n);
  long rotations = 0;

  for (int sweep = 0; sweep < 200; ++sweep) {
    double off_sum = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off_sum += std::fabs(at(p, q));
    if (off_sum == 0.0) return true;

    const double thresh = (sweep < 3) ? 0.2 * off_sum / static_cast<double>(n * n) : 0.0;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double g = 100.0 * std::fabs(at(p, q));
        // after a few sweeps, zero out entries that no longer move the diagonal
        if (sweep > 3 && std::fabs(d[p]) + g == std::fabs(d[p]) &&
            std::fabs(d[q]) + g == std::fabs(d[q])) {
          at(p, q) = 0.0;
        } else if (std::fabs(at(p, q)) > thresh) {
          double h = d[q] - d[p];
          double t;
          if (std::fabs(h) + g == std::fabs(h)) {
            t = at(p, q) / h;
          } else {
            const double theta = 0.5 * h / at(p, q);
            t = 1.0 / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
            if (theta < 0.0) t = -t;
          }
          const double c = 1.0 / std::sqrt(1.0 + t * t);
          const double s = t * c;
          const double tau = s / (1.0 + c);
          h = t * at(p, q);
          z[p] -= h;
          z[q] += h;
          d[p] -= h;
          d[q] += h;
          at(p, q) = 0.0;
          auto rotate = [&](std::vector<double>& m, std::size_t i1, std::size_t j1,
                            std::size_t i2, std::size_t j2) {
            const double g1 = m[i1 * n + j1];
            const double h1 = m[i2 * n + j2];
            m[i1 * n + j1] = g1 - s * (h1 + g1 * tau);
            m[i2 * n + j2] = h1 + s * (g1 - h1 * tau);
          };
          for (std::size_t j = 0; j < p; ++j) rotate(a, j, p, j, q);
          for (std::size_t j = p + 1; j < q; ++j) rotate(a, p, j, j, q);
          for (std::size_t j = q + 1; j < n; ++j) rotate(a, p, j, q, j);
          for (std::size_t j = 0; j < n; ++j) rotate(v, j, p, j, q);
          if (++rotations > rotation_budget) return false;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      b[i] += z[i];
      d[i] = b[i];
      z[i] = 0.0;
    }
  }
  return false;
}

/// Largest-magnitude entry positive; index ties go to the lowest index.
void fix_sign(Vector& v) {
  std::size_t best = 0;
  double best_abs = std::fabs(v[0]);
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double a = std::fabs(v[i]);
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (v[best] < 0.0)
    for (double& x : v) x = -x;
}

}  // namespace

std::vector<EigenPair> sym_eig_all(const SymMatrix& a) {
  const std::size_t n = a.dim();
  std::vector<double> work(a.data());
  std::vector<double> d, v;
  if (!jacobi(work, n, d, v))
    throw_numeric("NonConvergence", "Jacobi rotation budget exhausted");

  std::vector<EigenPair> pairs(n);
  for (std::size_t j = 0; j < n; ++j) {
    pairs[j].value = d[j];
    pairs[j].vector.resize(n);
    for (std::size_t i = 0; i < n; ++i) pairs[j].vector[i] = v[i * n + j];
    fix_sign(pairs[j].vector);
  }
  std::sort(pairs.begin(), pairs.end(), [](const EigenPair& x, const EigenPair& y) {
    if (x.value != y.value) return x.value > y.value;
    return x.vector < y.vector;  // deterministic order for repeated eigenvalues
  });
  return pairs;
}

std::vector<EigenPair> sym_eig_topk(const SymMatrix& a, std::size_t k) {
  if (k < 1 || k > a.dim())
    throw_numeric("KExceedsDimension", "needed 1 <= k <= " + std::to_string(a.dim()) +
                                           ", got k = " + std::to_string(k));
  std::vector<EigenPair> pairs = sym_eig_all(a);
  pairs.resize(k);
  return pairs;
}

std::size_t rank_from_eigenvalues(const std::vector<EigenPair>& pairs, double rel_tol) {
  if (pairs.empty()) return 0;
  const double cutoff = rel_tol * std::max(pairs.front().value, 0.0);
  std::size_t r = 0;
  for (const EigenPair& p : pairs)
    if (p.value > cutoff && p.value > 0.0) ++r;
  return r;
}

Vector solve_spd(const SymMatrix& a, const Vector& b) {
  const std::size_t n = a.dim();
  if (b.size() != n) throw_numeric("DimensionMismatch", "solve_spd rhs size mismatch");
  // lower-triangular Cholesky factor
  std::vector<double> l(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      if (i == j) {
        if (s <= 0.0) throw_numeric("NotPositiveDefinite", "Cholesky pivot <= 0");
        l[i * n + i] = std::sqrt(s);
      } else {
        l[i * n + j] = s / l[j * n + j];
      }
    }
  }
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) {  // L y = b
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * x[k];
    x[i] = s / l[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {  // Lᵀ x = y
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l[k * n + ii] * x[k];
    x[ii] = s / l[ii * n + ii];
  }
  return x;
}

}  // namespace marginpca
