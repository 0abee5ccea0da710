#pragma once

#include <cstddef>
#include <cmath>
#include <vector>

namespace marginpca {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Deliberately minimal: just what the
/// fits, classifiers and the experiment loop need.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
  const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }

  Vector row(std::size_t i) const {
    return Vector(row_ptr(i), row_ptr(i) + cols_);
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool operator==(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

/// y = M x
inline Vector matvec(const Matrix& m, const Vector& x) {
  Vector y(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double* r = m.row_ptr(i);
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

/// C = A Bᵀ  (A: m×k, B: n×k, C: m×n). The transposed form keeps both
/// inner loops contiguous.
inline Matrix matmul_bt(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ra = a.row_ptr(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* rb = b.row_ptr(j);
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += ra[k] * rb[k];
      c(i, j) = s;
    }
  }
  return c;
}

/// C = A B  (A: m×k, B: k×n).
inline Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ra = a.row_ptr(i);
    double* rc = c.row_ptr(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = ra[k];
      const double* rb = b.row_ptr(k);
      for (std::size_t j = 0; j < b.cols(); ++j) rc[j] += aik * rb[j];
    }
  }
  return c;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline Vector column_means(const Matrix& a) {
  Vector mu(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* r = a.row_ptr(i);
    for (std::size_t j = 0; j < a.cols(); ++j) mu[j] += r[j];
  }
  for (double& v : mu) v /= static_cast<double>(a.rows());
  return mu;
}

inline Matrix select_rows(const Matrix& a, const std::vector<std::size_t>& rows) {
  Matrix out(rows.size(), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double* src = a.row_ptr(rows[i]);
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = src[j];
  }
  return out;
}

/// Rows minus a constant vector.
inline Matrix subtract_row_vector(const Matrix& a, const Vector& v) {
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - v[j];
  return c;
}

}  // namespace marginpca
