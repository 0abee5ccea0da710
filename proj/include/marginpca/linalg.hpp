#pragma once

#include <cstddef>
#include <vector>

#include "marginpca/matrix.hpp"

namespace marginpca {

/// Symmetric D×D matrix. Construction symmetrizes, so downstream code can
/// rely on a(i,j) == a(j,i) exactly.
class SymMatrix {
 public:
  explicit SymMatrix(std::size_t dim) : dim_(dim), a_(dim * dim, 0.0) {}
  explicit SymMatrix(const Matrix& m);  // symmetrize (m + mᵀ)/2

  std::size_t dim() const { return dim_; }

  double operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }

  /// Symmetric write: sets both (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double v) {
    a_[i * dim_ + j] = v;
    a_[j * dim_ + i] = v;
  }

  double frobenius_norm() const;
  double trace() const;

  const std::vector<double>& data() const { return a_; }
  Matrix to_matrix() const;

 private:
  std::size_t dim_;
  std::vector<double> a_;
};

struct EigenPair {
  double value = 0.0;
  Vector vector;
};

/// A = Σ z zᵀ over the given vectors.
SymMatrix gram_accumulate(const std::vector<Vector>& vectors);

/// Same, over the rows of Z.
SymMatrix gram_accumulate_rows(const Matrix& z);

/// Full spectrum via cyclic Jacobi, sorted by descending eigenvalue with the
/// deterministic sign and tie rules applied:
///   - each vector's largest-magnitude entry is positive (lowest index on
///     magnitude ties);
///   - pairs with bitwise-equal eigenvalues are ordered by the sign-fixed
///     vector, lexicographically ascending.
/// Throws NonConvergence if the rotation budget (100·D²) is exhausted.
std::vector<EigenPair> sym_eig_all(const SymMatrix& a);

/// Top k of sym_eig_all. Throws KExceedsDimension unless 1 ≤ k ≤ D.
std::vector<EigenPair> sym_eig_topk(const SymMatrix& a, std::size_t k);

/// Number of eigenvalues above rel_tol times the largest eigenvalue.
/// Eigenvalues must be sorted descending (as sym_eig_all returns them).
std::size_t rank_from_eigenvalues(const std::vector<EigenPair>& pairs,
                                  double rel_tol = 1e-10);

/// Solve A x = b for symmetric positive definite A via Cholesky.
/// Throws NotPositiveDefinite if a pivot degenerates.
Vector solve_spd(const SymMatrix& a, const Vector& b);

}  // namespace marginpca
