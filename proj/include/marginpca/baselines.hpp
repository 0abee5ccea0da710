#pragma once

#include <cstddef>
#include <vector>

#include "marginpca/dataset.hpp"
#include "marginpca/matrix.hpp"
#include "marginpca/reducers.hpp"

namespace marginpca {

/// K selected feature columns (ascending) plus the path point they came from.
struct FeatureSelection {
  std::vector<std::size_t> indices;
  double lambda_used = 0.0;
  bool path_exhausted = false;  // fewer than K features ever activated
};

/// PLS1 on centered features and centered ±1 targets. The returned model's
/// rows map centered data straight to the latent scores, so successive
/// training-score columns are mutually orthogonal.
ProjectionModel fit_pls(const Dataset& ds, std::size_t k);

/// Lasso solved by cyclic coordinate descent on standardized columns over a
/// geometric 100-point path from λ_max down to 1e-3·λ_max; returns the
/// support of the first path point with at least k active features,
/// truncated to the k largest |β| (ties to the lowest index).
FeatureSelection fit_lasso_select(const Dataset& ds, std::size_t k);

/// Columns scaled to mean 0 and unit variance (MLE convention); constant
/// columns come out all-zero. Exposed for the lasso tests.
Matrix lasso_standardize_columns(const Matrix& x);

/// One lasso solve at a fixed λ: ½‖y − Xβ‖² + λ‖β‖₁ by cyclic coordinate
/// descent, warm-started from `warm` when given.
Vector lasso_fit(const Matrix& x, const Vector& y, double lambda,
                 const Vector* warm = nullptr);

double lasso_objective(const Matrix& x, const Vector& y, const Vector& beta, double lambda);

/// Selected columns of x as a dense matrix (how a FeatureSelection reduces).
Matrix select_columns(const Matrix& x, const std::vector<std::size_t>& indices);

}  // namespace marginpca
