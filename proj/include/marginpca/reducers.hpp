#pragma once

#include <string>
#include <vector>

#include "marginpca/dataset.hpp"
#include "marginpca/linalg.hpp"
#include "marginpca/matrix.hpp"

namespace marginpca {

/// Reduction schemes. The first five are scatter-eigenvector projections;
/// pls and lasso are the regression-based comparators.
enum class Scheme { pca, mpca0, mpca1a, mpca1b, mpca2, pls, lasso };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

/// A fitted K×D linear reduction. Rows of p are the components. For the
/// eigenvector schemes the rows are orthonormal and eigenvalues holds the
/// top-K scatter eigenvalues (non-increasing); for pls the rows are the
/// direction vectors (not orthonormal) and eigenvalues holds the per-
/// component score energies. center is the training mean for pca/pls and
/// zero for the margin schemes.
struct ProjectionModel {
  Scheme scheme = Scheme::pca;
  std::size_t k = 0;
  std::size_t d = 0;
  Matrix p;
  Vector eigenvalues;
  Vector center;
};

ProjectionModel fit_pca(const Dataset& ds, std::size_t k);

/// All-pairs margin proxy, computed through the algebraic expansion
///   A = N₊·Σ_{C₋} x xᵀ + N₋·Σ_{C₊} x xᵀ − S₋S₊ᵀ − S₊S₋ᵀ
/// so cost stays at one pass over the data instead of N₋·N₊ pairs.
ProjectionModel fit_mpca0(const Dataset& ds, std::size_t k);

enum class CenterStat { mean, medoid };

/// Point-to-opposite-center proxy: z_k = x_k − μ̂₊ for k in C₋ and
/// μ̂₋ − x_k for k in C₊, with μ̂ the class mean (mpca1a) or medoid (mpca1b).
ProjectionModel fit_mpca1(const Dataset& ds, std::size_t k, CenterStat stat);

/// Nearest-cross-class-neighbor proxy; mutual pairs are counted once and
/// neighbor ties go to the lowest index. At most N pairs survive.
ProjectionModel fit_mpca2(const Dataset& ds, std::size_t k);

/// Coordinate-wise median; even counts take the midpoint of the two
/// central values.
Vector medoid(const std::vector<Vector>& points);

/// (X − 1·centerᵀ)·Pᵀ.
Matrix transform(const ProjectionModel& m, const Matrix& x);

std::string model_to_json(const ProjectionModel& m);
ProjectionModel model_from_json(const std::string& text);

/// Nearest-neighbor pair list used by fit_mpca2, exposed for diagnostics:
/// (positive-class index, negative-class index), deduplicated, in canonical
/// order.
std::vector<std::pair<std::size_t, std::size_t>> mpca2_pairs(const Dataset& ds);

/// The all-pairs scatter A of fit_mpca0 via the algebraic expansion.
SymMatrix mpca0_scatter(const Dataset& ds);

/// The proxy rows z_k of fit_mpca1, in original row order.
Matrix mpca1_proxies(const Dataset& ds, CenterStat stat);

}  // namespace marginpca
