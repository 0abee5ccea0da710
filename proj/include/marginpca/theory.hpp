#pragma once

#include <cstdint>
#include <vector>

#include "marginpca/dataset.hpp"
#include "marginpca/linalg.hpp"
#include "marginpca/reducers.hpp"

namespace marginpca {

/// Two-Gaussian toy model: symmetric class means ±mu_plus, shared diagonal
/// covariance diag(lambdas), positive-class probability pi_plus.
struct ToyModel {
  double pi_plus = 0.5;
  Vector mu_plus;   // mu_minus is its negation
  Vector lambdas;   // all > 0
  std::size_t d() const { return mu_plus.size(); }
};

/// Convenience: axis-aligned model with mu_plus = (a, 0, ..., 0).
ToyModel axis_aligned_model(double pi_plus, double a, Vector lambdas);

enum class DegeneratePolicy { error, resample };

/// N labeled draws, deterministic per seed. A draw that leaves a class empty
/// either throws DegenerateDraw or deterministically resamples, per policy.
Dataset sample_toy(const ToyModel& m, std::size_t n, std::uint64_t seed,
                   DegeneratePolicy policy = DegeneratePolicy::error);

enum class MomentScheme { pca, mpca0, mpca1 };

/// Closed-form population second-moment matrix of each scheme's proxy:
/// pca   Λ + π₊π₋ΔμΔμᵀ,  mpca0   2Λ + ΔμΔμᵀ,  mpca1   Λ + ΔμΔμᵀ.
SymMatrix analytic_moment(const ToyModel& m, MomentScheme scheme);

/// Sample counterpart at matching scale: centered scatter / N for pca,
/// expanded pair scatter / (N₋N₊) for mpca0, proxy scatter / N for mpca1.
SymMatrix empirical_moment(const Dataset& ds, MomentScheme scheme);

/// Population Fisher direction Λ⁻¹(μ₊ − μ₋) = 2(a₁/λ₁, ..., a_D/λ_D),
/// unnormalized.
Vector fld_direction(const ToyModel& m);

/// Fraction of trials in which the scheme's top component puts its
/// largest-magnitude entry on coordinate 1. Trials draw independent
/// datasets seeded by mix(seed, trial).
double coordinate_selection_rate(const ToyModel& m, Scheme scheme, std::size_t n,
                                 std::size_t trials, std::uint64_t seed);

/// ‖empirical − analytic‖_F / ‖analytic‖_F for one sampled dataset.
double moment_gap(const ToyModel& m, MomentScheme scheme, std::size_t n, std::uint64_t seed);

}  // namespace marginpca
