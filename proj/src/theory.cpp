#include "marginpca/theory.hpp"

#include <cmath>

#include "marginpca/errors.hpp"
#include "marginpca/rng.hpp"

namespace marginpca {

ToyModel axis_aligned_model(double pi_plus, double a, Vector lambdas) {
  ToyModel m;
  m.pi_plus = pi_plus;
  m.mu_plus.assign(lambdas.size(), 0.0);
  m.mu_plus[0] = a;
  m.lambdas = std::move(lambdas);
  return m;
}

namespace {

void validate(const ToyModel& m) {
  if (!(m.pi_plus > 0.0 && m.pi_plus < 1.0))
    throw_config("InvalidModel", "pi_plus must be in (0,1)");
  if (m.mu_plus.empty() || m.mu_plus.size() != m.lambdas.size())
    throw_config("InvalidModel", "mu_plus and lambdas must agree and be non-empty");
  for (double l : m.lambdas)
    if (!(l > 0.0)) throw_config("InvalidModel", "lambdas must be positive");
}

}  // namespace

Dataset sample_toy(const ToyModel& m, std::size_t n, std::uint64_t seed,
                   DegeneratePolicy policy) {
  validate(m);
  if (n < 2) throw_config("InvalidModel", "need n >= 2 draws");
  const std::size_t d = m.d();

  Vector sd(d);
  for (std::size_t j = 0; j < d; ++j) sd[j] = std::sqrt(m.lambdas[j]);

  const int max_attempts = (policy == DegeneratePolicy::resample) ? 100 : 1;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Rng rng(attempt == 0 ? seed : mix(seed, 0xd0c0 + static_cast<std::uint64_t>(attempt)));
    Matrix features(n, d);
    std::vector<int> labels(n);
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool positive = rng.next_double() < m.pi_plus;
      labels[i] = positive ? +1 : -1;
      if (positive) ++n_pos;
      double* row = features.row_ptr(i);
      for (std::size_t j = 0; j < d; ++j) {
        const double mean = positive ? m.mu_plus[j] : -m.mu_plus[j];
        row[j] = mean + sd[j] * rng.next_gaussian();
      }
    }
    if (n_pos == 0 || n_pos == n) continue;
    return Dataset::make(std::move(features), std::move(labels), "toy", SourceFormat::memory);
  }
  throw_numeric("DegenerateDraw", "a class came up empty");
}

SymMatrix analytic_moment(const ToyModel& m, MomentScheme scheme) {
  validate(m);
  const std::size_t d = m.d();
  double diag_scale = 1.0, outer_scale = 4.0;  // Δμ Δμᵀ = 4 μ₊μ₊ᵀ
  switch (scheme) {
    case MomentScheme::pca: outer_scale = 4.0 * m.pi_plus * (1.0 - m.pi_plus); break;
    case MomentScheme::mpca0: diag_scale = 2.0; break;
    case MomentScheme::mpca1: break;
  }
  SymMatrix a(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double v = outer_scale * m.mu_plus[i] * m.mu_plus[j];
      if (i == j) v += diag_scale * m.lambdas[i];
      a.set(i, j, v);
    }
  return a;
}

SymMatrix empirical_moment(const Dataset& ds, MomentScheme scheme) {
  const double n = static_cast<double>(ds.n());
  SymMatrix a(1);
  double scale = 1.0;
  switch (scheme) {
    case MomentScheme::pca: {
      Matrix centered = subtract_row_vector(ds.features, column_means(ds.features));
      a = gram_accumulate_rows(centered);
      scale = 1.0 / n;
      break;
    }
    case MomentScheme::mpca0: {
      a = mpca0_scatter(ds);
      scale = 1.0 / (static_cast<double>(ds.count_label(-1)) *
                     static_cast<double>(ds.count_label(+1)));
      break;
    }
    case MomentScheme::mpca1: {
      a = gram_accumulate_rows(mpca1_proxies(ds, CenterStat::mean));
      scale = 1.0 / n;
      break;
    }
  }
  SymMatrix out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j <= i; ++j) out.set(i, j, scale * a(i, j));
  return out;
}

Vector fld_direction(const ToyModel& m) {
  validate(m);
  Vector w(m.d());
  for (std::size_t j = 0; j < m.d(); ++j) w[j] = 2.0 * m.mu_plus[j] / m.lambdas[j];
  return w;
}

double coordinate_selection_rate(const ToyModel& m, Scheme scheme, std::size_t n,
                                 std::size_t trials, std::uint64_t seed) {
  validate(m);
  if (trials < 1) throw_config("InvalidTrials", "need at least one trial");

  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Dataset ds = sample_toy(m, n, mix(seed, t), DegeneratePolicy::resample);
    ProjectionModel model;
    switch (scheme) {
      case Scheme::pca: model = fit_pca(ds, 1); break;
      case Scheme::mpca0: model = fit_mpca0(ds, 1); break;
      case Scheme::mpca1a: model = fit_mpca1(ds, 1, CenterStat::mean); break;
      case Scheme::mpca1b: model = fit_mpca1(ds, 1, CenterStat::medoid); break;
      case Scheme::mpca2: model = fit_mpca2(ds, 1); break;
      default:
        throw_config("UnsupportedScheme", "selection rate applies to the eigenvector schemes");
    }
    std::size_t best = 0;
    double best_abs = std::fabs(model.p(0, 0));
    for (std::size_t j = 1; j < model.d; ++j) {
      const double a = std::fabs(model.p(0, j));
      if (a > best_abs) {
        best_abs = a;
        best = j;
      }
    }
    if (best == 0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

double moment_gap(const ToyModel& m, MomentScheme scheme, std::size_t n, std::uint64_t seed) {
  Dataset ds = sample_toy(m, n, seed, DegeneratePolicy::resample);
  SymMatrix analytic = analytic_moment(m, scheme);
  SymMatrix empirical = empirical_moment(ds, scheme);
  double num = 0.0;
  for (std::size_t i = 0; i < analytic.dim(); ++i)
    for (std::size_t j = 0; j < analytic.dim(); ++j) {
      const double diff = empirical(i, j) - analytic(i, j);
      num += diff * diff;
    }
  return std::sqrt(num) / analytic.frobenius_norm();
}

}  // namespace marginpca
