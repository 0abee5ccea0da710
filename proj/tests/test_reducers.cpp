#include "doctest.h"

#include <cmath>
#include <set>
#include <stdexcept>

#include "marginpca/errors.hpp"
#include "marginpca/reducers.hpp"
#include "marginpca/rng.hpp"
#include "test_support.hpp"

using namespace marginpca;
using testsupport::frobenius;
using testsupport::frobenius_diff;
using testsupport::max_abs_diff;
using testsupport::naive_mpca0_scatter;
using testsupport::random_dataset;
using testsupport::random_orthonormal;

namespace {

/// The running 4-point example: two points per class, classes 4 apart on x.
Dataset toy4() {
  Matrix x(4, 2);
  x(0, 0) = 0;
  x(0, 1) = 0;
  x(1, 0) = 0;
  x(1, 1) = 2;
  x(2, 0) = 4;
  x(2, 1) = 0;
  x(3, 0) = 4;
  x(3, 1) = 2;
  return Dataset::make(x, {-1, -1, 1, 1}, "toy4");
}

Dataset swap_labels(const Dataset& ds) {
  std::vector<int> flipped(ds.labels);
  for (int& y : flipped) y = -y;
  return Dataset::make(ds.features, flipped, ds.name);
}

Dataset translate(const Dataset& ds, const Vector& t) {
  Matrix x = ds.features;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) += t[j];
  return Dataset::make(x, ds.labels, ds.name);
}

Dataset scale(const Dataset& ds, double c) {
  Matrix x = ds.features;
  for (double& v : x.data()) v *= c;
  return Dataset::make(x, ds.labels, ds.name);
}

ProjectionModel fit(const Dataset& ds, Scheme s, std::size_t k) {
  switch (s) {
    case Scheme::pca: return fit_pca(ds, k);
    case Scheme::mpca0: return fit_mpca0(ds, k);
    case Scheme::mpca1a: return fit_mpca1(ds, k, CenterStat::mean);
    case Scheme::mpca1b: return fit_mpca1(ds, k, CenterStat::medoid);
    case Scheme::mpca2: return fit_mpca2(ds, k);
    default: throw std::logic_error("not an eigen scheme");
  }
}

double angle_between(const Vector& a, const Vector& b) {
  return std::acos(std::min(1.0, std::fabs(dot(a, b)) / (norm2(a) * norm2(b))));
}

}  // namespace

TEST_CASE("medoid") {
  CHECK(medoid({{1, 5}, {3, 1}, {2, 9}}) == Vector{2, 5});
  CHECK(medoid({{0, 0}, {10, 2}}) == Vector{5, 1});
  CHECK(medoid({{4, 7}}) == Vector{4, 7});
  CHECK_THROWS_WITH_AS(medoid({}), doctest::Contains("EmptyInput"), Error);
}

TEST_CASE("fit_pca on the centered toy") {
  ProjectionModel m = fit_pca(toy4(), 1);
  CHECK(m.eigenvalues[0] == doctest::Approx(16.0));
  CHECK(m.p(0, 0) == doctest::Approx(1.0));
  CHECK(m.p(0, 1) == doctest::Approx(0.0));
  CHECK(m.center == Vector{2.0, 1.0});
}

TEST_CASE("fit_pca reconstructs data lying in a low-dimensional affine subspace") {
  Rng rng(21);
  // rows = mean + coefficients * basis, so rank 2 around the mean
  Matrix basis = random_orthonormal(rng, 2, 6);
  Matrix x(20, 6);
  std::vector<int> y(20);
  for (std::size_t i = 0; i < 20; ++i) {
    y[i] = (i % 2 == 0) ? -1 : +1;
    const double c0 = rng.next_gaussian(), c1 = rng.next_gaussian();
    for (std::size_t j = 0; j < 6; ++j)
      x(i, j) = 3.0 + c0 * basis(0, j) + c1 * basis(1, j);
  }
  Dataset ds = Dataset::make(x, y, "affine");
  ProjectionModel m = fit_pca(ds, 2);
  Matrix centered = subtract_row_vector(ds.features, m.center);
  Matrix reconstructed = matmul(transform(m, ds.features), m.p);
  double err = 0.0;
  for (std::size_t i = 0; i < centered.rows(); ++i)
    for (std::size_t j = 0; j < centered.cols(); ++j) {
      const double d = centered(i, j) - reconstructed(i, j);
      err += d * d;
    }
  CHECK(err <= 1e-8);
}

TEST_CASE("fit_pca with k = d on full-rank data gives a complete basis") {
  Rng rng(22);
  Dataset ds = random_dataset(rng, 30, 4);
  ProjectionModel m = fit_pca(ds, 4);
  Matrix ptp = matmul_bt(transpose(m.p), transpose(m.p));  // PᵀP
  CHECK(max_abs_diff(ptp, Matrix::identity(4)) <= 1e-10);
}

TEST_CASE("fit_mpca0 on the toy matches the hand-computed scatter") {
  SymMatrix a = mpca0_scatter(toy4());
  CHECK(a(0, 0) == 64.0);
  CHECK(a(0, 1) == 0.0);
  CHECK(a(1, 1) == 8.0);
  ProjectionModel m = fit_mpca0(toy4(), 1);
  CHECK(m.p(0, 0) == doctest::Approx(1.0));
  CHECK(m.p(0, 1) == doctest::Approx(0.0));
  CHECK(m.center == Vector{0.0, 0.0});
}

TEST_CASE("mpca0 expansion equals the naive pair sum on random data") {
  Rng rng(23);
  for (int rep = 0; rep < 30; ++rep) {
    Dataset ds = random_dataset(rng, 5 + rng.next_below(26), 1 + rng.next_below(10));
    Matrix expanded = mpca0_scatter(ds).to_matrix();
    Matrix naive = naive_mpca0_scatter(ds);
    CHECK(frobenius_diff(expanded, naive) <= 1e-10 * frobenius(naive));
  }
}

TEST_CASE("fit_mpca0 with a single point per class") {
  Matrix x(2, 3);
  x(0, 0) = 1;
  x(0, 1) = 2;
  x(0, 2) = 2;
  x(1, 0) = 0;
  x(1, 1) = 0;
  x(1, 2) = 0;
  Dataset ds = Dataset::make(x, {-1, 1}, "pair");
  ProjectionModel m = fit_mpca0(ds, 1);
  // component is the normalized difference (1,2,2)/3, sign rule applied
  CHECK(m.p(0, 0) == doctest::Approx(1.0 / 3.0));
  CHECK(m.p(0, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(m.p(0, 2) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_WITH_AS(fit_mpca0(ds, 2), doctest::Contains("KExceedsRank"), Error);
}

TEST_CASE("fit_mpca1 with class means on the toy") {
  Matrix z = mpca1_proxies(toy4(), CenterStat::mean);
  SymMatrix a = gram_accumulate_rows(z);
  CHECK(a(0, 0) == 64.0);
  CHECK(a(0, 1) == 0.0);
  CHECK(a(1, 1) == 4.0);
  ProjectionModel m = fit_mpca1(toy4(), 1, CenterStat::mean);
  CHECK(m.p(0, 0) == doctest::Approx(1.0));
  CHECK(m.eigenvalues[0] == doctest::Approx(64.0));
}

TEST_CASE("mpca1a and mpca1b agree when per-feature medians equal means") {
  // symmetric clouds: medoid == mean by construction
  Matrix x(6, 2);
  x(0, 0) = -1;
  x(1, 0) = 0;
  x(2, 0) = 1;  // class -1: symmetric around 0
  x(3, 0) = 4 - 1;
  x(3, 1) = 1;
  x(4, 0) = 4;
  x(4, 1) = 2;
  x(5, 0) = 4 + 1;
  x(5, 1) = 3;  // class +1: symmetric around (4,2)
  Dataset ds = Dataset::make(x, {-1, -1, -1, 1, 1, 1}, "sym");
  ProjectionModel a = fit_mpca1(ds, 2, CenterStat::mean);
  ProjectionModel b = fit_mpca1(ds, 2, CenterStat::medoid);
  CHECK(a.p == b.p);
}

TEST_CASE("the medoid variant resists an outlier better than the mean variant") {
  // The outlier contaminates the mean-variant proxies twice: through its own
  // z and through the shifted class center that enters every opposite-class
  // z. The medoid variant only pays the first price, so its component tilts
  // less.
  Rng rng(24);
  const std::size_t per_class = 20;
  Matrix x(2 * per_class + 1, 2);
  std::vector<int> y(2 * per_class + 1);
  for (std::size_t i = 0; i < per_class; ++i) {
    y[i] = -1;
    x(i, 0) = -5 + 0.1 * rng.next_gaussian();
    x(i, 1) = 0.1 * rng.next_gaussian();
  }
  for (std::size_t i = per_class; i < 2 * per_class; ++i) {
    y[i] = +1;
    x(i, 0) = 5 + 0.1 * rng.next_gaussian();
    x(i, 1) = 0.1 * rng.next_gaussian();
  }
  y[2 * per_class] = +1;
  x(2 * per_class, 0) = 5;
  x(2 * per_class, 1) = 0;
  Dataset before = Dataset::make(x, y, "before");

  x(2 * per_class, 1) = 20;  // the outlier
  Dataset after = Dataset::make(x, y, "after");

  Vector mean_before = fit_mpca1(before, 1, CenterStat::mean).p.row(0);
  Vector mean_after = fit_mpca1(after, 1, CenterStat::mean).p.row(0);
  Vector med_before = fit_mpca1(before, 1, CenterStat::medoid).p.row(0);
  Vector med_after = fit_mpca1(after, 1, CenterStat::medoid).p.row(0);
  CHECK(angle_between(med_before, med_after) < angle_between(mean_before, mean_after));
}

TEST_CASE("fit_mpca2 on the toy dedupes mutual pairs") {
  auto pairs = mpca2_pairs(toy4());
  CHECK(pairs.size() == 2);
  SymMatrix a(2);
  {
    Matrix z(2, 2);
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t j = 0; j < 2; ++j)
        z(r, j) = toy4().features(pairs[r].first, j) - toy4().features(pairs[r].second, j);
    a = gram_accumulate_rows(z);
  }
  CHECK(a(0, 0) == 32.0);
  CHECK(a(0, 1) == 0.0);
  CHECK(a(1, 1) == 0.0);
  ProjectionModel m = fit_mpca2(toy4(), 1);
  CHECK(m.p(0, 0) == doctest::Approx(1.0));
  CHECK(m.eigenvalues[0] == doctest::Approx(32.0));
  CHECK_THROWS_WITH_AS(fit_mpca2(toy4(), 2), doctest::Contains("KExceedsRank"), Error);
}

TEST_CASE("fit_mpca2 single point per class") {
  Matrix x(2, 2);
  x(0, 0) = 3;
  x(1, 0) = 0;
  Dataset ds = Dataset::make(x, {1, -1}, "two");
  CHECK(mpca2_pairs(ds).size() == 1);
  ProjectionModel m = fit_mpca2(ds, 1);
  CHECK(m.p(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("mpca2 pair rule matches a brute-force oracle and the N bound") {
  Rng rng(25);
  for (int rep = 0; rep < 50; ++rep) {
    Dataset ds = random_dataset(rng, 5 + rng.next_below(30), 1 + rng.next_below(4));
    auto pairs = mpca2_pairs(ds);
    CHECK(pairs.size() <= ds.n());

    // oracle: independently enumerate the rule, dedup through a set
    std::set<std::pair<std::size_t, std::size_t>> expected;
    auto nearest_in = [&](std::size_t q, int label) {
      std::size_t best = 0;
      double best_d = -1;
      for (std::size_t c = 0; c < ds.n(); ++c) {
        if (ds.labels[c] != label) continue;
        double dist = 0;
        for (std::size_t j = 0; j < ds.d(); ++j) {
          const double diff = ds.features(q, j) - ds.features(c, j);
          dist += diff * diff;
        }
        if (best_d < 0 || dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      return best;
    };
    for (std::size_t i = 0; i < ds.n(); ++i) {
      if (ds.labels[i] == +1)
        expected.insert({i, nearest_in(i, -1)});
      else
        expected.insert({nearest_in(i, +1), i});
    }
    std::set<std::pair<std::size_t, std::size_t>> got(pairs.begin(), pairs.end());
    CHECK(got == expected);
  }
}

TEST_CASE("transform") {
  SUBCASE("identity model leaves data unchanged") {
    ProjectionModel m;
    m.scheme = Scheme::pca;
    m.k = 3;
    m.d = 3;
    m.p = Matrix::identity(3);
    m.center.assign(3, 0.0);
    m.eigenvalues.assign(3, 1.0);
    Rng rng(26);
    Matrix x = testsupport::random_matrix(rng, 5, 3);
    CHECK(transform(m, x) == x);
  }
  SUBCASE("toy mpca1a model maps (7,3) to 7") {
    ProjectionModel m = fit_mpca1(toy4(), 1, CenterStat::mean);
    Matrix x(1, 2);
    x(0, 0) = 7;
    x(0, 1) = 3;
    Matrix t = transform(m, x);
    CHECK(t.rows() == 1);
    CHECK(t.cols() == 1);
    CHECK(t(0, 0) == doctest::Approx(7.0));
  }
  SUBCASE("column-count mismatch") {
    ProjectionModel m = fit_pca(toy4(), 1);
    Matrix x(1, 3);
    CHECK_THROWS_WITH_AS(transform(m, x), doctest::Contains("DimensionMismatch"), Error);
  }
}

TEST_CASE("label swap leaves every margin projection bit-identical") {
  Rng rng(27);
  for (int rep = 0; rep < 50; ++rep) {
    Dataset ds = random_dataset(rng, 6 + rng.next_below(20), 2 + rng.next_below(6));
    Dataset swapped = swap_labels(ds);
    for (Scheme s : {Scheme::mpca0, Scheme::mpca1a, Scheme::mpca1b, Scheme::mpca2}) {
      ProjectionModel a = fit(ds, s, 1);
      ProjectionModel b = fit(swapped, s, 1);
      CHECK(a.p == b.p);
      CHECK(a.eigenvalues == b.eigenvalues);
    }
  }
}

TEST_CASE("translation leaves projections unchanged within tolerance") {
  Rng rng(28);
  for (int rep = 0; rep < 20; ++rep) {
    Dataset ds = random_dataset(rng, 10 + rng.next_below(20), 3);
    Vector t = {100.0, -17.5, 3.25};
    Dataset moved = translate(ds, t);
    for (Scheme s :
         {Scheme::pca, Scheme::mpca0, Scheme::mpca1a, Scheme::mpca1b, Scheme::mpca2}) {
      ProjectionModel a = fit(ds, s, 1);
      ProjectionModel b = fit(moved, s, 1);
      CHECK(max_abs_diff(a.p, b.p) <= 1e-10);
    }
  }
}

TEST_CASE("positive feature scaling scales eigenvalues by c^2 and keeps directions") {
  Rng rng(29);
  Dataset ds = random_dataset(rng, 24, 4);

  SUBCASE("power-of-two scale is exact") {
    Dataset scaled = scale(ds, 2.0);
    for (Scheme s :
         {Scheme::pca, Scheme::mpca0, Scheme::mpca1a, Scheme::mpca1b, Scheme::mpca2}) {
      ProjectionModel a = fit(ds, s, 2);
      ProjectionModel b = fit(scaled, s, 2);
      CHECK(a.p == b.p);
      for (std::size_t i = 0; i < a.k; ++i) CHECK(b.eigenvalues[i] == 4.0 * a.eigenvalues[i]);
    }
  }
  SUBCASE("general scale within tolerance") {
    const double c = 1.7;
    Dataset scaled = scale(ds, c);
    for (Scheme s :
         {Scheme::pca, Scheme::mpca0, Scheme::mpca1a, Scheme::mpca1b, Scheme::mpca2}) {
      ProjectionModel a = fit(ds, s, 2);
      ProjectionModel b = fit(scaled, s, 2);
      CHECK(max_abs_diff(a.p, b.p) <= 1e-10);
      for (std::size_t i = 0; i < a.k; ++i)
        CHECK(b.eigenvalues[i] == doctest::Approx(c * c * a.eigenvalues[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("dual route (d > n) agrees with a direct scatter eigendecomposition") {
  Rng rng(30);
  Dataset ds = random_dataset(rng, 12, 40);
  REQUIRE(ds.d() > ds.n());

  for (Scheme s : {Scheme::pca, Scheme::mpca0, Scheme::mpca1a, Scheme::mpca1b, Scheme::mpca2}) {
    const std::size_t k = 4;
    ProjectionModel m = fit(ds, s, k);

    // oracle: build the D×D scatter directly and diagonalize it
    SymMatrix direct(ds.d());
    switch (s) {
      case Scheme::pca: {
        Matrix centered = subtract_row_vector(ds.features, column_means(ds.features));
        direct = gram_accumulate_rows(centered);
        break;
      }
      case Scheme::mpca0: direct = mpca0_scatter(ds); break;
      case Scheme::mpca1a: direct = gram_accumulate_rows(mpca1_proxies(ds, CenterStat::mean)); break;
      case Scheme::mpca1b:
        direct = gram_accumulate_rows(mpca1_proxies(ds, CenterStat::medoid));
        break;
      case Scheme::mpca2: {
        auto pairs = mpca2_pairs(ds);
        Matrix z(pairs.size(), ds.d());
        for (std::size_t r = 0; r < pairs.size(); ++r)
          for (std::size_t j = 0; j < ds.d(); ++j)
            z(r, j) = ds.features(pairs[r].first, j) - ds.features(pairs[r].second, j);
        direct = gram_accumulate_rows(z);
        break;
      }
      default: break;
    }
    auto oracle = sym_eig_topk(direct, k);

    const double scale_f = direct.frobenius_norm();
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(m.eigenvalues[i] == doctest::Approx(oracle[i].value).epsilon(1e-9));
      // same one-dimensional eigenspace
      CHECK(std::fabs(dot(m.p.row(i), oracle[i].vector)) == doctest::Approx(1.0).epsilon(1e-7));
      // contract bounds on the returned pairs themselves
      Vector av = matvec(direct.to_matrix(), m.p.row(i));
      double res = 0.0;
      for (std::size_t j = 0; j < av.size(); ++j) {
        const double r = av[j] - m.eigenvalues[i] * m.p(i, j);
        res += r * r;
      }
      CHECK(std::sqrt(res) <= 1e-8 * scale_f);
      for (std::size_t j = 0; j <= i; ++j)
        CHECK(std::fabs(dot(m.p.row(i), m.p.row(j)) - (i == j ? 1.0 : 0.0)) <= 1e-10);
    }
  }
}

TEST_CASE("pca reconstruction error beats 100 random projections") {
  Rng rng(31);
  Dataset ds = random_dataset(rng, 40, 8);
  const std::size_t k = 3;
  ProjectionModel m = fit_pca(ds, k);
  Matrix centered = subtract_row_vector(ds.features, m.center);

  auto reconstruction_error = [&](const Matrix& p) {
    Matrix scores = matmul_bt(centered, p);
    Matrix recon = matmul(scores, p);
    double err = 0.0;
    for (std::size_t i = 0; i < centered.rows(); ++i)
      for (std::size_t j = 0; j < centered.cols(); ++j) {
        const double d = centered(i, j) - recon(i, j);
        err += d * d;
      }
    return err;
  };

  const double pca_err = reconstruction_error(m.p);
  for (int rep = 0; rep < 100; ++rep)
    CHECK(pca_err <= reconstruction_error(random_orthonormal(rng, k, 8)) + 1e-9);
}

TEST_CASE("model JSON round trip is exact") {
  Rng rng(32);
  Dataset ds = random_dataset(rng, 15, 4);
  ProjectionModel m = fit_mpca1(ds, 2, CenterStat::medoid);
  ProjectionModel back = model_from_json(model_to_json(m));
  CHECK(back.scheme == m.scheme);
  CHECK(back.k == m.k);
  CHECK(back.d == m.d);
  CHECK(back.p == m.p);
  CHECK(back.eigenvalues == m.eigenvalues);
  CHECK(back.center == m.center);
}

TEST_CASE("k exceeding the proxy rank is an error, not a clamp") {
  Rng rng(33);
  Dataset ds = random_dataset(rng, 20, 3);
  CHECK_THROWS_WITH_AS(fit_pca(ds, 4), doctest::Contains("KExceedsRank"), Error);
  // rank-deficient: all points in a 1-d subspace
  Matrix x(6, 3);
  for (std::size_t i = 0; i < 6; ++i) x(i, 0) = static_cast<double>(i + 1);
  Dataset flat = Dataset::make(x, {-1, -1, -1, 1, 1, 1}, "flat");
  CHECK_THROWS_WITH_AS(fit_mpca1(flat, 2, CenterStat::mean), doctest::Contains("KExceedsRank"),
                       Error);
  CHECK_NOTHROW(fit_mpca1(flat, 1, CenterStat::mean));
}
