#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <string>

#include "marginpca/dataset.hpp"
#include "marginpca/errors.hpp"
#include "marginpca/rng.hpp"
#include "test_support.hpp"

using namespace marginpca;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& content) {
    static int counter = 0;
    path = "mpca_test_" + std::to_string(counter++) + ".tmp";
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

/// Synthetic dataset with given class sizes; features carry the row index so
/// split bookkeeping is easy to check.
Dataset sized_dataset(std::size_t n_neg, std::size_t n_pos, std::size_t d = 3) {
  const std::size_t n = n_neg + n_pos;
  Matrix x(n, d);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = (i < n_neg) ? -1 : +1;
    for (std::size_t j = 0; j < d; ++j) x(i, j) = static_cast<double>(i * d + j);
  }
  return Dataset::make(std::move(x), std::move(y), "sized");
}

}  // namespace

TEST_CASE("normalize_labels numeric and lexicographic ordering") {
  CHECK(normalize_labels({"0", "1", "1", "0"}) == std::vector<int>{-1, 1, 1, -1});
  CHECK(normalize_labels({"g", "b", "g"}) == std::vector<int>{1, -1, 1});
  CHECK_THROWS_WITH_AS(normalize_labels({"7", "7", "7"}), doctest::Contains("NotTwoClasses"),
                       Error);
}

TEST_CASE("load_csv basic file with string labels") {
  TempFile f("1.5,2.0,a\n0.5,1.0,a\n3.5,4.0,b\n2.5,3.0,b\n");
  Dataset ds = load_csv(f.path, LabelColumn::last());
  CHECK(ds.n() == 4);
  CHECK(ds.d() == 2);
  CHECK(ds.labels == std::vector<int>{-1, -1, 1, 1});  // a -> -1
  CHECK(ds.features(0, 0) == 1.5);
  CHECK(ds.source_format == SourceFormat::csv);
}

TEST_CASE("load_csv header sniffing and label column by name") {
  TempFile f("alpha,beta,target\n1,2,x\n3,4,y\n5,6,x\n");
  SUBCASE("by name") {
    Dataset ds = load_csv(f.path, LabelColumn::name("target"));
    CHECK(ds.n() == 3);
    CHECK(ds.d() == 2);
    CHECK(ds.labels == std::vector<int>{-1, 1, -1});
  }
  SUBCASE("sniffed header with last column") {
    Dataset ds = load_csv(f.path, LabelColumn::last());
    CHECK(ds.n() == 3);
    CHECK(ds.d() == 2);
  }
}

TEST_CASE("load_csv error paths") {
  SUBCASE("ragged rows") {
    TempFile f("1,2,a\n1,2,3,b\n");
    CHECK_THROWS_WITH_AS(load_csv(f.path, LabelColumn::last()), doctest::Contains("RaggedRows"),
                         Error);
  }
  SUBCASE("three label values") {
    TempFile f("1,a\n2,b\n3,c\n");
    CHECK_THROWS_WITH_AS(load_csv(f.path, LabelColumn::last()),
                         doctest::Contains("NotTwoClasses"), Error);
  }
  SUBCASE("non-numeric feature") {
    TempFile f("1,2,a\nx,2,b\n");
    CHECK_THROWS_WITH_AS(load_csv(f.path, LabelColumn::last()),
                         doctest::Contains("NonNumericFeature"), Error);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_WITH_AS(load_csv("does_not_exist.csv", LabelColumn::last()),
                         doctest::Contains("IoError"), Error);
  }
}

TEST_CASE("load_svmlight direct parse") {
  TempFile f("+1 1:0.5 3:2.0\n-1 2:1 # trailing comment\n");
  Dataset ds = load_svmlight(f.path);
  CHECK(ds.n() == 2);
  CHECK(ds.d() == 3);
  CHECK(ds.features(0, 0) == 0.5);
  CHECK(ds.features(0, 1) == 0.0);
  CHECK(ds.features(0, 2) == 2.0);
  CHECK(ds.features(1, 1) == 1.0);
  CHECK(ds.labels == std::vector<int>{1, -1});
}

TEST_CASE("load_svmlight dimension from max index") {
  TempFile f("-1 2:1\n+1 4:1\n");
  Dataset ds = load_svmlight(f.path);
  CHECK(ds.d() == 4);
  CHECK(ds.features(0, 1) == 1.0);
  CHECK(ds.features(1, 3) == 1.0);
}

TEST_CASE("load_svmlight malformed lines") {
  SUBCASE("non-increasing index") {
    TempFile f("+1 3:1 2:1\n-1 1:1\n");
    CHECK_THROWS_WITH_AS(load_svmlight(f.path), doctest::Contains("MalformedLine"), Error);
  }
  SUBCASE("duplicate index") {
    TempFile f("+1 2:1 2:5\n-1 1:1\n");
    CHECK_THROWS_WITH_AS(load_svmlight(f.path), doctest::Contains("DuplicateIndex"), Error);
  }
  SUBCASE("zero index") {
    TempFile f("+1 0:1\n-1 1:1\n");
    CHECK_THROWS_WITH_AS(load_svmlight(f.path), doctest::Contains("MalformedLine"), Error);
  }
}

TEST_CASE("stratified_split counts follow per-class floors") {
  SUBCASE("ionosphere-shaped class sizes") {
    Dataset ds = sized_dataset(126, 225);
    auto [train, test] = stratified_split(ds, SplitPlan{42, 0, 0.8});
    CHECK(train.n() == 280);
    CHECK(test.n() == 71);
    CHECK(train.count_label(-1) == 100);
    CHECK(train.count_label(+1) == 180);
    CHECK(test.count_label(-1) == 26);
    CHECK(test.count_label(+1) == 45);
  }
  SUBCASE("five per class") {
    Dataset ds = sized_dataset(5, 5);
    auto [train, test] = stratified_split(ds, SplitPlan{42, 0, 0.8});
    CHECK(train.n() == 8);
    CHECK(test.n() == 2);
    CHECK(test.count_label(-1) == 1);
    CHECK(test.count_label(+1) == 1);
  }
  SUBCASE("class too small") {
    Dataset ds = sized_dataset(1, 5);
    CHECK_THROWS_WITH_AS(stratified_split(ds, SplitPlan{42, 0, 0.8}),
                         doctest::Contains("ClassTooSmall"), Error);
  }
}

TEST_CASE("stratified_split determinism and partition property") {
  Dataset ds = sized_dataset(20, 30);
  SplitIndices a = stratified_split_indices(ds, SplitPlan{7, 3, 0.8});
  SplitIndices b = stratified_split_indices(ds, SplitPlan{7, 3, 0.8});
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);

  std::set<std::size_t> all(a.train.begin(), a.train.end());
  all.insert(a.test.begin(), a.test.end());
  CHECK(all.size() == ds.n());
  CHECK(*all.rbegin() == ds.n() - 1);
}

TEST_CASE("distinct split indices give distinct permutations") {
  Dataset ds = sized_dataset(20, 30);
  std::set<std::vector<std::size_t>> seen;
  for (std::uint64_t s = 0; s < 50; ++s)
    seen.insert(stratified_split_indices(ds, SplitPlan{99, s, 0.8}).train);
  CHECK(seen.size() == 50);
}

TEST_CASE("per-class floor property on random class sizes") {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n_neg = 5 + rng.next_below(40);
    const std::size_t n_pos = 5 + rng.next_below(40);
    const double fraction = 0.5 + 0.4 * rng.next_double();
    Dataset ds = sized_dataset(n_neg, n_pos);
    auto [train, test] = stratified_split(ds, SplitPlan{rep, 0, fraction});
    CHECK(train.count_label(-1) ==
          static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n_neg))));
    CHECK(train.count_label(+1) ==
          static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n_pos))));
    CHECK(train.n() + test.n() == ds.n());
  }
}

TEST_CASE("numerical_rank") {
  SUBCASE("duplicated row") {
    Matrix x(2, 3);
    for (std::size_t j = 0; j < 3; ++j) x(0, j) = x(1, j) = j + 1.0;
    CHECK(numerical_rank(x) == 1);
  }
  SUBCASE("all zeros") {
    Matrix x(4, 2);
    CHECK(numerical_rank(x) == 0);
  }
  SUBCASE("random wide full-row-rank matrix with a Gram-Schmidt oracle") {
    Rng rng(3);
    Matrix x = testsupport::random_matrix(rng, 40, 2000);
    CHECK(numerical_rank(x) == 40);

    // oracle: count rows surviving Gram-Schmidt elimination
    Matrix work = x;
    std::size_t surviving = 0;
    for (std::size_t i = 0; i < work.rows(); ++i) {
      Vector v = work.row(i);
      for (std::size_t p = 0; p < i; ++p) {
        Vector u = work.row(p);
        const double un = dot(u, u);
        if (un == 0.0) continue;
        const double c = dot(u, v) / un;
        for (std::size_t j = 0; j < v.size(); ++j) v[j] -= c * u[j];
      }
      if (norm2(v) > 1e-7 * norm2(work.row(i))) ++surviving;
      for (std::size_t j = 0; j < v.size(); ++j) work(i, j) = v[j];
    }
    CHECK(surviving == 40);
  }
}

TEST_CASE("csv round trip is bit exact") {
  Rng rng(13);
  Matrix x(6, 4);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 4; ++j) x(i, j) = rng.next_gaussian() * std::pow(10.0, (int)j - 2);
  x(0, 0) = 1.0 / 3.0;
  x(1, 1) = -1e-17;
  x(2, 2) = 12345678.901234567;
  std::vector<int> y = {-1, -1, -1, 1, 1, 1};
  Dataset ds = Dataset::make(x, y, "roundtrip");

  TempFile f("");
  save_csv(ds, f.path);
  Dataset back = load_csv(f.path, LabelColumn::last());
  CHECK(back.n() == ds.n());
  CHECK(back.d() == ds.d());
  CHECK(back.labels == ds.labels);
  CHECK(back.features == ds.features);  // bitwise
}

TEST_CASE("standardize_features gives zero mean and unit sample variance") {
  Rng rng(17);
  Dataset ds = testsupport::random_dataset(rng, 30, 4);
  Dataset z = standardize_features(ds);
  for (std::size_t j = 0; j < z.d(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < z.n(); ++i) mean += z.features(i, j);
    mean /= z.n();
    CHECK(std::fabs(mean) < 1e-12);
    double ss = 0.0;
    for (std::size_t i = 0; i < z.n(); ++i) ss += z.features(i, j) * z.features(i, j);
    CHECK(ss / (z.n() - 1) == doctest::Approx(1.0));
  }
}

TEST_CASE("Dataset::make validates invariants") {
  Matrix one(1, 2);
  CHECK_THROWS_WITH_AS(Dataset::make(one, {1}, "x"), doctest::Contains("TooFewRows"), Error);

  Matrix two(2, 2);
  CHECK_THROWS_WITH_AS(Dataset::make(two, {1, 1}, "x"), doctest::Contains("NotTwoClasses"),
                       Error);

  Matrix bad(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(Dataset::make(bad, {-1, 1}, "x"), doctest::Contains("NonFiniteFeature"),
                       Error);
}
