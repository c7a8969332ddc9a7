#include <cmath>

#include <omp.h>

#include "doctest.h"
#include "reference_features.hpp"
#include "spsel/error.hpp"
#include "spsel/features.hpp"
#include "test_support.hpp"

using namespace spsel;

TEST_CASE("identity features") {
  std::vector<Triplet> t;
  for (Index i = 0; i < 4; ++i) t.push_back({i, i, 1.0});
  const auto f = extractFeatures(fromTriplets(4, 4, t));
  CHECK(f[Feature::kNumRow] == 4);
  CHECK(f[Feature::kNumCol] == 4);
  CHECK(f[Feature::kNnz] == 4);
  CHECK(f[Feature::kNumDiags] == 1);
  CHECK(f[Feature::kAverRd] == 1);
  CHECK(f[Feature::kMaxRd] == 1);
  CHECK(f[Feature::kMinRd] == 1);
  CHECK(f[Feature::kDevRd] == 0);
  CHECK(f[Feature::kErDia] == 1.0);
  CHECK(f[Feature::kDensity] == 0.25);
  CHECK(f[Feature::kCv] == 0);
  CHECK(f[Feature::kMaxMu] == 0);
}

TEST_CASE("zero matrix maps degenerate features to zero") {
  const auto f = extractFeatures(fromTriplets(3, 3, {}));
  CHECK(f[Feature::kNnz] == 0);
  CHECK(f[Feature::kNumDiags] == 0);
  for (auto k : {Feature::kAverRd, Feature::kMaxRd, Feature::kMinRd, Feature::kDevRd,
                 Feature::kAverCd, Feature::kMaxCd, Feature::kMinCd, Feature::kDevCd})
    CHECK(f[k] == 0);
  CHECK(f[Feature::kErDia] == 0);
  CHECK(f[Feature::kErCd] == 0);
  CHECK(f[Feature::kDensity] == 0);
  CHECK(f[Feature::kCv] == 0);
}

TEST_CASE("hand-worked 3x3 example") {
  const SparseMatrix m = fromTriplets(3, 3, {{0, 0, 1.0}, {0, 2, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}});
  const auto f = extractFeatures(m);
  CHECK(f[Feature::kNnz] == 4);
  CHECK(f[Feature::kNumDiags] == 2);
  CHECK(f[Feature::kAverRd] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(f[Feature::kMaxRd] == 2);
  CHECK(f[Feature::kMinRd] == 1);
  CHECK(f[Feature::kDevRd] == doctest::Approx(std::sqrt(2.0 / 9.0)).epsilon(1e-15));
  CHECK(f[Feature::kErDia] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(f[Feature::kRowBounce] == 0.5);
  CHECK(f[Feature::kDensity] == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
  CHECK(f[Feature::kMaxMu] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(testing::featuresAgree(f, testing::naiveFeatures(m)));
}

TEST_CASE("single row and single column conventions") {
  const auto row = extractFeatures(fromTriplets(1, 5, {{0, 1, 1.0}, {0, 4, 1.0}}));
  CHECK(row[Feature::kRowBounce] == 0);
  CHECK(row[Feature::kColBounce] == doctest::Approx(3.0 / 4.0));
  const auto col = extractFeatures(fromTriplets(5, 1, {{2, 0, 1.0}}));
  CHECK(col[Feature::kColBounce] == 0);
  CHECK(col[Feature::kErCd] == doctest::Approx(1.0 / 5.0));
}

TEST_CASE("property: invariants, format independence and naive agreement") {
  Rng rng(31337);
  for (int trial = 0; trial < 120; ++trial) {
    const SparseMatrix m = testing::randomCase(rng, 64);
    const auto f = extractFeatures(m);
    CHECK(testing::featuresAgree(f, testing::naiveFeatures(m)));
    CHECK(f[Feature::kNnz] <= f[Feature::kNumRow] * f[Feature::kNumCol]);
    CHECK(f[Feature::kMinRd] <= f[Feature::kAverRd]);
    CHECK(f[Feature::kAverRd] <= f[Feature::kMaxRd]);
    CHECK(f[Feature::kMinCd] <= f[Feature::kAverCd]);
    CHECK(f[Feature::kAverCd] <= f[Feature::kMaxCd]);
    CHECK(f[Feature::kDensity] >= 0);
    CHECK(f[Feature::kDensity] <= 1);
    CHECK(f[Feature::kErDia] <= 1);
    CHECK(f[Feature::kErCd] <= 1);
    CHECK(f[Feature::kMaxMu] == f[Feature::kMaxRd] - f[Feature::kAverRd]);
    for (auto fmt : kAllFormats) CHECK(extractFeatures(convert(m, fmt, testing::unguarded())) == f);
  }
}

TEST_CASE("threaded extraction matches single-threaded output exactly") {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(3);
  Rng rng(8);
  const SparseMatrix m = testing::randomSparse(rng, 700, 650, 0.3);
  REQUIRE(m.nnz() > 100000);
  const auto f = extractFeatures(m);
  CHECK(testing::featuresAgree(f, testing::naiveFeatures(m)));
  for (auto fmt : {StorageFormat::kCsr, StorageFormat::kCsc, StorageFormat::kBsr, StorageFormat::kDok,
                   StorageFormat::kLil})
    CHECK(extractFeatures(convert(m, fmt)) == f);
  omp_set_num_threads(1);
  CHECK(extractFeatures(m) == f);
  omp_set_num_threads(saved);
}

TEST_CASE("scaler fit and apply") {
  FeatureVector a, b;
  a[Feature::kNnz] = 10;
  b[Feature::kNnz] = 30;
  a[Feature::kDensity] = 0.5;
  b[Feature::kDensity] = 0.5;

  const auto single = fitScaler(std::vector<FeatureVector>{a});
  CHECK(single.mins() == a.values);
  CHECK(single.maxs() == a.values);

  const std::vector<FeatureVector> both{a, b};
  const auto s = fitScaler(both);
  CHECK(s.mins()[static_cast<int>(Feature::kNnz)] == 10);
  CHECK(s.maxs()[static_cast<int>(Feature::kNnz)] == 30);

  FeatureVector x;
  x[Feature::kNnz] = 15;
  x[Feature::kDensity] = 0.9;
  CHECK(s.apply(x)[Feature::kNnz] == 0.25);
  CHECK(s.apply(x)[Feature::kDensity] == 0.0);  // constant feature
  x[Feature::kNnz] = 5;
  CHECK(s.apply(x)[Feature::kNnz] == 0.0);
  CHECK(s.apply(a)[Feature::kNnz] == 0.0);
  CHECK(s.apply(b)[Feature::kNnz] == 1.0);

  CHECK_THROWS_AS(fitScaler(std::vector<FeatureVector>{}), DataError);
}

TEST_CASE("property: scaled features stay in the unit interval") {
  Rng rng(4);
  std::vector<FeatureVector> train;
  for (int i = 0; i < 20; ++i) train.push_back(extractFeatures(testing::randomCase(rng, 32)));
  const auto s = fitScaler(train);
  for (int i = 0; i < 100; ++i) {
    FeatureVector v;
    for (auto& x : v.values) x = rng.uniform(-100.0, 100.0);
    for (double y : s.apply(v).values) {
      CHECK(y >= 0.0);
      CHECK(y <= 1.0);
    }
  }
}
