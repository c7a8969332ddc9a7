#include <algorithm>

#include "doctest.h"
#include "spsel/error.hpp"
#include "spsel/selector.hpp"
#include "spsel/spmm.hpp"
#include "test_support.hpp"

using namespace spsel;

namespace {

std::vector<Triplet> sortedTriplets(const SparseMatrix& m) {
  auto t = toTriplets(m);
  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  return t;
}

CooMatrix identity(Index n) {
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return fromTriplets(n, n, std::move(t));
}

}  // namespace

TEST_CASE("a model agreeing with the input format skips conversion") {
  Rng rng(1);
  const SparseMatrix m = testing::randomSparse(rng, 40, 30, 0.1);
  const auto out = spmmPredict(testing::constantModel(StorageFormat::kCoo), m);
  CHECK(out.predicted == StorageFormat::kCoo);
  CHECK(out.chosen == StorageFormat::kCoo);
  CHECK_FALSE(out.converted);
  CHECK_FALSE(out.cache_hit);
  CHECK(out.convert_time == 0.0);
}

TEST_CASE("conversion keeps the triplet set for every predicted format") {
  Rng rng(2);
  const SparseMatrix m = testing::randomSparse(rng, 33, 47, 0.2);
  const auto expected = sortedTriplets(m);
  for (auto f : kAllFormats) {
    const auto out = spmmPredict(testing::constantModel(f), m, std::nullopt, nullptr,
                                 testing::unguarded());
    CHECK(out.chosen == f);
    CHECK(out.matrix.format() == f);
    CHECK(out.converted == (f != StorageFormat::kCoo));
    CHECK(sortedTriplets(out.matrix) == expected);
  }
}

TEST_CASE("cache hits skip feature extraction and prediction") {
  Rng rng(3);
  const SparseMatrix m = testing::randomSparse(rng, 60, 60, 0.05);
  LayerFormatCache cache;
  const auto model = testing::constantModel(StorageFormat::kCsr);
  const auto first = spmmPredict(model, m, 4, &cache);
  CHECK_FALSE(first.cache_hit);
  CHECK(cache.size() == 1);
  REQUIRE(cache.lookup(4).has_value());
  CHECK(cache.lookup(4)->format == StorageFormat::kCsr);
  CHECK(cache.lookup(4)->signature == extractFeatures(m));

  // A different model is ignored while the layer stays cached.
  const auto second = spmmPredict(testing::constantModel(StorageFormat::kLil), m, 4, &cache);
  CHECK(second.cache_hit);
  CHECK(second.chosen == StorageFormat::kCsr);
  CHECK(second.feature_time == 0.0);
  CHECK(second.predict_time == 0.0);

  cache.invalidate(4);
  CHECK_FALSE(cache.lookup(4).has_value());
  const auto third = spmmPredict(testing::constantModel(StorageFormat::kLil), m, 4, &cache);
  CHECK_FALSE(third.cache_hit);
  CHECK(third.chosen == StorageFormat::kLil);
  cache.clear();
  CHECK(cache.size() == 0);
}

TEST_CASE("refused DIA conversion falls back to the input format") {
  Rng rng(4);
  const SparseMatrix m = testing::randomSparse(rng, 200, 200, 0.02);
  const auto out = spmmPredict(testing::constantModel(StorageFormat::kDia), m);
  CHECK(out.predicted == StorageFormat::kDia);
  CHECK(out.refused);
  CHECK_FALSE(out.converted);
  CHECK(out.chosen == StorageFormat::kCoo);
  CHECK(out.matrix.format() == StorageFormat::kCoo);

  const DenseMatrix x = testing::randomDense(rng, 200, 5);
  const auto r = adaptiveSpmm(testing::constantModel(StorageFormat::kDia), m, x);
  CHECK(r.selection.refused);
  CHECK(maxAbsDiff(r.product, denseOracle(m, x)) <= 1e-9);
}

TEST_CASE("identity adjacency returns the operand") {
  Rng rng(5);
  const SparseMatrix a = identity(25);
  const DenseMatrix x = testing::randomDense(rng, 25, 8);
  for (auto f : kAllFormats) {
    const auto r = adaptiveSpmm(testing::constantModel(f), a, x);
    CHECK(r.selection.chosen == f);
    CHECK(maxAbsDiff(r.product, x) == 0.0);
  }
}

TEST_CASE("adaptive products match the dense oracle and account for overhead") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const SparseMatrix a = testing::randomCase(rng, 64);
    const DenseMatrix x = testing::randomDense(rng, a.cols(), 1 + static_cast<Index>(rng.below(9)));
    const auto oracle = denseOracle(a, x);
    for (auto f : kAllFormats) {
      const auto r = adaptiveSpmm(testing::constantModel(f), a, x, std::nullopt, nullptr,
                                  testing::unguarded());
      CHECK(maxAbsDiff(r.product, oracle) <= 1e-9);
      const auto& o = r.overhead;
      CHECK(o.total() == doctest::Approx(o.feature_time + o.predict_time + o.convert_time +
                                         o.kernel_time));
      CHECK(o.selectionFraction() >= 0.0);
      CHECK(o.selectionFraction() <= 1.0);
    }
  }
}

TEST_CASE("shape mismatch is rejected") {
  Rng rng(7);
  const SparseMatrix a = testing::randomSparse(rng, 10, 12, 0.3);
  CHECK_THROWS_AS(adaptiveSpmm(testing::constantModel(StorageFormat::kCsr), a, DenseMatrix(11, 3)),
                  ShapeError);
}
