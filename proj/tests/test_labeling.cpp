#include <cmath>
#include <sstream>

#include "doctest.h"
#include "labeling_oracle.hpp"
#include "spsel/dataset.hpp"
#include "spsel/error.hpp"
#include "spsel/labeling.hpp"

using namespace spsel;
using spsel::testing::Criterion;

namespace {

MatrixMeasurements twoFormats(const std::string& id, double coo_t, std::uint64_t coo_m,
                              double csr_t, std::uint64_t csr_m) {
  MatrixMeasurements m{id, {}};
  for (auto f : kAllFormats) {
    auto& r = m.records[static_cast<std::size_t>(formatCode(f))];
    r.format = f;
    r.refused = true;
  }
  m.records[0] = {StorageFormat::kCoo, coo_t, coo_m, false};
  m.records[1] = {StorageFormat::kCsr, csr_t, csr_m, false};
  return m;
}

std::vector<FeatureVector> blankFeatures(std::size_t n) { return std::vector<FeatureVector>(n); }

}  // namespace

TEST_CASE("weighted objective by substitution") {
  // The second matrix pins the global ranges to runtime [0, 1], memory [0, 1000].
  const std::vector corpus = {twoFormats("a", 0.2, 600, 0.4, 100),
                              twoFormats("b", 0.0, 0, 1.0, 1000)};
  const auto labeled = labelSamples(corpus, blankFeatures(2), {0.5, 1e-4});
  CHECK(labeled[0].label.objective[0] == doctest::Approx(0.4));
  CHECK(labeled[0].label.objective[1] == doctest::Approx(0.25));
  CHECK(labeled[0].label.best == std::vector{StorageFormat::kCsr});
  CHECK(labeled[0].label.canonical == StorageFormat::kCsr);
  CHECK(std::isinf(labeled[0].label.objective[3]));

  const auto runtime_only = labelSamples(corpus, blankFeatures(2), {1.0, 1e-4});
  CHECK(runtime_only[0].label.canonical == StorageFormat::kCoo);
  const auto memory_only = labelSamples(corpus, blankFeatures(2), {0.0, 1e-4});
  CHECK(memory_only[0].label.canonical == StorageFormat::kCsr);
}

TEST_CASE("ties within epsilon form the label set, lowest code is canonical") {
  const std::vector corpus = {twoFormats("a", 0.50000, 10, 0.50005, 20),
                              twoFormats("b", 0.0, 0, 1.0, 1000)};
  const auto labeled = labelSamples(corpus, blankFeatures(2), {1.0, 1e-4});
  CHECK(labeled[0].label.best == std::vector{StorageFormat::kCoo, StorageFormat::kCsr});
  CHECK(labeled[0].label.canonical == StorageFormat::kCoo);
  const auto strict = labelSamples(corpus, blankFeatures(2), {1.0, 1e-5});
  CHECK(strict[0].label.best == std::vector{StorageFormat::kCoo});
}

TEST_CASE("labeling errors") {
  const std::vector one = {twoFormats("a", 0.1, 10, 0.2, 20)};
  CHECK_THROWS_AS(labelSamples(one, blankFeatures(1), {}), DataError);
  auto all_refused = twoFormats("b", 0.1, 10, 0.2, 20);
  all_refused.records[0].refused = all_refused.records[1].refused = true;
  const std::vector two = {one[0], all_refused};
  CHECK_THROWS_WITH_AS(labelSamples(two, blankFeatures(2), {}), doctest::Contains("b:"),
                       DataError);
  CHECK_THROWS_AS(ObjectivePolicy({1.5, 1e-4}).validate(), ValidationError);
  CHECK_THROWS_AS(ObjectivePolicy({0.5, 0.0}).validate(), ValidationError);
}

TEST_CASE("w = 1 and w = 0 reproduce raw argmins") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const auto corpus = testing::randomCorpus(rng, 2 + static_cast<int>(rng.below(30)));
    const auto features = blankFeatures(corpus.size());
    const auto by_runtime = labelSamples(corpus, features, {1.0, 1e-4});
    const auto by_memory = labelSamples(corpus, features, {0.0, 1e-4});
    const auto rt = testing::rawArgmins(corpus, Criterion::kRuntime, 1e-4);
    const auto mem = testing::rawArgmins(corpus, Criterion::kMemory, 1e-4);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      CHECK(by_runtime[i].label.best == rt[i]);
      CHECK(by_memory[i].label.best == mem[i]);
      CHECK(by_runtime[i].label.canonical == rt[i].front());
    }
  }
}

TEST_CASE("w = 1 labels ignore affine rescaling of memory") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto corpus = testing::randomCorpus(rng, 20);
    const auto before = labelSamples(corpus, blankFeatures(20), {1.0, 1e-4});
    for (auto& m : corpus)
      for (auto& r : m.records) r.memory = 3 * r.memory + 17;
    const auto after = labelSamples(corpus, blankFeatures(20), {1.0, 1e-4});
    for (std::size_t i = 0; i < corpus.size(); ++i)
      CHECK(before[i].label.best == after[i].label.best);
  }
}

TEST_CASE("frequency histogram") {
  SUBCASE("all tied") {
    std::vector<MatrixMeasurements> corpus;
    for (int i = 0; i < 4; ++i) {
      MatrixMeasurements m{"t" + std::to_string(i), {}};
      for (auto f : kAllFormats) m.records[static_cast<std::size_t>(formatCode(f))] = {f, 1.0, 64, false};
      corpus.push_back(m);
    }
    const std::vector<double> ws = {0.0, 0.5, 1.0};
    for (const auto& row : formatFrequencyHistogram(corpus, ws))
      for (int c : row.counts) CHECK(c == 4);
  }
  SUBCASE("single winner") {
    const std::vector corpus = {twoFormats("a", 0.1, 10, 0.2, 20), twoFormats("b", 0.3, 30, 0.4, 40)};
    const std::vector<double> ws = {0.0, 1.0};
    const auto rows = formatFrequencyHistogram(corpus, ws);
    for (const auto& row : rows) {
      CHECK(row.counts[0] == 2);
      for (int k = 1; k < kNumFormats; ++k) CHECK(row.counts[k] == 0);
    }
  }
}

TEST_CASE("measurement CSV round trip is lossless") {
  Rng rng(8);
  const auto corpus = testing::randomCorpus(rng, 12);
  std::ostringstream first;
  writeMeasurementsCsv(first, corpus);
  std::istringstream in(first.str());
  const auto back = readMeasurementsCsv(in);
  REQUIRE(back.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(back[i].matrix_id == corpus[i].matrix_id);
    CHECK(back[i].records == corpus[i].records);
  }
  std::ostringstream second;
  writeMeasurementsCsv(second, back);
  CHECK(first.str() == second.str());
}

TEST_CASE("labeled CSV round trip") {
  Rng rng(9);
  const auto corpus = testing::randomCorpus(rng, 10);
  std::vector<FeatureVector> features(corpus.size());
  for (auto& f : features)
    for (auto& v : f.values) v = rng.uniform(0.0, 100.0);
  const auto labeled = labelSamples(corpus, features, {0.7, 1e-4});
  std::ostringstream out;
  writeLabeledCsv(out, labeled);
  std::istringstream in(out.str());
  const auto back = readLabeledCsv(in);
  REQUIRE(back.size() == labeled.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].features == labeled[i].features);
    CHECK(back[i].label.best == labeled[i].label.best);
    CHECK(back[i].label.canonical == labeled[i].label.canonical);
    CHECK(back[i].label.objective == labeled[i].label.objective);
  }
}

TEST_CASE("CSV parse errors carry line numbers") {
  std::istringstream bad_header("id,format\n");
  CHECK_THROWS_AS(readMeasurementsCsv(bad_header), ParseError);
  std::istringstream bad_number(
      "matrixId,format,runtimeSeconds,memoryBytes,refused\nm0,COO,fast,24,0\n");
  CHECK_THROWS_WITH_AS(readMeasurementsCsv(bad_number), doctest::Contains("line 2"), ParseError);
  std::istringstream bad_format(
      "matrixId,format,runtimeSeconds,memoryBytes,refused\nm0,ELL,1e-3,24,0\n");
  CHECK_THROWS_WITH_AS(readMeasurementsCsv(bad_format), doctest::Contains("ELL"), ParseError);
  std::istringstream incomplete(
      "matrixId,format,runtimeSeconds,memoryBytes,refused\nm0,COO,1e-3,24,0\n");
  CHECK_THROWS_WITH_AS(readMeasurementsCsv(incomplete), doctest::Contains("no CSR"), DataError);
}
