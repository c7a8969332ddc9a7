// Kernel timings per format: OpenMP kernels against the serial reference,
// with the dense oracle for scale and as a correctness check.

#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "spsel/features.hpp"
#include "spsel/generator.hpp"
#include "spsel/random.hpp"
#include "spsel/sparse.hpp"
#include "spsel/spmm.hpp"
#include "spsel/timing.hpp"

using namespace spsel;

int main(int argc, char** argv) {
  Index n = 4000;
  double density = 0.01;
  Index dense_cols = 32;
  int reps = 7;
  int threads = omp_get_max_threads();
  Index oracle_limit = 2000;
  std::uint64_t seed = 1;

  CLI::App app{"SpMM kernel benchmark"};
  app.add_option("--size", n, "Matrix side")->capture_default_str();
  app.add_option("--density", density)->capture_default_str();
  app.add_option("--dense-cols", dense_cols)->capture_default_str();
  app.add_option("--reps", reps)->capture_default_str();
  app.add_option("--threads", threads)->capture_default_str();
  app.add_option("--oracle-limit", oracle_limit, "Largest side the dense oracle runs on")
      ->capture_default_str();
  app.add_option("--seed", seed)->capture_default_str();
  CLI11_PARSE(app, argc, argv);
  omp_set_num_threads(threads);

  GenSpec spec;
  spec.size_min = spec.size_max = n;
  spec.sparsity_min = spec.sparsity_max = density;
  spec.total_matrices = 1;
  spec.seed = seed;
  const SparseMatrix a = generateMatrix(spec, 0).matrix;
  Rng rng(seed + 1);
  DenseMatrix x(n, dense_cols);
  for (auto& v : x.data()) v = rng.uniform(-1.0, 1.0);

  std::printf("%lldx%lld, nnz %lld, d=%lld, %d threads, %d reps\n", static_cast<long long>(n),
              static_cast<long long>(n), static_cast<long long>(a.nnz()),
              static_cast<long long>(dense_cols), threads, reps);

  DenseMatrix oracle;
  if (n <= oracle_limit) {
    const auto t = measureMedian(
        [&] {
          const auto start = Clock::now();
          oracle = denseOracle(a, x);
          return secondsBetween(start, Clock::now());
        },
        0, 1);
    std::printf("dense oracle %.3e s\n", t.median);
  }

  std::printf("%-4s %12s %12s %8s %12s %10s\n", "fmt", "omp [s]", "serial [s]", "speedup",
              "features [s]", "max|diff|");
  for (auto f : kAllFormats) {
    SparseMatrix m = a;
    try {
      m = convert(a, f);
    } catch (const std::exception&) {
      std::printf("%-4s refused\n", std::string(formatName(f)).c_str());
      continue;
    }
    DenseMatrix product;
    const auto par = measureMedian(
        [&] {
          auto r = spmm(m, x);
          product = std::move(r.product);
          return r.elapsed;
        },
        1, reps);
    const auto ser = measureMedian(
        [&] {
          const auto start = Clock::now();
          doNotOptimize(spmmSerial(m, x));
          return secondsBetween(start, Clock::now());
        },
        1, reps);
    const auto feat = measureMedian(
        [&] {
          const auto start = Clock::now();
          doNotOptimize(extractFeatures(m));
          return secondsBetween(start, Clock::now());
        },
        1, reps);
    const double diff = oracle.rows() > 0 ? maxAbsDiff(product, oracle) : maxAbsDiff(product, spmmSerial(m, x));
    std::printf("%-4s %12.3e %12.3e %8.2f %12.3e %10.1e\n", std::string(formatName(f)).c_str(),
                par.median, ser.median, ser.median / par.median, feat.median, diff);
  }
  return 0;
}
