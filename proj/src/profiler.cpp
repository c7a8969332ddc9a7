#include "spsel/profiler.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <vector>

#include "spsel/error.hpp"
#include "spsel/random.hpp"
#include "spsel/spmm.hpp"
#include "spsel/timing.hpp"

namespace spsel {

FormatMeasurements profileMatrix(const SparseMatrix& m, const ProfileOptions& options) {
  if (options.reps < 3) throw ValidationError("profiling needs at least 3 repetitions");
  if (options.dense_cols < 1) throw ValidationError("dense operand needs at least one column");

  Rng rng(options.seed);
  DenseMatrix x(m.cols(), options.dense_cols);
  for (auto& v : x.data()) v = rng.uniform();

  DenseMatrix reference;
  if (options.verify) reference = denseOracle(m, x);

  // Every candidate is converted up front and the timed repetitions run in
  // rounds across formats, so slow drift on the machine lands on all formats
  // alike instead of on whichever happened to run during it.
  FormatMeasurements out;
  std::vector<SparseMatrix> candidates;
  std::vector<std::size_t> slots;
  for (auto f : kAllFormats) {
    const auto slot = static_cast<std::size_t>(formatCode(f));
    auto& rec = out[slot];
    rec.format = f;
    if (f == StorageFormat::kDia && diaWouldBlowUp(m, options.conversion)) {
      rec.refused = true;
      rec.memory = projectedFootprint(m, f, options.conversion);
      continue;
    }
    candidates.push_back(convert(m, f, options.conversion));
    rec.memory = memoryFootprint(candidates.back());
    slots.push_back(slot);
  }

  auto check = [&](const SparseMatrix& a, const DenseMatrix& product) {
    const double err = maxAbsDiff(product, reference);
    if (err > 1e-9) {
      std::ostringstream os;
      os << formatName(a.format()) << " kernel deviates from the dense oracle by " << err;
      throw DataError(os.str());
    }
  };

  for (int i = 0; i < options.warmup; ++i)
    for (const auto& a : candidates) doNotOptimize(spmm(a, x).elapsed);

  // The order inside each round is reshuffled: a format's position in the
  // round measurably shifts its timing on some machines.
  std::vector<std::vector<double>> samples(candidates.size());
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (int rep = 0; rep < options.reps; ++rep) {
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
    for (std::size_t c : order) {
      auto r = spmm(candidates[c], x);
      samples[c].push_back(r.elapsed);
      if (options.verify && rep == 0) check(candidates[c], r.product);
    }
  }
  for (std::size_t c = 0; c < candidates.size(); ++c)
    out[slots[c]].runtime = std::max(median(samples[c]), 1e-9);
  return out;
}

}  // namespace spsel
