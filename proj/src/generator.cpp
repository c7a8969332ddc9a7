#include "spsel/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "spsel/error.hpp"
#include "spsel/random.hpp"

namespace spsel {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// `count` distinct cells of an n x n grid, row-major sorted.
std::vector<std::uint64_t> sampleCells(Rng& rng, std::uint64_t cells, std::uint64_t count) {
  std::vector<std::uint64_t> picked;
  picked.reserve(count);
  if (count * 8 <= cells) {
    // Sparse: draw with rejection until enough distinct cells exist.
    while (picked.size() < count) {
      const auto missing = count - picked.size();
      for (std::uint64_t k = 0; k < missing; ++k) picked.push_back(rng.below(cells));
      std::sort(picked.begin(), picked.end());
      picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
    }
    return picked;
  }
  // Dense: selection sampling, one pass over the grid.
  std::uint64_t needed = count;
  for (std::uint64_t c = 0; c < cells && needed > 0; ++c) {
    if (rng.below(cells - c) < needed) {
      picked.push_back(c);
      --needed;
    }
  }
  return picked;
}

}  // namespace

GenSpec GenSpec::paperScale() { return GenSpec{}; }

GenSpec GenSpec::deskScale() {
  GenSpec s;
  s.size_min = 200;
  s.size_max = 2000;
  s.size_step = 200;
  s.total_matrices = 60;
  return s;
}

void GenSpec::validate() const {
  if (size_min < 1) throw ValidationError("gen spec: sizeMin must be >= 1");
  if (size_min > size_max) throw ValidationError("gen spec: sizeMin exceeds sizeMax");
  if (size_step < 1) throw ValidationError("gen spec: sizeStep must be >= 1");
  if (!(sparsity_min > 0.0)) throw ValidationError("gen spec: sparsityMin must be > 0");
  if (!(sparsity_min <= sparsity_max))
    throw ValidationError("gen spec: sparsityMin exceeds sparsityMax");
  if (!(sparsity_max <= 1.0)) throw ValidationError("gen spec: sparsityMax must be <= 1");
  if (total_matrices < 1) throw ValidationError("gen spec: totalMatrices must be >= 1");
}

std::vector<Index> GenSpec::sizes() const {
  std::vector<Index> out;
  for (Index n = size_min; n <= size_max; n += size_step) out.push_back(n);
  return out;
}

std::string matrixId(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "m%04d", index);
  return buf;
}

Index matrixSize(const GenSpec& spec, int index) {
  spec.validate();
  if (index < 0 || index >= spec.total_matrices)
    throw ValidationError("matrix index outside the corpus");
  const auto sizes = spec.sizes();
  return sizes[static_cast<std::size_t>(index) % sizes.size()];
}

GeneratedMatrix generateMatrix(const GenSpec& spec, int index) {
  const Index n = matrixSize(spec, index);
  Rng rng(splitmix64(spec.seed ^ splitmix64(static_cast<std::uint64_t>(index))));

  const auto cells = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
  const double log_lo = std::log(spec.sparsity_min);
  const double log_hi = std::log(spec.sparsity_max);
  const double drawn = std::exp(rng.uniform(log_lo, log_hi));
  const auto lo = static_cast<std::uint64_t>(std::ceil(spec.sparsity_min * static_cast<double>(cells)));
  const auto hi = static_cast<std::uint64_t>(std::floor(spec.sparsity_max * static_cast<double>(cells)));
  auto count = static_cast<std::uint64_t>(std::llround(drawn * static_cast<double>(cells)));
  count = std::clamp(count, std::min(lo, hi), std::max(lo, hi));

  const auto picked = sampleCells(rng, cells, count);
  std::vector<Index> r(picked.size()), c(picked.size());
  for (std::size_t k = 0; k < picked.size(); ++k) {
    r[k] = static_cast<Index>(picked[k] / static_cast<std::uint64_t>(n));
    c[k] = static_cast<Index>(picked[k] % static_cast<std::uint64_t>(n));
  }
  return {matrixId(index), n, std::clamp(drawn, spec.sparsity_min, spec.sparsity_max),
          CooMatrix(n, n, std::move(r), std::move(c), std::vector<double>(picked.size(), 1.0))};
}

std::vector<GeneratedMatrix> generateMatrices(const GenSpec& spec) {
  spec.validate();
  std::vector<GeneratedMatrix> out;
  out.reserve(static_cast<std::size_t>(spec.total_matrices));
  for (int i = 0; i < spec.total_matrices; ++i) out.push_back(generateMatrix(spec, i));
  return out;
}

}  // namespace spsel
