#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spsel/sparse.hpp"

namespace spsel {

/// Synthetic corpus of square 0/1 matrices.
struct GenSpec {
  Index size_min = 1000;
  Index size_max = 15000;
  Index size_step = 200;
  double sparsity_min = 0.001;
  double sparsity_max = 0.70;
  int total_matrices = 300;
  std::uint64_t seed = 2022;

  /// 300 matrices, sizes 1000..15000 step 200, density 0.1%..70%.
  static GenSpec paperScale();
  /// 60 matrices, sizes 200..2000 step 200, density 0.1%..70%.
  static GenSpec deskScale();

  /// Throws ValidationError on inconsistent bounds.
  void validate() const;

  std::vector<Index> sizes() const;
};

struct GeneratedMatrix {
  std::string id;
  Index size = 0;
  double target_density = 0.0;  // drawn log-uniformly; nnz is its rounding
  CooMatrix matrix;
};

/// The index-th matrix of the corpus. Each matrix draws from its own stream
/// derived from (seed, index), so matrices can be produced independently.
/// Size cycles through the arithmetic progression; the nonzero count is drawn
/// log-uniformly over [sparsity_min, sparsity_max] * n^2 and realized exactly.
GeneratedMatrix generateMatrix(const GenSpec& spec, int index);

/// Side length of the index-th matrix without generating it.
Index matrixSize(const GenSpec& spec, int index);

std::vector<GeneratedMatrix> generateMatrices(const GenSpec& spec);

std::string matrixId(int index);

}  // namespace spsel
