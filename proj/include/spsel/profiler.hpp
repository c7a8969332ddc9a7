#pragma once

#include <array>
#include <cstdint>

#include "spsel/format.hpp"
#include "spsel/sparse.hpp"

namespace spsel {

struct MeasurementRecord {
  StorageFormat format = StorageFormat::kCoo;
  double runtime = 0.0;  // median kernel seconds; 0 when refused
  std::uint64_t memory = 0;
  bool refused = false;

  friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
};

/// One record per storage format, indexed by format code.
using FormatMeasurements = std::array<MeasurementRecord, kNumFormats>;

struct ProfileOptions {
  Index dense_cols = 32;
  int reps = 5;
  int warmup = 1;
  std::uint64_t seed = 7;
  /// Cross-check every format's product against the dense oracle.
  bool verify = false;
  ConversionOptions conversion;
};

/// Converts to every format, runs warm-up plus `reps` timed kernels against a
/// seeded random dense operand and keeps the median. Repetitions are
/// interleaved across formats in a seeded random order per round. DIA
/// refusals are recorded, not thrown.
/// Throws ValidationError if reps < 3 and DataError if verification fails.
FormatMeasurements profileMatrix(const SparseMatrix& m, const ProfileOptions& options);

}  // namespace spsel
