#pragma once

// Weighted runtime/memory objective and the per-matrix optimal-format labels.
//
// Runtimes and footprints are min-max normalized over every non-refused
// (matrix, format) measurement of the corpus, then combined as
//   O = w * R + (1 - w) * M.
// All formats whose O lies within tie_epsilon of the smallest are optimal.

#include <array>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "spsel/features.hpp"
#include "spsel/format.hpp"
#include "spsel/profiler.hpp"

namespace spsel {

struct ObjectivePolicy {
  double w = 1.0;
  double tie_epsilon = 1e-4;

  /// Throws ValidationError unless w is in [0, 1] and tie_epsilon > 0.
  void validate() const;
};

struct GlobalRanges {
  double runtime_min = 0.0;
  double runtime_max = 0.0;
  double memory_min = 0.0;
  double memory_max = 0.0;

  friend bool operator==(const GlobalRanges&, const GlobalRanges&) = default;
};

struct MatrixMeasurements {
  std::string matrix_id;
  FormatMeasurements records;
};

inline constexpr double kRefusedObjective = std::numeric_limits<double>::infinity();

/// Objective values and optimal set of one matrix. Refused formats get
/// kRefusedObjective and never enter the optimal set.
struct FormatLabel {
  std::array<double, kNumFormats> objective{};
  std::vector<StorageFormat> best;  // ascending code
  StorageFormat canonical = StorageFormat::kCoo;

  bool isBest(StorageFormat f) const;
};

struct LabeledSample {
  std::string matrix_id;
  FeatureVector features;
  FormatLabel label;
};

/// Extremes over all non-refused records. Throws DataError if there are none.
GlobalRanges computeGlobalRanges(std::span<const MatrixMeasurements> corpus);

/// (v - lo) / (hi - lo), or 0 when the range is empty.
double minMaxNormalize(double v, double lo, double hi);

/// Throws DataError if every format of the matrix was refused.
FormatLabel labelMatrix(const FormatMeasurements& records, const GlobalRanges& ranges,
                        const ObjectivePolicy& policy);

/// Labels a whole corpus against its own global ranges. Needs at least two
/// matrices. `features` is parallel to `corpus`.
std::vector<LabeledSample> labelSamples(std::span<const MatrixMeasurements> corpus,
                                        std::span<const FeatureVector> features,
                                        const ObjectivePolicy& policy);

struct FrequencyRow {
  double w = 0.0;
  std::array<int, kNumFormats> counts{};
};

/// For each weight, how many matrices have each format in their optimal set.
/// Tied formats are all counted.
std::vector<FrequencyRow> formatFrequencyHistogram(std::span<const MatrixMeasurements> corpus,
                                                   std::span<const double> weights,
                                                   double tie_epsilon = 1e-4);

}  // namespace spsel
