#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spsel/labeling.hpp"
#include "spsel/model.hpp"

namespace spsel {

struct TrainTestSplit {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Seeded shuffle; the first round(fraction * n) shuffled indices are held out.
TrainTestSplit splitTrainTest(std::size_t n, double test_fraction, std::uint64_t seed);

template <typename T>
std::vector<T> pick(std::span<const T> items, std::span<const std::size_t> indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(items[i]);
  return out;
}

struct EvaluationRow {
  std::string sample_id;
  std::vector<StorageFormat> true_best;
  StorageFormat canonical;
  StorageFormat predicted;
  bool correct_tie_aware = false;
};

struct EvaluationReport {
  std::vector<EvaluationRow> rows;
  double tie_aware_accuracy = 0.0;
  double canonical_accuracy = 0.0;
};

EvaluationReport evaluateModel(const FormatModel& model, std::span<const LabeledSample> samples);

/// sampleId,trueBestLabels,predicted,correctTieAware
void writeEvaluationCsv(std::ostream& out, const EvaluationReport& report);

/// Runtime a choice costs on one matrix. A refused choice falls back to the
/// input format, COO.
double runtimeOfChoice(const FormatMeasurements& records, StorageFormat choice);

struct OracleComparison {
  double achieved_geomean = 0.0;  // seconds, the predicted formats
  double oracle_geomean = 0.0;    // seconds, the fastest format per matrix
  double coo_geomean = 0.0;       // seconds, always COO
  /// oracle / achieved, in (0, 1].
  double ratio() const { return oracle_geomean / achieved_geomean; }
};

/// `choices` is parallel to `records`.
OracleComparison compareAgainstOracle(std::span<const FormatMeasurements> records,
                                      std::span<const StorageFormat> choices);

/// Fastest non-refused format; ties to the lowest code.
StorageFormat fastestFormat(const FormatMeasurements& records);

struct ImportanceRow {
  int feature = 0;
  double accuracy_without = 0.0;
  double drop = 0.0;     // floored at 0
  double percent = 0.0;  // share of the summed drops
};

struct ImportanceReport {
  double baseline_accuracy = 0.0;
  std::vector<ImportanceRow> rows;  // one per feature, feature order
};

/// Retrains without each feature in turn and measures the tie-aware accuracy
/// drop on `validation`. When no removal lowers accuracy every percentage is 0.
ImportanceReport leaveOneOutImportance(std::span<const LabeledSample> train,
                                       std::span<const LabeledSample> validation,
                                       const GbtHyperParams& hp);

void writeImportanceCsv(std::ostream& out, const ImportanceReport& report);

}  // namespace spsel
