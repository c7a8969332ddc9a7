#pragma once

// CSV files exchanged between the pipeline stages. Every file starts with a
// header row; doubles are written in shortest round-trip form so a file
// read back and written again is byte-identical.
//
//   measurements: matrixId,format,runtimeSeconds,memoryBytes,refused
//   features:     matrixId,<19 feature names>
//   labeled:      matrixId,<19 feature names>,canonicalLabel,bestLabels,O_COO..O_LIL
//
// bestLabels is a ';'-joined list of format names. Refused formats have an
// empty O column.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spsel/features.hpp"
#include "spsel/labeling.hpp"

namespace spsel {

struct FeatureRow {
  std::string matrix_id;
  FeatureVector features;
};

std::string formatDouble(double v);

/// Throws ParseError naming `what` when `text` is not a complete number.
double parseDouble(std::string_view text, std::string_view what);

std::vector<std::string_view> splitFields(std::string_view line, char sep = ',');

void writeMeasurementsCsv(std::ostream& out, std::span<const MatrixMeasurements> corpus);
/// Rows are grouped by matrixId in order of first appearance; every matrix
/// needs exactly one row per format.
std::vector<MatrixMeasurements> readMeasurementsCsv(std::istream& in);

void writeFeaturesCsv(std::ostream& out, std::span<const FeatureRow> rows);
std::vector<FeatureRow> readFeaturesCsv(std::istream& in);

void writeLabeledCsv(std::ostream& out, std::span<const LabeledSample> samples);
std::vector<LabeledSample> readLabeledCsv(std::istream& in);

void writeFrequencyCsv(std::ostream& out, std::span<const FrequencyRow> rows);

/// File wrappers: IoError when the file cannot be opened, ParseError
/// messages prefixed with the path.
std::vector<MatrixMeasurements> readMeasurementsCsv(const std::filesystem::path& path);
std::vector<FeatureRow> readFeaturesCsv(const std::filesystem::path& path);
std::vector<LabeledSample> readLabeledCsv(const std::filesystem::path& path);

/// Features ordered like `corpus`; DataError if one is missing.
std::vector<FeatureVector> alignFeatures(std::span<const MatrixMeasurements> corpus,
                                         std::span<const FeatureRow> rows);

}  // namespace spsel
