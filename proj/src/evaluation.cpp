#include "spsel/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "spsel/dataset.hpp"
#include "spsel/error.hpp"
#include "spsel/random.hpp"
#include "spsel/timing.hpp"

namespace spsel {

TrainTestSplit splitTrainTest(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0))
    throw ValidationError("test fraction must lie in [0, 1)");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
  const auto held = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  TrainTestSplit split;
  split.test.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(held));
  split.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(held), idx.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

EvaluationReport evaluateModel(const FormatModel& model, std::span<const LabeledSample> samples) {
  EvaluationReport report;
  int tie_aware = 0;
  int canonical = 0;
  for (const auto& s : samples) {
    EvaluationRow row{s.matrix_id, s.label.best, s.label.canonical,
                      predictFormat(model, s.features), false};
    row.correct_tie_aware = s.label.isBest(row.predicted);
    tie_aware += row.correct_tie_aware;
    canonical += row.predicted == s.label.canonical;
    report.rows.push_back(std::move(row));
  }
  if (!samples.empty()) {
    report.tie_aware_accuracy = static_cast<double>(tie_aware) / static_cast<double>(samples.size());
    report.canonical_accuracy = static_cast<double>(canonical) / static_cast<double>(samples.size());
  }
  return report;
}

void writeEvaluationCsv(std::ostream& out, const EvaluationReport& report) {
  out << "sampleId,trueBestLabels,predicted,correctTieAware\n";
  for (const auto& r : report.rows) {
    out << r.sample_id << ',';
    for (std::size_t k = 0; k < r.true_best.size(); ++k)
      out << (k ? ";" : "") << formatName(r.true_best[k]);
    out << ',' << formatName(r.predicted) << ',' << (r.correct_tie_aware ? 1 : 0) << '\n';
  }
}

double runtimeOfChoice(const FormatMeasurements& records, StorageFormat choice) {
  const auto& rec = records[static_cast<std::size_t>(formatCode(choice))];
  if (rec.refused) return records[static_cast<std::size_t>(formatCode(StorageFormat::kCoo))].runtime;
  return rec.runtime;
}

StorageFormat fastestFormat(const FormatMeasurements& records) {
  const MeasurementRecord* best = nullptr;
  for (const auto& r : records)
    if (!r.refused && (!best || r.runtime < best->runtime)) best = &r;
  if (!best) throw DataError("every format was refused");
  return best->format;
}

OracleComparison compareAgainstOracle(std::span<const FormatMeasurements> records,
                                      std::span<const StorageFormat> choices) {
  if (records.size() != choices.size() || records.empty())
    throw DataError("oracle comparison needs one choice per measured matrix");
  std::vector<double> achieved, oracle, coo;
  for (std::size_t i = 0; i < records.size(); ++i) {
    achieved.push_back(runtimeOfChoice(records[i], choices[i]));
    oracle.push_back(runtimeOfChoice(records[i], fastestFormat(records[i])));
    coo.push_back(runtimeOfChoice(records[i], StorageFormat::kCoo));
  }
  return {geometricMean(achieved), geometricMean(oracle), geometricMean(coo)};
}

ImportanceReport leaveOneOutImportance(std::span<const LabeledSample> train,
                                       std::span<const LabeledSample> validation,
                                       const GbtHyperParams& hp) {
  ImportanceReport report;
  report.baseline_accuracy = evaluateModel(trainGbt(train, hp), validation).tie_aware_accuracy;
  double total = 0.0;
  for (int f = 0; f < kNumFeatures; ++f) {
    auto allowed = allFeatures();
    allowed[static_cast<std::size_t>(f)] = false;
    const double acc = evaluateModel(trainGbt(train, hp, allowed), validation).tie_aware_accuracy;
    const double drop = std::max(0.0, report.baseline_accuracy - acc);
    total += drop;
    report.rows.push_back({f, acc, drop, 0.0});
  }
  if (total > 0.0)
    for (auto& row : report.rows) row.percent = 100.0 * row.drop / total;
  return report;
}

void writeImportanceCsv(std::ostream& out, const ImportanceReport& report) {
  out << "feature,accuracyWithout,drop,percent\n";
  for (const auto& r : report.rows)
    out << featureName(r.feature) << ',' << formatDouble(r.accuracy_without) << ','
        << formatDouble(r.drop) << ',' << formatDouble(r.percent) << '\n';
}

}  // namespace spsel
