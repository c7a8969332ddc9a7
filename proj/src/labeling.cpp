#include "spsel/labeling.hpp"

#include <algorithm>
#include <cmath>

#include "spsel/error.hpp"

namespace spsel {

void ObjectivePolicy::validate() const {
  if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("objective weight w must lie in [0, 1]");
  if (!(tie_epsilon > 0.0)) throw ValidationError("tie epsilon must be positive");
}

bool FormatLabel::isBest(StorageFormat f) const {
  return std::find(best.begin(), best.end(), f) != best.end();
}

GlobalRanges computeGlobalRanges(std::span<const MatrixMeasurements> corpus) {
  GlobalRanges r;
  bool any = false;
  for (const auto& m : corpus)
    for (const auto& rec : m.records) {
      if (rec.refused) continue;
      const auto mem = static_cast<double>(rec.memory);
      if (!any) {
        r = {rec.runtime, rec.runtime, mem, mem};
        any = true;
        continue;
      }
      r.runtime_min = std::min(r.runtime_min, rec.runtime);
      r.runtime_max = std::max(r.runtime_max, rec.runtime);
      r.memory_min = std::min(r.memory_min, mem);
      r.memory_max = std::max(r.memory_max, mem);
    }
  if (!any) throw DataError("no usable measurements: every format was refused");
  return r;
}

double minMaxNormalize(double v, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  return (v - lo) / (hi - lo);
}

FormatLabel labelMatrix(const FormatMeasurements& records, const GlobalRanges& ranges,
                        const ObjectivePolicy& policy) {
  FormatLabel label;
  double lowest = kRefusedObjective;
  for (const auto& rec : records) {
    auto& o = label.objective[static_cast<std::size_t>(formatCode(rec.format))];
    if (rec.refused) {
      o = kRefusedObjective;
      continue;
    }
    const double r = minMaxNormalize(rec.runtime, ranges.runtime_min, ranges.runtime_max);
    const double m =
        minMaxNormalize(static_cast<double>(rec.memory), ranges.memory_min, ranges.memory_max);
    o = policy.w * r + (1.0 - policy.w) * m;
    lowest = std::min(lowest, o);
  }
  if (std::isinf(lowest)) throw DataError("every format was refused for this matrix");
  for (auto f : kAllFormats) {
    const double o = label.objective[static_cast<std::size_t>(formatCode(f))];
    if (!std::isinf(o) && o - lowest <= policy.tie_epsilon) label.best.push_back(f);
  }
  label.canonical = label.best.front();
  return label;
}

std::vector<LabeledSample> labelSamples(std::span<const MatrixMeasurements> corpus,
                                        std::span<const FeatureVector> features,
                                        const ObjectivePolicy& policy) {
  policy.validate();
  if (corpus.size() < 2) throw DataError("labeling needs at least two matrices");
  if (features.size() != corpus.size())
    throw DataError("feature rows and measurement groups differ in count");
  const auto ranges = computeGlobalRanges(corpus);
  std::vector<LabeledSample> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    try {
      out.push_back({corpus[i].matrix_id, features[i], labelMatrix(corpus[i].records, ranges, policy)});
    } catch (const DataError& e) {
      throw DataError(corpus[i].matrix_id + ": " + e.what());
    }
  }
  return out;
}

std::vector<FrequencyRow> formatFrequencyHistogram(std::span<const MatrixMeasurements> corpus,
                                                   std::span<const double> weights,
                                                   double tie_epsilon) {
  const auto ranges = computeGlobalRanges(corpus);
  std::vector<FrequencyRow> rows;
  for (double w : weights) {
    const ObjectivePolicy policy{w, tie_epsilon};
    policy.validate();
    FrequencyRow row{w, {}};
    for (const auto& m : corpus)
      for (auto f : labelMatrix(m.records, ranges, policy).best)
        ++row.counts[static_cast<std::size_t>(formatCode(f))];
    rows.push_back(row);
  }
  return rows;
}

}  // namespace spsel
