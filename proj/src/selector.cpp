#include "spsel/selector.hpp"

#include "spsel/error.hpp"
#include "spsel/spmm.hpp"
#include "spsel/timing.hpp"

namespace spsel {

std::optional<LayerFormatCache::Entry> LayerFormatCache::lookup(int layer) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(layer);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void LayerFormatCache::store(int layer, const Entry& entry) {
  std::lock_guard lock(mutex_);
  entries_.insert_or_assign(layer, entry);
}

void LayerFormatCache::invalidate(int layer) {
  std::lock_guard lock(mutex_);
  entries_.erase(layer);
}

void LayerFormatCache::clear() {
  std::lock_guard lock(mutex_);
  entries_.clear();
}

std::size_t LayerFormatCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

SelectionOutcome spmmPredict(const FormatModel& model, const SparseMatrix& m,
                             std::optional<int> layer, LayerFormatCache* cache,
                             const ConversionOptions& options) {
  SelectionOutcome out{StorageFormat::kCoo, m.format(), false, false, false, 0.0, 0.0, 0.0, m};

  std::optional<LayerFormatCache::Entry> cached;
  if (cache && layer) cached = cache->lookup(*layer);
  if (cached) {
    out.predicted = cached->format;
    out.cache_hit = true;
  } else {
    auto t0 = Clock::now();
    const auto features = extractFeatures(m);
    auto t1 = Clock::now();
    out.predicted = predictFormat(model, features);
    auto t2 = Clock::now();
    out.feature_time = secondsBetween(t0, t1);
    out.predict_time = secondsBetween(t1, t2);
    if (cache && layer) cache->store(*layer, {out.predicted, features});
  }

  if (out.predicted == m.format()) {
    out.chosen = out.predicted;
    return out;
  }
  const auto t0 = Clock::now();
  try {
    out.matrix = convert(m, out.predicted, options);
    out.chosen = out.predicted;
    out.converted = true;
  } catch (const DiaBlowupError&) {
    out.refused = true;
  }
  out.convert_time = secondsBetween(t0, Clock::now());
  return out;
}

AdaptiveResult adaptiveSpmm(const FormatModel& model, const SparseMatrix& a, const DenseMatrix& x,
                            std::optional<int> layer, LayerFormatCache* cache,
                            const ConversionOptions& options) {
  checkSpmmShapes(a, x);
  auto selection = spmmPredict(model, a, layer, cache, options);
  auto r = spmm(selection.matrix, x);
  OverheadBreakdown overhead{selection.feature_time, selection.predict_time,
                             selection.convert_time, r.elapsed};
  return {std::move(r.product), overhead, std::move(selection)};
}

}  // namespace spsel
