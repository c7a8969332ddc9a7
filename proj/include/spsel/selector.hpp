#pragma once

// Deployment path: extract features, predict a format, convert, multiply,
// and account for each step's cost separately.

#include <map>
#include <mutex>
#include <optional>

#include "spsel/dense.hpp"
#include "spsel/features.hpp"
#include "spsel/model.hpp"
#include "spsel/sparse.hpp"

namespace spsel {

struct SelectionOutcome {
  StorageFormat predicted = StorageFormat::kCoo;
  /// Format of `matrix`. Equals `predicted` unless the conversion was
  /// refused, in which case the input format is kept.
  StorageFormat chosen = StorageFormat::kCoo;
  bool converted = false;
  bool refused = false;
  bool cache_hit = false;
  double feature_time = 0.0;
  double predict_time = 0.0;
  double convert_time = 0.0;
  SparseMatrix matrix;
};

/// Remembers one decision per layer id. Thread-safe.
class LayerFormatCache {
 public:
  struct Entry {
    StorageFormat format;
    FeatureVector signature;  // features the decision was made on
  };

  std::optional<Entry> lookup(int layer) const;
  void store(int layer, const Entry& entry);
  void invalidate(int layer);
  void clear();
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<int, Entry> entries_;
};

/// With a cache and a layer id already in it, the cached format is reused
/// and no features are extracted.
SelectionOutcome spmmPredict(const FormatModel& model, const SparseMatrix& m,
                             std::optional<int> layer = std::nullopt,
                             LayerFormatCache* cache = nullptr,
                             const ConversionOptions& options = {});

struct OverheadBreakdown {
  double feature_time = 0.0;
  double predict_time = 0.0;
  double convert_time = 0.0;
  double kernel_time = 0.0;

  double total() const { return feature_time + predict_time + convert_time + kernel_time; }
  /// Feature extraction plus prediction as a share of the total.
  double selectionFraction() const {
    return total() > 0.0 ? (feature_time + predict_time) / total() : 0.0;
  }
};

struct AdaptiveResult {
  DenseMatrix product;
  OverheadBreakdown overhead;
  SelectionOutcome selection;
};

/// spmmPredict followed by the kernel of the chosen format.
AdaptiveResult adaptiveSpmm(const FormatModel& model, const SparseMatrix& a, const DenseMatrix& x,
                            std::optional<int> layer = std::nullopt,
                            LayerFormatCache* cache = nullptr,
                            const ConversionOptions& options = {});

}  // namespace spsel
