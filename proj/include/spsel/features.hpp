#pragma once

#include <array>
#include <span>
#include <string_view>

#include "spsel/sparse.hpp"

namespace spsel {

/// The 19 structural features describing one matrix, in CSV column order.
enum class Feature : int {
  kNumRow = 0,
  kNumCol,
  kNnz,
  kNumDiags,
  kAverRd,
  kMaxRd,
  kMinRd,
  kDevRd,
  kAverCd,
  kMaxCd,
  kMinCd,
  kDevCd,
  kErDia,
  kErCd,
  kRowBounce,
  kColBounce,
  kDensity,
  kCv,
  kMaxMu,
};

inline constexpr int kNumFeatures = 19;

/// Short names used as CSV headers ("numRow", "NNZ", ...).
std::string_view featureName(int index);
inline std::string_view featureName(Feature f) { return featureName(static_cast<int>(f)); }

struct FeatureVector {
  std::array<double, kNumFeatures> values{};

  double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
  double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Pure function of the logical entry set. Row/column/diagonal histograms
/// are gathered in one pass over the entries, split across OpenMP threads
/// with integer merges, so the result does not depend on the thread count.
FeatureVector extractFeatures(const SparseMatrix& m);

/// nnz / (rows * cols), 0 for an empty shape. Same value as the density feature.
inline double matrixDensity(Index rows, Index cols, Index nnz) {
  const auto r = static_cast<double>(rows);
  const auto c = static_cast<double>(cols);
  return r * c > 0 ? static_cast<double>(nnz) / (r * c) : 0.0;
}
inline double matrixDensity(const SparseMatrix& m) { return matrixDensity(m.rows(), m.cols(), m.nnz()); }

/// Per-feature min/max learned from training vectors.
class FeatureScaler {
 public:
  FeatureScaler() = default;
  FeatureScaler(std::array<double, kNumFeatures> mins, std::array<double, kNumFeatures> maxs);

  const std::array<double, kNumFeatures>& mins() const { return mins_; }
  const std::array<double, kNumFeatures>& maxs() const { return maxs_; }

  /// (x - min) / (max - min) clipped to [0, 1]; constant features map to 0.
  FeatureVector apply(const FeatureVector& v) const;

  friend bool operator==(const FeatureScaler&, const FeatureScaler&) = default;

 private:
  std::array<double, kNumFeatures> mins_{};
  std::array<double, kNumFeatures> maxs_{};
};

/// Throws DataError on an empty sample set.
FeatureScaler fitScaler(std::span<const FeatureVector> samples);

inline FeatureVector applyScaler(const FeatureScaler& s, const FeatureVector& v) {
  return s.apply(v);
}

}  // namespace spsel
