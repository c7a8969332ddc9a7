#pragma once

// Naive feature extractor for tests: densify, scan every cell, recompute each
// feature from its definition. Shares nothing with extractFeatures beyond
// the FeatureVector layout.

#include <cmath>
#include <set>
#include <vector>

#include "spsel/features.hpp"

namespace spsel::testing {

inline FeatureVector naiveFeatures(const SparseMatrix& m) {
  const DenseMatrix d = toDense(m);
  const Index rows = d.rows();
  const Index cols = d.cols();
  std::vector<double> rd(static_cast<std::size_t>(rows), 0.0);
  std::vector<double> cd(static_cast<std::size_t>(cols), 0.0);
  std::set<Index> diagonals;
  double nnz = 0.0;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (d(i, j) != 0.0) {
        rd[static_cast<std::size_t>(i)] += 1.0;
        cd[static_cast<std::size_t>(j)] += 1.0;
        diagonals.insert(j - i);
        nnz += 1.0;
      }

  struct Stats {
    double mean = 0, max = 0, min = 0, dev = 0, bounce = 0;
  };
  auto stats = [](const std::vector<double>& v) {
    Stats s;
    if (v.empty()) return s;
    s.min = v[0];
    s.max = v[0];
    double sum = 0;
    for (double x : v) {
      sum += x;
      if (x < s.min) s.min = x;
      if (x > s.max) s.max = x;
    }
    s.mean = sum / static_cast<double>(v.size());
    double var = 0;
    for (double x : v) var += (x - s.mean) * (x - s.mean);
    s.dev = std::sqrt(var / static_cast<double>(v.size()));
    if (v.size() > 1) {
      double b = 0;
      for (std::size_t i = 1; i < v.size(); ++i) b += std::fabs(v[i] - v[i - 1]);
      s.bounce = b / static_cast<double>(v.size() - 1);
    }
    return s;
  };
  const Stats r = stats(rd);
  const Stats c = stats(cd);
  const double n_diags = static_cast<double>(diagonals.size());

  FeatureVector f;
  f[Feature::kNumRow] = static_cast<double>(rows);
  f[Feature::kNumCol] = static_cast<double>(cols);
  f[Feature::kNnz] = nnz;
  f[Feature::kNumDiags] = n_diags;
  f[Feature::kAverRd] = r.mean;
  f[Feature::kMaxRd] = r.max;
  f[Feature::kMinRd] = r.min;
  f[Feature::kDevRd] = r.dev;
  f[Feature::kAverCd] = c.mean;
  f[Feature::kMaxCd] = c.max;
  f[Feature::kMinCd] = c.min;
  f[Feature::kDevCd] = c.dev;
  f[Feature::kErDia] = n_diags == 0 ? 0.0 : nnz / (n_diags * static_cast<double>(cols));
  f[Feature::kErCd] = r.max == 0 ? 0.0 : nnz / (r.max * static_cast<double>(rows));
  f[Feature::kRowBounce] = r.bounce;
  f[Feature::kColBounce] = c.bounce;
  f[Feature::kDensity] =
      rows * cols == 0 ? 0.0 : nnz / (static_cast<double>(rows) * static_cast<double>(cols));
  f[Feature::kCv] = r.mean == 0 ? 0.0 : r.dev / r.mean;
  f[Feature::kMaxMu] = r.max - r.mean;
  return f;
}

/// Features F1-F4, max/min counts are integer-derived and must match exactly.
inline bool isIntegerFeature(int i) {
  switch (static_cast<Feature>(i)) {
    case Feature::kNumRow:
    case Feature::kNumCol:
    case Feature::kNnz:
    case Feature::kNumDiags:
    case Feature::kMaxRd:
    case Feature::kMinRd:
    case Feature::kMaxCd:
    case Feature::kMinCd:
      return true;
    default:
      return false;
  }
}

/// Exact for integer features, 1e-12 relative otherwise.
inline bool featuresAgree(const FeatureVector& a, const FeatureVector& b) {
  for (int i = 0; i < kNumFeatures; ++i) {
    if (isIntegerFeature(i)) {
      if (a[i] != b[i]) return false;
    } else {
      const double scale = std::max(std::fabs(a[i]), std::fabs(b[i]));
      if (std::fabs(a[i] - b[i]) > 1e-12 * std::max(scale, 1e-300) && a[i] != b[i]) return false;
    }
  }
  return true;
}

}  // namespace spsel::testing
