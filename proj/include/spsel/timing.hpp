#pragma once

// Monotonic timing helpers shared by the profiler, the selector and the
// benchmarks: one warm-up call, then `reps` timed calls, median reported.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <span>
#include <vector>

namespace spsel {

using Clock = std::chrono::steady_clock;

inline double secondsBetween(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

template <typename T>
inline void doNotOptimize(const T& value) {
#if defined(__GNUC__) || defined(__clang__)
  asm volatile("" : : "r,m"(value) : "memory");
#else
  (void)value;
#endif
}

inline double median(std::vector<double> samples) {
  if (samples.empty()) return 0.0;
  const auto mid = samples.size() / 2;
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(mid),
                   samples.end());
  const double upper = samples[mid];
  if (samples.size() % 2 == 1) return upper;
  const double lower = *std::max_element(samples.begin(),
                                         samples.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

/// Geometric mean of strictly positive values; 0 for an empty range.
inline double geometricMean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double log_sum = 0.0;
  for (double v : values) log_sum += std::log(v);
  return std::exp(log_sum / static_cast<double>(values.size()));
}

struct TimingStats {
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> samples;
};

/// `fn` returns the seconds it wants attributed to one run (so callers can
/// exclude setup from the measurement).
template <typename Fn>
TimingStats measureMedian(Fn&& fn, int warmup, int reps) {
  for (int i = 0; i < warmup; ++i) doNotOptimize(fn());
  TimingStats stats;
  stats.samples.reserve(static_cast<std::size_t>(reps));
  for (int i = 0; i < reps; ++i) stats.samples.push_back(fn());
  if (!stats.samples.empty()) {
    stats.median = median(stats.samples);
    stats.min = *std::min_element(stats.samples.begin(), stats.samples.end());
    stats.max = *std::max_element(stats.samples.begin(), stats.samples.end());
  }
  return stats;
}

}  // namespace spsel
