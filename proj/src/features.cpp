#include "spsel/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include <omp.h>

#include "spsel/error.hpp"

namespace spsel {
namespace {

constexpr std::array<std::string_view, kNumFeatures> kNames = {
    "numRow", "numCol",  "NNZ",    "N_diags",    "aver_RD",    "max_RD",  "min_RD",
    "dev_RD", "aver_CD", "max_CD", "min_CD",     "dev_CD",     "ER_DIA",  "ER_CD",
    "row_bounce", "col_bounce", "density", "cv", "max_mu"};

struct Histograms {
  std::vector<Index> rd;
  std::vector<Index> cd;
  std::vector<unsigned char> diag;  // indexed by col - row + rows - 1
  bool filled = false;
};

// Raw views into one histogram set. Whole rows and columns are counted in
// bulk so consecutive entries of a row do not serialize on the same counter.
struct Sink {
  Index* rd;
  Index* cd;
  unsigned char* diag;
  Index shift;  // rows - 1

  void entry(Index r, Index c) const {
    ++rd[r];
    ++cd[c];
    diag[c - r + shift] = 1;
  }
  void rowRun(Index i, const Index* cols, Index n) const {
    rd[i] += n;
    unsigned char* d = diag + shift - i;
    for (Index k = 0; k < n; ++k) {
      const Index j = cols[k];
      ++cd[j];
      d[j] = 1;
    }
  }
  void colRun(Index j, const Index* rows, Index n) const {
    cd[j] += n;
    unsigned char* d = diag + shift + j;
    for (Index k = 0; k < n; ++k) {
      const Index i = rows[k];
      ++rd[i];
      *(d - i) = 1;
    }
  }
};

// Counts the entries belonging to partition `part` of `parts`.
void visitPartition(const SparseMatrix& m, int part, int parts, const Sink& sink) {
  m.visit([&](const auto& s) {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, CooMatrix>) {
      // Rows are sorted: record where each row ends, then difference.
      const Index* r = s.rowIndices().data();
      const Index* c = s.colIndices().data();
      const Index lo = s.nnz() * part / parts;
      const Index hi = s.nnz() * (part + 1) / parts;
      std::vector<Index> end(static_cast<std::size_t>(s.rows()), 0);
      Index* ep = end.data();
      for (Index k = lo; k < hi; ++k) {
        const Index i = r[k];
        const Index j = c[k];
        ++sink.cd[j];
        sink.diag[j - i + sink.shift] = 1;
        ep[i] = k + 1;
      }
      Index prev = lo;
      for (Index i = 0; i < s.rows(); ++i)
        if (ep[i] > 0) {
          sink.rd[i] += ep[i] - prev;
          prev = ep[i];
        }
    } else if constexpr (std::is_same_v<T, CsrMatrix>) {
      const Index* ptr = s.rowPtr().data();
      const Index* c = s.colIndices().data();
      const Index lo = s.rows() * part / parts;
      const Index hi = s.rows() * (part + 1) / parts;
      for (Index i = lo; i < hi; ++i) sink.rowRun(i, c + ptr[i], ptr[i + 1] - ptr[i]);
    } else if constexpr (std::is_same_v<T, CscMatrix>) {
      const Index* ptr = s.colPtr().data();
      const Index* r = s.rowIndices().data();
      const Index lo = s.cols() * part / parts;
      const Index hi = s.cols() * (part + 1) / parts;
      for (Index j = lo; j < hi; ++j) sink.colRun(j, r + ptr[j], ptr[j + 1] - ptr[j]);
    } else if constexpr (std::is_same_v<T, LilMatrix>) {
      const Index lo = s.rows() * part / parts;
      const Index hi = s.rows() * (part + 1) / parts;
      for (Index i = lo; i < hi; ++i) {
        const auto& row = s.row(i);
        sink.rd[i] += static_cast<Index>(row.size());
        unsigned char* d = sink.diag + sink.shift - i;
        for (const auto& e : row) {
          ++sink.cd[e.col];
          d[e.col] = 1;
        }
      }
    } else if constexpr (std::is_same_v<T, BsrMatrix>) {
      const Index b = s.blockSize();
      const Index* ptr = s.blockRowPtr().data();
      const Index* bc = s.blockColIndices().data();
      const Index lo = s.blockRows() * part / parts;
      const Index hi = s.blockRows() * (part + 1) / parts;
      for (Index br = lo; br < hi; ++br) {
        const Index row_end = std::min(b, s.rows() - br * b);
        for (Index k = ptr[br]; k < ptr[br + 1]; ++k) {
          const double* blk = s.block(k).data();
          const Index col_base = bc[k] * b;
          const Index col_end = std::min(b, s.cols() - col_base);
          // Branch-free: most random blocks hold a single entry.
          for (Index rr = 0; rr < row_end; ++rr) {
            const Index r = br * b + rr;
            unsigned char* d = sink.diag + sink.shift - r + col_base;
            for (Index cc = 0; cc < col_end; ++cc) {
              const Index nz = blk[rr * b + cc] != 0.0;
              sink.rd[r] += nz;
              sink.cd[col_base + cc] += nz;
              d[cc] |= static_cast<unsigned char>(nz);
            }
          }
        }
      }
    } else if constexpr (std::is_same_v<T, DokMatrix>) {
      const auto& map = s.entries();
      if (parts == 1) {
        for (const auto& [key, v] : map) sink.entry(key.first, key.second);
        return;
      }
      const auto buckets = static_cast<Index>(map.bucket_count());
      const Index lo = buckets * part / parts;
      const Index hi = buckets * (part + 1) / parts;
      for (Index bkt = lo; bkt < hi; ++bkt)
        for (auto it = map.begin(static_cast<std::size_t>(bkt));
             it != map.end(static_cast<std::size_t>(bkt)); ++it)
          sink.entry(it->first.first, it->first.second);
    } else {
      if (part == 0) forEachEntry(m, [&](Index r, Index c, double) { sink.entry(r, c); });
    }
  });
}

Histograms gatherHistograms(const SparseMatrix& m) {
  const Index rows = m.rows();
  const Index cols = m.cols();
  const auto diag_slots = static_cast<std::size_t>(std::max<Index>(rows + cols - 1, 0));
  Histograms h{std::vector<Index>(static_cast<std::size_t>(rows), 0),
               std::vector<Index>(static_cast<std::size_t>(cols), 0),
               std::vector<unsigned char>(diag_slots, 0)};

  const int threads = m.nnz() < 100000 ? 1 : omp_get_max_threads();
  if (threads == 1) {
    visitPartition(m, 0, 1, Sink{h.rd.data(), h.cd.data(), h.diag.data(), rows - 1});
    return h;
  }

  std::vector<Histograms> local(static_cast<std::size_t>(threads));
#pragma omp parallel num_threads(threads)
  {
    const int tid = omp_get_thread_num();
    const int team = omp_get_num_threads();
    auto& mine = local[static_cast<std::size_t>(tid)];
    mine.rd.assign(static_cast<std::size_t>(rows), 0);
    mine.cd.assign(static_cast<std::size_t>(cols), 0);
    mine.diag.assign(diag_slots, 0);
    mine.filled = true;
    visitPartition(m, tid, team,
                   Sink{mine.rd.data(), mine.cd.data(), mine.diag.data(), rows - 1});
  }
  for (const auto& part : local) {
    if (!part.filled) continue;
    for (std::size_t i = 0; i < h.rd.size(); ++i) h.rd[i] += part.rd[i];
    for (std::size_t j = 0; j < h.cd.size(); ++j) h.cd[j] += part.cd[j];
    for (std::size_t s = 0; s < diag_slots; ++s) h.diag[s] |= part.diag[s];
  }
  return h;
}

struct Summary {
  double mean = 0.0;
  double max = 0.0;
  double min = 0.0;
  double dev = 0.0;
  double bounce = 0.0;
};

Summary summarize(const std::vector<Index>& counts, Index total) {
  Summary s;
  if (counts.empty()) return s;
  const auto n = static_cast<double>(counts.size());
  s.mean = static_cast<double>(total) / n;
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  s.min = static_cast<double>(*lo);
  s.max = static_cast<double>(*hi);
  double sq = 0.0;
  for (Index c : counts) {
    const double d = static_cast<double>(c) - s.mean;
    sq += d * d;
  }
  s.dev = std::sqrt(sq / n);
  if (counts.size() > 1) {
    Index jumps = 0;
    for (std::size_t i = 0; i + 1 < counts.size(); ++i) jumps += std::llabs(counts[i + 1] - counts[i]);
    s.bounce = static_cast<double>(jumps) / static_cast<double>(counts.size() - 1);
  }
  return s;
}

}  // namespace

std::string_view featureName(int index) { return kNames.at(static_cast<std::size_t>(index)); }

FeatureVector extractFeatures(const SparseMatrix& m) {
  const auto h = gatherHistograms(m);
  const Index nnz = m.nnz();
  const Index n_diags = std::count(h.diag.begin(), h.diag.end(), 1);
  const auto rd = summarize(h.rd, nnz);
  const auto cd = summarize(h.cd, nnz);
  const auto rows = static_cast<double>(m.rows());
  const auto cols = static_cast<double>(m.cols());
  const auto dnnz = static_cast<double>(nnz);

  FeatureVector f;
  f[Feature::kNumRow] = rows;
  f[Feature::kNumCol] = cols;
  f[Feature::kNnz] = dnnz;
  f[Feature::kNumDiags] = static_cast<double>(n_diags);
  f[Feature::kAverRd] = rd.mean;
  f[Feature::kMaxRd] = rd.max;
  f[Feature::kMinRd] = rd.min;
  f[Feature::kDevRd] = rd.dev;
  f[Feature::kAverCd] = cd.mean;
  f[Feature::kMaxCd] = cd.max;
  f[Feature::kMinCd] = cd.min;
  f[Feature::kDevCd] = cd.dev;
  f[Feature::kErDia] = n_diags > 0 ? dnnz / (static_cast<double>(n_diags) * cols) : 0.0;
  f[Feature::kErCd] = rd.max > 0 ? dnnz / (rd.max * rows) : 0.0;
  f[Feature::kRowBounce] = rd.bounce;
  f[Feature::kColBounce] = cd.bounce;
  f[Feature::kDensity] = matrixDensity(m.rows(), m.cols(), nnz);
  f[Feature::kCv] = rd.mean > 0 ? rd.dev / rd.mean : 0.0;
  f[Feature::kMaxMu] = rd.max - rd.mean;
  return f;
}

FeatureScaler::FeatureScaler(std::array<double, kNumFeatures> mins,
                             std::array<double, kNumFeatures> maxs)
    : mins_(mins), maxs_(maxs) {
  for (int i = 0; i < kNumFeatures; ++i)
    if (!(mins_[static_cast<std::size_t>(i)] <= maxs_[static_cast<std::size_t>(i)]))
      throw ValidationError("feature scaler: min > max for " + std::string(featureName(i)));
}

FeatureVector FeatureScaler::apply(const FeatureVector& v) const {
  FeatureVector out;
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    const double span = maxs_[i] - mins_[i];
    out.values[i] = span > 0.0 ? std::clamp((v.values[i] - mins_[i]) / span, 0.0, 1.0) : 0.0;
  }
  return out;
}

FeatureScaler fitScaler(std::span<const FeatureVector> samples) {
  if (samples.empty()) throw DataError("cannot fit a feature scaler on an empty sample set");
  auto mins = samples.front().values;
  auto maxs = samples.front().values;
  for (const auto& s : samples)
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      mins[i] = std::min(mins[i], s.values[i]);
      maxs[i] = std::max(maxs[i], s.values[i]);
    }
  return {mins, maxs};
}

}  // namespace spsel
