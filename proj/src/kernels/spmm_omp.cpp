#include <algorithm>
#include <vector>

#include <omp.h>

#include "spsel/spmm.hpp"

namespace spsel::kernels::omp {
namespace {

constexpr Index kRowChunk = 64;
constexpr Index kDiaRowBlock = 256;

// Scatter kernels: each thread accumulates into its own buffer, buffers are
// summed in thread order afterwards. Thread 0 writes straight into y.
template <typename Body>
void scatterWithPrivateBuffers(DenseMatrix& y, Body&& body) {
  const int threads = omp_get_max_threads();
  if (threads == 1) {
    body(y, 0, 1);
    return;
  }
  std::vector<DenseMatrix> partial(static_cast<std::size_t>(threads - 1));
#pragma omp parallel num_threads(threads)
  {
    const int tid = omp_get_thread_num();
    const int team = omp_get_num_threads();
    if (tid == 0) {
      body(y, 0, team);
    } else {
      auto& buf = partial[static_cast<std::size_t>(tid - 1)];
      buf = DenseMatrix(y.rows(), y.cols());
      body(buf, tid, team);
    }
  }
  const Index rows = y.rows();
  const Index d = y.cols();
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < rows; ++i) {
    double* yi = y.row(i).data();
    for (const auto& buf : partial) {
      if (buf.rows() == 0) continue;
      const double* bi = buf.row(i).data();
      for (Index j = 0; j < d; ++j) yi[j] += bi[j];
    }
  }
}

}  // namespace

int maxThreads() { return omp_get_max_threads(); }

void spmm(const CooMatrix& a, const DenseMatrix& x, DenseMatrix& y) {
  // Entries are row-sorted, so chunks cut at row boundaries never share an
  // output row and need no private buffers.
  const auto r = a.rowIndices();
  const auto c = a.colIndices();
  const auto v = a.values();
  const Index nnz = a.nnz();
  const Index d = x.cols();
#pragma omp parallel
  {
    const Index team = omp_get_num_threads();
    const Index tid = omp_get_thread_num();
    auto boundary = [&](Index t) {
      Index k = nnz * t / team;
      while (k > 0 && k < nnz && r[k] == r[k - 1]) ++k;
      return k;
    };
    const Index lo = boundary(tid);
    const Index hi = boundary(tid + 1);
    for (Index k = lo; k < hi; ++k) axpyRow(y.row(r[k]).data(), x.row(c[k]).data(), v[k], d);
  }
}

void spmm(const CsrMatrix& a, const DenseMatrix& x, DenseMatrix& y) {
  const auto ptr = a.rowPtr();
  const auto c = a.colIndices();
  const auto v = a.values();
  const Index rows = a.rows();
  const Index d = x.cols();
#pragma omp parallel for schedule(dynamic, kRowChunk)
  for (Index i = 0; i < rows; ++i) {
    double* yi = y.row(i).data();
    for (Index k = ptr[i]; k < ptr[i + 1]; ++k) axpyRow(yi, x.row(c[k]).data(), v[k], d);
  }
}

void spmm(const CscMatrix& a, const DenseMatrix& x, DenseMatrix& y) {
  const auto ptr = a.colPtr();
  const auto r = a.rowIndices();
  const auto v = a.values();
  const Index cols = a.cols();
  const Index d = x.cols();
  scatterWithPrivateBuffers(y, [&](DenseMatrix& out, int tid, int team) {
    const Index lo = cols * tid / team;
    const Index hi = cols * (tid + 1) / team;
    for (Index j = lo; j < hi; ++j) {
      const double* xj = x.row(j).data();
      for (Index k = ptr[j]; k < ptr[j + 1]; ++k) axpyRow(out.row(r[k]).data(), xj, v[k], d);
    }
  });
}

void spmm(const DiaMatrix& a, const DenseMatrix& x, DenseMatrix& y) {
  // Band sweep inside row blocks; per output row the offsets are still
  // visited in ascending order.
  const auto offsets = a.offsets();
  const Index rows = a.rows();
  const Index cols = a.cols();
  const Index diags = a.numDiagonals();
  const Index d = x.cols();
  const Index blocks = (rows + kDiaRowBlock - 1) / kDiaRowBlock;
#pragma omp parallel for schedule(dynamic, 1)
  for (Index blk = 0; blk < blocks; ++blk) {
    const Index row_lo = blk * kDiaRowBlock;
    const Index row_hi = std::min(rows, row_lo + kDiaRowBlock);
    for (Index k = 0; k < diags; ++k) {
      const Index off = offsets[k];
      const auto band = a.band(k);
      const Index lo = std::max(row_lo, -off);
      const Index hi = std::min(row_hi, cols - off);
      for (Index i = lo; i < hi; ++i)
        axpyRow(y.row(i).data(), x.row(i + off).data(), band[i + off], d);
    }
  }
}

void spmm(const BsrMatrix& a, const DenseMatrix& x, DenseMatrix& y) {
  const Index b = a.blockSize();
  const auto ptr = a.blockRowPtr();
  const auto bc = a.blockColIndices();
  const Index block_rows = a.blockRows();
  const Index rows = a.rows();
  const Index cols = a.cols();
  const Index d = x.cols();
#pragma omp parallel for schedule(dynamic, 16)
  for (Index br = 0; br < block_rows; ++br) {
    const Index row_end = std::min(b, rows - br * b);
    for (Index k = ptr[br]; k < ptr[br + 1]; ++k) {
      const auto blk = a.block(k);
      const Index col_base = bc[k] * b;
      const Index col_end = std::min(b, cols - col_base);
      for (Index r = 0; r < row_end; ++r) {
        double* yi = y.row(br * b + r).data();
        const double* brow = blk.data() + r * b;
        for (Index c = 0; c < col_end; ++c) axpyRow(yi, x.row(col_base + c).data(), brow[c], d);
      }
    }
  }
}

void spmm(const DokMatrix& a, const DenseMatrix& x, DenseMatrix& y) {
  const auto& map = a.entries();
  const auto buckets = static_cast<Index>(map.bucket_count());
  const Index d = x.cols();
  scatterWithPrivateBuffers(y, [&](DenseMatrix& out, int tid, int team) {
    if (team == 1) {
      // Node list order; walking buckets one by one is much slower.
      for (const auto& [key, v] : map) axpyRow(out.row(key.first).data(), x.row(key.second).data(), v, d);
      return;
    }
    const Index lo = buckets * tid / team;
    const Index hi = buckets * (tid + 1) / team;
    for (Index bkt = lo; bkt < hi; ++bkt)
      for (auto it = map.begin(static_cast<std::size_t>(bkt));
           it != map.end(static_cast<std::size_t>(bkt)); ++it)
        axpyRow(out.row(it->first.first).data(), x.row(it->first.second).data(), it->second, d);
  });
}

void spmm(const LilMatrix& a, const DenseMatrix& x, DenseMatrix& y) {
  const Index rows = a.rows();
  const Index d = x.cols();
#pragma omp parallel for schedule(dynamic, kRowChunk)
  for (Index i = 0; i < rows; ++i) {
    double* yi = y.row(i).data();
    for (const auto& e : a.row(i)) axpyRow(yi, x.row(e.col).data(), e.value, d);
  }
}

}  // namespace spsel::kernels::omp
