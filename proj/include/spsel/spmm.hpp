#pragma once

// Sparse x dense products, one kernel per storage format.
//
// `spmm` dispatches on the format tag to the OpenMP kernels in
// spsel::kernels::omp. The serial kernels in spsel::kernels::serial run the
// same per-format algorithms single-threaded and are the reference the
// parallel versions are tested and benchmarked against. `denseOracle`
// densifies and runs a triple loop; it shares no code with either kernel set.
//
// Summation order per output element:
//   CSR, LIL, COO, BSR: ascending column within a row.
//   DIA: ascending diagonal offset.
//   CSC: ascending column (scatter by column).
//   DOK: hash-map iteration order.
// Parallel scatter kernels (CSC, DOK) with more than one thread sum
// per-thread partial products in thread order.

#include "spsel/dense.hpp"
#include "spsel/sparse.hpp"

namespace spsel {

struct SpmmResult {
  DenseMatrix product;
  StorageFormat kernelFormat;
  double elapsed = 0.0;  // seconds, kernel only
};

SpmmResult spmm(const SparseMatrix& a, const DenseMatrix& x);

/// Single-threaded reference kernels; same dispatch, no timing.
DenseMatrix spmmSerial(const SparseMatrix& a, const DenseMatrix& x);

/// Densify `a` and multiply with a row-major, ascending-k triple loop.
DenseMatrix denseOracle(const SparseMatrix& a, const DenseMatrix& x);

/// Throws ShapeError unless a.cols() == x.rows().
void checkSpmmShapes(const SparseMatrix& a, const DenseMatrix& x);

namespace kernels {

// Each kernel accumulates A*X into y, which must be zero-filled and shaped
// (A.rows x X.cols).
namespace omp {
void spmm(const CooMatrix& a, const DenseMatrix& x, DenseMatrix& y);
void spmm(const CsrMatrix& a, const DenseMatrix& x, DenseMatrix& y);
void spmm(const CscMatrix& a, const DenseMatrix& x, DenseMatrix& y);
void spmm(const DiaMatrix& a, const DenseMatrix& x, DenseMatrix& y);
void spmm(const BsrMatrix& a, const DenseMatrix& x, DenseMatrix& y);
void spmm(const DokMatrix& a, const DenseMatrix& x, DenseMatrix& y);
void spmm(const LilMatrix& a, const DenseMatrix& x, DenseMatrix& y);
int maxThreads();
}  // namespace omp

namespace serial {
void spmm(const CooMatrix& a, const DenseMatrix& x, DenseMatrix& y);
void spmm(const CsrMatrix& a, const DenseMatrix& x, DenseMatrix& y);
void spmm(const CscMatrix& a, const DenseMatrix& x, DenseMatrix& y);
void spmm(const DiaMatrix& a, const DenseMatrix& x, DenseMatrix& y);
void spmm(const BsrMatrix& a, const DenseMatrix& x, DenseMatrix& y);
void spmm(const DokMatrix& a, const DenseMatrix& x, DenseMatrix& y);
void spmm(const LilMatrix& a, const DenseMatrix& x, DenseMatrix& y);
}  // namespace serial

/// y_row += v * x_row over `width` elements.
inline void axpyRow(double* __restrict y_row, const double* __restrict x_row, double v,
                    Index width) {
  for (Index j = 0; j < width; ++j) y_row[j] += v * x_row[j];
}

}  // namespace kernels
}  // namespace spsel
