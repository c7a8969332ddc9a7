#include "spsel/spmm.hpp"

namespace spsel::kernels::serial {

void spmm(const CooMatrix& a, const DenseMatrix& x, DenseMatrix& y) {
  const auto r = a.rowIndices();
  const auto c = a.colIndices();
  const auto v = a.values();
  const Index d = x.cols();
  for (std::size_t k = 0; k < v.size(); ++k)
    axpyRow(y.row(r[k]).data(), x.row(c[k]).data(), v[k], d);
}

void spmm(const CsrMatrix& a, const DenseMatrix& x, DenseMatrix& y) {
  const auto ptr = a.rowPtr();
  const auto c = a.colIndices();
  const auto v = a.values();
  const Index d = x.cols();
  for (Index i = 0; i < a.rows(); ++i) {
    double* yi = y.row(i).data();
    for (Index k = ptr[i]; k < ptr[i + 1]; ++k) axpyRow(yi, x.row(c[k]).data(), v[k], d);
  }
}

void spmm(const CscMatrix& a, const DenseMatrix& x, DenseMatrix& y) {
  const auto ptr = a.colPtr();
  const auto r = a.rowIndices();
  const auto v = a.values();
  const Index d = x.cols();
  for (Index j = 0; j < a.cols(); ++j) {
    const double* xj = x.row(j).data();
    for (Index k = ptr[j]; k < ptr[j + 1]; ++k) axpyRow(y.row(r[k]).data(), xj, v[k], d);
  }
}

void spmm(const DiaMatrix& a, const DenseMatrix& x, DenseMatrix& y) {
  const auto offsets = a.offsets();
  const Index d = x.cols();
  for (Index k = 0; k < a.numDiagonals(); ++k) {
    const Index off = offsets[k];
    const auto band = a.band(k);
    const Index lo = std::max<Index>(0, -off);
    const Index hi = std::min(a.rows(), a.cols() - off);
    for (Index i = lo; i < hi; ++i) axpyRow(y.row(i).data(), x.row(i + off).data(), band[i + off], d);
  }
}

void spmm(const BsrMatrix& a, const DenseMatrix& x, DenseMatrix& y) {
  const Index b = a.blockSize();
  const auto ptr = a.blockRowPtr();
  const auto bc = a.blockColIndices();
  const Index d = x.cols();
  for (Index br = 0; br < a.blockRows(); ++br) {
    const Index row_end = std::min(b, a.rows() - br * b);
    for (Index k = ptr[br]; k < ptr[br + 1]; ++k) {
      const auto blk = a.block(k);
      const Index col_end = std::min(b, a.cols() - bc[k] * b);
      for (Index r = 0; r < row_end; ++r) {
        double* yi = y.row(br * b + r).data();
        for (Index c = 0; c < col_end; ++c) axpyRow(yi, x.row(bc[k] * b + c).data(), blk[r * b + c], d);
      }
    }
  }
}

void spmm(const DokMatrix& a, const DenseMatrix& x, DenseMatrix& y) {
  const Index d = x.cols();
  for (const auto& [key, v] : a.entries())
    axpyRow(y.row(key.first).data(), x.row(key.second).data(), v, d);
}

void spmm(const LilMatrix& a, const DenseMatrix& x, DenseMatrix& y) {
  const Index d = x.cols();
  for (Index i = 0; i < a.rows(); ++i) {
    double* yi = y.row(i).data();
    for (const auto& e : a.row(i)) axpyRow(yi, x.row(e.col).data(), e.value, d);
  }
}

}  // namespace spsel::kernels::serial
