#include "spsel/spmm.hpp"

#include "spsel/error.hpp"
#include "spsel/timing.hpp"

namespace spsel {

void checkSpmmShapes(const SparseMatrix& a, const DenseMatrix& x) {
  if (a.cols() != x.rows())
    throw ShapeError("spmm shape mismatch: sparse " + a.shapeString() + " times dense " +
                     x.shapeString());
}

SpmmResult spmm(const SparseMatrix& a, const DenseMatrix& x) {
  checkSpmmShapes(a, x);
  SpmmResult result{DenseMatrix(a.rows(), x.cols()), a.format(), 0.0};
  const auto start = Clock::now();
  a.visit([&](const auto& s) { kernels::omp::spmm(s, x, result.product); });
  result.elapsed = secondsBetween(start, Clock::now());
  return result;
}

DenseMatrix spmmSerial(const SparseMatrix& a, const DenseMatrix& x) {
  checkSpmmShapes(a, x);
  DenseMatrix y(a.rows(), x.cols());
  a.visit([&](const auto& s) { kernels::serial::spmm(s, x, y); });
  return y;
}

DenseMatrix denseOracle(const SparseMatrix& a, const DenseMatrix& x) {
  checkSpmmShapes(a, x);
  const DenseMatrix dense = toDense(a);
  DenseMatrix y(a.rows(), x.cols());
  for (Index i = 0; i < dense.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) {
      double sum = 0.0;
      for (Index k = 0; k < dense.cols(); ++k) sum += dense(i, k) * x(k, j);
      y(i, j) = sum;
    }
  return y;
}

}  // namespace spsel
