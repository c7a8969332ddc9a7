#include "spsel/dense.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spsel/error.hpp"

namespace spsel {

DenseMatrix::DenseMatrix(Index rows, Index cols, double fill)
    : rows_(rows), cols_(cols), values_(static_cast<std::size_t>(rows * cols), fill) {
  if (rows < 0 || cols < 0) throw ValidationError("dense matrix: negative dimensions");
}

DenseMatrix::DenseMatrix(Index rows, Index cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows < 0 || cols < 0) throw ValidationError("dense matrix: negative dimensions");
  if (values_.size() != static_cast<std::size_t>(rows * cols))
    throw ValidationError("dense matrix: value count does not match " + shapeString());
}

DenseMatrix DenseMatrix::identity(Index n) {
  DenseMatrix m(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::string DenseMatrix::shapeString() const {
  std::ostringstream os;
  os << rows_ << "x" << cols_;
  return os.str();
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("dense multiply: " + a.shapeString() + " times " + b.shapeString());
  DenseMatrix out(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (Index k = 0; k < a.cols(); ++k) {
      const double s = a(i, k);
      const auto src = b.row(k);
      for (Index j = 0; j < b.cols(); ++j) dst[j] += s * src[j];
    }
  }
  return out;
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("dense add: " + a.shapeString() + " plus " + b.shapeString());
  DenseMatrix out = a;
  auto dst = out.data();
  const auto src = b.data();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
  return out;
}

DenseMatrix relu(DenseMatrix m) {
  for (auto& v : m.data()) v = std::max(v, 0.0);
  return m;
}

double maxAbsDiff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("compare: " + a.shapeString() + " vs " + b.shapeString());
  double worst = 0.0;
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t k = 0; k < x.size(); ++k) worst = std::max(worst, std::abs(x[k] - y[k]));
  return worst;
}

}  // namespace spsel
