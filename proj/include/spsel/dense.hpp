#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spsel {

using Index = std::int64_t;

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(Index rows, Index cols, double fill = 0.0);
  DenseMatrix(Index rows, Index cols, std::vector<double> values);

  static DenseMatrix identity(Index n);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

  double& operator()(Index r, Index c) { return values_[static_cast<std::size_t>(r * cols_ + c)]; }
  double operator()(Index r, Index c) const {
    return values_[static_cast<std::size_t>(r * cols_ + c)];
  }

  std::span<double> row(Index r) {
    return {values_.data() + r * cols_, static_cast<std::size_t>(cols_)};
  }
  std::span<const double> row(Index r) const {
    return {values_.data() + r * cols_, static_cast<std::size_t>(cols_)};
  }

  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }

  std::string shapeString() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<double> values_;
};

/// Plain triple-loop product, ascending k.
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix relu(DenseMatrix m);

/// Largest element-wise absolute difference; shapes must agree.
double maxAbsDiff(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace spsel
