#pragma once

// Seven sparse storage formats behind one immutable SparseMatrix handle.
//
// Every format type validates its invariants on construction and never
// changes afterwards. The logical content of a matrix is its set of
// (row, col, value) entries with nonzero value; all conversions preserve that
// set exactly, copying values rather than recomputing them.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "spsel/dense.hpp"
#include "spsel/format.hpp"

namespace spsel {

struct Triplet {
  Index row = 0;
  Index col = 0;
  double value = 0.0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Coordinate list, sorted by (row, col), no duplicates, no stored zeros.
class CooMatrix {
 public:
  CooMatrix(Index rows, Index cols, std::vector<Index> row_idx, std::vector<Index> col_idx,
            std::vector<double> values);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }
  std::span<const Index> rowIndices() const { return row_idx_; }
  std::span<const Index> colIndices() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

 private:
  Index rows_;
  Index cols_;
  std::vector<Index> row_idx_;
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

/// Compressed sparse row.
class CsrMatrix {
 public:
  CsrMatrix(Index rows, Index cols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
            std::vector<double> values);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }
  std::span<const Index> rowPtr() const { return row_ptr_; }
  std::span<const Index> colIndices() const { return col_idx_; }
  std::span<const double> values() const { return values_; }

 private:
  Index rows_;
  Index cols_;
  std::vector<Index> row_ptr_;
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

/// Compressed sparse column.
class CscMatrix {
 public:
  CscMatrix(Index rows, Index cols, std::vector<Index> col_ptr, std::vector<Index> row_idx,
            std::vector<double> values);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(values_.size()); }
  std::span<const Index> colPtr() const { return col_ptr_; }
  std::span<const Index> rowIndices() const { return row_idx_; }
  std::span<const double> values() const { return values_; }

 private:
  Index rows_;
  Index cols_;
  std::vector<Index> col_ptr_;
  std::vector<Index> row_idx_;
  std::vector<double> values_;
};

/// Diagonal storage. Band k holds offset offsets[k] = col - row; slot
/// data[k * cols + j] is the element at (j - offsets[k], j). Slots that fall
/// outside the matrix are zero.
class DiaMatrix {
 public:
  DiaMatrix(Index rows, Index cols, std::vector<Index> offsets, std::vector<double> data);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return nnz_; }
  Index numDiagonals() const { return static_cast<Index>(offsets_.size()); }
  std::span<const Index> offsets() const { return offsets_; }
  std::span<const double> band(Index k) const {
    return {data_.data() + k * cols_, static_cast<std::size_t>(cols_)};
  }
  std::span<const double> data() const { return data_; }

 private:
  Index rows_;
  Index cols_;
  std::vector<Index> offsets_;
  std::vector<double> data_;
  Index nnz_ = 0;
};

/// Block sparse row with square blockSize x blockSize blocks stored row-major.
/// Dimensions are padded up to a multiple of blockSize; padding is zero.
class BsrMatrix {
 public:
  BsrMatrix(Index rows, Index cols, Index block_size, std::vector<Index> block_row_ptr,
            std::vector<Index> block_col_idx, std::vector<double> block_data);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return nnz_; }
  Index blockSize() const { return block_size_; }
  Index blockRows() const { return static_cast<Index>(block_row_ptr_.size()) - 1; }
  Index numBlocks() const { return static_cast<Index>(block_col_idx_.size()); }
  std::span<const Index> blockRowPtr() const { return block_row_ptr_; }
  std::span<const Index> blockColIndices() const { return block_col_idx_; }
  std::span<const double> block(Index k) const {
    const auto area = block_size_ * block_size_;
    return {block_data_.data() + k * area, static_cast<std::size_t>(area)};
  }

 private:
  Index rows_;
  Index cols_;
  Index block_size_;
  std::vector<Index> block_row_ptr_;
  std::vector<Index> block_col_idx_;
  std::vector<double> block_data_;
  Index nnz_ = 0;
};

struct CoordHash {
  std::size_t operator()(const std::pair<Index, Index>& key) const noexcept {
    auto h = static_cast<std::uint64_t>(key.first) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(key.second) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

/// Dictionary of keys.
class DokMatrix {
 public:
  using Map = std::unordered_map<std::pair<Index, Index>, double, CoordHash>;

  DokMatrix(Index rows, Index cols, Map entries);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return static_cast<Index>(entries_.size()); }
  const Map& entries() const { return entries_; }

 private:
  Index rows_;
  Index cols_;
  Map entries_;
};

struct LilEntry {
  Index col = 0;
  double value = 0.0;
};

/// Row-based list of lists; each row sorted by column.
class LilMatrix {
 public:
  LilMatrix(Index rows, Index cols, std::vector<std::vector<LilEntry>> row_lists);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nnz() const { return nnz_; }
  std::span<const LilEntry> row(Index r) const { return rows_lists_[static_cast<std::size_t>(r)]; }

 private:
  Index rows_;
  Index cols_;
  std::vector<std::vector<LilEntry>> rows_lists_;
  Index nnz_ = 0;
};

/// Immutable, cheaply copyable handle over one of the seven formats.
class SparseMatrix {
 public:
  using Storage =
      std::variant<CooMatrix, CsrMatrix, CscMatrix, DiaMatrix, BsrMatrix, DokMatrix, LilMatrix>;

  template <typename T>
    requires std::is_constructible_v<Storage, T&&>
  SparseMatrix(T&& m)  // NOLINT(google-explicit-constructor)
      : storage_(std::make_shared<const Storage>(std::forward<T>(m))) {}

  StorageFormat format() const { return static_cast<StorageFormat>(storage_->index()); }
  Index rows() const;
  Index cols() const;
  Index nnz() const;
  std::string shapeString() const;

  const Storage& storage() const { return *storage_; }

  template <typename T>
  const T& as() const {
    return std::get<T>(*storage_);
  }

  template <typename Fn>
  decltype(auto) visit(Fn&& fn) const {
    return std::visit(std::forward<Fn>(fn), *storage_);
  }

  /// True when both handles share the same underlying storage.
  bool sharesStorageWith(const SparseMatrix& other) const { return storage_ == other.storage_; }

 private:
  std::shared_ptr<const Storage> storage_;
};

struct ConversionOptions {
  Index bsr_block_size = 2;
  /// DIA is refused when numDiagonals * cols > dia_guard_factor * nnz.
  double dia_guard_factor = 64.0;
};

/// Sums duplicates, drops resulting zeros, sorts by (row, col).
CooMatrix fromTriplets(Index rows, Index cols, std::vector<Triplet> triplets);

/// Entries sorted by (row, col).
std::vector<Triplet> toTriplets(const SparseMatrix& m);

/// Calls fn(row, col, value) for every stored nonzero in storage order.
template <typename Fn>
void forEachEntry(const SparseMatrix& m, Fn&& fn);

SparseMatrix convert(const SparseMatrix& m, StorageFormat target,
                     const ConversionOptions& options = {});

/// True if converting m to DIA would be refused under options.
bool diaWouldBlowUp(const SparseMatrix& m, const ConversionOptions& options = {});

/// Analytic byte count: 8-byte indices, 8-byte values.
std::uint64_t memoryFootprint(const SparseMatrix& m);

/// Footprint the matrix would have in `target`, without materializing it.
std::uint64_t projectedFootprint(const SparseMatrix& m, StorageFormat target,
                                 const ConversionOptions& options = {});

DenseMatrix toDense(const SparseMatrix& m);

// ---------------------------------------------------------------------------

template <typename Fn>
void forEachEntry(const SparseMatrix& m, Fn&& fn) {
  m.visit([&](const auto& s) {
    using T = std::decay_t<decltype(s)>;
    if constexpr (std::is_same_v<T, CooMatrix>) {
      const auto r = s.rowIndices();
      const auto c = s.colIndices();
      const auto v = s.values();
      for (std::size_t k = 0; k < v.size(); ++k) fn(r[k], c[k], v[k]);
    } else if constexpr (std::is_same_v<T, CsrMatrix>) {
      const auto ptr = s.rowPtr();
      const auto c = s.colIndices();
      const auto v = s.values();
      for (Index i = 0; i < s.rows(); ++i)
        for (Index k = ptr[i]; k < ptr[i + 1]; ++k) fn(i, c[k], v[k]);
    } else if constexpr (std::is_same_v<T, CscMatrix>) {
      const auto ptr = s.colPtr();
      const auto r = s.rowIndices();
      const auto v = s.values();
      for (Index j = 0; j < s.cols(); ++j)
        for (Index k = ptr[j]; k < ptr[j + 1]; ++k) fn(r[k], j, v[k]);
    } else if constexpr (std::is_same_v<T, DiaMatrix>) {
      const auto offsets = s.offsets();
      for (Index k = 0; k < s.numDiagonals(); ++k) {
        const auto band = s.band(k);
        for (Index j = 0; j < s.cols(); ++j) {
          const Index i = j - offsets[k];
          if (i >= 0 && i < s.rows() && band[j] != 0.0) fn(i, j, band[j]);
        }
      }
    } else if constexpr (std::is_same_v<T, BsrMatrix>) {
      const Index b = s.blockSize();
      const auto ptr = s.blockRowPtr();
      const auto bc = s.blockColIndices();
      for (Index br = 0; br < s.blockRows(); ++br) {
        for (Index k = ptr[br]; k < ptr[br + 1]; ++k) {
          const auto blk = s.block(k);
          for (Index r = 0; r < b; ++r)
            for (Index c = 0; c < b; ++c) {
              const double v = blk[r * b + c];
              if (v != 0.0) fn(br * b + r, bc[k] * b + c, v);
            }
        }
      }
    } else if constexpr (std::is_same_v<T, DokMatrix>) {
      for (const auto& [key, v] : s.entries()) fn(key.first, key.second, v);
    } else {
      for (Index i = 0; i < s.rows(); ++i)
        for (const auto& e : s.row(i)) fn(i, e.col, e.value);
    }
  });
}

}  // namespace spsel
