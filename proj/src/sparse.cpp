#include "spsel/sparse.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "spsel/error.hpp"

namespace spsel {
namespace {

std::string shapeOf(Index rows, Index cols) {
  std::ostringstream os;
  os << rows << "x" << cols;
  return os.str();
}

void checkDims(Index rows, Index cols, const char* who) {
  if (rows < 0 || cols < 0)
    throw ValidationError(std::string(who) + ": negative dimensions " + shapeOf(rows, cols));
}

// Validates one compressed axis (CSR rows or CSC columns).
void checkCompressed(Index outer, Index inner, std::span<const Index> ptr,
                     std::span<const Index> idx, std::span<const double> values,
                     const char* who) {
  if (ptr.size() != static_cast<std::size_t>(outer + 1))
    throw ValidationError(std::string(who) + ": pointer array must have length outer+1");
  if (idx.size() != values.size())
    throw ValidationError(std::string(who) + ": index/value length mismatch");
  if (ptr.front() != 0 || ptr.back() != static_cast<Index>(values.size()))
    throw ValidationError(std::string(who) + ": pointer array must start at 0 and end at nnz");
  for (Index o = 0; o < outer; ++o) {
    if (ptr[o] > ptr[o + 1]) throw ValidationError(std::string(who) + ": pointer not monotone");
    for (Index k = ptr[o]; k < ptr[o + 1]; ++k) {
      if (idx[k] < 0 || idx[k] >= inner)
        throw ValidationError(std::string(who) + ": index out of bounds");
      if (k > ptr[o] && idx[k] <= idx[k - 1])
        throw ValidationError(std::string(who) + ": indices not strictly increasing");
      if (values[k] == 0.0) throw ValidationError(std::string(who) + ": stored zero");
    }
  }
}

Index ceilDiv(Index a, Index b) { return (a + b - 1) / b; }

bool tripletLess(const Triplet& a, const Triplet& b) {
  return a.row != b.row ? a.row < b.row : a.col < b.col;
}

// ----- builders from (row, col)-sorted, duplicate-free, nonzero triplets -----

CooMatrix buildCoo(Index rows, Index cols, const std::vector<Triplet>& t) {
  std::vector<Index> r(t.size()), c(t.size());
  std::vector<double> v(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    r[k] = t[k].row;
    c[k] = t[k].col;
    v[k] = t[k].value;
  }
  return {rows, cols, std::move(r), std::move(c), std::move(v)};
}

CsrMatrix buildCsr(Index rows, Index cols, const std::vector<Triplet>& t) {
  std::vector<Index> ptr(static_cast<std::size_t>(rows + 1), 0);
  std::vector<Index> c(t.size());
  std::vector<double> v(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    ++ptr[static_cast<std::size_t>(t[k].row + 1)];
    c[k] = t[k].col;
    v[k] = t[k].value;
  }
  std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
  return {rows, cols, std::move(ptr), std::move(c), std::move(v)};
}

CscMatrix buildCsc(Index rows, Index cols, const std::vector<Triplet>& t) {
  std::vector<Index> ptr(static_cast<std::size_t>(cols + 1), 0);
  for (const auto& e : t) ++ptr[static_cast<std::size_t>(e.col + 1)];
  std::partial_sum(ptr.begin(), ptr.end(), ptr.begin());
  // Stable counting sort by column keeps rows ascending within each column.
  std::vector<Index> next(ptr.begin(), ptr.end() - 1);
  std::vector<Index> r(t.size());
  std::vector<double> v(t.size());
  for (const auto& e : t) {
    const auto pos = static_cast<std::size_t>(next[static_cast<std::size_t>(e.col)]++);
    r[pos] = e.row;
    v[pos] = e.value;
  }
  return {rows, cols, std::move(ptr), std::move(r), std::move(v)};
}

std::vector<Index> distinctOffsets(Index rows, Index cols, const std::vector<Triplet>& t) {
  std::vector<unsigned char> seen(static_cast<std::size_t>(std::max<Index>(rows + cols - 1, 0)),
                                  0);
  for (const auto& e : t) seen[static_cast<std::size_t>(e.col - e.row + rows - 1)] = 1;
  std::vector<Index> offsets;
  for (std::size_t s = 0; s < seen.size(); ++s)
    if (seen[s]) offsets.push_back(static_cast<Index>(s) - (rows - 1));
  return offsets;
}

DiaMatrix buildDia(Index rows, Index cols, const std::vector<Triplet>& t) {
  auto offsets = distinctOffsets(rows, cols, t);
  std::vector<Index> band_of(static_cast<std::size_t>(std::max<Index>(rows + cols - 1, 0)), -1);
  for (std::size_t k = 0; k < offsets.size(); ++k)
    band_of[static_cast<std::size_t>(offsets[k] + rows - 1)] = static_cast<Index>(k);
  std::vector<double> data(offsets.size() * static_cast<std::size_t>(cols), 0.0);
  for (const auto& e : t) {
    const Index k = band_of[static_cast<std::size_t>(e.col - e.row + rows - 1)];
    data[static_cast<std::size_t>(k * cols + e.col)] = e.value;
  }
  return {rows, cols, std::move(offsets), std::move(data)};
}

BsrMatrix buildBsr(Index rows, Index cols, Index b, const std::vector<Triplet>& t) {
  const Index block_rows = ceilDiv(rows, b);
  const Index area = b * b;
  std::vector<Index> ptr(static_cast<std::size_t>(block_rows + 1), 0);
  std::vector<Index> bcols;
  std::vector<double> data;
  // Triplets are row-major; gather each block row, then sort its blocks by column.
  std::size_t k = 0;
  std::vector<std::pair<Index, Triplet>> pending;
  for (Index br = 0; br < block_rows; ++br) {
    pending.clear();
    while (k < t.size() && t[k].row / b == br) {
      pending.emplace_back(t[k].col / b, t[k]);
      ++k;
    }
    std::stable_sort(pending.begin(), pending.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t p = 0; p < pending.size(); ++p) {
      if (p == 0 || pending[p].first != pending[p - 1].first) {
        bcols.push_back(pending[p].first);
        data.resize(data.size() + static_cast<std::size_t>(area), 0.0);
      }
      const auto& e = pending[p].second;
      const Index base = (static_cast<Index>(bcols.size()) - 1) * area;
      data[static_cast<std::size_t>(base + (e.row % b) * b + (e.col % b))] = e.value;
    }
    ptr[static_cast<std::size_t>(br + 1)] = static_cast<Index>(bcols.size());
  }
  return {rows, cols, b, std::move(ptr), std::move(bcols), std::move(data)};
}

DokMatrix buildDok(Index rows, Index cols, const std::vector<Triplet>& t) {
  DokMatrix::Map map;
  map.reserve(t.size());
  for (const auto& e : t) map.emplace(std::make_pair(e.row, e.col), e.value);
  return {rows, cols, std::move(map)};
}

LilMatrix buildLil(Index rows, Index cols, const std::vector<Triplet>& t) {
  std::vector<std::vector<LilEntry>> lists(static_cast<std::size_t>(rows));
  for (const auto& e : t) lists[static_cast<std::size_t>(e.row)].push_back({e.col, e.value});
  return {rows, cols, std::move(lists)};
}

Index countDiagonals(const SparseMatrix& m) {
  if (m.format() == StorageFormat::kDia) return m.as<DiaMatrix>().numDiagonals();
  const Index rows = m.rows();
  std::vector<unsigned char> seen(
      static_cast<std::size_t>(std::max<Index>(rows + m.cols() - 1, 0)), 0);
  Index count = 0;
  forEachEntry(m, [&](Index r, Index c, double) {
    auto& s = seen[static_cast<std::size_t>(c - r + rows - 1)];
    if (!s) {
      s = 1;
      ++count;
    }
  });
  return count;
}

Index countBlocks(const SparseMatrix& m, Index b) {
  if (m.format() == StorageFormat::kBsr && m.as<BsrMatrix>().blockSize() == b)
    return m.as<BsrMatrix>().numBlocks();
  const Index block_cols = ceilDiv(m.cols(), b);
  std::vector<std::uint64_t> keys;
  keys.reserve(static_cast<std::size_t>(m.nnz()));
  forEachEntry(m, [&](Index r, Index c, double) {
    keys.push_back(static_cast<std::uint64_t>((r / b) * block_cols + c / b));
  });
  std::sort(keys.begin(), keys.end());
  return static_cast<Index>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

}  // namespace

// ----- format constructors -------------------------------------------------

CooMatrix::CooMatrix(Index rows, Index cols, std::vector<Index> row_idx,
                     std::vector<Index> col_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_idx_(std::move(row_idx)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  checkDims(rows, cols, "COO");
  if (row_idx_.size() != values_.size() || col_idx_.size() != values_.size())
    throw ValidationError("COO: array length mismatch");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (row_idx_[k] < 0 || row_idx_[k] >= rows || col_idx_[k] < 0 || col_idx_[k] >= cols)
      throw ValidationError("COO: index out of bounds");
    if (values_[k] == 0.0) throw ValidationError("COO: stored zero");
    if (k > 0 && !(row_idx_[k - 1] < row_idx_[k] ||
                   (row_idx_[k - 1] == row_idx_[k] && col_idx_[k - 1] < col_idx_[k])))
      throw ValidationError("COO: entries must be sorted by (row, col) without duplicates");
  }
}

CsrMatrix::CsrMatrix(Index rows, Index cols, std::vector<Index> row_ptr,
                     std::vector<Index> col_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  checkDims(rows, cols, "CSR");
  checkCompressed(rows, cols, row_ptr_, col_idx_, values_, "CSR");
}

CscMatrix::CscMatrix(Index rows, Index cols, std::vector<Index> col_ptr,
                     std::vector<Index> row_idx, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      col_ptr_(std::move(col_ptr)),
      row_idx_(std::move(row_idx)),
      values_(std::move(values)) {
  checkDims(rows, cols, "CSC");
  checkCompressed(cols, rows, col_ptr_, row_idx_, values_, "CSC");
}

DiaMatrix::DiaMatrix(Index rows, Index cols, std::vector<Index> offsets, std::vector<double> data)
    : rows_(rows), cols_(cols), offsets_(std::move(offsets)), data_(std::move(data)) {
  checkDims(rows, cols, "DIA");
  if (data_.size() != offsets_.size() * static_cast<std::size_t>(cols))
    throw ValidationError("DIA: data must hold numDiagonals x cols slots");
  for (std::size_t k = 0; k < offsets_.size(); ++k) {
    if (k > 0 && offsets_[k] <= offsets_[k - 1])
      throw ValidationError("DIA: offsets must be strictly increasing");
    if (offsets_[k] <= -rows || offsets_[k] >= cols)
      throw ValidationError("DIA: offset outside the matrix");
    for (Index j = 0; j < cols; ++j) {
      const double v = data_[k * static_cast<std::size_t>(cols) + static_cast<std::size_t>(j)];
      const Index i = j - offsets_[k];
      if (i < 0 || i >= rows) {
        if (v != 0.0) throw ValidationError("DIA: nonzero slot outside the matrix");
      } else if (v != 0.0) {
        ++nnz_;
      }
    }
  }
}

BsrMatrix::BsrMatrix(Index rows, Index cols, Index block_size, std::vector<Index> block_row_ptr,
                     std::vector<Index> block_col_idx, std::vector<double> block_data)
    : rows_(rows),
      cols_(cols),
      block_size_(block_size),
      block_row_ptr_(std::move(block_row_ptr)),
      block_col_idx_(std::move(block_col_idx)),
      block_data_(std::move(block_data)) {
  checkDims(rows, cols, "BSR");
  if (block_size < 1) throw ValidationError("BSR: block size must be >= 1");
  const Index block_rows = ceilDiv(rows, block_size);
  const Index block_cols = ceilDiv(cols, block_size);
  const Index area = block_size * block_size;
  if (block_row_ptr_.size() != static_cast<std::size_t>(block_rows + 1))
    throw ValidationError("BSR: block row pointer must have length blockRows+1");
  if (block_data_.size() != block_col_idx_.size() * static_cast<std::size_t>(area))
    throw ValidationError("BSR: block data size mismatch");
  if (block_row_ptr_.front() != 0 ||
      block_row_ptr_.back() != static_cast<Index>(block_col_idx_.size()))
    throw ValidationError("BSR: block row pointer must start at 0 and end at numBlocks");
  for (Index br = 0; br < block_rows; ++br) {
    const Index lo = block_row_ptr_[static_cast<std::size_t>(br)];
    const Index hi = block_row_ptr_[static_cast<std::size_t>(br + 1)];
    if (lo > hi) throw ValidationError("BSR: block row pointer not monotone");
    for (Index k = lo; k < hi; ++k) {
      const Index bc = block_col_idx_[static_cast<std::size_t>(k)];
      if (bc < 0 || bc >= block_cols) throw ValidationError("BSR: block column out of bounds");
      if (k > lo && bc <= block_col_idx_[static_cast<std::size_t>(k - 1)])
        throw ValidationError("BSR: block columns not strictly increasing");
      for (Index r = 0; r < block_size; ++r)
        for (Index c = 0; c < block_size; ++c) {
          const double v = block_data_[static_cast<std::size_t>(k * area + r * block_size + c)];
          if (v == 0.0) continue;
          if (br * block_size + r >= rows || bc * block_size + c >= cols)
            throw ValidationError("BSR: nonzero in padding");
          ++nnz_;
        }
    }
  }
}

DokMatrix::DokMatrix(Index rows, Index cols, Map entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  checkDims(rows, cols, "DOK");
  for (const auto& [key, v] : entries_) {
    if (key.first < 0 || key.first >= rows || key.second < 0 || key.second >= cols)
      throw ValidationError("DOK: key out of bounds");
    if (v == 0.0) throw ValidationError("DOK: stored zero");
  }
}

LilMatrix::LilMatrix(Index rows, Index cols, std::vector<std::vector<LilEntry>> row_lists)
    : rows_(rows), cols_(cols), rows_lists_(std::move(row_lists)) {
  checkDims(rows, cols, "LIL");
  if (rows_lists_.size() != static_cast<std::size_t>(rows))
    throw ValidationError("LIL: need one list per row");
  for (const auto& list : rows_lists_) {
    for (std::size_t k = 0; k < list.size(); ++k) {
      if (list[k].col < 0 || list[k].col >= cols)
        throw ValidationError("LIL: column out of bounds");
      if (k > 0 && list[k].col <= list[k - 1].col)
        throw ValidationError("LIL: columns not strictly increasing");
      if (list[k].value == 0.0) throw ValidationError("LIL: stored zero");
    }
    nnz_ += static_cast<Index>(list.size());
  }
}

// ----- SparseMatrix --------------------------------------------------------

Index SparseMatrix::rows() const {
  return visit([](const auto& s) { return s.rows(); });
}
Index SparseMatrix::cols() const {
  return visit([](const auto& s) { return s.cols(); });
}
Index SparseMatrix::nnz() const {
  return visit([](const auto& s) { return s.nnz(); });
}
std::string SparseMatrix::shapeString() const { return shapeOf(rows(), cols()); }

// ----- free functions ------------------------------------------------------

CooMatrix fromTriplets(Index rows, Index cols, std::vector<Triplet> triplets) {
  checkDims(rows, cols, "fromTriplets");
  for (const auto& t : triplets) {
    if (t.row < 0 || t.row >= rows) {
      std::ostringstream os;
      os << "row " << t.row << " out of bounds in triplet (" << t.row << ", " << t.col << ", "
         << t.value << ") for " << shapeOf(rows, cols) << " matrix";
      throw ValidationError(os.str());
    }
    if (t.col < 0 || t.col >= cols) {
      std::ostringstream os;
      os << "column " << t.col << " out of bounds in triplet (" << t.row << ", " << t.col << ", "
         << t.value << ") for " << shapeOf(rows, cols) << " matrix";
      throw ValidationError(os.str());
    }
  }
  std::stable_sort(triplets.begin(), triplets.end(), tripletLess);
  std::vector<Triplet> merged;
  merged.reserve(triplets.size());
  for (const auto& t : triplets) {
    if (!merged.empty() && merged.back().row == t.row && merged.back().col == t.col)
      merged.back().value += t.value;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [](const Triplet& t) { return t.value == 0.0; });
  return buildCoo(rows, cols, merged);
}

std::vector<Triplet> toTriplets(const SparseMatrix& m) {
  std::vector<Triplet> out;
  out.reserve(static_cast<std::size_t>(m.nnz()));
  forEachEntry(m, [&](Index r, Index c, double v) { out.push_back({r, c, v}); });
  switch (m.format()) {
    case StorageFormat::kCoo:
    case StorageFormat::kCsr:
    case StorageFormat::kLil:
      break;
    default:
      std::sort(out.begin(), out.end(), tripletLess);
  }
  return out;
}

bool diaWouldBlowUp(const SparseMatrix& m, const ConversionOptions& options) {
  const double slots = static_cast<double>(countDiagonals(m)) * static_cast<double>(m.cols());
  return slots > options.dia_guard_factor * static_cast<double>(m.nnz());
}

SparseMatrix convert(const SparseMatrix& m, StorageFormat target,
                     const ConversionOptions& options) {
  if (m.format() == target &&
      (target != StorageFormat::kBsr ||
       m.as<BsrMatrix>().blockSize() == options.bsr_block_size))
    return m;
  if (target == StorageFormat::kDia && diaWouldBlowUp(m, options)) {
    std::ostringstream os;
    os << "DIA blowup: " << countDiagonals(m) << " diagonals x " << m.cols()
       << " columns exceeds " << options.dia_guard_factor << " x nnz (" << m.nnz() << ")";
    throw DiaBlowupError(os.str());
  }
  const auto t = toTriplets(m);
  const Index rows = m.rows();
  const Index cols = m.cols();
  switch (target) {
    case StorageFormat::kCoo:
      return buildCoo(rows, cols, t);
    case StorageFormat::kCsr:
      return buildCsr(rows, cols, t);
    case StorageFormat::kCsc:
      return buildCsc(rows, cols, t);
    case StorageFormat::kDia:
      return buildDia(rows, cols, t);
    case StorageFormat::kBsr:
      if (options.bsr_block_size < 1) throw ValidationError("BSR: block size must be >= 1");
      return buildBsr(rows, cols, options.bsr_block_size, t);
    case StorageFormat::kDok:
      return buildDok(rows, cols, t);
    case StorageFormat::kLil:
      return buildLil(rows, cols, t);
  }
  throw ValidationError("unknown storage format");
}

std::uint64_t memoryFootprint(const SparseMatrix& m) {
  const auto nnz = static_cast<std::uint64_t>(m.nnz());
  const auto rows = static_cast<std::uint64_t>(m.rows());
  const auto cols = static_cast<std::uint64_t>(m.cols());
  switch (m.format()) {
    case StorageFormat::kCoo:
      return 24 * nnz;
    case StorageFormat::kCsr:
      return 16 * nnz + 8 * (rows + 1);
    case StorageFormat::kCsc:
      return 16 * nnz + 8 * (cols + 1);
    case StorageFormat::kDia: {
      const auto diags = static_cast<std::uint64_t>(m.as<DiaMatrix>().numDiagonals());
      return 8 * diags * cols + 8 * diags;
    }
    case StorageFormat::kBsr: {
      const auto& b = m.as<BsrMatrix>();
      const auto bs = static_cast<std::uint64_t>(b.blockSize());
      const auto blocks = static_cast<std::uint64_t>(b.numBlocks());
      return 8 * blocks * bs * bs + 8 * blocks + 8 * (static_cast<std::uint64_t>(b.blockRows()) + 1);
    }
    case StorageFormat::kDok:
      return (24 * nnz * 3) / 2;
    case StorageFormat::kLil:
      return 16 * nnz + 24 * rows;
  }
  return 0;
}

std::uint64_t projectedFootprint(const SparseMatrix& m, StorageFormat target,
                                 const ConversionOptions& options) {
  const auto nnz = static_cast<std::uint64_t>(m.nnz());
  const auto rows = static_cast<std::uint64_t>(m.rows());
  const auto cols = static_cast<std::uint64_t>(m.cols());
  switch (target) {
    case StorageFormat::kDia: {
      const auto diags = static_cast<std::uint64_t>(countDiagonals(m));
      return 8 * diags * cols + 8 * diags;
    }
    case StorageFormat::kBsr: {
      const auto b = static_cast<std::uint64_t>(options.bsr_block_size);
      const auto blocks = static_cast<std::uint64_t>(countBlocks(m, options.bsr_block_size));
      return 8 * blocks * b * b + 8 * blocks + 8 * ((rows + b - 1) / b + 1);
    }
    case StorageFormat::kCoo:
      return 24 * nnz;
    case StorageFormat::kCsr:
      return 16 * nnz + 8 * (rows + 1);
    case StorageFormat::kCsc:
      return 16 * nnz + 8 * (cols + 1);
    case StorageFormat::kDok:
      return (24 * nnz * 3) / 2;
    case StorageFormat::kLil:
      return 16 * nnz + 24 * rows;
  }
  return 0;
}

DenseMatrix toDense(const SparseMatrix& m) {
  DenseMatrix d(m.rows(), m.cols());
  forEachEntry(m, [&](Index r, Index c, double v) { d(r, c) = v; });
  return d;
}

}  // namespace spsel
