#pragma once

#include <filesystem>
#include <iosfwd>

#include "spsel/sparse.hpp"

namespace spsel {

/// Reads a coordinate Matrix Market file (real, integer or pattern; general or
/// symmetric). Symmetric files are expanded to full storage. Duplicate
/// coordinates are summed.
CooMatrix readMatrixMarket(const std::filesystem::path& path);
CooMatrix readMatrixMarket(std::istream& in);

/// Writes "coordinate real general" with 17 significant digits, entries in
/// (row, col) order.
void writeMatrixMarket(const SparseMatrix& m, const std::filesystem::path& path);
void writeMatrixMarket(const SparseMatrix& m, std::ostream& out);

}  // namespace spsel
