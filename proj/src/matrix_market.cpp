#include "spsel/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "spsel/error.hpp"

namespace spsel {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw ParseError("Matrix Market line " + std::to_string(line) + ": " + what);
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

CooMatrix readMatrixMarket(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) fail(1, "empty input");
  ++line_no;

  std::istringstream header(line);
  std::string banner, object, layout, field, symmetry;
  header >> banner >> object >> layout >> field >> symmetry;
  if (banner != "%%MatrixMarket") fail(line_no, "missing %%MatrixMarket banner");
  object = lower(object);
  layout = lower(layout);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") fail(line_no, "unsupported object '" + object + "'");
  if (layout != "coordinate") fail(line_no, "only coordinate layout is supported");
  if (field != "real" && field != "integer" && field != "pattern")
    fail(line_no, "unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric")
    fail(line_no, "unsupported symmetry '" + symmetry + "'");
  const bool pattern = field == "pattern";
  const bool symmetric = symmetry == "symmetric";

  long long rows = -1, cols = -1, declared = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%' || blank(line)) continue;
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> declared) || rows < 0 || cols < 0 || declared < 0)
      fail(line_no, "malformed size line");
    break;
  }
  if (declared < 0) fail(line_no, "missing size line");

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(symmetric ? 2 * declared : declared));
  long long seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%' || blank(line)) continue;
    std::istringstream entry(line);
    long long r = 0, c = 0;
    double v = 1.0;
    if (!(entry >> r >> c)) fail(line_no, "malformed entry");
    if (!pattern && !(entry >> v)) fail(line_no, "missing value");
    if (r < 1 || r > rows || c < 1 || c > cols)
      fail(line_no, "index (" + std::to_string(r) + ", " + std::to_string(c) +
                        ") outside declared " + std::to_string(rows) + "x" +
                        std::to_string(cols));
    if (symmetric && c > r) fail(line_no, "symmetric file stores upper-triangle entry");
    triplets.push_back({r - 1, c - 1, v});
    if (symmetric && r != c) triplets.push_back({c - 1, r - 1, v});
    ++seen;
  }
  if (seen != declared)
    fail(line_no, "expected " + std::to_string(declared) + " entries, found " +
                      std::to_string(seen));
  return fromTriplets(rows, cols, std::move(triplets));
}

CooMatrix readMatrixMarket(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return readMatrixMarket(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void writeMatrixMarket(const SparseMatrix& m, std::ostream& out) {
  const auto triplets = toTriplets(m);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.rows() << ' ' << m.cols() << ' ' << triplets.size() << '\n';
  char buf[64];
  for (const auto& t : triplets) {
    std::snprintf(buf, sizeof buf, "%.17g", t.value);
    out << t.row + 1 << ' ' << t.col + 1 << ' ' << buf << '\n';
  }
}

void writeMatrixMarket(const SparseMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  writeMatrixMarket(m, out);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace spsel
