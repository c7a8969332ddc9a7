#include "spsel/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "spsel/error.hpp"
#include "spsel/io.hpp"

namespace spsel {
namespace {

constexpr std::string_view kMeasurementsHeader =
    "matrixId,format,runtimeSeconds,memoryBytes,refused";

std::string featureHeader() {
  std::string h = "matrixId";
  for (int i = 0; i < kNumFeatures; ++i) {
    h += ',';
    h += featureName(i);
  }
  return h;
}

std::string labeledHeader() {
  std::string h = featureHeader() + ",canonicalLabel,bestLabels";
  for (auto f : kAllFormats) {
    h += ",O_";
    h += formatName(f);
  }
  return h;
}

// Reads lines, dropping a trailing '\r'; the first line must equal `header`.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string_view header) : in_(in) {
    if (!next()) throw ParseError("empty file, expected header row");
    if (line_ != header) throw ParseError("unexpected header row: " + line_);
  }

  bool next() {
    while (std::getline(in_, line_)) {
      ++number_;
      if (!line_.empty() && line_.back() == '\r') line_.pop_back();
      if (!line_.empty()) return true;
    }
    return false;
  }

  std::vector<std::string_view> fields(std::size_t expected) const {
    auto f = splitFields(line_);
    if (f.size() != expected) fail("expected " + std::to_string(expected) + " fields, found " +
                                   std::to_string(f.size()));
    return f;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("line " + std::to_string(number_) + ": " + what);
  }

  double number(std::string_view text, std::string_view what) const {
    try {
      return parseDouble(text, what);
    } catch (const ParseError& e) {
      fail(e.what());
    }
  }

  StorageFormat format(std::string_view text) const {
    const auto f = parseFormat(text);
    if (!f) fail("unknown storage format '" + std::string(text) + "'");
    return *f;
  }

 private:
  std::istream& in_;
  std::string line_;
  long number_ = 0;
};

FeatureVector readFeatureFields(const CsvReader& r, const std::vector<std::string_view>& f) {
  FeatureVector v;
  for (int i = 0; i < kNumFeatures; ++i)
    v[i] = r.number(f[static_cast<std::size_t>(i) + 1], featureName(i));
  return v;
}

void writeFeatureFields(std::ostream& out, const FeatureVector& v) {
  for (int i = 0; i < kNumFeatures; ++i) out << ',' << formatDouble(v[i]);
}

}  // namespace

std::string formatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parseDouble(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (text.empty() || res.ec != std::errc() || res.ptr != end)
    throw ParseError("invalid number '" + std::string(text) + "' for " + std::string(what));
  return v;
}

std::vector<std::string_view> splitFields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

void writeMeasurementsCsv(std::ostream& out, std::span<const MatrixMeasurements> corpus) {
  out << kMeasurementsHeader << '\n';
  for (const auto& m : corpus)
    for (const auto& rec : m.records)
      out << m.matrix_id << ',' << formatName(rec.format) << ',' << formatDouble(rec.runtime)
          << ',' << rec.memory << ',' << (rec.refused ? 1 : 0) << '\n';
}

std::vector<MatrixMeasurements> readMeasurementsCsv(std::istream& in) {
  CsvReader r(in, kMeasurementsHeader);
  std::vector<MatrixMeasurements> out;
  std::vector<std::array<bool, kNumFormats>> seen;
  std::map<std::string, std::size_t, std::less<>> index;
  while (r.next()) {
    const auto f = r.fields(5);
    if (f[0].empty()) r.fail("empty matrixId");
    auto it = index.find(f[0]);
    if (it == index.end()) {
      it = index.emplace(std::string(f[0]), out.size()).first;
      out.push_back({std::string(f[0]), {}});
      seen.push_back({});
    }
    const auto fmt = r.format(f[1]);
    const auto slot = static_cast<std::size_t>(formatCode(fmt));
    if (seen[it->second][slot])
      r.fail("duplicate row for " + std::string(f[0]) + " " + std::string(formatName(fmt)));
    seen[it->second][slot] = true;
    MeasurementRecord rec;
    rec.format = fmt;
    rec.runtime = r.number(f[2], "runtimeSeconds");
    const double mem = r.number(f[3], "memoryBytes");
    if (mem < 0 || mem != std::floor(mem)) r.fail("memoryBytes must be a nonnegative integer");
    rec.memory = static_cast<std::uint64_t>(mem);
    if (f[4] != "0" && f[4] != "1") r.fail("refused must be 0 or 1");
    rec.refused = f[4] == "1";
    if (!rec.refused && !(rec.runtime > 0.0)) r.fail("runtime must be positive");
    out[it->second].records[slot] = rec;
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (auto fmt : kAllFormats)
      if (!seen[i][static_cast<std::size_t>(formatCode(fmt))])
        throw DataError(out[i].matrix_id + " has no " + std::string(formatName(fmt)) +
                        " measurement");
  return out;
}

void writeFeaturesCsv(std::ostream& out, std::span<const FeatureRow> rows) {
  out << featureHeader() << '\n';
  for (const auto& row : rows) {
    out << row.matrix_id;
    writeFeatureFields(out, row.features);
    out << '\n';
  }
}

std::vector<FeatureRow> readFeaturesCsv(std::istream& in) {
  CsvReader r(in, featureHeader());
  std::vector<FeatureRow> out;
  while (r.next()) {
    const auto f = r.fields(1 + kNumFeatures);
    out.push_back({std::string(f[0]), readFeatureFields(r, f)});
  }
  return out;
}

void writeLabeledCsv(std::ostream& out, std::span<const LabeledSample> samples) {
  out << labeledHeader() << '\n';
  for (const auto& s : samples) {
    out << s.matrix_id;
    writeFeatureFields(out, s.features);
    out << ',' << formatName(s.label.canonical) << ',';
    for (std::size_t k = 0; k < s.label.best.size(); ++k)
      out << (k ? ";" : "") << formatName(s.label.best[k]);
    for (double o : s.label.objective) {
      out << ',';
      if (!std::isinf(o)) out << formatDouble(o);
    }
    out << '\n';
  }
}

std::vector<LabeledSample> readLabeledCsv(std::istream& in) {
  CsvReader r(in, labeledHeader());
  std::vector<LabeledSample> out;
  while (r.next()) {
    const auto f = r.fields(1 + kNumFeatures + 2 + kNumFormats);
    LabeledSample s;
    s.matrix_id = std::string(f[0]);
    s.features = readFeatureFields(r, f);
    s.label.canonical = r.format(f[kNumFeatures + 1]);
    for (auto name : splitFields(f[kNumFeatures + 2], ';')) s.label.best.push_back(r.format(name));
    std::sort(s.label.best.begin(), s.label.best.end());
    if (s.label.best.empty() || !s.label.isBest(s.label.canonical))
      r.fail("canonicalLabel is not among bestLabels");
    for (int k = 0; k < kNumFormats; ++k) {
      const auto text = f[static_cast<std::size_t>(kNumFeatures + 3 + k)];
      s.label.objective[static_cast<std::size_t>(k)] =
          text.empty() ? kRefusedObjective : r.number(text, "objective");
    }
    out.push_back(std::move(s));
  }
  return out;
}

void writeFrequencyCsv(std::ostream& out, std::span<const FrequencyRow> rows) {
  out << "w";
  for (auto f : kAllFormats) out << ',' << formatName(f);
  out << '\n';
  for (const auto& row : rows) {
    out << formatDouble(row.w);
    for (int c : row.counts) out << ',' << c;
    out << '\n';
  }
}

std::vector<MatrixMeasurements> readMeasurementsCsv(const std::filesystem::path& path) {
  return withInputFile(path, [](std::istream& in) { return readMeasurementsCsv(in); });
}

std::vector<FeatureRow> readFeaturesCsv(const std::filesystem::path& path) {
  return withInputFile(path, [](std::istream& in) { return readFeaturesCsv(in); });
}

std::vector<LabeledSample> readLabeledCsv(const std::filesystem::path& path) {
  return withInputFile(path, [](std::istream& in) { return readLabeledCsv(in); });
}

std::vector<FeatureVector> alignFeatures(std::span<const MatrixMeasurements> corpus,
                                         std::span<const FeatureRow> rows) {
  std::map<std::string_view, const FeatureVector*> by_id;
  for (const auto& row : rows) by_id.emplace(row.matrix_id, &row.features);
  std::vector<FeatureVector> out;
  out.reserve(corpus.size());
  for (const auto& m : corpus) {
    const auto it = by_id.find(m.matrix_id);
    if (it == by_id.end()) throw DataError("no feature row for " + m.matrix_id);
    out.push_back(*it->second);
  }
  return out;
}

}  // namespace spsel
