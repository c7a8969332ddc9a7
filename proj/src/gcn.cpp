#include "spsel/gcn.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "spsel/dataset.hpp"
#include "spsel/error.hpp"
#include "spsel/evaluation.hpp"
#include "spsel/features.hpp"
#include "spsel/random.hpp"
#include "spsel/spmm.hpp"
#include "spsel/timing.hpp"

namespace spsel {
namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2));
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

const SparseMatrix& layerSource(const GcnConfig& cfg, int layer) {
  return cfg.layer_adjacency.empty() ? cfg.adjacency
                                     : cfg.layer_adjacency[static_cast<std::size_t>(layer)];
}

bool densityDrifted(double before, double now) {
  if (before == now) return false;
  if (before <= 0.0 || now <= 0.0) return true;
  return std::max(before, now) / std::min(before, now) > 2.0;
}

}  // namespace

std::string_view strategyName(SelectionStrategy s) {
  switch (s) {
    case SelectionStrategy::kStaticCoo: return "static-coo";
    case SelectionStrategy::kAdaptive: return "adaptive";
    case SelectionStrategy::kOracle: return "oracle";
  }
  return "?";
}

SelectionStrategy parseStrategy(std::string_view name) {
  for (auto s : {SelectionStrategy::kStaticCoo, SelectionStrategy::kAdaptive,
                 SelectionStrategy::kOracle})
    if (strategyName(s) == name) return s;
  throw ValidationError("unknown selection strategy '" + std::string(name) +
                        "' (expected static-coo, adaptive or oracle)");
}

void GcnConfig::validate() const {
  if (layers < 1) throw ValidationError("gcn: layers must be >= 1");
  if (hidden_dim < 1) throw ValidationError("gcn: hiddenDim must be >= 1");
  if (epochs < 1) throw ValidationError("gcn: epochs must be >= 1");
  if (!(perturbation >= 0.0)) throw ValidationError("gcn: perturbation must be >= 0");
  if (strategy == SelectionStrategy::kAdaptive && !model)
    throw ValidationError("gcn: the adaptive strategy needs a model");
  if (!layer_adjacency.empty() && static_cast<int>(layer_adjacency.size()) != layers)
    throw ValidationError("gcn: need one layer operand per layer");
  for (int l = 0; l < layers; ++l) {
    const auto& a = layerSource(*this, l);
    if (a.rows() != a.cols())
      throw ShapeError("gcn: adjacency must be square, got " + a.shapeString());
    if (a.cols() != features.rows())
      throw ShapeError("gcn: adjacency " + a.shapeString() + " does not match features " +
                       features.shapeString());
  }
  if (!weights.empty()) {
    if (static_cast<int>(weights.size()) != layers)
      throw ValidationError("gcn: need one weight matrix per layer");
    Index width = features.cols();
    for (const auto& w : weights) {
      if (w.rows() != width)
        throw ShapeError("gcn: weight " + w.shapeString() + " does not follow width " +
                         std::to_string(width));
      width = w.cols();
    }
  }
}

std::vector<DenseMatrix> initialWeights(const GcnConfig& cfg) {
  std::vector<DenseMatrix> out;
  Index in = cfg.features.cols();
  for (int l = 0; l < cfg.layers; ++l) {
    Rng rng(mix(cfg.seed, static_cast<std::uint64_t>(l)));
    const double limit = std::sqrt(6.0 / static_cast<double>(in + cfg.hidden_dim));
    DenseMatrix w(in, cfg.hidden_dim);
    for (auto& v : w.data()) v = rng.uniform(-limit, limit);
    out.push_back(std::move(w));
    in = cfg.hidden_dim;
  }
  return out;
}

CooMatrix normalizeAdjacency(const SparseMatrix& a) {
  if (a.rows() != a.cols())
    throw ShapeError("normalization needs a square adjacency, got " + a.shapeString());
  const Index n = a.rows();
  auto t = toTriplets(a);
  for (Index i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  const CooMatrix with_loops = fromTriplets(n, n, std::move(t));

  std::vector<double> degree(static_cast<std::size_t>(n), 0.0);
  const auto r = with_loops.rowIndices();
  const auto c = with_loops.colIndices();
  const auto v = with_loops.values();
  for (std::size_t k = 0; k < v.size(); ++k) degree[static_cast<std::size_t>(r[k])] += v[k];
  std::vector<double> scale(degree.size());
  for (std::size_t i = 0; i < degree.size(); ++i) {
    if (!(degree[i] > 0.0))
      throw DataError("row " + std::to_string(i) + " of A + I has a non-positive sum");
    scale[i] = 1.0 / std::sqrt(degree[i]);
  }
  std::vector<Triplet> out;
  out.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double s = v[k] * scale[static_cast<std::size_t>(r[k])] *
                     scale[static_cast<std::size_t>(c[k])];
    if (s != 0.0) out.push_back({r[k], c[k], s});
  }
  return fromTriplets(n, n, std::move(out));
}

GcnSession::GcnSession(GcnConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  weights_ = cfg_.weights.empty() ? initialWeights(cfg_) : cfg_.weights;
  for (int l = 0; l < cfg_.layers; ++l) {
    sources_.push_back(layerSource(cfg_, l));
    operands_.push_back(sources_.back());
  }
  oracle_.assign(static_cast<std::size_t>(cfg_.layers), std::nullopt);
}

void GcnSession::setLayerOperand(int layer, SparseMatrix m) {
  if (layer < 0 || layer >= cfg_.layers) throw ValidationError("gcn: layer out of range");
  if (m.rows() != m.cols() || m.cols() != cfg_.features.rows())
    throw ShapeError("gcn: operand " + m.shapeString() + " does not fit the graph");
  if (const auto cached = cache_.lookup(layer))
    if (densityDrifted(cached->signature[Feature::kDensity], matrixDensity(m)))
      cache_.invalidate(layer);
  const auto i = static_cast<std::size_t>(layer);
  sources_[i] = m;
  operands_[i] = std::move(m);
  oracle_[i].reset();
}

const SparseMatrix& GcnSession::prepare(int layer, LayerTiming& timing) {
  const auto i = static_cast<std::size_t>(layer);
  StorageFormat target = StorageFormat::kCoo;
  switch (cfg_.strategy) {
    case SelectionStrategy::kStaticCoo:
      break;
    case SelectionStrategy::kAdaptive: {
      auto sel = spmmPredict(*cfg_.model, operands_[i], layer, &cache_, cfg_.conversion);
      timing.cache_hit = sel.cache_hit;
      timing.feature_time = sel.feature_time;
      timing.predict_time = sel.predict_time;
      timing.convert_time = sel.convert_time;
      operands_[i] = std::move(sel.matrix);
      return operands_[i];
    }
    case SelectionStrategy::kOracle:
      target = *oracle_[i];
      break;
  }
  if (operands_[i].format() != target) {
    const auto t0 = Clock::now();
    operands_[i] = convert(sources_[i], target, cfg_.conversion);
    timing.convert_time = secondsBetween(t0, Clock::now());
  }
  return operands_[i];
}

void GcnSession::planOracle() {
  Index width = cfg_.features.cols();
  for (std::size_t i = 0; i < oracle_.size(); ++i) {
    if (!oracle_[i]) {
      auto options = cfg_.oracle_profile;
      options.dense_cols = width;
      options.conversion = cfg_.conversion;
      const auto t0 = Clock::now();
      oracle_[i] = fastestFormat(profileMatrix(sources_[i], options));
      oracle_seconds_ += secondsBetween(t0, Clock::now());
    }
    width = weights_[i].cols();
  }
}

ForwardResult GcnSession::forward() {
  if (cfg_.strategy == SelectionStrategy::kOracle) planOracle();
  ForwardResult result;
  const auto start = Clock::now();
  DenseMatrix h = cfg_.features;
  for (int l = 0; l < cfg_.layers; ++l) {
    LayerTiming timing;
    timing.layer = l;
    const auto& a = prepare(l, timing);
    timing.format = a.format();
    timing.density = matrixDensity(a);
    auto r = spmm(a, h);
    timing.kernel_time = r.elapsed;
    const auto t0 = Clock::now();
    h = relu(multiply(r.product, weights_[static_cast<std::size_t>(l)]));
    timing.dense_time = secondsBetween(t0, Clock::now());
    result.layers.push_back(timing);
  }
  result.seconds = secondsBetween(start, Clock::now());
  result.output = std::move(h);
  return result;
}

void GcnSession::perturb(int epoch) {
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Rng rng(mix(mix(cfg_.seed, 0xE90C4ULL + static_cast<std::uint64_t>(epoch)), l));
    for (auto& v : weights_[l].data()) v += cfg_.perturbation * rng.normal();
  }
}

ForwardResult gcnForward(const GcnConfig& cfg) { return GcnSession(cfg).forward(); }

EpochReport runTrainingLoop(const GcnConfig& cfg) {
  GcnSession session(cfg);
  EpochReport report;
  StrategySummary summary;
  summary.strategy = cfg.strategy;
  for (int e = 0; e < cfg.epochs; ++e) {
    const auto pass = session.forward();
    summary.epoch_seconds.push_back(pass.seconds);
    std::vector<StorageFormat> formats;
    std::vector<double> densities;
    for (const auto& t : pass.layers) {
      formats.push_back(t.format);
      densities.push_back(t.density);
      report.rows.push_back({e, t.layer, cfg.strategy, t.format, t.seconds(), t.density});
    }
    summary.formats.push_back(std::move(formats));
    summary.trace.density.push_back(std::move(densities));
    session.perturb(e);
  }
  summary.geomean_epoch_seconds = geometricMean(summary.epoch_seconds);
  summary.oracle_profile_seconds = session.oracleSeconds();
  report.strategies.push_back(std::move(summary));
  return report;
}

EpochReport runStrategies(const GcnConfig& cfg, std::span<const SelectionStrategy> strategies) {
  EpochReport merged;
  for (auto s : strategies) {
    GcnConfig c = cfg;
    c.strategy = s;
    auto r = runTrainingLoop(c);
    merged.strategies.push_back(std::move(r.strategies.front()));
    merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
  }
  return merged;
}

std::vector<double> powerDensification(const SparseMatrix& a, int k) {
  if (a.rows() != a.cols())
    throw ShapeError("powers need a square matrix, got " + a.shapeString());
  if (k < 1) throw ValidationError("power count must be >= 1");
  const Index n = a.rows();
  std::vector<std::vector<Index>> base(static_cast<std::size_t>(n));
  forEachEntry(a, [&](Index r, Index c, double) { base[static_cast<std::size_t>(r)].push_back(c); });
  for (auto& row : base) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  auto count = [](const std::vector<std::vector<Index>>& s) {
    Index total = 0;
    for (const auto& row : s) total += static_cast<Index>(row.size());
    return total;
  };

  std::vector<double> out{matrixDensity(n, n, count(base))};
  auto power = base;
  std::vector<Index> stamp(static_cast<std::size_t>(n), -1);
  for (int step = 1; step < k; ++step) {
    std::vector<std::vector<Index>> next(static_cast<std::size_t>(n));
    for (Index r = 0; r < n; ++r) {
      auto& row = next[static_cast<std::size_t>(r)];
      for (Index mid : power[static_cast<std::size_t>(r)])
        for (Index c : base[static_cast<std::size_t>(mid)])
          if (stamp[static_cast<std::size_t>(c)] != r) {
            stamp[static_cast<std::size_t>(c)] = r;
            row.push_back(c);
          }
      std::sort(row.begin(), row.end());
    }
    std::fill(stamp.begin(), stamp.end(), -1);
    power = std::move(next);
    out.push_back(matrixDensity(n, n, count(power)));
  }
  return out;
}

void writeEpochCsv(std::ostream& out, const EpochReport& report) {
  out << "epoch,layer,strategy,format,seconds,density\n";
  for (const auto& r : report.rows)
    out << r.epoch << ',' << r.layer << ',' << strategyName(r.strategy) << ','
        << formatName(r.format) << ',' << formatDouble(r.seconds) << ','
        << formatDouble(r.density) << '\n';
}

void writeEpochJson(std::ostream& out, const EpochReport& report) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema"] = "spsel-epoch-report";
  j["version"] = 1;
  ordered_json strategies = ordered_json::array();
  for (const auto& s : report.strategies) {
    ordered_json formats = ordered_json::array();
    for (const auto& epoch : s.formats) {
      ordered_json names = ordered_json::array();
      for (auto f : epoch) names.push_back(std::string(formatName(f)));
      formats.push_back(std::move(names));
    }
    strategies.push_back({{"strategy", std::string(strategyName(s.strategy))},
                          {"geomeanEpochSeconds", s.geomean_epoch_seconds},
                          {"epochSeconds", s.epoch_seconds},
                          {"oracleProfileSeconds", s.oracle_profile_seconds},
                          {"formats", std::move(formats)},
                          {"densityTrace", s.trace.density}});
  }
  j["strategies"] = std::move(strategies);
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"epoch", r.epoch},
                    {"layer", r.layer},
                    {"strategy", std::string(strategyName(r.strategy))},
                    {"format", std::string(formatName(r.format))},
                    {"seconds", r.seconds},
                    {"density", r.density}});
  j["rows"] = std::move(rows);
  if (!report.power_densities.empty()) j["powerDensification"] = report.power_densities;
  out << j.dump(1) << '\n';
}

}  // namespace spsel
