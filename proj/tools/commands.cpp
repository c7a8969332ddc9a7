#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "spsel/dataset.hpp"
#include "spsel/error.hpp"
#include "spsel/evaluation.hpp"
#include "spsel/features.hpp"
#include "spsel/gcn.hpp"
#include "spsel/generator.hpp"
#include "spsel/io.hpp"
#include "spsel/labeling.hpp"
#include "spsel/manifest.hpp"
#include "spsel/matrix_market.hpp"
#include "spsel/profiler.hpp"
#include "spsel/random.hpp"
#include "spsel/timing.hpp"

namespace spsel::cli {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

class Stopwatch {
 public:
  double seconds() const { return secondsBetween(start_, Clock::now()); }

 private:
  Clock::time_point start_ = Clock::now();
};

fs::path sibling(const fs::path& of, const std::string& name) {
  return of.has_parent_path() ? of.parent_path() / name : fs::path(name);
}

void ensureParent(const fs::path& file) {
  if (file.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(file.parent_path(), ec);
    if (ec) throw IoError("cannot create " + file.parent_path().string() + ": " + ec.message());
  }
}

template <typename Fn>
void writeFile(const fs::path& path, Fn&& fn) {
  ensureParent(path);
  auto out = openOutput(path);
  fn(out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

ordered_json rangesJson(const GlobalRanges& r) {
  return {{"runtimeMin", r.runtime_min},
          {"runtimeMax", r.runtime_max},
          {"memoryMin", r.memory_min},
          {"memoryMax", r.memory_max}};
}

ordered_json hyperJson(const GbtHyperParams& hp) {
  return {{"rounds", hp.rounds},       {"maxDepth", hp.max_depth},
          {"learningRate", hp.learning_rate}, {"minSplitGain", hp.min_split_gain},
          {"minLeafSamples", hp.min_leaf_samples}, {"lambda", hp.lambda},
          {"seed", hp.seed}};
}

std::vector<double> parseWeights(const std::string& list) {
  std::vector<double> out;
  for (auto field : splitFields(list)) {
    const double w = parseDouble(field, "weight in --w-sweep");
    if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("--w-sweep values must lie in [0, 1]");
    out.push_back(w);
  }
  if (out.empty()) throw ValidationError("--w-sweep needs at least one weight");
  return out;
}

GenSpec parseGenSpec(const std::string& spec) {
  if (spec == "desk-scale") return GenSpec::deskScale();
  if (spec == "paper-scale") return GenSpec::paperScale();
  auto in = openInput(spec);
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(spec + ": " + e.what());
  }
  if (!j.is_object()) throw SchemaError(spec + ": a generator spec must be a JSON object");
  GenSpec s;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "sizeMin") s.size_min = value.get<Index>();
      else if (key == "sizeMax") s.size_max = value.get<Index>();
      else if (key == "sizeStep") s.size_step = value.get<Index>();
      else if (key == "sparsityMin") s.sparsity_min = value.get<double>();
      else if (key == "sparsityMax") s.sparsity_max = value.get<double>();
      else if (key == "totalMatrices") s.total_matrices = value.get<int>();
      else if (key == "seed") s.seed = value.get<std::uint64_t>();
      else throw ValidationError(spec + ": unknown key '" + key + "'");
    } catch (const nlohmann::json::exception&) {
      throw ValidationError(spec + ": '" + key + "' has the wrong type");
    }
  }
  return s;
}

ordered_json genSpecJson(const GenSpec& s) {
  return {{"sizeMin", s.size_min},         {"sizeMax", s.size_max},
          {"sizeStep", s.size_step},       {"sparsityMin", s.sparsity_min},
          {"sparsityMax", s.sparsity_max}, {"totalMatrices", s.total_matrices},
          {"seed", s.seed}};
}

std::vector<fs::path> listMatrices(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("matrix directory " + dir.string() + " not found");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".mtx") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw DataError("no .mtx files in " + dir.string());
  return out;
}

struct LabeledContext {
  std::vector<LabeledSample> samples;
  double w = 1.0;
  double tie_epsilon = 1e-4;
  GlobalRanges ranges;
};

LabeledContext loadLabeled(const fs::path& path) {
  LabeledContext ctx;
  ctx.samples = readLabeledCsv(path);
  const auto manifest_path = manifestPathFor(path);
  if (fs::exists(manifest_path)) {
    const auto m = readManifest(manifest_path);
    try {
      const auto& r = m.at("results");
      ctx.w = r.at("w").get<double>();
      ctx.tie_epsilon = r.at("tieEpsilon").get<double>();
      const auto& g = r.at("globalRanges");
      ctx.ranges = {g.at("runtimeMin").get<double>(), g.at("runtimeMax").get<double>(),
                    g.at("memoryMin").get<double>(), g.at("memoryMax").get<double>()};
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(manifest_path.string() + ": " + e.what());
    }
  } else {
    std::cerr << "warning: " << manifest_path.string()
              << " not found; the model will not record the labeling policy\n";
  }
  return ctx;
}

FormatModel trainKind(const std::string& kind, std::span<const LabeledSample> data,
                      const GbtHyperParams& hp, int tree_depth) {
  if (kind == "gbt") return trainGbt(data, hp);
  if (kind == "tree") return trainBaselineTree(data, tree_depth);
  if (kind == "knn") return trainBaselineKnn(data, 1);
  throw ValidationError("unknown model kind '" + kind + "' (expected gbt, tree or knn)");
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * v);
  return buf;
}

std::string featureList(const FeatureMask& mask) {
  std::string out;
  for (int i = 0; i < kNumFeatures; ++i)
    if (mask[static_cast<std::size_t>(i)]) {
      if (!out.empty()) out += ',';
      out += featureName(i);
    }
  return out;
}

std::vector<std::string> maskNames(const FeatureMask& mask) {
  std::vector<std::string> out;
  for (int i = 0; i < kNumFeatures; ++i)
    if (mask[static_cast<std::size_t>(i)]) out.emplace_back(featureName(i));
  return out;
}

}  // namespace

int runGen(const GenOptions& o) {
  Stopwatch clock;
  GenSpec spec = parseGenSpec(o.spec);
  if (o.seed) spec.seed = *o.seed;
  spec.validate();
  const fs::path dir = o.out;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  RunManifest manifest;
  manifest.command = "gen";
  manifest.config = {{"spec", o.spec}, {"genSpec", genSpecJson(spec)}};
  manifest.seeds = {{"generator", spec.seed}};
  ordered_json listing = ordered_json::array();
  for (int i = 0; i < spec.total_matrices; ++i) {
    const auto g = generateMatrix(spec, i);
    const auto file = dir / (g.id + ".mtx");
    writeMatrixMarket(g.matrix, file);
    manifest.outputs.push_back(file.string());
    listing.push_back({{"id", g.id},
                       {"size", g.size},
                       {"targetDensity", g.target_density},
                       {"nnz", g.matrix.nnz()}});
  }
  manifest.results = {{"matrices", std::move(listing)}};
  manifest.wall_seconds = clock.seconds();
  writeManifest(manifest, dir / "manifest.json");
  std::cout << "wrote " << spec.total_matrices << " matrices to " << dir.string() << '\n';
  return 0;
}

int runProfile(const ProfileOptions& o) {
  Stopwatch clock;
  if (o.jobs < 1) throw ValidationError("--jobs must be >= 1");
  spsel::ProfileOptions po;
  po.dense_cols = o.dense_cols;
  po.reps = o.reps;
  po.warmup = o.warmup;
  po.seed = o.seed;
  po.verify = o.verify;
  if (po.dense_cols < 1) throw ValidationError("--dense-cols must be >= 1");
  if (po.reps < 3) throw ValidationError("--reps must be >= 3");
  if (po.warmup < 0) throw ValidationError("--warmup must be >= 0");

  const auto files = listMatrices(o.matrices);
  std::vector<MatrixMeasurements> corpus(files.size());
  std::vector<FeatureRow> features(files.size());

  // Loading and feature extraction overlap across jobs; timed kernels never do.
  std::mutex timed;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto fail = [&](std::exception_ptr e) {
    std::lock_guard lock(failure_mutex);
    if (!failure) failure = std::move(e);
    next = files.size();
  };
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= files.size()) return;
      try {
        const std::string id = files[i].stem().string();
        const SparseMatrix m = readMatrixMarket(files[i]);
        features[i] = {id, extractFeatures(m)};
        std::lock_guard lock(timed);
        corpus[i] = {id, profileMatrix(m, po)};
      } catch (const DataError& e) {
        fail(std::make_exception_ptr(DataError(files[i].string() + ": " + e.what())));
      } catch (...) {
        fail(std::current_exception());
      }
    }
  };
  if (o.jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < o.jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  const fs::path out = o.out;
  const fs::path feat = o.features.empty() ? sibling(out, "features.csv") : fs::path(o.features);
  writeFile(out, [&](std::ostream& s) { writeMeasurementsCsv(s, corpus); });
  writeFile(feat, [&](std::ostream& s) { writeFeaturesCsv(s, features); });

  int refused = 0;
  for (const auto& m : corpus)
    for (const auto& r : m.records) refused += r.refused ? 1 : 0;

  RunManifest manifest;
  manifest.command = "profile";
  manifest.config = {{"denseCols", po.dense_cols}, {"reps", po.reps},
                     {"warmup", po.warmup},        {"jobs", o.jobs},
                     {"verify", po.verify},        {"diaGuardFactor", po.conversion.dia_guard_factor},
                     {"bsrBlockSize", po.conversion.bsr_block_size}};
  manifest.seeds = {{"denseOperand", po.seed}};
  for (const auto& f : files) manifest.inputs.push_back(f.string());
  manifest.outputs = {out.string(), feat.string()};
  manifest.results = {{"matrices", corpus.size()}, {"rows", corpus.size() * kNumFormats},
                      {"refused", refused}};
  manifest.wall_seconds = clock.seconds();
  writeManifest(manifest, manifestPathFor(out));
  std::cout << "profiled " << corpus.size() << " matrices (" << corpus.size() * kNumFormats
            << " rows, " << refused << " refused)\n";
  return 0;
}

int runLabel(const LabelOptions& o) {
  Stopwatch clock;
  ObjectivePolicy policy{o.w, o.tie_epsilon};
  policy.validate();
  const fs::path mpath = o.measurements;
  const fs::path fpath = o.features.empty() ? sibling(mpath, "features.csv") : fs::path(o.features);
  const auto corpus = readMeasurementsCsv(mpath);
  const auto rows = readFeaturesCsv(fpath);
  const auto features = alignFeatures(corpus, rows);
  const auto ranges = computeGlobalRanges(corpus);
  const auto samples = labelSamples(corpus, features, policy);

  const fs::path out = o.out;
  writeFile(out, [&](std::ostream& s) { writeLabeledCsv(s, samples); });

  RunManifest manifest;
  manifest.command = "label";
  manifest.config = {{"w", policy.w}, {"tieEpsilon", policy.tie_epsilon},
                     {"normalization", "globalMinMax"}};
  manifest.inputs = {mpath.string(), fpath.string()};
  manifest.outputs = {out.string()};

  std::array<int, kNumFormats> counts{};
  for (const auto& s : samples)
    for (auto f : s.label.best) ++counts[static_cast<std::size_t>(formatCode(f))];
  ordered_json best;
  for (auto f : kAllFormats) best[std::string(formatName(f))] = counts[static_cast<std::size_t>(formatCode(f))];
  manifest.results = {{"w", policy.w},
                      {"tieEpsilon", policy.tie_epsilon},
                      {"globalRanges", rangesJson(ranges)},
                      {"samples", samples.size()},
                      {"bestCounts", best}};

  if (!o.w_sweep.empty()) {
    const auto weights = parseWeights(o.w_sweep);
    const fs::path hist = o.histogram.empty() ? sibling(out, "frequency.csv") : fs::path(o.histogram);
    const auto table = formatFrequencyHistogram(corpus, weights, policy.tie_epsilon);
    writeFile(hist, [&](std::ostream& s) { writeFrequencyCsv(s, table); });
    manifest.config["wSweep"] = weights;
    manifest.outputs.push_back(hist.string());
  }
  manifest.wall_seconds = clock.seconds();
  writeManifest(manifest, manifestPathFor(out));

  std::cout << "labeled " << samples.size() << " matrices at w=" << formatDouble(policy.w) << '\n';
  for (auto f : kAllFormats)
    std::cout << "  " << formatName(f) << ' ' << counts[static_cast<std::size_t>(formatCode(f))]
              << '\n';
  return 0;
}

int runTrain(const TrainOptions& o) {
  Stopwatch clock;
  o.hp.validate();
  if (!(o.test_fraction >= 0.0 && o.test_fraction < 1.0))
    throw ValidationError("--test-fraction must lie in [0, 1)");
  const auto ctx = loadLabeled(o.labeled);
  const auto split = splitTrainTest(ctx.samples.size(), o.test_fraction, o.split_seed);
  const std::span<const LabeledSample> all(ctx.samples);
  const auto train = pick(all, split.train);
  const auto test = pick(all, split.test);

  FormatModel model = trainKind(o.kind, train, o.hp, o.tree_depth);
  model.trained_weight = ctx.w;
  model.tie_epsilon = ctx.tie_epsilon;
  model.global_ranges = ctx.ranges;
  for (const auto& s : test) model.held_out.push_back(s.matrix_id);

  const fs::path out = o.out;
  ensureParent(out);
  saveModel(model, out);

  RunManifest manifest;
  manifest.command = "train";
  manifest.config = {{"kind", o.kind},
                     {"hyperParams", hyperJson(o.hp)},
                     {"treeDepth", o.tree_depth},
                     {"testFraction", o.test_fraction}};
  manifest.seeds = {{"split", o.split_seed}, {"model", o.hp.seed}};
  manifest.inputs = {o.labeled};
  manifest.outputs = {out.string()};
  manifest.results = {{"trainSamples", train.size()},
                      {"heldOutSamples", test.size()},
                      {"selectedFeatures", maskNames(model.selected)}};
  std::cout << "trained " << modelKindName(model.kind) << " on " << train.size() << " samples\n";
  std::cout << "selected features: " << featureList(model.selected) << '\n';
  if (!test.empty()) {
    const auto report = evaluateModel(model, test);
    manifest.results["heldOutTieAwareAccuracy"] = report.tie_aware_accuracy;
    std::cout << "held-out tie-aware accuracy: " << percent(report.tie_aware_accuracy) << " ("
              << test.size() << " samples)\n";
  }
  manifest.wall_seconds = clock.seconds();
  writeManifest(manifest, manifestPathFor(out));
  return 0;
}

int runEvaluate(const EvaluateOptions& o) {
  Stopwatch clock;
  if (o.on != "held-out" && o.on != "train" && o.on != "all")
    throw ValidationError("--on must be held-out, train or all");
  if (o.against_oracle && o.measurements.empty())
    throw ValidationError("--against-oracle needs --measurements");
  const FormatModel model = loadModel(fs::path(o.model));
  const auto ctx = loadLabeled(o.labeled);

  const std::set<std::string> held(model.held_out.begin(), model.held_out.end());
  std::vector<LabeledSample> eval, fit;
  for (const auto& s : ctx.samples) {
    const bool is_held = held.count(s.matrix_id) > 0;
    if (!is_held) fit.push_back(s);
    if (o.on == "all" || (o.on == "held-out" && (is_held || held.empty())) ||
        (o.on == "train" && !is_held))
      eval.push_back(s);
  }
  if (eval.empty()) throw DataError("no samples to evaluate");

  const auto report = evaluateModel(model, eval);
  std::cout << "samples: " << eval.size() << " (" << o.on << ")\n";
  std::cout << "tie-aware accuracy: " << percent(report.tie_aware_accuracy) << '\n';
  std::cout << "canonical accuracy: " << percent(report.canonical_accuracy) << '\n';

  RunManifest manifest;
  manifest.command = "evaluate";
  manifest.config = {{"on", o.on}, {"againstOracle", o.against_oracle}, {"baselines", o.baselines}};
  manifest.inputs = {o.model, o.labeled};
  manifest.results = {{"samples", eval.size()},
                      {"tieAwareAccuracy", report.tie_aware_accuracy},
                      {"canonicalAccuracy", report.canonical_accuracy}};

  if (o.baselines) {
    const auto tree = trainBaselineTree(fit);
    const auto knn = trainBaselineKnn(fit, 1);
    const auto tree_report = evaluateModel(tree, eval);
    const auto knn_report = evaluateModel(knn, eval);
    std::cout << "baseline decision tree: " << percent(tree_report.tie_aware_accuracy) << '\n';
    std::cout << "baseline 1-NN: " << percent(knn_report.tie_aware_accuracy) << '\n';
    manifest.results["baselines"] = {{"tree", tree_report.tie_aware_accuracy},
                                     {"knn", knn_report.tie_aware_accuracy}};
  }

  if (o.against_oracle) {
    const auto corpus = readMeasurementsCsv(o.measurements);
    std::vector<FormatMeasurements> records;
    std::vector<StorageFormat> choices;
    for (std::size_t i = 0; i < eval.size(); ++i) {
      const auto it = std::find_if(corpus.begin(), corpus.end(), [&](const MatrixMeasurements& m) {
        return m.matrix_id == eval[i].matrix_id;
      });
      if (it == corpus.end())
        throw DataError(o.measurements + " has no measurements for " + eval[i].matrix_id);
      records.push_back(it->records);
      choices.push_back(report.rows[i].predicted);
    }
    const auto cmp = compareAgainstOracle(records, choices);
    std::cout << "geomean runtime: predicted " << formatDouble(cmp.achieved_geomean)
              << " s, oracle " << formatDouble(cmp.oracle_geomean) << " s, COO "
              << formatDouble(cmp.coo_geomean) << " s\n";
    std::cout << "achieved/oracle performance ratio: " << formatDouble(cmp.ratio()) << '\n';
    std::cout << "speedup over COO: " << formatDouble(cmp.coo_geomean / cmp.achieved_geomean)
              << '\n';
    manifest.inputs.push_back(o.measurements);
    manifest.results["oracle"] = {{"achievedGeomean", cmp.achieved_geomean},
                                  {"oracleGeomean", cmp.oracle_geomean},
                                  {"cooGeomean", cmp.coo_geomean},
                                  {"ratio", cmp.ratio()}};
  }

  if (!o.report.empty()) {
    const fs::path out = o.report;
    writeFile(out, [&](std::ostream& s) { writeEvaluationCsv(s, report); });
    manifest.outputs = {out.string()};
    manifest.wall_seconds = clock.seconds();
    writeManifest(manifest, manifestPathFor(out));
  }
  return 0;
}

int runPredict(const PredictOptions& o) {
  const FormatModel model = loadModel(fs::path(o.model));
  const SparseMatrix m = readMatrixMarket(o.matrix);
  const auto features = extractFeatures(m);
  if (o.show_features)
    for (int i = 0; i < kNumFeatures; ++i)
      std::cout << featureName(i) << ' ' << formatDouble(features[i]) << '\n';
  std::cout << formatName(predictFormat(model, features)) << '\n';
  return 0;
}

int runDemo(const DemoOptions& o) {
  Stopwatch clock;
  if (o.adjacency.empty() == o.generate.empty())
    throw ValidationError("demo-gcn needs exactly one of --adjacency and --generate");
  if (o.feature_dim < 1) throw ValidationError("--feature-dim must be >= 1");

  std::vector<SelectionStrategy> strategies;
  for (auto name : splitFields(o.strategies)) strategies.push_back(parseStrategy(name));
  if (strategies.empty()) throw ValidationError("--strategies is empty");

  SparseMatrix raw = CooMatrix(0, 0, {}, {}, {});
  if (!o.adjacency.empty()) {
    raw = readMatrixMarket(o.adjacency);
  } else {
    const auto fields = splitFields(o.generate);
    if (fields.size() != 2) throw ValidationError("--generate expects n,density");
    const double n = parseDouble(fields[0], "node count in --generate");
    const double density = parseDouble(fields[1], "density in --generate");
    if (!(n >= 1.0) || n != std::floor(n)) throw ValidationError("--generate: n must be a positive integer");
    if (!(density > 0.0 && density <= 1.0)) throw ValidationError("--generate: density must lie in (0, 1]");
    GenSpec spec;
    spec.size_min = spec.size_max = static_cast<Index>(n);
    spec.sparsity_min = spec.sparsity_max = density;
    spec.total_matrices = 1;
    spec.seed = o.seed;
    raw = generateMatrix(spec, 0).matrix;
  }

  GcnConfig cfg;
  cfg.layers = o.layers;
  cfg.hidden_dim = o.hidden;
  cfg.epochs = o.epochs;
  cfg.seed = o.seed;
  cfg.adjacency = o.normalize ? SparseMatrix(normalizeAdjacency(raw)) : raw;
  for (const auto& path : o.layer_operands) {
    const SparseMatrix m = readMatrixMarket(path);
    cfg.layer_adjacency.push_back(o.normalize ? SparseMatrix(normalizeAdjacency(m)) : m);
  }
  cfg.oracle_profile.reps = o.oracle_reps;
  if (o.oracle_reps < 3) throw ValidationError("--oracle-reps must be >= 3");
  const bool adaptive = std::count(strategies.begin(), strategies.end(), SelectionStrategy::kAdaptive) > 0;
  if (adaptive) {
    if (o.model.empty()) throw ValidationError("the adaptive strategy needs --model");
    cfg.model = std::make_shared<FormatModel>(loadModel(fs::path(o.model)));
  }
  Rng rng(o.seed ^ 0xFEA7ULL);
  cfg.features = DenseMatrix(raw.rows(), o.feature_dim);
  for (auto& v : cfg.features.data()) v = rng.uniform(-1.0, 1.0);
  cfg.validate();

  // Numerical agreement across strategies on one fresh pass each.
  double max_diff = 0.0;
  DenseMatrix reference;
  for (auto s : strategies) {
    GcnConfig c = cfg;
    c.strategy = s;
    auto out = gcnForward(c).output;
    if (reference.rows() == 0) reference = std::move(out);
    else max_diff = std::max(max_diff, maxAbsDiff(out, reference));
  }

  auto report = runStrategies(cfg, strategies);
  if (o.power > 0) report.power_densities = powerDensification(raw, o.power);

  if (!o.out.empty()) {
    const fs::path out = o.out;
    fs::path csv = o.csv.empty() ? fs::path(out).replace_extension(".csv") : fs::path(o.csv);
    if (csv == out) csv += ".csv";
    writeFile(out, [&](std::ostream& s) { writeEpochJson(s, report); });
    writeFile(csv, [&](std::ostream& s) { writeEpochCsv(s, report); });
    RunManifest manifest;
    manifest.command = "demo-gcn";
    manifest.config = {{"layers", o.layers},       {"hiddenDim", o.hidden},
                       {"featureDim", o.feature_dim}, {"epochs", o.epochs},
                       {"strategies", o.strategies}, {"normalize", o.normalize},
                       {"power", o.power},           {"oracleReps", o.oracle_reps},
                       {"generate", o.generate}};
    manifest.seeds = {{"demo", o.seed}};
    if (!o.adjacency.empty()) manifest.inputs.push_back(o.adjacency);
    for (const auto& p : o.layer_operands) manifest.inputs.push_back(p);
    if (adaptive) manifest.inputs.push_back(o.model);
    manifest.outputs = {out.string(), csv.string()};
    manifest.results = {{"maxOutputDifference", max_diff}};
    manifest.wall_seconds = clock.seconds();
    writeManifest(manifest, manifestPathFor(out));
  }

  std::cout << "graph " << raw.shapeString() << ", " << o.layers << " layers, " << o.epochs
            << " epochs\n";
  for (const auto& s : report.strategies) {
    std::cout << strategyName(s.strategy) << ": geomean epoch " << formatDouble(s.geomean_epoch_seconds)
              << " s, formats";
    for (auto f : s.formats.back()) std::cout << ' ' << formatName(f);
    if (s.strategy == SelectionStrategy::kOracle)
      std::cout << " (profiling " << formatDouble(s.oracle_profile_seconds) << " s)";
    std::cout << '\n';
  }
  std::cout << "density per layer:";
  for (double d : report.strategies.front().trace.density.front()) std::cout << ' ' << formatDouble(d);
  std::cout << '\n';
  if (!report.power_densities.empty()) {
    std::cout << "structural power densities:";
    for (double d : report.power_densities) std::cout << ' ' << formatDouble(d);
    std::cout << '\n';
  }
  std::cout << "max output difference across strategies: " << formatDouble(max_diff) << '\n';
  return 0;
}

int runImportance(const ImportanceOptions& o) {
  Stopwatch clock;
  o.hp.validate();
  if (!(o.validation_fraction > 0.0 && o.validation_fraction < 1.0))
    throw ValidationError("--validation-fraction must lie in (0, 1)");
  const auto ctx = loadLabeled(o.labeled);
  const auto split = splitTrainTest(ctx.samples.size(), o.validation_fraction, o.split_seed);
  const std::span<const LabeledSample> all(ctx.samples);
  const auto train = pick(all, split.train);
  const auto validation = pick(all, split.test);
  if (validation.empty()) throw DataError("validation split is empty");
  const auto report = leaveOneOutImportance(train, validation, o.hp);

  const fs::path out = o.out;
  writeFile(out, [&](std::ostream& s) { writeImportanceCsv(s, report); });
  RunManifest manifest;
  manifest.command = "importance";
  manifest.config = {{"hyperParams", hyperJson(o.hp)}, {"validationFraction", o.validation_fraction}};
  manifest.seeds = {{"split", o.split_seed}, {"model", o.hp.seed}};
  manifest.inputs = {o.labeled};
  manifest.outputs = {out.string()};
  manifest.results = {{"baselineAccuracy", report.baseline_accuracy}};
  manifest.wall_seconds = clock.seconds();
  writeManifest(manifest, manifestPathFor(out));

  std::cout << "baseline tie-aware accuracy: " << percent(report.baseline_accuracy) << '\n';
  auto rows = report.rows;
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ImportanceRow& a, const ImportanceRow& b) { return a.percent > b.percent; });
  for (const auto& r : rows)
    std::cout << "  " << featureName(r.feature) << ' ' << formatDouble(r.percent) << "%\n";
  return 0;
}

}  // namespace spsel::cli
