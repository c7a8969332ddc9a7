// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and a
// copy of the report to acceptance_report.txt in the working directory.
//
// Criteria 5-8 rest on wall-clock measurements of this host and are reported
// without affecting the exit status; the others gate it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "labeling_oracle.hpp"
#include "reference_features.hpp"
#include "spsel/dataset.hpp"
#include "spsel/error.hpp"
#include "spsel/evaluation.hpp"
#include "spsel/features.hpp"
#include "spsel/gcn.hpp"
#include "spsel/generator.hpp"
#include "spsel/matrix_market.hpp"
#include "spsel/model.hpp"
#include "spsel/selector.hpp"
#include "spsel/spmm.hpp"
#include "spsel/timing.hpp"
#include "test_support.hpp"

#ifndef SPSEL_CLI_PATH
#error "SPSEL_CLI_PATH must name the spsel executable"
#endif

namespace fs = std::filesystem;
using namespace spsel;
using spsel::testing::randomCase;
using spsel::testing::randomDense;
using spsel::testing::randomSparse;
using spsel::testing::unguarded;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double secondsSince(Clock::time_point t0) { return secondsBetween(t0, Clock::now()); }

std::string fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

std::string quote(const std::string& s) { return "'" + s + "'"; }

// Runs the CLI inside `dir`, appending its output to cli.log there.
void cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd " + quote(dir.string()) + " && " + quote(SPSEL_CLI_PATH) + " " +
                          args + " >> cli.log 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc != 0) throw Error("command failed (" + std::to_string(rc) + "): spsel " + args);
}

// ---------------------------------------------------------------------------

Verdict kernelCorrectness() {
  const auto t0 = Clock::now();
  Rng rng(101);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const SparseMatrix a = randomCase(rng, 128);
    const auto width = static_cast<Index>(1 + rng.below(128));
    const DenseMatrix x = randomDense(rng, a.cols(), width);
    const DenseMatrix ref = denseOracle(a, x);
    for (auto f : kAllFormats) {
      const SparseMatrix m = convert(a, f, unguarded());
      worst = std::max(worst, maxAbsDiff(spmm(m, x).product, ref));
      worst = std::max(worst, maxAbsDiff(spmmSerial(m, x), ref));
    }
  }
  const double t = secondsSince(t0);
  return {worst <= 1e-9 && t < 60.0, "max |diff| " + fmt(worst) + ", " + fmt(t, 3) + " s"};
}

Verdict conversionClosure() {
  const auto t0 = Clock::now();
  Rng rng(202);
  int bad = 0;
  std::set<std::pair<int, int>> pairs;
  for (int i = 0; i < 1000; ++i) {
    const SparseMatrix a = randomCase(rng, 96);
    const auto from = kAllFormats[static_cast<std::size_t>(i % kNumFormats)];
    const auto to = kAllFormats[static_cast<std::size_t>((i / kNumFormats) % kNumFormats)];
    pairs.insert({formatCode(from), formatCode(to)});
    const auto opts = unguarded(static_cast<Index>(1 + rng.below(4)));
    const SparseMatrix back = convert(convert(a, from, opts), to, opts);
    if (toTriplets(back) != toTriplets(a) || back.rows() != a.rows() || back.cols() != a.cols())
      ++bad;
  }
  const double t = secondsSince(t0);
  return {bad == 0 && pairs.size() == 49 && t < 60.0,
          std::to_string(bad) + " mismatches, " + std::to_string(pairs.size()) + " pairs, " +
              fmt(t, 3) + " s"};
}

Verdict featureFidelity() {
  Rng rng(303);
  int bad = 0;
  for (int i = 0; i < 200; ++i) {
    const SparseMatrix a = randomCase(rng, 128);
    const FeatureVector ref = spsel::testing::naiveFeatures(a);
    for (auto f : kAllFormats)
      if (!spsel::testing::featuresAgree(extractFeatures(convert(a, f, unguarded())), ref)) ++bad;
  }

  std::vector<Triplet> eye;
  for (Index i = 0; i < 4; ++i) eye.push_back({i, i, 1.0});
  const FeatureVector id = extractFeatures(fromTriplets(4, 4, eye));
  FeatureVector want_id;
  want_id[Feature::kNumRow] = 4;
  want_id[Feature::kNumCol] = 4;
  want_id[Feature::kNnz] = 4;
  want_id[Feature::kNumDiags] = 1;
  for (auto f : {Feature::kAverRd, Feature::kMaxRd, Feature::kMinRd, Feature::kAverCd,
                 Feature::kMaxCd, Feature::kMinCd, Feature::kErDia, Feature::kErCd})
    want_id[f] = 1.0;
  want_id[Feature::kDensity] = 0.25;
  const FeatureVector zero = extractFeatures(CooMatrix(3, 3, {}, {}, {}));
  FeatureVector want_zero;
  want_zero[Feature::kNumRow] = 3;
  want_zero[Feature::kNumCol] = 3;
  bool trivial = true;
  for (int i = 0; i < kNumFeatures; ++i) {
    trivial = trivial && id[i] == want_id[i];
    trivial = trivial && zero[i] == want_zero[i];
  }
  return {bad == 0 && trivial, std::to_string(bad) + " of 1400 extractions differ, trivial cases " +
                                   (trivial ? "match" : "differ")};
}

int checkLabelLaw(const std::vector<MatrixMeasurements>& corpus) {
  using spsel::testing::Criterion;
  int bad = 0;
  const std::vector<FeatureVector> features(corpus.size());
  for (double w : {1.0, 0.0}) {
    const auto samples = labelSamples(corpus, features, {w, 1e-4});
    const auto want =
        spsel::testing::rawArgmins(corpus, w == 1.0 ? Criterion::kRuntime : Criterion::kMemory, 1e-4);
    for (std::size_t i = 0; i < corpus.size(); ++i)
      if (samples[i].label.best != want[i] || samples[i].label.canonical != want[i].front()) ++bad;
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Desk-scale pipeline through the CLI, shared by criteria 4-8 and 10.

struct Pipeline {
  fs::path dir;
  double profile_seconds = 0.0;
  double train_seconds = 0.0;
  std::vector<MatrixMeasurements> measurements;
  std::vector<LabeledSample> labeled;
  std::vector<LabeledSample> held_out;
  std::vector<FormatMeasurements> held_out_records;
};

Pipeline runPipeline(const fs::path& dir) {
  Pipeline p;
  p.dir = dir;
  cli(dir, "gen --spec desk-scale --out corpus");
  auto t0 = Clock::now();
  cli(dir, "profile --matrices corpus --out measurements.csv --reps 5 --dense-cols 32 --seed 7");
  p.profile_seconds = secondsSince(t0);
  cli(dir, "label --measurements measurements.csv --out labeled.csv --w 1");
  t0 = Clock::now();
  cli(dir, "train --labeled labeled.csv --out gbt.json --model gbt --split-seed 42");
  p.train_seconds = secondsSince(t0);
  cli(dir, "train --labeled labeled.csv --out tree.json --model tree --split-seed 42");
  cli(dir, "train --labeled labeled.csv --out knn.json --model knn --split-seed 42");
  cli(dir, "predict --model gbt.json --matrix corpus/m0000.mtx > predict.txt");

  p.measurements = readMeasurementsCsv(dir / "measurements.csv");
  p.labeled = readLabeledCsv(dir / "labeled.csv");
  const auto split = splitTrainTest(p.labeled.size(), 0.2, 42);
  p.held_out = pick<LabeledSample>(p.labeled, split.test);
  for (const auto& s : p.held_out)
    for (const auto& m : p.measurements)
      if (m.matrix_id == s.matrix_id) p.held_out_records.push_back(m.records);
  return p;
}

bool sameIds(const FormatModel& model, const std::vector<LabeledSample>& held_out) {
  std::vector<std::string> ids;
  for (const auto& s : held_out) ids.push_back(s.matrix_id);
  auto stored = model.held_out;
  std::sort(ids.begin(), ids.end());
  std::sort(stored.begin(), stored.end());
  return ids == stored;
}

Verdict modelQuality(const Pipeline& p) {
  const FormatModel gbt = loadModel(p.dir / "gbt.json");
  const auto report = evaluateModel(gbt, p.held_out);
  const bool split_ok = sameIds(gbt, p.held_out);
  const bool pass = split_ok && report.tie_aware_accuracy >= 0.80 && p.profile_seconds <= 7200 &&
                    p.train_seconds <= 300;
  return {pass, "held-out tie-aware accuracy " + fmt(100 * report.tie_aware_accuracy, 3) + "% on " +
                    std::to_string(p.held_out.size()) + " of " + std::to_string(p.labeled.size()) +
                    " matrices, profiling " + fmt(p.profile_seconds, 3) + " s, training " +
                    fmt(p.train_seconds, 3) + " s" + (split_ok ? "" : ", split mismatch")};
}

Verdict oracleRelative(const Pipeline& p) {
  const FormatModel gbt = loadModel(p.dir / "gbt.json");
  std::vector<StorageFormat> choices;
  for (const auto& s : p.held_out) choices.push_back(predictFormat(gbt, s.features));
  const auto cmp = compareAgainstOracle(p.held_out_records, choices);
  return {cmp.ratio() >= 0.85, "oracle/adaptive geomean ratio " + fmt(cmp.ratio()) +
                                   ", speedup over COO " + fmt(cmp.coo_geomean / cmp.achieved_geomean)};
}

// Input in COO as the generator emits it; one warm-up, then the median over
// 7 runs of feature extraction plus prediction against the median kernel time
// of the chosen format, for three matrices. The bound applies to each.
Verdict overheadBound(const Pipeline& p) {
  const FormatModel gbt = loadModel(p.dir / "gbt.json");
  double worst = 0.0;
  std::string formats;
  for (std::uint64_t seed : {1, 2, 3}) {
    Rng rng(900 + seed);
    const SparseMatrix a = randomSparse(rng, 4000, 4000, 0.01);
    const DenseMatrix x = randomDense(rng, 4000, 32);
    std::vector<double> select, kernel;
    StorageFormat chosen = StorageFormat::kCoo;
    for (int r = 0; r < 8; ++r) {
      const auto res = adaptiveSpmm(gbt, a, x);
      doNotOptimize(res.product.data().data());
      if (r == 0) continue;
      select.push_back(res.overhead.feature_time + res.overhead.predict_time);
      kernel.push_back(res.overhead.kernel_time);
      chosen = res.selection.chosen;
    }
    worst = std::max(worst, median(select) / median(kernel));
    formats += std::string(formats.empty() ? "" : ",") + std::string(formatName(chosen));
  }
  return {worst <= 0.10, "worst (features+predict)/kernel " + fmt(100 * worst, 3) +
                             "% at 4000x4000, 1%, d=32, chosen " + formats};
}

Verdict baselineOrdering(const Pipeline& p) {
  const auto gbt = evaluateModel(loadModel(p.dir / "gbt.json"), p.held_out);
  const auto tree = evaluateModel(loadModel(p.dir / "tree.json"), p.held_out);
  const auto knn = evaluateModel(loadModel(p.dir / "knn.json"), p.held_out);
  const bool pass = gbt.tie_aware_accuracy >= tree.tie_aware_accuracy - 0.02 &&
                    knn.rows.size() == p.held_out.size();
  return {pass, "gbt " + fmt(100 * gbt.tie_aware_accuracy, 3) + "%, tree " +
                    fmt(100 * tree.tie_aware_accuracy, 3) + "%, 1-NN " +
                    fmt(100 * knn.tie_aware_accuracy, 3) + "%"};
}

Verdict labelingLaw(const Pipeline& p) {
  Rng rng(404);
  int bad = checkLabelLaw(p.measurements);
  for (int i = 0; i < 20; ++i) bad += checkLabelLaw(spsel::testing::randomCorpus(rng, 30));
  // The CLI labels must agree with the library on the same file.
  const std::vector<FeatureVector> features(p.measurements.size());
  const auto lib = labelSamples(p.measurements, features, {1.0, 1e-4});
  for (std::size_t i = 0; i < lib.size(); ++i)
    if (lib[i].label.best != p.labeled[i].label.best) ++bad;
  return {bad == 0, std::to_string(bad) + " label sets differ (desk measurements + 20 random files)"};
}

// ---------------------------------------------------------------------------

SparseMatrix banded(Index n, Index half_width) {
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i)
    for (Index j = std::max<Index>(0, i - half_width); j <= std::min(n - 1, i + half_width); ++j)
      t.push_back({i, j, 1.0});
  return normalizeAdjacency(fromTriplets(n, n, std::move(t)));
}

SparseMatrix randomGraph(Rng& rng, Index n, double density, bool self_loops) {
  std::vector<Triplet> t;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      if ((self_loops && i == j) || rng.uniform() < density) t.push_back({i, j, 1.0});
  return fromTriplets(n, n, std::move(t));
}

Verdict demoSoundness(const Pipeline& p) {
  auto model = std::make_shared<FormatModel>(loadModel(p.dir / "gbt.json"));
  Rng rng(505);
  double worst = 0.0;
  int trace_bad = 0;
  int monotone_bad = 0;
  const std::vector<SelectionStrategy> all = {SelectionStrategy::kStaticCoo,
                                              SelectionStrategy::kAdaptive,
                                              SelectionStrategy::kOracle};
  for (int g = 0; g < 4; ++g) {
    const Index n = 150 + 100 * g;
    GcnConfig cfg;
    cfg.adjacency = normalizeAdjacency(randomGraph(rng, n, 0.02 + 0.03 * g, false));
    if (g % 2 == 1) cfg.layer_adjacency = {cfg.adjacency, banded(n, 2)};
    cfg.features = randomDense(rng, n, 24);
    cfg.epochs = 3;
    cfg.model = model;
    cfg.seed = 20 + static_cast<std::uint64_t>(g);

    DenseMatrix reference;
    for (auto s : all) {
      GcnConfig c = cfg;
      c.strategy = s;
      const auto out = gcnForward(c).output;
      if (reference.rows() == 0) reference = out;
      else worst = std::max(worst, maxAbsDiff(out, reference));
    }
    const auto report = runStrategies(cfg, all);
    for (const auto& s : report.strategies)
      for (const auto& epoch : s.trace.density)
        for (std::size_t l = 0; l < epoch.size(); ++l) {
          const SparseMatrix& op = cfg.layer_adjacency.empty() ? cfg.adjacency
                                                               : cfg.layer_adjacency[l];
          if (epoch[l] != extractFeatures(op)[Feature::kDensity]) ++trace_bad;
        }

    const auto powers = powerDensification(randomGraph(rng, n, 0.004 * (g + 1), true), 5);
    for (std::size_t k = 1; k < powers.size(); ++k)
      if (powers[k] < powers[k - 1]) ++monotone_bad;
  }
  return {worst <= 1e-8 && trace_bad == 0 && monotone_bad == 0,
          "max strategy difference " + fmt(worst) + ", " + std::to_string(trace_bad) +
              " trace mismatches, " + std::to_string(monotone_bad) + " power decreases"};
}

// ---------------------------------------------------------------------------

std::string readBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Every artifact under `dir` except the log, with manifest timing removed.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dir).string();
    if (rel == "cli.log") continue;
    std::string bytes = readBytes(e.path());
    if (rel.ends_with("manifest.json")) {
      auto j = nlohmann::ordered_json::parse(bytes);
      j.erase("timing");
      bytes = j.dump(1);
    }
    files[rel] = std::move(bytes);
  }
  return files;
}

Verdict determinism(const Pipeline& p) {
  const auto first = snapshot(p.dir);
  cli(p.dir, "gen --spec desk-scale --out corpus");
  cli(p.dir, "label --measurements measurements.csv --out labeled.csv --w 1");
  cli(p.dir, "train --labeled labeled.csv --out gbt.json --model gbt --split-seed 42");
  cli(p.dir, "train --labeled labeled.csv --out tree.json --model tree --split-seed 42");
  cli(p.dir, "train --labeled labeled.csv --out knn.json --model knn --split-seed 42");
  cli(p.dir, "predict --model gbt.json --matrix corpus/m0000.mtx > predict.txt");
  const auto second = snapshot(p.dir);
  int differ = 0;
  for (const auto& [name, bytes] : first) {
    auto it = second.find(name);
    if (it == second.end() || it->second != bytes) {
      std::cout << "  differs: " << name << '\n';
      ++differ;
    }
  }
  differ += static_cast<int>(second.size() > first.size());
  return {differ == 0, std::to_string(first.size()) + " artifacts compared, " +
                           std::to_string(differ) + " differ"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    bool gating;
    std::function<Verdict()> run;
  };

  const fs::path work = fs::temp_directory_path() / "spsel-acceptance";
  fs::remove_all(work);
  fs::create_directories(work);
  std::unique_ptr<Pipeline> pipeline;
  auto desk = [&]() -> const Pipeline& {
    if (!pipeline) pipeline = std::make_unique<Pipeline>(runPipeline(work));
    return *pipeline;
  };

  const std::vector<Criterion> criteria = {
      {1, "kernel correctness", true, kernelCorrectness},
      {2, "conversion closure", true, conversionClosure},
      {3, "feature fidelity", true, featureFidelity},
      {4, "labeling law", true, [&] { return labelingLaw(desk()); }},
      {5, "model quality", false, [&] { return modelQuality(desk()); }},
      {6, "oracle-relative performance", false, [&] { return oracleRelative(desk()); }},
      {7, "overhead bound", false, [&] { return overheadBound(desk()); }},
      {8, "baseline ordering", false, [&] { return baselineOrdering(desk()); }},
      {9, "demo soundness", true, [&] { return demoSoundness(desk()); }},
      {10, "determinism", true, [&] { return determinism(desk()); }},
  };

  std::ofstream report("acceptance_report.txt");
  int gating_failures = 0;
  int failures = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    std::ostringstream line;
    line << (v.pass ? "PASS" : "FAIL") << "  " << c.id << ". " << c.name << ": " << v.detail
         << (c.gating ? "" : " [measured, non-gating]");
    std::cout << line.str() << std::endl;
    report << line.str() << '\n';
    if (!v.pass) {
      ++failures;
      if (c.gating) ++gating_failures;
    }
  }
  std::cout << criteria.size() - static_cast<std::size_t>(failures) << "/" << criteria.size()
            << " criteria passed\n";
  return gating_failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
