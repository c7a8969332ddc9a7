#include "spsel/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>

#include <json.hpp>

#include "spsel/error.hpp"
#include "spsel/io.hpp"

namespace spsel {
namespace {

using Json = nlohmann::ordered_json;

std::vector<StorageFormat> labelSpaceOf(std::span<const LabeledSample> data) {
  std::set<StorageFormat> present;
  for (const auto& s : data) present.insert(s.label.canonical);
  return {present.begin(), present.end()};
}

void checkTrainable(std::span<const LabeledSample> data) {
  if (data.size() < 10)
    throw DataError("training needs at least 10 samples, got " + std::to_string(data.size()));
  if (labelSpaceOf(data).size() < 2)
    throw DataError("degenerate label space: every sample is labeled " +
                    std::string(formatName(data.front().label.canonical)));
}

std::vector<FeatureVector> rawFeatures(std::span<const LabeledSample> data) {
  std::vector<FeatureVector> out;
  out.reserve(data.size());
  for (const auto& s : data) out.push_back(s.features);
  return out;
}

// Normalizes, zeroes unselected features, then the model's own prediction.
FeatureVector prepare(const FormatModel& model, const FeatureVector& raw) {
  auto x = model.scaler.apply(raw);
  for (int f = 0; f < kNumFeatures; ++f)
    if (!model.selected[static_cast<std::size_t>(f)]) x[f] = 0.0;
  return x;
}

std::vector<int> classIndices(std::span<const LabeledSample> data,
                              const std::vector<StorageFormat>& space) {
  std::vector<int> out;
  out.reserve(data.size());
  for (const auto& s : data)
    out.push_back(static_cast<int>(std::lower_bound(space.begin(), space.end(), s.label.canonical) -
                                   space.begin()));
  return out;
}

std::vector<int> featureList(const FeatureMask& mask) {
  std::vector<int> out;
  for (int f = 0; f < kNumFeatures; ++f)
    if (mask[static_cast<std::size_t>(f)]) out.push_back(f);
  return out;
}

// Softmax boosting on already-normalized rows.
std::vector<std::vector<RegressionTree>> boost(const SortedColumns& data,
                                               std::span<const FeatureVector> rows,
                                               const std::vector<int>& labels, int classes,
                                               const GbtHyperParams& hp,
                                               const FeatureMask& mask) {
  const int n = data.numSamples();
  const auto k_classes = static_cast<std::size_t>(classes);
  const auto features = featureList(mask);
  const double lambda = hp.lambda;
  const double eta = hp.learning_rate;
  const GrowOptions grow{hp.max_depth, hp.min_leaf_samples, hp.min_split_gain};

  auto score = [lambda](std::span<const double> s) { return s[0] * s[0] / (s[1] + lambda); };
  const GainFn gain = [score](std::span<const double> l, std::span<const double> r,
                              std::span<const double> p, int, int) {
    return 0.5 * (score(l) + score(r) - score(p));
  };
  const LeafFn leaf = [lambda, eta](std::span<const double> s, int) {
    return -eta * s[0] / (s[1] + lambda);
  };

  std::vector<std::vector<RegressionTree>> trees(k_classes);
  std::vector<double> margin(static_cast<std::size_t>(n) * k_classes, 0.0);
  std::vector<double> prob(margin.size());
  std::vector<double> stats(static_cast<std::size_t>(n) * 2);
  for (int round = 0; round < hp.rounds; ++round) {
    for (int i = 0; i < n; ++i) {
      const double* m = margin.data() + static_cast<std::size_t>(i) * k_classes;
      double* p = prob.data() + static_cast<std::size_t>(i) * k_classes;
      const double top = *std::max_element(m, m + classes);
      double total = 0.0;
      for (std::size_t k = 0; k < k_classes; ++k) total += p[k] = std::exp(m[k] - top);
      for (std::size_t k = 0; k < k_classes; ++k) p[k] /= total;
    }
    for (std::size_t k = 0; k < k_classes; ++k) {
      for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double p = prob[ui * k_classes + k];
        const double y = labels[ui] == static_cast<int>(k) ? 1.0 : 0.0;
        stats[ui * 2] = p - y;
        stats[ui * 2 + 1] = std::max(p * (1.0 - p), 1e-16);
      }
      trees[k].push_back(growTree(data, stats, 2, features, grow, gain, leaf));
    }
    for (std::size_t k = 0; k < k_classes; ++k) {
      const auto& tree = trees[k].back();
      for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        margin[ui * k_classes + k] += tree.predict(rows[ui]);
      }
    }
  }
  return trees;
}

}  // namespace

std::string_view modelKindName(ModelKind k) {
  switch (k) {
    case ModelKind::kGbt: return "gbt";
    case ModelKind::kTree: return "tree";
    case ModelKind::kKnn: return "knn";
  }
  return "gbt";
}

void GbtHyperParams::validate() const {
  if (rounds < 1) throw ValidationError("rounds must be >= 1");
  if (max_depth < 1) throw ValidationError("maxDepth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0))
    throw ValidationError("learningRate must lie in (0, 1]");
  if (min_leaf_samples < 1) throw ValidationError("minLeafSamples must be >= 1");
  if (!(lambda >= 0.0)) throw ValidationError("lambda must be >= 0");
}

FormatModel trainGbt(std::span<const LabeledSample> data, const GbtHyperParams& hp,
                     const FeatureMask& allowed) {
  hp.validate();
  checkTrainable(data);
  FormatModel model;
  model.kind = ModelKind::kGbt;
  model.hyper = hp;
  model.label_space = labelSpaceOf(data);
  const auto raw = rawFeatures(data);
  model.scaler = fitScaler(raw);
  std::vector<FeatureVector> rows;
  rows.reserve(raw.size());
  for (const auto& v : raw) rows.push_back(model.scaler.apply(v));
  const SortedColumns columns(std::span<const FeatureVector>(rows), kNumFeatures);
  const auto labels = classIndices(data, model.label_space);
  const int classes = static_cast<int>(model.label_space.size());

  model.trees = boost(columns, rows, labels, classes, hp, allowed);
  model.pass1_scores = featureScores(model);
  const auto chosen = selectFeatures(model.pass1_scores);
  for (int f = 0; f < kNumFeatures; ++f) {
    const auto uf = static_cast<std::size_t>(f);
    model.selected[uf] = chosen[uf] && allowed[uf];
  }
  model.trees = boost(columns, rows, labels, classes, hp, model.selected);
  return model;
}

FeatureScores featureScores(const FormatModel& model) {
  FeatureScores scores{};
  for (const auto& per_class : model.trees)
    for (const auto& tree : per_class)
      for (const auto& node : tree.nodes())
        if (!node.isLeaf()) ++scores[static_cast<std::size_t>(node.feature)];
  return scores;
}

FeatureMask selectFeatures(const FeatureScores& scores) {
  const std::int64_t total = std::accumulate(scores.begin(), scores.end(), std::int64_t{0});
  if (total == 0) return allFeatures();
  std::array<int, kNumFeatures> order;
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
  });
  FeatureMask mask{};
  std::int64_t prefix = 0;
  for (int f : order) {
    mask[static_cast<std::size_t>(f)] = true;
    prefix += scores[static_cast<std::size_t>(f)];
    if (20 * prefix >= 19 * total) break;  // prefix >= 0.95 * total, exactly
  }
  return mask;
}

FormatModel trainBaselineTree(std::span<const LabeledSample> data, int max_depth) {
  checkTrainable(data);
  if (max_depth < 1 || max_depth > 8) throw ValidationError("baseline tree depth must be 1..8");
  FormatModel model;
  model.kind = ModelKind::kTree;
  model.hyper.max_depth = max_depth;
  model.hyper.rounds = 1;
  model.label_space = labelSpaceOf(data);
  const auto raw = rawFeatures(data);
  model.scaler = fitScaler(raw);
  std::vector<FeatureVector> rows;
  for (const auto& v : raw) rows.push_back(model.scaler.apply(v));
  const SortedColumns columns(std::span<const FeatureVector>(rows), kNumFeatures);
  const auto labels = classIndices(data, model.label_space);
  const auto classes = model.label_space.size();

  std::vector<double> onehot(labels.size() * classes, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i)
    onehot[i * classes + static_cast<std::size_t>(labels[i])] = 1.0;

  // Weighted Gini decrease: sum c^2/n over children minus the parent's.
  auto purity = [](std::span<const double> c, int n) {
    double s = 0.0;
    for (double v : c) s += v * v;
    return n > 0 ? s / n : 0.0;
  };
  const GainFn gain = [purity](std::span<const double> l, std::span<const double> r,
                               std::span<const double> p, int nl, int nr) {
    return purity(l, nl) + purity(r, nr) - purity(p, nl + nr);
  };
  const LeafFn leaf = [](std::span<const double> c, int) {
    return static_cast<double>(std::max_element(c.begin(), c.end()) - c.begin());
  };
  const auto features = featureList(allFeatures());
  model.trees = {{growTree(columns, onehot, static_cast<int>(classes), features,
                           {max_depth, 1, 1e-9}, gain, leaf)}};
  return model;
}

FormatModel trainBaselineKnn(std::span<const LabeledSample> data, int k) {
  checkTrainable(data);
  if (k != 1) throw ValidationError("only k = 1 is supported");
  FormatModel model;
  model.kind = ModelKind::kKnn;
  model.label_space = labelSpaceOf(data);
  model.scaler = fitScaler(rawFeatures(data));
  model.point_labels = classIndices(data, model.label_space);
  for (const auto& s : data) model.points.push_back(model.scaler.apply(s.features));
  return model;
}

StorageFormat predictFormat(const FormatModel& model, const FeatureVector& raw) {
  const auto x = prepare(model, raw);
  int cls = 0;
  switch (model.kind) {
    case ModelKind::kGbt: {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < model.trees.size(); ++k) {
        double s = 0.0;
        for (const auto& tree : model.trees[k]) s += tree.predict(x);
        if (s > best) {
          best = s;
          cls = static_cast<int>(k);
        }
      }
      break;
    }
    case ModelKind::kTree:
      cls = static_cast<int>(model.trees.at(0).at(0).predict(x));
      break;
    case ModelKind::kKnn: {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t p = 0; p < model.points.size(); ++p) {
        double d = 0.0;
        for (int f = 0; f < kNumFeatures; ++f) {
          const double diff = model.points[p][f] - x[f];
          d += diff * diff;
        }
        if (d < best) {
          best = d;
          cls = model.point_labels[p];
        }
      }
      break;
    }
  }
  return model.label_space.at(static_cast<std::size_t>(cls));
}

// --- persistence -------------------------------------------------------------

namespace {

Json treeToJson(const RegressionTree& tree) {
  Json nodes = Json::array();
  for (const auto& n : tree.nodes())
    nodes.push_back(Json::array({n.feature, n.threshold, n.left, n.right, n.value}));
  return nodes;
}

RegressionTree treeFromJson(const Json& j) {
  std::vector<TreeNode> nodes;
  for (const auto& n : j) {
    if (!n.is_array() || n.size() != 5) throw SchemaError("tree node must have 5 entries");
    nodes.push_back({n[0].get<int>(), n[1].get<double>(), n[2].get<int>(), n[3].get<int>(),
                     n[4].get<double>()});
  }
  const auto size = static_cast<int>(nodes.size());
  if (size == 0) throw SchemaError("empty tree");
  for (const auto& n : nodes) {
    if (n.isLeaf()) continue;
    if (n.feature >= kNumFeatures || n.left <= 0 || n.right <= 0 || n.left >= size ||
        n.right >= size)
      throw SchemaError("tree node refers outside the tree");
  }
  return RegressionTree(std::move(nodes));
}

template <typename Array>
Json arrayToJson(const Array& a) {
  return Json(std::vector<typename Array::value_type>(a.begin(), a.end()));
}

template <typename T, std::size_t N>
std::array<T, N> arrayFromJson(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != N)
    throw SchemaError(std::string(what) + " must have " + std::to_string(N) + " entries");
  std::array<T, N> out;
  for (std::size_t i = 0; i < N; ++i) out[i] = j[i].get<T>();
  return out;
}

StorageFormat formatFromJson(const Json& j) {
  const auto f = parseFormat(j.get<std::string>());
  if (!f) throw SchemaError("unknown format " + j.dump());
  return *f;
}

}  // namespace

void saveModel(const FormatModel& model, std::ostream& out) {
  Json j;
  j["schema"] = "spsel-format-model";
  j["version"] = kModelSchemaVersion;
  j["kind"] = modelKindName(model.kind);
  Json labels = Json::array();
  for (auto f : model.label_space) labels.push_back(formatName(f));
  j["labelSpace"] = labels;
  Json names = Json::array();
  for (int f = 0; f < kNumFeatures; ++f) names.push_back(featureName(f));
  j["featureNames"] = names;
  j["selectedFeatures"] = arrayToJson(model.selected);
  j["featureScores"] = arrayToJson(model.pass1_scores);
  j["scaler"] = {{"min", arrayToJson(model.scaler.mins())}, {"max", arrayToJson(model.scaler.maxs())}};
  j["trainedWeight"] = model.trained_weight;
  j["tieEpsilon"] = model.tie_epsilon;
  j["globalRanges"] = {{"runtimeMin", model.global_ranges.runtime_min},
                       {"runtimeMax", model.global_ranges.runtime_max},
                       {"memoryMin", model.global_ranges.memory_min},
                       {"memoryMax", model.global_ranges.memory_max}};
  j["hyperParams"] = {{"rounds", model.hyper.rounds},
                      {"maxDepth", model.hyper.max_depth},
                      {"learningRate", model.hyper.learning_rate},
                      {"minSplitGain", model.hyper.min_split_gain},
                      {"minLeafSamples", model.hyper.min_leaf_samples},
                      {"lambda", model.hyper.lambda},
                      {"seed", model.hyper.seed}};
  j["heldOut"] = model.held_out;
  Json trees = Json::array();
  for (const auto& per_class : model.trees) {
    Json seq = Json::array();
    for (const auto& t : per_class) seq.push_back(treeToJson(t));
    trees.push_back(seq);
  }
  j["trees"] = trees;
  Json points = Json::array();
  for (const auto& p : model.points) points.push_back(arrayToJson(p.values));
  j["knn"] = {{"points", points}, {"labels", model.point_labels}};
  out << j.dump(1) << '\n';
  if (!out) throw IoError("failed writing model");
}

void saveModel(const FormatModel& model, const std::filesystem::path& path) {
  auto out = openOutput(path);
  saveModel(model, out);
}

FormatModel loadModel(std::istream& in) {
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed model JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("schema", "") != "spsel-format-model")
      throw SchemaError("not a format model file");
    if (!j.contains("version") || j["version"] != kModelSchemaVersion)
      throw SchemaError("unsupported model version " +
                        (j.contains("version") ? j["version"].dump() : std::string("(none)")) +
                        ", expected " + std::to_string(kModelSchemaVersion));
    FormatModel m;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "gbt") m.kind = ModelKind::kGbt;
    else if (kind == "tree") m.kind = ModelKind::kTree;
    else if (kind == "knn") m.kind = ModelKind::kKnn;
    else throw SchemaError("unknown model kind " + kind);
    for (const auto& f : j.at("labelSpace")) m.label_space.push_back(formatFromJson(f));
    if (m.label_space.empty()) throw SchemaError("empty label space");
    m.selected = arrayFromJson<bool, kNumFeatures>(j.at("selectedFeatures"), "selectedFeatures");
    m.pass1_scores = arrayFromJson<std::int64_t, kNumFeatures>(j.at("featureScores"), "featureScores");
    m.scaler = FeatureScaler(arrayFromJson<double, kNumFeatures>(j.at("scaler").at("min"), "scaler min"),
                             arrayFromJson<double, kNumFeatures>(j.at("scaler").at("max"), "scaler max"));
    m.trained_weight = j.at("trainedWeight").get<double>();
    m.tie_epsilon = j.at("tieEpsilon").get<double>();
    const auto& r = j.at("globalRanges");
    m.global_ranges = {r.at("runtimeMin").get<double>(), r.at("runtimeMax").get<double>(),
                       r.at("memoryMin").get<double>(), r.at("memoryMax").get<double>()};
    const auto& h = j.at("hyperParams");
    m.hyper.rounds = h.at("rounds").get<int>();
    m.hyper.max_depth = h.at("maxDepth").get<int>();
    m.hyper.learning_rate = h.at("learningRate").get<double>();
    m.hyper.min_split_gain = h.at("minSplitGain").get<double>();
    m.hyper.min_leaf_samples = h.at("minLeafSamples").get<int>();
    m.hyper.lambda = h.at("lambda").get<double>();
    m.hyper.seed = h.at("seed").get<std::uint64_t>();
    m.held_out = j.at("heldOut").get<std::vector<std::string>>();
    for (const auto& seq : j.at("trees")) {
      std::vector<RegressionTree> per_class;
      for (const auto& t : seq) per_class.push_back(treeFromJson(t));
      m.trees.push_back(std::move(per_class));
    }
    for (const auto& p : j.at("knn").at("points"))
      m.points.push_back({arrayFromJson<double, kNumFeatures>(p, "knn point")});
    m.point_labels = j.at("knn").at("labels").get<std::vector<int>>();

    const auto classes = static_cast<int>(m.label_space.size());
    if (m.kind == ModelKind::kGbt && static_cast<int>(m.trees.size()) != classes)
      throw SchemaError("boosted model needs one tree sequence per class");
    if (m.kind == ModelKind::kTree) {
      if (m.trees.size() != 1 || m.trees[0].size() != 1)
        throw SchemaError("tree model needs exactly one tree");
      for (const auto& n : m.trees[0][0].nodes())
        if (n.isLeaf() && (n.value < 0 || n.value >= classes))
          throw SchemaError("tree leaf holds an unknown class");
    }
    if (m.kind == ModelKind::kKnn) {
      if (m.points.empty() || m.points.size() != m.point_labels.size())
        throw SchemaError("knn model needs one label per point");
      for (int c : m.point_labels)
        if (c < 0 || c >= classes) throw SchemaError("knn label outside the label space");
    }
    return m;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed model: ") + e.what());
  }
}

FormatModel loadModel(const std::filesystem::path& path) {
  auto in = openInput(path);
  try {
    return loadModel(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace spsel
