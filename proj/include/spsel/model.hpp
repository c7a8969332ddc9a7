#pragma once

// Format classifiers over FeatureVectors: a softmax gradient-boosted tree
// ensemble and two baselines (one classification tree, 1-nearest-neighbour).
//
// All three normalize inputs with a scaler fitted on their training data and
// share predictFormat. Boosting trains twice: once on every allowed feature
// to count how often each is split on, then again restricted to the
// smallest set of features carrying 95% of those split counts.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spsel/features.hpp"
#include "spsel/format.hpp"
#include "spsel/labeling.hpp"
#include "spsel/tree.hpp"

namespace spsel {

struct GbtHyperParams {
  int rounds = 100;
  int max_depth = 6;
  double learning_rate = 0.3;
  double min_split_gain = 0.0;
  int min_leaf_samples = 1;
  double lambda = 1.0;  // L2 penalty on leaf weights
  std::uint64_t seed = 0;

  void validate() const;
};

using FeatureMask = std::array<bool, kNumFeatures>;
using FeatureScores = std::array<std::int64_t, kNumFeatures>;

inline FeatureMask allFeatures() {
  FeatureMask m;
  m.fill(true);
  return m;
}

enum class ModelKind { kGbt, kTree, kKnn };

std::string_view modelKindName(ModelKind k);

struct FormatModel {
  ModelKind kind = ModelKind::kGbt;
  /// Class index -> format, ascending code.
  std::vector<StorageFormat> label_space;
  FeatureScaler scaler;
  FeatureMask selected = allFeatures();
  /// Split counts of the first boosting pass (zero for baselines).
  FeatureScores pass1_scores{};
  /// kGbt: trees[class][round]. kTree: one tree whose leaves hold a class index.
  std::vector<std::vector<RegressionTree>> trees;
  /// kKnn: normalized training points and their class indices.
  std::vector<FeatureVector> points;
  std::vector<int> point_labels;

  GbtHyperParams hyper;
  double trained_weight = 1.0;
  double tie_epsilon = 1e-4;
  GlobalRanges global_ranges;
  std::vector<std::string> held_out;
};

/// Throws DataError with fewer than 10 samples or a single label
/// ("degenerate label space"). Trees only split on features in `allowed`.
FormatModel trainGbt(std::span<const LabeledSample> data, const GbtHyperParams& hp,
                     const FeatureMask& allowed = allFeatures());

/// Split count of every feature over all trees of the model.
FeatureScores featureScores(const FormatModel& model);

/// Smallest prefix of features (score descending, index ascending on ties)
/// whose scores sum to at least 95% of the total. All-zero scores keep
/// every feature.
FeatureMask selectFeatures(const FeatureScores& scores);

/// Classification tree on the same split routine, Gini gain, depth <= 8.
FormatModel trainBaselineTree(std::span<const LabeledSample> data, int max_depth = 8);

/// Nearest neighbour (k = 1 only) by Euclidean distance on normalized features.
FormatModel trainBaselineKnn(std::span<const LabeledSample> data, int k = 1);

/// Argmax class; ties go to the lowest format code.
StorageFormat predictFormat(const FormatModel& model, const FeatureVector& raw);

inline constexpr int kModelSchemaVersion = 1;

void saveModel(const FormatModel& model, std::ostream& out);
void saveModel(const FormatModel& model, const std::filesystem::path& path);
/// SchemaError on a missing or different version, ParseError on bad JSON.
FormatModel loadModel(std::istream& in);
FormatModel loadModel(const std::filesystem::path& path);

}  // namespace spsel
