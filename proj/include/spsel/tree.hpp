#pragma once

// Level-wise exact greedy tree growth shared by the boosted ensemble and the
// single-tree baseline. Each sample carries a small statistics vector (for
// boosting: gradient and hessian; for classification: one-hot class counts).
// A split candidate sits halfway between consecutive distinct feature values
// of a node; samples with value < threshold go left.

#include <functional>
#include <span>
#include <vector>

namespace spsel {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output

  bool isLeaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  /// `x` is indexed by feature.
  template <typename Vec>
  double predict(const Vec& x) const {
    int n = 0;
    while (!nodes_[static_cast<std::size_t>(n)].isLeaf()) {
      const auto& node = nodes_[static_cast<std::size_t>(n)];
      n = x[node.feature] < node.threshold ? node.left : node.right;
    }
    return nodes_[static_cast<std::size_t>(n)].value;
  }

  const std::vector<TreeNode>& nodes() const { return nodes_; }

  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

/// Column-major training matrix with per-feature presorted sample orders.
class SortedColumns {
 public:
  /// rows[i][f] is feature f of sample i.
  template <typename Row>
  SortedColumns(std::span<const Row> rows, int num_features);

  int numSamples() const { return samples_; }
  int numFeatures() const { return static_cast<int>(columns_.size()); }
  double value(int feature, int sample) const {
    return columns_[static_cast<std::size_t>(feature)][static_cast<std::size_t>(sample)];
  }
  const std::vector<double>& column(int feature) const {
    return columns_[static_cast<std::size_t>(feature)];
  }
  /// Sample indices ordered by (value, index).
  const std::vector<int>& order(int feature) const {
    return order_[static_cast<std::size_t>(feature)];
  }

 private:
  void sortColumns();

  int samples_ = 0;
  std::vector<std::vector<double>> columns_;
  std::vector<std::vector<int>> order_;
};

struct GrowOptions {
  int max_depth = 6;
  int min_leaf_samples = 1;
  /// A split is taken only if its gain is strictly greater.
  double min_split_gain = 0.0;
};

/// gain(left, right, parent, n_left, n_right): each span has stat_dim entries.
using GainFn = std::function<double(std::span<const double>, std::span<const double>,
                                    std::span<const double>, int, int)>;
/// Leaf output from the summed statistics of the samples that reach it.
using LeafFn = std::function<double(std::span<const double>, int)>;

/// `stats` holds stat_dim entries per sample. Only `features` may be split
/// on. Equal gains resolve to the lower feature index, then the lower
/// threshold, so the result does not depend on the thread count.
RegressionTree growTree(const SortedColumns& data, std::span<const double> stats, int stat_dim,
                        std::span<const int> features, const GrowOptions& options,
                        const GainFn& gain, const LeafFn& leaf);

// ---------------------------------------------------------------------------

template <typename Row>
SortedColumns::SortedColumns(std::span<const Row> rows, int num_features)
    : samples_(static_cast<int>(rows.size())),
      columns_(static_cast<std::size_t>(num_features)),
      order_(static_cast<std::size_t>(num_features)) {
  for (int f = 0; f < num_features; ++f) {
    auto& col = columns_[static_cast<std::size_t>(f)];
    col.reserve(rows.size());
    for (const auto& r : rows) col.push_back(r[f]);
  }
  sortColumns();
}

}  // namespace spsel
