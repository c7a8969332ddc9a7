#include "spsel/tree.hpp"

#include <algorithm>
#include <numeric>

namespace spsel {

void SortedColumns::sortColumns() {
  for (std::size_t f = 0; f < columns_.size(); ++f) {
    auto& ord = order_[f];
    ord.resize(static_cast<std::size_t>(samples_));
    std::iota(ord.begin(), ord.end(), 0);
    const auto& col = columns_[f];
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
      return col[static_cast<std::size_t>(a)] < col[static_cast<std::size_t>(b)];
    });
  }
}

namespace {

struct Candidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

struct OpenNode {
  int id = 0;  // index into the node array
  int count = 0;
  std::vector<double> sums;
};

}  // namespace

RegressionTree growTree(const SortedColumns& data, std::span<const double> stats, int stat_dim,
                        std::span<const int> features, const GrowOptions& options,
                        const GainFn& gain, const LeafFn& leaf) {
  const int n = data.numSamples();
  const auto dim = static_cast<std::size_t>(stat_dim);
  std::vector<TreeNode> nodes(1);

  // Slot of each sample's node within the current frontier; -1 once the
  // sample has settled in a leaf.
  std::vector<int> slot_of(static_cast<std::size_t>(n), 0);
  std::vector<OpenNode> frontier(1);
  frontier[0].count = n;
  frontier[0].sums.assign(dim, 0.0);
  for (int i = 0; i < n; ++i)
    for (std::size_t s = 0; s < dim; ++s) frontier[0].sums[s] += stats[static_cast<std::size_t>(i) * dim + s];

  for (int depth = 0; !frontier.empty(); ++depth) {
    const auto width = frontier.size();
    std::vector<Candidate> best(width * features.size());

    if (depth < options.max_depth && n > 0) {
#pragma omp parallel for schedule(dynamic, 1)
      for (std::size_t fi = 0; fi < features.size(); ++fi) {
        const int f = features[fi];
        const auto& col = data.column(f);
        std::vector<double> left(width * dim, 0.0);
        std::vector<double> right(dim);
        std::vector<int> left_count(width, 0);
        std::vector<double> last(width, 0.0);
        for (int i : data.order(f)) {
          const int slot = slot_of[static_cast<std::size_t>(i)];
          if (slot < 0) continue;
          const auto sl = static_cast<std::size_t>(slot);
          const double v = col[static_cast<std::size_t>(i)];
          const int nl = left_count[sl];
          const auto& node = frontier[sl];
          if (nl > 0 && v > last[sl] && nl >= options.min_leaf_samples &&
              node.count - nl >= options.min_leaf_samples) {
            const std::span<const double> l(left.data() + sl * dim, dim);
            for (std::size_t s = 0; s < dim; ++s) right[s] = node.sums[s] - l[s];
            const double g = gain(l, right, node.sums, nl, node.count - nl);
            auto& cand = best[fi * width + sl];
            if (cand.feature < 0 || g > cand.gain) {
              double threshold = 0.5 * (last[sl] + v);
              if (!(last[sl] < threshold)) threshold = v;  // adjacent doubles
              cand = {g, f, threshold};
            }
          }
          for (std::size_t s = 0; s < dim; ++s)
            left[sl * dim + s] += stats[static_cast<std::size_t>(i) * dim + s];
          ++left_count[sl];
          last[sl] = v;
        }
      }
    }

    std::vector<OpenNode> next;
    std::vector<int> next_slot(width * 2, -1);
    for (std::size_t sl = 0; sl < width; ++sl) {
      const Candidate* chosen = nullptr;
      for (std::size_t fi = 0; fi < features.size(); ++fi) {
        const auto& c = best[fi * width + sl];
        if (c.feature < 0 || !(c.gain > options.min_split_gain)) continue;
        if (!chosen || c.gain > chosen->gain) chosen = &c;
      }
      auto& open = frontier[sl];
      if (!chosen) {
        nodes[static_cast<std::size_t>(open.id)].value = leaf(open.sums, open.count);
        continue;
      }
      const int left_id = static_cast<int>(nodes.size());
      nodes.resize(nodes.size() + 2);
      auto& node = nodes[static_cast<std::size_t>(open.id)];
      node.feature = chosen->feature;
      node.threshold = chosen->threshold;
      node.left = left_id;
      node.right = left_id + 1;
      for (int side = 0; side < 2; ++side) {
        next_slot[sl * 2 + static_cast<std::size_t>(side)] = static_cast<int>(next.size());
        next.push_back({left_id + side, 0, std::vector<double>(dim, 0.0)});
      }
    }

    for (int i = 0; i < n; ++i) {
      auto& slot = slot_of[static_cast<std::size_t>(i)];
      if (slot < 0) continue;
      const auto& node = nodes[static_cast<std::size_t>(frontier[static_cast<std::size_t>(slot)].id)];
      if (node.isLeaf()) {
        slot = -1;
        continue;
      }
      const int side = data.value(node.feature, i) < node.threshold ? 0 : 1;
      slot = next_slot[static_cast<std::size_t>(slot) * 2 + static_cast<std::size_t>(side)];
      auto& child = next[static_cast<std::size_t>(slot)];
      ++child.count;
      for (std::size_t s = 0; s < dim; ++s) child.sums[s] += stats[static_cast<std::size_t>(i) * dim + s];
    }
    frontier = std::move(next);
  }
  return RegressionTree(std::move(nodes));
}

}  // namespace spsel
