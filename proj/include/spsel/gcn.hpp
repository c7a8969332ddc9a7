#pragma once

// A small graph convolutional network used to watch format selection under
// a realistic call pattern: every layer multiplies a sparse operand by the
// current node features, H' = relu(A_l * H * W_l).
//
// There is no backward pass. Between epochs the weights receive a seeded
// random perturbation, which keeps the SpMM workload realistic without an
// autograd layer.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spsel/dense.hpp"
#include "spsel/model.hpp"
#include "spsel/profiler.hpp"
#include "spsel/selector.hpp"
#include "spsel/sparse.hpp"

namespace spsel {

enum class SelectionStrategy { kStaticCoo, kAdaptive, kOracle };

std::string_view strategyName(SelectionStrategy s);
/// "static-coo", "adaptive", "oracle". Throws ValidationError otherwise.
SelectionStrategy parseStrategy(std::string_view name);

struct GcnConfig {
  int layers = 2;
  Index hidden_dim = 16;
  int epochs = 10;
  SparseMatrix adjacency = CooMatrix(0, 0, {}, {}, {});
  DenseMatrix features;
  /// One per layer. Generated from `seed` when empty.
  std::vector<DenseMatrix> weights;
  /// Optional per-layer operands used instead of `adjacency`.
  std::vector<SparseMatrix> layer_adjacency;
  SelectionStrategy strategy = SelectionStrategy::kStaticCoo;
  std::shared_ptr<const FormatModel> model;  // required for kAdaptive
  std::uint64_t seed = 11;
  double perturbation = 0.01;
  /// Oracle profiling settings; dense_cols is replaced by the layer width.
  ProfileOptions oracle_profile;
  ConversionOptions conversion;

  /// Throws ValidationError or ShapeError.
  void validate() const;
};

/// Glorot-uniform weights: features.cols x hidden, then hidden x hidden.
std::vector<DenseMatrix> initialWeights(const GcnConfig& cfg);

/// D^-1/2 (A + I) D^-1/2 with D the row sums of A + I. Returns COO.
/// Throws ShapeError for a non-square input and DataError when a row sum
/// of A + I is not positive.
CooMatrix normalizeAdjacency(const SparseMatrix& a);

struct LayerTiming {
  int layer = 0;
  StorageFormat format = StorageFormat::kCoo;
  bool cache_hit = false;
  double feature_time = 0.0;
  double predict_time = 0.0;
  double convert_time = 0.0;
  double kernel_time = 0.0;
  double dense_time = 0.0;  // H * W and relu
  double density = 0.0;     // of the sparse operand multiplied

  double seconds() const {
    return feature_time + predict_time + convert_time + kernel_time + dense_time;
  }
};

struct ForwardResult {
  DenseMatrix output;
  std::vector<LayerTiming> layers;
  double seconds = 0.0;  // wall time of the whole pass
};

/// Holds weights, converted operands and per-layer format decisions across
/// epochs.
class GcnSession {
 public:
  explicit GcnSession(GcnConfig cfg);

  ForwardResult forward();
  /// Adds the seeded perturbation of `epoch` to every weight.
  void perturb(int epoch);
  /// Replaces a layer's operand. An adaptive decision made at a density
  /// more than 2x away from the new one is dropped; oracle decisions are
  /// always recomputed.
  void setLayerOperand(int layer, SparseMatrix m);

  const std::vector<DenseMatrix>& weights() const { return weights_; }
  const LayerFormatCache& cache() const { return cache_; }
  /// Time spent profiling for the oracle strategy, outside the epochs.
  double oracleSeconds() const { return oracle_seconds_; }

 private:
  /// Profiles every layer without a decision, outside the timed pass.
  void planOracle();
  const SparseMatrix& prepare(int layer, LayerTiming& timing);

  GcnConfig cfg_;
  std::vector<DenseMatrix> weights_;
  std::vector<SparseMatrix> sources_;
  std::vector<SparseMatrix> operands_;  // sources_ in the last chosen format
  std::vector<std::optional<StorageFormat>> oracle_;
  LayerFormatCache cache_;
  double oracle_seconds_ = 0.0;
};

/// One pass with freshly initialized state.
ForwardResult gcnForward(const GcnConfig& cfg);

/// density[epoch][layer]
struct DensityTrace {
  std::vector<std::vector<double>> density;
};

struct EpochRow {
  int epoch = 0;
  int layer = 0;
  SelectionStrategy strategy = SelectionStrategy::kStaticCoo;
  StorageFormat format = StorageFormat::kCoo;
  double seconds = 0.0;
  double density = 0.0;
};

struct StrategySummary {
  SelectionStrategy strategy = SelectionStrategy::kStaticCoo;
  std::vector<double> epoch_seconds;
  double geomean_epoch_seconds = 0.0;
  double oracle_profile_seconds = 0.0;
  /// formats[epoch][layer]
  std::vector<std::vector<StorageFormat>> formats;
  DensityTrace trace;
};

struct EpochReport {
  std::vector<StrategySummary> strategies;
  std::vector<EpochRow> rows;
  /// Optional structural-power densities reported next to the trace.
  std::vector<double> power_densities;
};

/// cfg.epochs forward passes with cfg.strategy, perturbing after each.
EpochReport runTrainingLoop(const GcnConfig& cfg);
/// runTrainingLoop for each strategy from the same initial weights.
EpochReport runStrategies(const GcnConfig& cfg, std::span<const SelectionStrategy> strategies);

/// Densities of the structure of a, a^2, ..., a^k (values ignored).
/// Throws ShapeError for a non-square input, ValidationError for k < 1.
std::vector<double> powerDensification(const SparseMatrix& a, int k);

/// epoch,layer,strategy,format,seconds,density
void writeEpochCsv(std::ostream& out, const EpochReport& report);
void writeEpochJson(std::ostream& out, const EpochReport& report);

}  // namespace spsel
