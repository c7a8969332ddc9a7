#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spsel/model.hpp"

namespace spsel::cli {

struct GenOptions {
  std::string spec;  // JSON file, "desk-scale" or "paper-scale"
  std::string out;
  std::optional<std::uint64_t> seed;
};

struct ProfileOptions {
  std::string matrices;
  std::string out;
  std::string features;  // default: features.csv next to `out`
  Index dense_cols = 32;
  int reps = 5;
  int warmup = 1;
  int jobs = 1;
  bool verify = false;
  std::uint64_t seed = 7;
};

struct LabelOptions {
  std::string measurements;
  std::string features;  // default: features.csv next to the measurements
  std::string out;
  double w = 1.0;
  double tie_epsilon = 1e-4;
  std::string w_sweep;    // "0,0.25,0.5"
  std::string histogram;  // default: frequency.csv next to `out`
};

struct TrainOptions {
  std::string labeled;
  std::string out;
  std::string kind = "gbt";
  GbtHyperParams hp;
  int tree_depth = 8;
  double test_fraction = 0.2;
  std::uint64_t split_seed = 42;
};

struct EvaluateOptions {
  std::string model;
  std::string labeled;
  std::string measurements;
  std::string report;
  std::string on = "held-out";
  bool against_oracle = false;
  bool baselines = false;
};

struct PredictOptions {
  std::string model;
  std::string matrix;
  bool show_features = false;
};

struct DemoOptions {
  std::string adjacency;
  std::string generate;  // "n,density"
  std::vector<std::string> layer_operands;
  std::string model;
  std::string strategies = "static-coo,adaptive,oracle";
  int epochs = 10;
  int layers = 2;
  Index hidden = 16;
  Index feature_dim = 32;
  int power = 0;
  int oracle_reps = 5;
  bool normalize = true;
  std::uint64_t seed = 11;
  std::string out;
  std::string csv;  // default: `out` with a .csv extension
};

struct ImportanceOptions {
  std::string labeled;
  std::string out;
  GbtHyperParams hp;
  double validation_fraction = 0.2;
  std::uint64_t split_seed = 42;
};

int runGen(const GenOptions& o);
int runProfile(const ProfileOptions& o);
int runLabel(const LabelOptions& o);
int runTrain(const TrainOptions& o);
int runEvaluate(const EvaluateOptions& o);
int runPredict(const PredictOptions& o);
int runDemo(const DemoOptions& o);
int runImportance(const ImportanceOptions& o);

}  // namespace spsel::cli
