#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "spsel/error.hpp"
#include "spsel/manifest.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitData = 4;

void addHyperParams(CLI::App* cmd, spsel::GbtHyperParams& hp) {
  cmd->add_option("--rounds", hp.rounds, "Boosting rounds")->capture_default_str();
  cmd->add_option("--depth", hp.max_depth, "Maximum tree depth")->capture_default_str();
  cmd->add_option("--eta", hp.learning_rate, "Learning rate")->capture_default_str();
  cmd->add_option("--lambda", hp.lambda, "L2 penalty on leaf weights")->capture_default_str();
  cmd->add_option("--min-split-gain", hp.min_split_gain)->capture_default_str();
  cmd->add_option("--min-leaf", hp.min_leaf_samples, "Minimum samples per leaf")
      ->capture_default_str();
  cmd->add_option("--seed", hp.seed, "Model seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace spsel::cli;
  CLI::App app{"Sparse storage format selection for SpMM"};
  app.set_version_flag("--version", spsel::kToolVersion);
  app.require_subcommand(1);

  GenOptions gen;
  auto* c_gen = app.add_subcommand("gen", "Generate a synthetic matrix corpus");
  c_gen->add_option("--spec", gen.spec, "Spec JSON file, desk-scale or paper-scale")->required();
  c_gen->add_option("--out", gen.out, "Output directory")->required();
  c_gen->add_option("--seed", gen.seed, "Override the spec seed");

  ProfileOptions prof;
  auto* c_prof = app.add_subcommand("profile", "Time SpMM in every format for each matrix");
  c_prof->add_option("--matrices", prof.matrices, "Directory of .mtx files")->required();
  c_prof->add_option("--out", prof.out, "Measurements CSV")->required();
  c_prof->add_option("--features", prof.features, "Features CSV (default: next to --out)");
  c_prof->add_option("--dense-cols", prof.dense_cols, "Dense operand width")->capture_default_str();
  c_prof->add_option("--reps", prof.reps, "Timed repetitions (>= 3)")->capture_default_str();
  c_prof->add_option("--warmup", prof.warmup, "Warm-up runs per format")->capture_default_str();
  c_prof->add_option("--jobs", prof.jobs, "Matrices loaded in parallel")->capture_default_str();
  c_prof->add_option("--seed", prof.seed, "Dense operand seed")->capture_default_str();
  c_prof->add_flag("--verify", prof.verify, "Check every product against the dense oracle");

  LabelOptions lab;
  auto* c_lab = app.add_subcommand("label", "Label matrices with their optimal formats");
  c_lab->add_option("--measurements", lab.measurements, "Measurements CSV")->required();
  c_lab->add_option("--features", lab.features, "Features CSV (default: next to measurements)");
  c_lab->add_option("--out", lab.out, "Labeled CSV")->required();
  c_lab->add_option("--w", lab.w, "Runtime weight in [0, 1]")->capture_default_str();
  c_lab->add_option("--tie-epsilon", lab.tie_epsilon, "Tie threshold")->capture_default_str();
  c_lab->add_option("--w-sweep", lab.w_sweep, "Comma-separated weights for the histogram");
  c_lab->add_option("--histogram", lab.histogram, "Histogram CSV (default: frequency.csv)");

  TrainOptions tr;
  auto* c_tr = app.add_subcommand("train", "Train a format classifier");
  c_tr->add_option("--labeled", tr.labeled, "Labeled CSV")->required();
  c_tr->add_option("--out", tr.out, "Model JSON")->required();
  c_tr->add_option("--model", tr.kind, "gbt, tree or knn")->capture_default_str();
  c_tr->add_option("--tree-depth", tr.tree_depth, "Depth of the tree baseline")->capture_default_str();
  c_tr->add_option("--test-fraction", tr.test_fraction, "Held-out share")->capture_default_str();
  c_tr->add_option("--split-seed", tr.split_seed, "Train/test split seed")->capture_default_str();
  addHyperParams(c_tr, tr.hp);

  EvaluateOptions ev;
  auto* c_ev = app.add_subcommand("evaluate", "Score a model on labeled data");
  c_ev->add_option("--model", ev.model, "Model JSON")->required();
  c_ev->add_option("--labeled", ev.labeled, "Labeled CSV")->required();
  c_ev->add_option("--measurements", ev.measurements, "Measurements CSV for --against-oracle");
  c_ev->add_option("--report", ev.report, "Per-sample CSV");
  c_ev->add_option("--on", ev.on, "held-out, train or all")->capture_default_str();
  c_ev->add_flag("--against-oracle", ev.against_oracle, "Compare runtimes with the fastest format");
  c_ev->add_flag("--baselines", ev.baselines, "Also train and score the tree and 1-NN baselines");

  PredictOptions pr;
  auto* c_pr = app.add_subcommand("predict", "Predict the format for one matrix");
  c_pr->add_option("--model", pr.model, "Model JSON")->required();
  c_pr->add_option("--matrix", pr.matrix, "Matrix Market file")->required();
  c_pr->add_flag("--features", pr.show_features, "Print the extracted features");

  DemoOptions demo;
  auto* c_demo = app.add_subcommand("demo-gcn", "Run the GCN demo under several strategies");
  c_demo->add_option("--adjacency", demo.adjacency, "Graph as Matrix Market");
  c_demo->add_option("--generate", demo.generate, "Random graph n,density instead of a file");
  c_demo->add_option("--layer-operands", demo.layer_operands, "One .mtx per layer")->delimiter(',');
  c_demo->add_option("--model", demo.model, "Model JSON for the adaptive strategy");
  c_demo->add_option("--strategies", demo.strategies, "static-coo,adaptive,oracle")
      ->capture_default_str();
  c_demo->add_option("--epochs", demo.epochs)->capture_default_str();
  c_demo->add_option("--layers", demo.layers)->capture_default_str();
  c_demo->add_option("--hidden", demo.hidden, "Hidden width")->capture_default_str();
  c_demo->add_option("--feature-dim", demo.feature_dim, "Input feature width")->capture_default_str();
  c_demo->add_option("--power", demo.power, "Also report densities of A^1..A^k")->capture_default_str();
  c_demo->add_option("--oracle-reps", demo.oracle_reps)->capture_default_str();
  c_demo->add_option("--seed", demo.seed)->capture_default_str();
  c_demo->add_option("--out", demo.out, "Epoch report JSON");
  c_demo->add_option("--csv", demo.csv, "Epoch report CSV (default: --out with .csv)");
  bool raw = false;
  c_demo->add_flag("--no-normalize", raw, "Use the adjacency as given");

  ImportanceOptions imp;
  auto* c_imp = app.add_subcommand("importance", "Leave-one-feature-out importance");
  c_imp->add_option("--labeled", imp.labeled, "Labeled CSV")->required();
  c_imp->add_option("--out", imp.out, "Importance CSV")->required();
  c_imp->add_option("--validation-fraction", imp.validation_fraction)->capture_default_str();
  c_imp->add_option("--split-seed", imp.split_seed)->capture_default_str();
  addHyperParams(c_imp, imp.hp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*c_gen) return runGen(gen);
    if (*c_prof) return runProfile(prof);
    if (*c_lab) return runLabel(lab);
    if (*c_tr) return runTrain(tr);
    if (*c_ev) return runEvaluate(ev);
    if (*c_pr) return runPredict(pr);
    if (*c_demo) {
      demo.normalize = !raw;
      return runDemo(demo);
    }
    if (*c_imp) return runImportance(imp);
  } catch (const spsel::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const spsel::ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const spsel::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const spsel::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
