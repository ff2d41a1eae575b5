// prunefield: train, prune, retrain and evaluate coordinate MLPs.
//
// Exit codes: 0 success, 2 usage / invalid arguments, 1 runtime or data error.

#include "prunefield/errors.hpp"
#include "prunefield/pipeline.hpp"
#include "prunefield/tensor.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace pf = prunefield;

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string image;
  std::string checkpoint;
  std::optional<std::size_t> iterations;
  std::optional<std::size_t> retrain_iterations;
  std::optional<std::size_t> batch_size;
  std::optional<double> lr;
  std::optional<std::size_t> width;
  std::string strategy;
  std::string criterion = "out";
  std::optional<double> threshold;
  std::optional<std::size_t> target_width;
  std::optional<double> beta;
  bool no_reweight = false;
  bool no_timing = false;
  std::vector<std::string> grid_strategies;
  std::vector<std::size_t> grid_widths;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run manifest; flags override it");
  cmd->add_option("--seed", f.seed, "Run seed");
  cmd->add_option("--out-dir", f.out_dir, "Output directory");
}

void add_training(CLI::App* cmd, Flags& f) {
  cmd->add_option("--image", f.image, "Task image (binary PPM)");
  cmd->add_option("--iterations", f.iterations, "Training iterations");
  cmd->add_option("--batch-size", f.batch_size, "Minibatch size");
  cmd->add_option("--lr", f.lr, "Initial learning rate");
}

void add_prune(CLI::App* cmd, Flags& f) {
  cmd->add_option("--strategy", f.strategy, "edge|uniform|importance|coreset")
      ->check(CLI::IsMember({"edge", "uniform", "importance", "coreset"}));
  cmd->add_option("--criterion", f.criterion, "Importance criterion: in|out|product")
      ->check(CLI::IsMember({"in", "out", "product"}));
  cmd->add_option("--threshold", f.threshold, "Edge magnitude threshold");
  cmd->add_option("--target-width", f.target_width, "Neurons kept per hidden layer");
  cmd->add_option("--beta", f.beta, "Coreset upper-bound controller");
  cmd->add_flag("--no-reweight", f.no_reweight, "Skip coreset correction weights");
}

pf::RunConfig resolve(const Flags& f, bool retraining) {
  pf::RunConfig c = f.config.empty() ? pf::RunConfig{} : pf::RunConfig::from_file(f.config);
  if (f.seed) c.seed = *f.seed;
  if (!f.out_dir.empty()) c.out_dir = f.out_dir;
  if (!f.image.empty()) c.image = f.image;
  if (f.iterations) (retraining ? c.retrain_iterations : c.train.iterations) = *f.iterations;
  if (f.retrain_iterations) c.retrain_iterations = *f.retrain_iterations;
  if (f.batch_size) c.train.batch_size = *f.batch_size;
  if (f.lr) c.train.adam.lr = *f.lr;
  if (f.width) c.width = *f.width;
  if (!f.strategy.empty()) c.strategy = pf::strategy_from_cli(f.strategy, f.criterion);
  if (f.threshold) c.threshold = *f.threshold;
  if (f.target_width) c.target_width = *f.target_width;
  if (f.beta) c.beta = *f.beta;
  if (f.no_reweight) c.reweight = false;
  if (f.no_timing) c.timing = false;
  if (!f.grid_strategies.empty()) {
    c.grid_strategies.clear();
    for (const auto& s : f.grid_strategies) c.grid_strategies.push_back(pf::parse_strategy(s));
  }
  if (!f.grid_widths.empty()) c.grid_widths = f.grid_widths;
  return c;
}

void print_row(const pf::ExperimentReport& r) {
  std::cout << r.label << ": psnr " << r.psnr.to_string() << " dB, mse " << pf::format_double(r.mse)
            << ", params " << r.params << ", bytes " << r.size_bytes << ", sec/iter "
            << pf::format_double(r.sec_per_iter) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordinate-MLP training and structured pruning"};
  app.require_subcommand(1);
  Flags f;

  auto* train = app.add_subcommand("train", "Train a fresh model on an image");
  add_common(train, f);
  add_training(train, f);
  train->add_option("--width", f.width, "Hidden width");

  auto* prune = app.add_subcommand("prune", "Prune a checkpoint");
  add_common(prune, f);
  add_prune(prune, f);
  prune->add_option("--checkpoint", f.checkpoint, "Input checkpoint")->required();

  auto* retrain = app.add_subcommand("retrain", "Continue training a (pruned) checkpoint");
  add_common(retrain, f);
  add_training(retrain, f);
  retrain->add_option("--checkpoint", f.checkpoint, "Input checkpoint")->required();

  auto* eval = app.add_subcommand("eval", "Render a checkpoint and score it against an image");
  add_common(eval, f);
  eval->add_option("--checkpoint", f.checkpoint, "Checkpoint")->required();
  eval->add_option("--image", f.image, "Reference image (binary PPM)")->required();

  auto* experiment = app.add_subcommand("experiment", "Baseline plus strategy x width grid");
  add_common(experiment, f);
  add_training(experiment, f);
  add_prune(experiment, f);
  experiment->add_option("--retrain-iterations", f.retrain_iterations, "Retraining iterations per cell");
  experiment->add_option("--grid-strategies", f.grid_strategies, "Strategies to compare");
  experiment->add_option("--grid-widths", f.grid_widths, "Target widths");
  experiment->add_flag("--no-timing", f.no_timing, "Report sec/iter as 0 for reproducible files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train) {
      print_row(pf::cmd_train(resolve(f, false)));
    } else if (*prune) {
      const auto r = pf::cmd_prune(f.checkpoint, resolve(f, false));
      std::cout << pf::to_string(r.strategy) << ": params " << r.params_before << " -> "
                << r.params_after << ", edges remaining " << r.remaining_edge_pct() << "%\n";
    } else if (*retrain) {
      print_row(pf::cmd_retrain(f.checkpoint, resolve(f, true)));
    } else if (*eval) {
      print_row(pf::cmd_eval(f.checkpoint, f.image, resolve(f, false)));
    } else if (*experiment) {
      for (const auto& r : pf::cmd_experiment(resolve(f, false))) print_row(r);
    }
  } catch (const pf::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
