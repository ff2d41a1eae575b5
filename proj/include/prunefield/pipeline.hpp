#pragma once

#include "prunefield/image.hpp"
#include "prunefield/model.hpp"
#include "prunefield/pruning.hpp"
#include "prunefield/report.hpp"
#include "prunefield/train.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace prunefield {

/// Everything a pipeline stage needs. Loaded from a JSON manifest; command
/// line flags are applied on top.
struct RunConfig {
  std::filesystem::path image;
  std::uint64_t seed = 0;

  // Architecture of freshly trained models.
  std::size_t width = 256;
  std::size_t depth = 8;
  std::size_t skip_at = 4;
  std::size_t n_freqs = 10;

  TrainConfig train;
  std::size_t retrain_iterations = 1000;

  Strategy strategy = Strategy::coreset;
  std::optional<double> threshold;
  std::optional<std::size_t> target_width;
  double beta = 3.0;
  bool reweight = true;

  std::filesystem::path out_dir = "out";

  // experiment grid
  std::vector<Strategy> grid_strategies = {Strategy::uniform, Strategy::importance_out,
                                           Strategy::coreset};
  std::vector<std::size_t> grid_widths = {128, 64};
  /// Wall-clock timing in reports. Off makes reports a pure function of
  /// (config, seed, image).
  bool timing = true;

  /// Throws InvalidArgument for unknown keys or bad values.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::filesystem::path& path);

  /// Train settings with the run seed applied.
  TrainConfig train_config(std::size_t iterations) const;
  ArchSpec arch() const;
  void validate_prune() const;
};

/// Prune strategy from the CLI pair (--strategy, --criterion).
Strategy strategy_from_cli(const std::string& strategy, const std::string& criterion);

/// Renders at the reference resolution, stores the render as 8-bit and
/// scores it against the reference.
struct Evaluation {
  ExperimentReport report;
  RgbImage render;
};

Evaluation evaluate(const MlpModel& model, const RgbImage& reference, std::string label,
                    std::string strategy, double sec_per_iter = 0.0,
                    std::optional<double> remaining_edge_pct = std::nullopt);

struct StageResult {
  MlpModel model;
  Evaluation eval;
  std::vector<TrainLogEntry> log;
};

/// Fresh initialisation (seeded) then training.
StageResult train_stage(const RunConfig& cfg, const RgbImage& image);

/// Edge or structured pruning according to cfg.strategy.
struct PruneStage {
  MlpModel model;
  PruneReport report;
};
PruneStage prune_stage(const MlpModel& model, const RunConfig& cfg);

/// Continues training from the given weights.
StageResult retrain_stage(MlpModel model, const RunConfig& cfg, const RgbImage& image,
                          std::string label, std::string strategy);

/// Baseline plus every (strategy, width) cell of the grid, with shared seeds.
std::vector<ExperimentReport> experiment_rows(const RunConfig& cfg, const RgbImage& image);

// File-producing commands behind the CLI. Outputs land in cfg.out_dir.

/// model.ckpt, render.ppm, report.csv, report.json
ExperimentReport cmd_train(const RunConfig& cfg);
/// pruned.ckpt, prune_report.json
PruneReport cmd_prune(const std::filesystem::path& checkpoint_in, const RunConfig& cfg);
/// retrained.ckpt, render.ppm, report.csv, report.json
ExperimentReport cmd_retrain(const std::filesystem::path& checkpoint_in, const RunConfig& cfg);
/// eval_render.ppm, eval_report.csv, eval_report.json
ExperimentReport cmd_eval(const std::filesystem::path& checkpoint, const std::filesystem::path& image,
                          const RunConfig& cfg);
/// experiment.csv, experiment.json. On failure the finished rows go to
/// experiment.partial.{csv,json} with the error in experiment.error.txt,
/// and the error is rethrown.
std::vector<ExperimentReport> cmd_experiment(const RunConfig& cfg);

}  // namespace prunefield
