#include "prunefield/pipeline.hpp"

#include "prunefield/checkpoint.hpp"
#include "prunefield/errors.hpp"
#include "prunefield/metrics.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace prunefield {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw InvalidArgument("config: '" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) throw InvalidArgument("config: unknown key '" + where + key + "'");
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t purpose) {
  return RngStream(seed).substream(purpose).next_u64();
}

constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kBatchStream = 2;
constexpr std::uint64_t kPruneStream = 3;

RgbImage load_reference(const RunConfig& cfg) {
  if (cfg.image.empty()) throw InvalidArgument("no task image given (--image or \"image\")");
  return load_ppm(cfg.image);
}

void write_reports(const std::vector<ExperimentReport>& rows, const std::filesystem::path& stem) {
  emit_report(rows, ReportFormat::csv, stem.string() + ".csv");
  emit_report(rows, ReportFormat::json, stem.string() + ".json");
}

json prune_report_json(const PruneReport& r) {
  json j;
  j["strategy"] = std::string(to_string(r.strategy));
  j["threshold"] = r.threshold ? json(*r.threshold) : json(nullptr);
  j["target_width"] = r.target_width ? json(*r.target_width) : json(nullptr);
  j["edges_before"] = r.edges_before;
  j["edges_after"] = r.edges_after;
  j["remaining_edge_pct"] = r.remaining_edge_pct();
  j["params_before"] = r.params_before;
  j["params_after"] = r.params_after;
  return j;
}

void ensure_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.out_dir.string());
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  reject_unknown(j, {"image", "seed", "out_dir", "arch", "train", "retrain_iterations", "prune",
                     "experiment"},
                 "");
  std::string path;
  read(j, "image", path);
  if (!path.empty()) c.image = path;
  read(j, "seed", c.seed);
  std::string out;
  read(j, "out_dir", out);
  if (!out.empty()) c.out_dir = out;
  read(j, "retrain_iterations", c.retrain_iterations);
  if (j.contains("arch")) {
    const json& a = j["arch"];
    reject_unknown(a, {"width", "depth", "skip_at", "n_freqs"}, "arch.");
    read(a, "width", c.width);
    read(a, "depth", c.depth);
    read(a, "skip_at", c.skip_at);
    read(a, "n_freqs", c.n_freqs);
  }
  if (j.contains("train")) {
    const json& t = j["train"];
    reject_unknown(t, {"iterations", "batch_size", "lr", "lr_decay", "log_every", "timing_warmup"},
                   "train.");
    read(t, "iterations", c.train.iterations);
    read(t, "batch_size", c.train.batch_size);
    read(t, "lr", c.train.adam.lr);
    read(t, "lr_decay", c.train.lr_decay);
    read(t, "log_every", c.train.log_every);
    read(t, "timing_warmup", c.train.timing_warmup);
  }
  if (j.contains("prune")) {
    const json& p = j["prune"];
    reject_unknown(p, {"strategy", "criterion", "threshold", "target_width", "beta", "reweight"},
                   "prune.");
    std::string strategy = "coreset";
    std::string criterion = "out";
    read(p, "strategy", strategy);
    read(p, "criterion", criterion);
    c.strategy = strategy_from_cli(strategy, criterion);
    if (p.contains("threshold")) c.threshold = p["threshold"].get<double>();
    if (p.contains("target_width")) c.target_width = p["target_width"].get<std::size_t>();
    read(p, "beta", c.beta);
    read(p, "reweight", c.reweight);
  }
  if (j.contains("experiment")) {
    const json& e = j["experiment"];
    reject_unknown(e, {"strategies", "widths", "timing"}, "experiment.");
    if (e.contains("strategies")) {
      c.grid_strategies.clear();
      for (const auto& s : e["strategies"]) c.grid_strategies.push_back(parse_strategy(s.get<std::string>()));
    }
    read(e, "widths", c.grid_widths);
    read(e, "timing", c.timing);
  }
  return c;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument("config " + path.string() + ": " + e.what());
  }
  RunConfig c = from_json(j);
  if (!c.image.empty() && c.image.is_relative()) c.image = path.parent_path() / c.image;
  return c;
}

TrainConfig RunConfig::train_config(std::size_t iterations) const {
  TrainConfig t = train;
  t.iterations = iterations;
  t.seed = stream_seed(seed, kBatchStream);
  return t;
}

ArchSpec RunConfig::arch() const { return ArchSpec::proxy(width, depth, skip_at, n_freqs); }

void RunConfig::validate_prune() const {
  if (strategy == Strategy::edge) {
    if (!threshold) throw InvalidArgument("edge pruning needs --threshold");
    if (*threshold < 0.0) throw InvalidArgument("--threshold must be >= 0");
  } else {
    if (!target_width) throw InvalidArgument("structured pruning needs --target-width");
    if (*target_width == 0) throw InvalidArgument("--target-width must be >= 1");
    if (strategy == Strategy::coreset && !(beta > 0.0)) throw InvalidArgument("--beta must be > 0");
  }
}

Strategy strategy_from_cli(const std::string& strategy, const std::string& criterion) {
  if (strategy != "importance") return parse_strategy(strategy);
  if (criterion == "in") return Strategy::importance_in;
  if (criterion == "out") return Strategy::importance_out;
  if (criterion == "product") return Strategy::importance_product;
  throw InvalidArgument("unknown criterion '" + criterion + "' (in|out|product)");
}

Evaluation evaluate(const MlpModel& model, const RgbImage& reference, std::string label,
                    std::string strategy, double sec_per_iter,
                    std::optional<double> remaining_edge_pct) {
  Evaluation e;
  e.render = quantize8(render_image(model, reference.width, reference.height));
  const double err = mse(reference, e.render);
  e.report.label = std::move(label);
  e.report.strategy = std::move(strategy);
  e.report.params = param_count(model);
  e.report.size_bytes = model_size_bytes(model);
  e.report.mse = err;
  e.report.psnr = psnr_from_mse(err);
  e.report.sec_per_iter = sec_per_iter;
  e.report.remaining_edge_pct = remaining_edge_pct;
  return e;
}

StageResult train_stage(const RunConfig& cfg, const RgbImage& image) {
  RngStream init_rng(stream_seed(cfg.seed, kInitStream));
  MlpModel model = init_model(cfg.arch(), init_rng);
  TrainResult tr = train(std::move(model), dataset_from_image(image),
                         cfg.train_config(cfg.train.iterations));
  tr.model.provenance.push_back("trained " + std::to_string(cfg.train.iterations) + " iterations");
  StageResult s;
  s.eval = evaluate(tr.model, image, "baseline-" + std::to_string(cfg.width), "baseline",
                    cfg.timing ? tr.sec_per_iter : 0.0);
  s.model = std::move(tr.model);
  s.log = std::move(tr.log);
  return s;
}

PruneStage prune_stage(const MlpModel& model, const RunConfig& cfg) {
  cfg.validate_prune();
  if (cfg.strategy == Strategy::edge) {
    auto r = prune_edges(model, *cfg.threshold);
    return {std::move(r.model), r.report};
  }
  PruneOptions opt;
  opt.strategy = cfg.strategy;
  opt.target_width = *cfg.target_width;
  opt.beta = cfg.beta;
  opt.reweight = cfg.reweight;
  opt.seed = stream_seed(cfg.seed, kPruneStream);
  auto r = prune_model(model, opt);
  return {std::move(r.model), r.report};
}

StageResult retrain_stage(MlpModel model, const RunConfig& cfg, const RgbImage& image,
                          std::string label, std::string strategy) {
  TrainResult tr = train(std::move(model), dataset_from_image(image),
                         cfg.train_config(cfg.retrain_iterations));
  if (cfg.retrain_iterations > 0) {
    tr.model.provenance.push_back("retrained " + std::to_string(cfg.retrain_iterations) +
                                  " iterations");
  }
  StageResult s;
  s.eval = evaluate(tr.model, image, std::move(label), std::move(strategy),
                    cfg.timing ? tr.sec_per_iter : 0.0);
  s.model = std::move(tr.model);
  s.log = std::move(tr.log);
  return s;
}

namespace {

// Appends rows as they finish so a failure leaves the completed ones.
void run_grid(const RunConfig& cfg, const RgbImage& image, std::vector<ExperimentReport>& rows) {
  const StageResult base = train_stage(cfg, image);
  rows.push_back(base.eval.report);
  for (Strategy s : cfg.grid_strategies) {
    RunConfig cell = cfg;
    cell.strategy = s;
    const std::string name(to_string(s));
    if (s == Strategy::edge) {
      if (!cfg.threshold) throw InvalidArgument("experiment: edge strategy needs a threshold");
      const auto pruned = prune_stage(base.model, cell);
      rows.push_back(evaluate(pruned.model, image, "edge-" + format_double(*cfg.threshold), name,
                              0.0, pruned.report.remaining_edge_pct())
                         .report);
      continue;
    }
    for (std::size_t w : cfg.grid_widths) {
      cell.target_width = w;
      const auto pruned = prune_stage(base.model, cell);
      auto retrained = retrain_stage(pruned.model, cell, image, name + "-" + std::to_string(w), name);
      rows.push_back(retrained.eval.report);
    }
  }
}

}  // namespace

std::vector<ExperimentReport> experiment_rows(const RunConfig& cfg, const RgbImage& image) {
  std::vector<ExperimentReport> rows;
  run_grid(cfg, image, rows);
  return rows;
}

ExperimentReport cmd_train(const RunConfig& cfg) {
  const RgbImage image = load_reference(cfg);
  ensure_out_dir(cfg);
  const StageResult s = train_stage(cfg, image);
  save_checkpoint(s.model, cfg.out_dir / "model.ckpt");
  save_ppm(s.eval.render, cfg.out_dir / "render.ppm");
  write_reports({s.eval.report}, cfg.out_dir / "report");
  return s.eval.report;
}

PruneReport cmd_prune(const std::filesystem::path& checkpoint_in, const RunConfig& cfg) {
  const MlpModel model = load_checkpoint(checkpoint_in);
  ensure_out_dir(cfg);
  const PruneStage p = prune_stage(model, cfg);
  save_checkpoint(p.model, cfg.out_dir / "pruned.ckpt");
  const std::string text = prune_report_json(p.report).dump(2) + "\n";
  write_file(cfg.out_dir / "prune_report.json",
             std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()),
                                           text.size()));
  return p.report;
}

ExperimentReport cmd_retrain(const std::filesystem::path& checkpoint_in, const RunConfig& cfg) {
  const RgbImage image = load_reference(cfg);
  MlpModel model = load_checkpoint(checkpoint_in);
  if (model.arch.input_dim != 2 || model.arch.view_branch) {
    throw InvalidArgument("retrain: checkpoint is not a 2D coordinate network");
  }
  ensure_out_dir(cfg);
  const StageResult s = retrain_stage(std::move(model), cfg, image, "retrain", "retrain");
  save_checkpoint(s.model, cfg.out_dir / "retrained.ckpt");
  save_ppm(s.eval.render, cfg.out_dir / "render.ppm");
  write_reports({s.eval.report}, cfg.out_dir / "report");
  return s.eval.report;
}

ExperimentReport cmd_eval(const std::filesystem::path& checkpoint, const std::filesystem::path& image,
                          const RunConfig& cfg) {
  const MlpModel model = load_checkpoint(checkpoint);
  const RgbImage reference = load_ppm(image);
  ensure_out_dir(cfg);
  const Evaluation e = evaluate(model, reference, "eval", "eval");
  save_ppm(e.render, cfg.out_dir / "eval_render.ppm");
  write_reports({e.report}, cfg.out_dir / "eval_report");
  return e.report;
}

std::vector<ExperimentReport> cmd_experiment(const RunConfig& cfg) {
  const RgbImage image = load_reference(cfg);
  ensure_out_dir(cfg);
  std::vector<ExperimentReport> rows;
  try {
    run_grid(cfg, image, rows);
  } catch (const std::exception& e) {
    if (!rows.empty()) write_reports(rows, cfg.out_dir / "experiment.partial");
    const std::string msg = std::string(e.what()) + "\n";
    write_file(cfg.out_dir / "experiment.error.txt",
               std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(msg.data()),
                                             msg.size()));
    throw;
  }
  write_reports(rows, cfg.out_dir / "experiment");
  return rows;
}

}  // namespace prunefield
