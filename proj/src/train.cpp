#include "prunefield/train.hpp"

#include "prunefield/errors.hpp"
#include "prunefield/mlp.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace prunefield {

void TrainConfig::validate() const {
  if (batch_size == 0) throw InvalidArgument("TrainConfig: batch_size must be at least 1");
  if (!(adam.lr > 0.0)) throw InvalidArgument("TrainConfig: learning rate must be positive");
  if (!(lr_decay > 0.0)) throw InvalidArgument("TrainConfig: lr_decay must be positive");
  if (log_every == 0) throw InvalidArgument("TrainConfig: log_every must be at least 1");
}

TrainingDiverged::TrainingDiverged(std::size_t iteration, MlpModel last_good)
    : std::runtime_error("training diverged at iteration " + std::to_string(iteration)),
      iteration_(iteration),
      last_good_(std::move(last_good)) {}

TrainResult train(MlpModel model, const PixelDataset& dataset, const TrainConfig& cfg) {
  cfg.validate();
  TrainResult result;
  if (cfg.iterations == 0) {
    result.model = std::move(model);
    return result;
  }
  if (model.arch.input_dim != 2) throw InvalidArgument("train: model must take 2D coordinates");
  if (dataset.size() == 0) throw InvalidArgument("train: empty dataset");
  check_model(model);

  const std::size_t n_layers = model.layers.size();
  std::vector<AdamState> w_state;
  std::vector<AdamState> b_state;
  for (const DenseLayer& l : model.layers) {
    w_state.emplace_back(l.weights.rows(), l.weights.cols(), cfg.adam);
    b_state.emplace_back(l.biases.size(), 1, cfg.adam);
  }

  RngStream rng(cfg.seed);
  const auto batch = static_cast<Eigen::Index>(cfg.batch_size);
  Matrix coords(batch, dataset.coords.cols());
  Matrix target(batch, dataset.rgb.cols());
  const double denom = static_cast<double>(batch * target.cols());

  using clock = std::chrono::steady_clock;
  double timed_seconds = 0.0;
  std::size_t timed_iters = 0;
  const bool skip_warmup = cfg.iterations > cfg.timing_warmup;

  // Refreshed at every log point whose loss is finite.
  MlpModel last_good = model;

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const auto t0 = clock::now();
    for (Eigen::Index r = 0; r < batch; ++r) {
      const auto idx = static_cast<Eigen::Index>(rng.below(dataset.size()));
      coords.row(r) = dataset.coords.row(idx);
      target.row(r) = dataset.rgb.row(idx);
    }
    ForwardResult fwd = forward(model, coords);
    const Matrix diff = fwd.outputs - target;
    const double loss = diff.squaredNorm() / denom;
    if (!std::isfinite(loss)) throw TrainingDiverged(it, std::move(last_good));
    if (it % cfg.log_every == 0 || it + 1 == cfg.iterations) {
      result.log.push_back({it, loss});
      if (it > 0) last_good = model;
    }

    Gradients g = backward(model, fwd.cache, diff * (2.0 / denom));

    const double progress = static_cast<double>(it) / static_cast<double>(cfg.iterations);
    const double lr = cfg.adam.lr * std::pow(cfg.lr_decay, progress);
    bool finite = true;
    for (std::size_t k = 0; k < n_layers; ++k) {
      if (!g.weights[k].allFinite() || !g.biases[k].allFinite()) finite = false;
    }
    if (!finite) throw TrainingDiverged(it, std::move(model));
    for (std::size_t k = 0; k < n_layers; ++k) {
      w_state[k].cfg.lr = lr;
      b_state[k].cfg.lr = lr;
      adam_step(model.layers[k].weights, g.weights[k], w_state[k]);
      adam_step(std::span<double>(model.layers[k].biases.data(),
                                  static_cast<std::size_t>(model.layers[k].biases.size())),
                std::span<const double>(g.biases[k].data(),
                                        static_cast<std::size_t>(g.biases[k].size())),
                b_state[k]);
    }
    const double dt = std::chrono::duration<double>(clock::now() - t0).count();
    if (!skip_warmup || it >= cfg.timing_warmup) {
      timed_seconds += dt;
      ++timed_iters;
    }
  }
  result.sec_per_iter = timed_iters ? timed_seconds / static_cast<double>(timed_iters) : 0.0;
  result.model = std::move(model);
  return result;
}

RgbImage render_image(const MlpModel& model, std::size_t width, std::size_t height) {
  RgbImage img(width, height);
  if (model.arch.output_dim != 3) throw InvalidArgument("render_image: model must emit RGB");
  if (width == 0 || height == 0) return img;
  const Matrix grid = pixel_grid(width, height);
  // Chunked so large renders do not materialise one huge activation matrix.
  constexpr Eigen::Index kChunk = 4096;
  for (Eigen::Index start = 0; start < grid.rows(); start += kChunk) {
    const Eigen::Index n = std::min(kChunk, grid.rows() - start);
    const Matrix out = predict(model, grid.middleRows(start, n));
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < out.cols(); ++c) {
        img.data[static_cast<std::size_t>((start + r) * out.cols() + c)] = out(r, c);
      }
    }
  }
  return img;
}

}  // namespace prunefield
