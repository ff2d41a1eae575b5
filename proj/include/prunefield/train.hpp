#pragma once

#include "prunefield/adam.hpp"
#include "prunefield/image.hpp"
#include "prunefield/model.hpp"

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace prunefield {

struct TrainConfig {
  std::size_t iterations = 1000;
  std::size_t batch_size = 256;
  /// Learning rate decays exponentially from adam.lr to adam.lr * lr_decay
  /// over the run.
  double lr_decay = 0.1;
  AdamConfig adam;
  std::uint64_t seed = 0;
  std::size_t log_every = 100;
  /// Iterations excluded from the timing mean.
  std::size_t timing_warmup = 100;

  void validate() const;
};

struct TrainLogEntry {
  std::size_t iteration = 0;
  double loss = 0.0;  // minibatch MSE before the step
};

struct TrainResult {
  MlpModel model;
  std::vector<TrainLogEntry> log;
  /// Mean wall time per iteration after the warmup; over all iterations
  /// when there are no more than timing_warmup of them; 0 for none.
  double sec_per_iter = 0.0;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(std::size_t iteration, MlpModel last_good);

  std::size_t iteration() const noexcept { return iteration_; }
  const MlpModel& last_good() const noexcept { return last_good_; }

 private:
  std::size_t iteration_;
  MlpModel last_good_;
};

/// Minibatch Adam on mean squared error. Batches are drawn with replacement
/// from the dataset by a stream seeded with cfg.seed.
TrainResult train(MlpModel model, const PixelDataset& dataset, const TrainConfig& cfg);

/// Evaluates the model at every pixel centre.
RgbImage render_image(const MlpModel& model, std::size_t width, std::size_t height);

}  // namespace prunefield
