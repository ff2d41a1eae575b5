#pragma once

#include "prunefield/arch.hpp"
#include "prunefield/rng.hpp"
#include "prunefield/tensor.hpp"

#include <string>
#include <vector>

namespace prunefield {

struct DenseLayer {
  Matrix weights;  // out x in
  Vector biases;   // out
};

struct MlpModel {
  ArchSpec arch;
  std::vector<DenseLayer> layers;
  /// Human-readable history of operations applied (pruning, retraining).
  std::vector<std::string> provenance;
};

/// Fresh model with weights and biases uniform in +-1/sqrt(fan_in).
MlpModel init_model(const ArchSpec& arch, RngStream& rng);

/// All weights and biases zero.
MlpModel zero_model(const ArchSpec& arch);

/// Throws ShapeError if layer shapes disagree with the architecture.
void check_model(const MlpModel& model);

/// Weight-matrix entries over all layers (biases excluded).
std::size_t edge_count(const MlpModel& model);

}  // namespace prunefield
