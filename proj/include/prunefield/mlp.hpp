#pragma once

#include "prunefield/arch.hpp"
#include "prunefield/model.hpp"
#include "prunefield/tensor.hpp"

#include <vector>

namespace prunefield {

/// Activations kept by forward() for the matching backward() call.
struct ForwardCache {
  std::vector<LayerShape> shapes;  // model geometry at forward time
  std::vector<Matrix> inputs;      // per layer: its (concatenated) input
  std::vector<Matrix> pre;         // per layer: pre-activation
  Matrix outputs;                  // sigmoid(rgb head)
};

struct ForwardResult {
  Matrix outputs;  // batch x output_dim, in [0, 1]
  ForwardCache cache;
};

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
};

/// ReLU trunk, sigmoid output. Only the coordinate (no view branch)
/// geometry is evaluable; the view-branch geometry exists for accounting.
ForwardResult forward(const MlpModel& model, const Matrix& coords);

/// forward() without keeping the cache.
Matrix predict(const MlpModel& model, const Matrix& coords);

/// Reverse-mode gradients given dLoss/dOutputs. Throws ContractError when
/// the cache does not belong to a forward pass of this model geometry.
Gradients backward(const MlpModel& model, const ForwardCache& cache, const Matrix& d_outputs);

}  // namespace prunefield
