#include "prunefield/mlp.hpp"

#include "prunefield/encoding.hpp"
#include "prunefield/errors.hpp"

#include <string>

namespace prunefield {
namespace {

void add_bias(Matrix& z, const Vector& b) { z.rowwise() += b.transpose(); }

Matrix relu(const Matrix& z) { return z.cwiseMax(0.0); }

Matrix sigmoid(const Matrix& z) {
  return z.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

Matrix hcat(const Matrix& left, const Matrix& right) {
  Matrix out(left.rows(), left.cols() + right.cols());
  out.leftCols(left.cols()) = left;
  out.rightCols(right.cols()) = right;
  return out;
}

void require_coordinate_net(const MlpModel& model, const Matrix& coords) {
  if (model.arch.view_branch) {
    throw InvalidArgument("forward: the view-branch geometry is for accounting only");
  }
  if (static_cast<std::size_t>(coords.cols()) != model.arch.input_dim) {
    throw ShapeError("forward: batch has " + std::to_string(coords.cols()) +
                     " columns, model expects " + std::to_string(model.arch.input_dim));
  }
  check_model(model);
}

}  // namespace

ForwardResult forward(const MlpModel& model, const Matrix& coords) {
  require_coordinate_net(model, coords);
  const ArchSpec& arch = model.arch;
  const Matrix enc = positional_encode(coords, arch.n_freqs, arch.include_input);

  ForwardResult result;
  ForwardCache& cache = result.cache;
  cache.shapes = arch.layer_shapes();
  cache.inputs.reserve(model.layers.size());
  cache.pre.reserve(model.layers.size());

  Matrix h = enc;
  for (std::size_t k = 0; k < model.layers.size(); ++k) {
    const DenseLayer& layer = model.layers[k];
    Matrix input = (k == arch.skip_at) ? hcat(h, enc) : std::move(h);
    Matrix z = matmul_nt(input, layer.weights);
    add_bias(z, layer.biases);
    h = (k + 1 < model.layers.size()) ? relu(z) : sigmoid(z);
    cache.inputs.push_back(std::move(input));
    cache.pre.push_back(std::move(z));
  }
  cache.outputs = h;
  result.outputs = std::move(h);
  return result;
}

Matrix predict(const MlpModel& model, const Matrix& coords) {
  require_coordinate_net(model, coords);
  const ArchSpec& arch = model.arch;
  const Matrix enc = positional_encode(coords, arch.n_freqs, arch.include_input);
  Matrix h = enc;
  for (std::size_t k = 0; k < model.layers.size(); ++k) {
    const DenseLayer& layer = model.layers[k];
    Matrix z = (k == arch.skip_at) ? matmul_nt(hcat(h, enc), layer.weights)
                                   : matmul_nt(h, layer.weights);
    add_bias(z, layer.biases);
    h = (k + 1 < model.layers.size()) ? relu(z) : sigmoid(z);
  }
  return h;
}

Gradients backward(const MlpModel& model, const ForwardCache& cache, const Matrix& d_outputs) {
  const std::size_t n_layers = model.layers.size();
  if (cache.shapes != model.arch.layer_shapes() || cache.inputs.size() != n_layers ||
      cache.pre.size() != n_layers) {
    throw ContractError("backward: cache was produced by a different model geometry");
  }
  for (std::size_t k = 0; k < n_layers; ++k) {
    if (cache.shapes[k].rows != static_cast<std::size_t>(model.layers[k].weights.rows()) ||
        cache.shapes[k].cols != static_cast<std::size_t>(model.layers[k].weights.cols())) {
      throw ContractError("backward: model layers changed shape since forward");
    }
  }
  if (d_outputs.rows() != cache.outputs.rows() || d_outputs.cols() != cache.outputs.cols()) {
    throw ContractError("backward: upstream gradient does not match cached outputs");
  }

  Gradients g;
  g.weights.resize(n_layers);
  g.biases.resize(n_layers);

  // Through the sigmoid head.
  Matrix dz = d_outputs.cwiseProduct(cache.outputs.cwiseProduct(
      (1.0 - cache.outputs.array()).matrix()));
  for (std::size_t k = n_layers; k-- > 0;) {
    g.weights[k] = matmul_tn(dz, cache.inputs[k]);
    g.biases[k] = dz.colwise().sum().transpose();
    if (k == 0) break;
    Matrix d_input = matmul(dz, model.layers[k].weights);
    const Eigen::Index hidden = model.layers[k - 1].weights.rows();
    // Skip-layer input is [h, encoding]; the encoding has no parameters.
    Matrix dh = d_input.leftCols(hidden);
    dz = dh.cwiseProduct((cache.pre[k - 1].array() > 0.0).cast<double>().matrix());
  }
  return g;
}

}  // namespace prunefield
