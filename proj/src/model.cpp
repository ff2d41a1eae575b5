#include "prunefield/model.hpp"

#include "prunefield/errors.hpp"

#include <cmath>
#include <string>

namespace prunefield {

MlpModel init_model(const ArchSpec& arch, RngStream& rng) {
  arch.validate();
  MlpModel model;
  model.arch = arch;
  for (const LayerShape& s : arch.layer_shapes()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(s.cols));
    DenseLayer layer;
    layer.weights.resize(static_cast<Eigen::Index>(s.rows), static_cast<Eigen::Index>(s.cols));
    layer.biases.resize(static_cast<Eigen::Index>(s.rows));
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) {
      layer.weights.data()[i] = rng.uniform(-bound, bound);
    }
    for (Eigen::Index i = 0; i < layer.biases.size(); ++i) {
      layer.biases[i] = rng.uniform(-bound, bound);
    }
    model.layers.push_back(std::move(layer));
  }
  return model;
}

MlpModel zero_model(const ArchSpec& arch) {
  arch.validate();
  MlpModel model;
  model.arch = arch;
  for (const LayerShape& s : arch.layer_shapes()) {
    model.layers.push_back({Matrix::Zero(static_cast<Eigen::Index>(s.rows),
                                         static_cast<Eigen::Index>(s.cols)),
                            Vector::Zero(static_cast<Eigen::Index>(s.rows))});
  }
  return model;
}

void check_model(const MlpModel& model) {
  model.arch.validate();
  const auto shapes = model.arch.layer_shapes();
  if (shapes.size() != model.layers.size()) {
    throw ShapeError("model has " + std::to_string(model.layers.size()) + " layers, architecture " +
                     std::to_string(shapes.size()));
  }
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const DenseLayer& l = model.layers[i];
    if (static_cast<std::size_t>(l.weights.rows()) != shapes[i].rows ||
        static_cast<std::size_t>(l.weights.cols()) != shapes[i].cols ||
        static_cast<std::size_t>(l.biases.size()) != shapes[i].rows) {
      throw ShapeError("layer " + std::to_string(i) + " is " + std::to_string(l.weights.rows()) +
                       "x" + std::to_string(l.weights.cols()) + ", architecture says " +
                       std::to_string(shapes[i].rows) + "x" + std::to_string(shapes[i].cols));
    }
  }
}

std::size_t edge_count(const MlpModel& model) {
  std::size_t n = 0;
  for (const DenseLayer& l : model.layers) n += static_cast<std::size_t>(l.weights.size());
  return n;
}

}  // namespace prunefield
