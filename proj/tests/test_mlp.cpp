#include "oracles.hpp"

#include "prunefield/encoding.hpp"
#include "prunefield/errors.hpp"
#include "prunefield/metrics.hpp"
#include "prunefield/mlp.hpp"
#include "prunefield/model.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace prunefield;

namespace {

Matrix random_coords(RngStream& rng, Eigen::Index n) {
  Matrix m(n, 2);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1.0, 1.0);
  return m;
}

double mse_loss(const Matrix& y, const Matrix& t) {
  return (y - t).squaredNorm() / static_cast<double>(y.size());
}

// Largest relative error between analytic and central-difference gradients
// over every weight and bias of the model.
double max_gradient_error(MlpModel model, RngStream& rng, Eigen::Index batch) {
  const Matrix x = random_coords(rng, batch);
  Matrix target(batch, 3);
  for (Eigen::Index i = 0; i < target.size(); ++i) target.data()[i] = rng.uniform01();
  const ForwardResult fwd = forward(model, x);
  const Matrix d = (fwd.outputs - target) * (2.0 / static_cast<double>(target.size()));
  const Gradients g = backward(model, fwd.cache, d);
  const auto loss = [&] { return mse_loss(predict(model, x), target); };

  double worst = 0.0;
  auto compare = [&](double analytic, double numeric) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  };
  for (std::size_t k = 0; k < model.layers.size(); ++k) {
    auto& layer = model.layers[k];
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) {
      compare(g.weights[k].data()[i], oracle::central_difference(loss, layer.weights.data()[i], 1e-5));
    }
    for (Eigen::Index i = 0; i < layer.biases.size(); ++i) {
      compare(g.biases[k][i], oracle::central_difference(loss, layer.biases[i], 1e-5));
    }
  }
  return worst;
}

}  // namespace

TEST(PositionalEncode, OriginGivesZeroSinesUnitCosines) {
  const std::vector<double> p{0.0, 0.0};
  for (std::size_t L : {0u, 1u, 4u, 10u}) {
    const auto e = positional_encode(p, L, true);
    ASSERT_EQ(e.size(), 2 * L * 2 + 2);
    EXPECT_EQ(e[0], 0.0);
    EXPECT_EQ(e[1], 0.0);
    for (std::size_t i = 2; i < e.size(); i += 2) {
      EXPECT_EQ(e[i], 0.0);
      EXPECT_EQ(e[i + 1], 1.0);
    }
  }
}

TEST(PositionalEncode, QuarterPeriod) {
  const std::vector<double> p{0.5};
  const auto bare = positional_encode(p, 1, false);
  ASSERT_EQ(bare.size(), 2u);
  EXPECT_NEAR(bare[0], 1.0, 1e-15);
  EXPECT_NEAR(bare[1], 0.0, 1e-15);
  const auto with_raw = positional_encode(p, 1, true);
  ASSERT_EQ(with_raw.size(), 3u);
  EXPECT_EQ(with_raw[0], 0.5);
}

TEST(PositionalEncode, MatchesScalarLoop) {
  const std::vector<double> p{0.3, -0.7};
  for (bool raw : {false, true}) {
    const auto e = positional_encode(p, 10, raw);
    const auto ref = oracle::encode(p, 10, raw);
    ASSERT_EQ(e.size(), ref.size());
    for (std::size_t i = 0; i < e.size(); ++i) EXPECT_NEAR(e[i], ref[i], 1e-12) << i;
  }
}

TEST(PositionalEncode, BatchMatchesSingle) {
  Matrix pts(2, 2);
  pts << 0.3, -0.7, 0.1, 0.9;
  const Matrix e = positional_encode(pts, 3, true);
  for (Eigen::Index r = 0; r < 2; ++r) {
    const std::vector<double> p{pts(r, 0), pts(r, 1)};
    const auto single = positional_encode(p, 3, true);
    for (std::size_t i = 0; i < single.size(); ++i) EXPECT_EQ(e(r, static_cast<Eigen::Index>(i)), single[i]);
  }
}

TEST(Forward, ZeroNetworkGivesHalf) {
  const MlpModel m = zero_model(ArchSpec::proxy(16, 3, 1, 4));
  RngStream rng(1);
  const Matrix y = forward(m, random_coords(rng, 10)).outputs;
  EXPECT_EQ(y.rows(), 10);
  EXPECT_EQ(y.cols(), 3);
  EXPECT_TRUE((y.array() == 0.5).all());
}

TEST(Forward, HandComputedSmallNet) {
  ArchSpec a;
  a.input_dim = 2;
  a.n_freqs = 0;
  a.include_input = true;
  a.depth = 2;
  a.widths = {2, 2};
  a.skip_at = 1;
  MlpModel m = zero_model(a);
  m.layers[0].weights << 1, -1, 2, 1;
  m.layers[0].biases << 0, 0.25;
  m.layers[1].weights << 1, 0, 0, 0, 0, 1, 1, 0;  // reads [h0, p]
  m.layers[1].biases << 0, -1;
  m.layers[2].weights << 1, 0, 0, 1, -1, 2;
  m.layers[2].biases << 0, 0, 0.5;
  Matrix x(1, 2);
  x << 0.5, -1.0;
  // h0 = relu(0.5 + 1, 1 - 1 + 0.25) = (1.5, 0.25)
  // h1 = relu(1.5, 0.25 + 0.5 - 1) = (1.5, 0)
  // out = sigmoid(1.5, 0, -1.5 + 0.5)
  const Matrix y = forward(m, x).outputs;
  EXPECT_NEAR(y(0, 0), 1.0 / (1.0 + std::exp(-1.5)), 1e-15);
  EXPECT_NEAR(y(0, 1), 0.5, 1e-15);
  EXPECT_NEAR(y(0, 2), 1.0 / (1.0 + std::exp(1.0)), 1e-15);
}

TEST(Forward, MatchesPerSampleLoopOracle) {
  RngStream rng(21);
  const MlpModel m = init_model(ArchSpec::proxy(12, 4, 2, 3), rng);
  const Matrix x = random_coords(rng, 6);
  const Matrix y = forward(m, x).outputs;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const auto ref = oracle::forward_one(m, {x(r, 0), x(r, 1)});
    for (Eigen::Index c = 0; c < 3; ++c) EXPECT_NEAR(y(r, c), ref[static_cast<std::size_t>(c)], 1e-12);
  }
  EXPECT_EQ(predict(m, x), y);
}

TEST(Forward, ShapeErrors) {
  RngStream rng(2);
  const MlpModel m = init_model(ArchSpec::proxy(8, 2, 1, 2), rng);
  EXPECT_THROW(forward(m, Matrix::Zero(4, 3)), ShapeError);
  MlpModel broken = m;
  broken.layers[1].weights = Matrix::Zero(8, 5);
  EXPECT_THROW(forward(broken, Matrix::Zero(4, 2)), ShapeError);
  RngStream rng2(3);
  EXPECT_THROW(forward(init_model(ArchSpec::nerf_replica(), rng2), Matrix::Zero(1, 3)), InvalidArgument);
}

TEST(Backward, ZeroUpstreamGivesZeroGradients) {
  RngStream rng(4);
  const MlpModel m = init_model(ArchSpec::proxy(8, 3, 1, 2), rng);
  const auto fwd = forward(m, random_coords(rng, 5));
  const Gradients g = backward(m, fwd.cache, Matrix::Zero(5, 3));
  for (std::size_t k = 0; k < m.layers.size(); ++k) {
    EXPECT_TRUE((g.weights[k].array() == 0.0).all());
    EXPECT_TRUE((g.biases[k].array() == 0.0).all());
  }
}

TEST(Backward, MatchesFiniteDifferencesTwoLayerWidthEight) {
  RngStream rng(5);
  const MlpModel m = init_model(ArchSpec::proxy(8, 2, 1, 2), rng);
  EXPECT_LT(max_gradient_error(m, rng, 6), 1e-4);
}

TEST(Backward, RandomSmallNetsMatchFiniteDifferences) {
  RngStream rng(6);
  for (int trial = 0; trial < 6; ++trial) {
    const std::size_t depth = 2 + rng.below(2);
    const std::size_t width = 2 + rng.below(15);
    const std::size_t skip = 1 + rng.below(depth - 1);
    const MlpModel m = init_model(ArchSpec::proxy(width, depth, skip, rng.below(4)), rng);
    EXPECT_LT(max_gradient_error(m, rng, 4), 1e-4) << "depth " << depth << " width " << width;
  }
}

TEST(Backward, PerfectPredictionHasZeroGradient) {
  RngStream rng(7);
  const MlpModel m = init_model(ArchSpec::proxy(8, 2, 1, 2), rng);
  const Matrix x = random_coords(rng, 4);
  const auto fwd = forward(m, x);
  const Matrix d = (fwd.outputs - fwd.outputs) * 2.0;
  const Gradients g = backward(m, fwd.cache, d);
  for (const auto& w : g.weights) EXPECT_EQ(w.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Backward, MismatchedCacheIsContractError) {
  RngStream rng(8);
  const MlpModel m = init_model(ArchSpec::proxy(8, 2, 1, 2), rng);
  const MlpModel other = init_model(ArchSpec::proxy(6, 2, 1, 2), rng);
  const auto fwd = forward(m, random_coords(rng, 4));
  EXPECT_THROW(backward(other, fwd.cache, Matrix::Zero(4, 3)), ContractError);
  EXPECT_THROW(backward(m, fwd.cache, Matrix::Zero(5, 3)), ContractError);
}

TEST(Model, PermutingHiddenNeuronsLeavesOutputUnchanged) {
  RngStream rng(9);
  const MlpModel m = init_model(ArchSpec::proxy(10, 4, 2, 3), rng);
  const Matrix x = random_coords(rng, 8);
  const Matrix y = predict(m, x);
  for (std::size_t k = 0; k < m.arch.depth; ++k) {
    std::vector<Eigen::Index> perm(10);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    MlpModel p = m;
    for (Eigen::Index i = 0; i < 10; ++i) {
      p.layers[k].weights.row(i) = m.layers[k].weights.row(perm[static_cast<std::size_t>(i)]);
      p.layers[k].biases[i] = m.layers[k].biases[perm[static_cast<std::size_t>(i)]];
      p.layers[k + 1].weights.col(i) = m.layers[k + 1].weights.col(perm[static_cast<std::size_t>(i)]);
    }
    EXPECT_LE((predict(p, x) - y).cwiseAbs().maxCoeff(), 1e-12) << "layer " << k;
  }
}

TEST(Arch, Invariants) {
  EXPECT_NO_THROW(ArchSpec::proxy().validate());
  EXPECT_THROW(ArchSpec::proxy(256, 1, 0).validate(), InvalidArgument);
  EXPECT_THROW(ArchSpec::proxy(256, 8, 8).validate(), InvalidArgument);
  EXPECT_THROW(ArchSpec::proxy(256, 8, 0).validate(), InvalidArgument);
  EXPECT_THROW(ArchSpec::proxy(0).validate(), InvalidArgument);
}

TEST(Arch, ProxyShapes) {
  const auto shapes = ArchSpec::proxy().layer_shapes();
  ASSERT_EQ(shapes.size(), 9u);
  EXPECT_EQ(shapes[0], (LayerShape{256, 42}));
  EXPECT_EQ(shapes[4], (LayerShape{256, 256 + 42}));
  EXPECT_EQ(shapes[8], (LayerShape{3, 256}));
}

TEST(Arch, ReplicaGeometryCountsAt256) {
  RngStream rng(1);
  const MlpModel m = init_model(ArchSpec::nerf_replica(), rng);
  // 63*256+256 + 6*(256*256+256) + (256+63)*256+256 + (256+1) + (256*256+256)
  // + (256+27)*128+128 + 128*3+3
  EXPECT_EQ(param_count(m), 595844u);
  EXPECT_EQ(arch_param_count(m.arch), 595844u);
}
