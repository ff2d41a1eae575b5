#include "prunefield/errors.hpp"
#include "prunefield/image.hpp"
#include "prunefield/metrics.hpp"
#include "prunefield/mlp.hpp"
#include "prunefield/train.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>
#include <string>

using namespace prunefield;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& header, std::vector<std::uint8_t> payload) {
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

const std::vector<std::uint8_t> kTwoByTwo =
    bytes_of("P6\n2 2\n255\n", {255, 0, 0, 0, 255, 0, 0, 0, 255, 51, 102, 204});

RgbImage two_tone(std::size_t n) {
  RgbImage img(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const bool left = c < n / 2;
      img.at(r, c, 0) = left ? 0.9 : 0.1;
      img.at(r, c, 1) = left ? 0.2 : 0.7;
      img.at(r, c, 2) = 0.5;
    }
  }
  return img;
}

}  // namespace

TEST(Ppm, TwoByTwoFixture) {
  const PixelDataset ds = dataset_from_image(parse_ppm(kTwoByTwo));
  ASSERT_EQ(ds.size(), 4u);
  EXPECT_EQ(ds.width, 2u);
  const double xs[4] = {-0.5, 0.5, -0.5, 0.5};
  const double ys[4] = {-0.5, -0.5, 0.5, 0.5};
  const double rgb[4][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.2, 0.4, 0.8}};
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_EQ(ds.coords(i, 0), xs[i]);
    EXPECT_EQ(ds.coords(i, 1), ys[i]);
    for (Eigen::Index c = 0; c < 3; ++c) EXPECT_NEAR(ds.rgb(i, c), rgb[i][c], 1e-15);
  }
}

TEST(Ppm, CommentsInHeaderAccepted) {
  const auto img = parse_ppm(bytes_of("P6\n# made by hand\n1 1\n255\n", {1, 2, 3}));
  EXPECT_EQ(img.width, 1u);
}

TEST(Ppm, RoundTripThroughMemorisingLookup) {
  const RgbImage img = parse_ppm(kTwoByTwo);
  const PixelDataset ds = dataset_from_image(img);
  // A lookup table keyed on coordinates plays the role of a model that
  // memorised the training set.
  std::map<std::pair<double, double>, Eigen::RowVector3d> lookup;
  for (Eigen::Index i = 0; i < ds.coords.rows(); ++i) lookup[{ds.coords(i, 0), ds.coords(i, 1)}] = ds.rgb.row(i);
  RgbImage out(2, 2);
  const Matrix grid = pixel_grid(2, 2);
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    const auto& px = lookup.at({grid(i, 0), grid(i, 1)});
    for (int c = 0; c < 3; ++c) out.data[static_cast<std::size_t>(i * 3 + c)] = px[c];
  }
  EXPECT_EQ(encode_ppm(out), kTwoByTwo);
}

TEST(Ppm, ZeroDimensionIsParseError) {
  EXPECT_THROW(parse_ppm(bytes_of("P6\n0 2\n255\n", {})), ParseError);
}

TEST(Ppm, MalformedInputsReportOffsets) {
  try {
    parse_ppm(bytes_of("P5\n1 1\n255\n", {0}));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
  try {
    parse_ppm(bytes_of("P6\n2 2\n255\n", {1, 2, 3}));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 14u);
  }
  EXPECT_THROW(parse_ppm(bytes_of("P6\n2 2\n65535\n", std::vector<std::uint8_t>(24))), ParseError);
  EXPECT_THROW(parse_ppm(bytes_of("P6\nx 2\n255\n", {})), ParseError);
}

TEST(Render, ZeroModelIsUniformGray) {
  const RgbImage img = render_image(zero_model(ArchSpec::proxy(8, 2, 1, 2)), 5, 4);
  ASSERT_EQ(img.data.size(), 60u);
  for (double v : img.data) EXPECT_EQ(v, 0.5);
}

TEST(Render, OneByOneEvaluatesAtOrigin) {
  RngStream rng(3);
  const MlpModel m = init_model(ArchSpec::proxy(8, 2, 1, 2), rng);
  const RgbImage img = render_image(m, 1, 1);
  const Matrix y = predict(m, Matrix::Zero(1, 2));
  for (Eigen::Index c = 0; c < 3; ++c) EXPECT_EQ(img.data[static_cast<std::size_t>(c)], y(0, c));
}

TEST(Render, OutputInUnitRange) {
  RngStream rng(4);
  MlpModel m = init_model(ArchSpec::proxy(16, 3, 1, 4), rng);
  for (auto& l : m.layers) l.weights *= 25.0;
  const RgbImage img = render_image(m, 9, 7);
  for (double v : img.data) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Train, ZeroIterationsReturnsModelUnchanged) {
  RngStream rng(5);
  const MlpModel m = init_model(ArchSpec::proxy(8, 2, 1, 2), rng);
  TrainConfig cfg;
  cfg.iterations = 0;
  const TrainResult r = train(m, dataset_from_image(two_tone(4)), cfg);
  for (std::size_t k = 0; k < m.layers.size(); ++k) {
    EXPECT_EQ(r.model.layers[k].weights, m.layers[k].weights);
    EXPECT_EQ(r.model.layers[k].biases, m.layers[k].biases);
  }
  EXPECT_EQ(r.sec_per_iter, 0.0);
}

TEST(Train, TwoThousandIterationsReduceError) {
  RngStream rng(6);
  const RgbImage img = two_tone(16);
  const MlpModel m = init_model(ArchSpec::proxy(32, 3, 1, 4), rng);
  const double before = mse(img, render_image(m, 16, 16));
  TrainConfig cfg;
  cfg.iterations = 2000;
  cfg.batch_size = 64;
  cfg.log_every = 100;
  const TrainResult r = train(m, dataset_from_image(img), cfg);
  const double after = mse(img, render_image(r.model, 16, 16));
  EXPECT_LT(after, before);
  EXPECT_LT(r.log.back().loss, r.log.front().loss);
  EXPECT_EQ(r.log.size(), 21u);
  EXPECT_GT(r.sec_per_iter, 0.0);
}

TEST(Train, SameSeedIsBitIdentical) {
  const RgbImage img = two_tone(8);
  TrainConfig cfg;
  cfg.iterations = 50;
  cfg.batch_size = 16;
  cfg.seed = 77;
  RngStream a(1), b(1);
  const TrainResult r1 = train(init_model(ArchSpec::proxy(16, 3, 1, 3), a), dataset_from_image(img), cfg);
  const TrainResult r2 = train(init_model(ArchSpec::proxy(16, 3, 1, 3), b), dataset_from_image(img), cfg);
  for (std::size_t k = 0; k < r1.model.layers.size(); ++k) {
    EXPECT_EQ(r1.model.layers[k].weights, r2.model.layers[k].weights);
    EXPECT_EQ(r1.model.layers[k].biases, r2.model.layers[k].biases);
  }
}

TEST(Train, NanLossRaisesDivergedWithLastGoodModel) {
  RgbImage img = two_tone(4);
  img.data[0] = std::numeric_limits<double>::quiet_NaN();
  RngStream rng(8);
  const MlpModel m = init_model(ArchSpec::proxy(8, 2, 1, 2), rng);
  TrainConfig cfg;
  cfg.iterations = 100;
  cfg.batch_size = 16;
  try {
    train(m, dataset_from_image(img), cfg);
    FAIL() << "expected divergence";
  } catch (const TrainingDiverged& e) {
    for (const auto& l : e.last_good().layers) EXPECT_TRUE(l.weights.allFinite());
    EXPECT_EQ(e.last_good().layers.size(), m.layers.size());
  }
}

TEST(Train, RejectsBadInputs) {
  RngStream rng(9);
  const MlpModel m = init_model(ArchSpec::proxy(8, 2, 1, 2), rng);
  TrainConfig cfg;
  cfg.iterations = 1;
  EXPECT_THROW(train(m, PixelDataset{}, cfg), InvalidArgument);
  cfg.batch_size = 0;
  EXPECT_THROW(train(m, dataset_from_image(two_tone(4)), cfg), InvalidArgument);
}
