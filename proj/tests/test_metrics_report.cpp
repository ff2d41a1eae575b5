#include "oracles.hpp"

#include "prunefield/errors.hpp"
#include "prunefield/metrics.hpp"
#include "prunefield/report.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace prunefield;

namespace {

RgbImage random_image(RngStream& rng, std::size_t w, std::size_t h) {
  RgbImage img(w, h);
  for (double& v : img.data) v = rng.uniform01();
  return img;
}

ExperimentReport sample_row() {
  ExperimentReport r;
  r.label = "coreset-64";
  r.strategy = "coreset";
  r.params = 177284;
  r.size_bytes = 709228;
  r.psnr = Psnr::finite(23.456789012345678);
  r.mse = 0.1 / 3.0;
  r.sec_per_iter = 0.0123;
  r.remaining_edge_pct = 41.25;
  return r;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("prunefield_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(Mse, IdenticalAndExtremes) {
  RngStream rng(1);
  const RgbImage a = random_image(rng, 5, 3);
  EXPECT_EQ(mse(a, a), 0.0);
  EXPECT_EQ(mse(RgbImage(4, 4, 0.0), RgbImage(4, 4, 1.0)), 1.0);
}

TEST(Mse, MatchesPixelLoop) {
  RngStream rng(2);
  for (int t = 0; t < 5; ++t) {
    const RgbImage a = random_image(rng, 4, 4);
    const RgbImage b = random_image(rng, 4, 4);
    EXPECT_NEAR(mse(a, b), oracle::image_mse(a, b), 1e-12);
  }
}

TEST(Mse, DimensionMismatch) {
  EXPECT_THROW(mse(RgbImage(4, 4), RgbImage(4, 5)), ShapeError);
  EXPECT_THROW(mse(RgbImage(3, 4), RgbImage(4, 3)), ShapeError);
}

TEST(Psnr, KnownValues) {
  EXPECT_NEAR(psnr_from_mse(0.01).db(), 20.0, 1e-12);
  EXPECT_NEAR(psnr_from_mse(1.0).db(), 0.0, 1e-15);
  EXPECT_NEAR(psnr_from_mse(4.0, 2.0).db(), 0.0, 1e-15);
  EXPECT_NEAR(psnr_from_mse(0.01 * 255 * 255, 255.0).db(), 20.0, 1e-12);
  EXPECT_THROW(psnr_from_mse(0.1, 0.0), InvalidArgument);
  EXPECT_THROW(psnr_from_mse(-0.1), InvalidArgument);
}

TEST(Psnr, IdenticalImagesGiveInfinitySentinel) {
  RngStream rng(3);
  const RgbImage a = random_image(rng, 3, 3);
  const Psnr p = psnr(a, a);
  EXPECT_TRUE(p.is_infinite());
  EXPECT_EQ(p, Psnr::infinite());
  EXPECT_NE(p, Psnr::finite(std::numeric_limits<double>::max()));
  EXPECT_THROW(static_cast<void>(p.db()), std::logic_error);
  EXPECT_EQ(p.to_string(), "inf");
}

TEST(Psnr, DecreasesAsErrorGrows) {
  double prev = std::numeric_limits<double>::infinity();
  for (double m = 1e-6; m < 2.0; m *= 1.7) {
    const double db = psnr_from_mse(m).db();
    EXPECT_LT(db, prev);
    prev = db;
  }
}

TEST(Psnr, ConsistentWithMse) {
  RngStream rng(4);
  const RgbImage a = random_image(rng, 6, 6);
  const RgbImage b = random_image(rng, 6, 6);
  EXPECT_NEAR(psnr(a, b).db(), 10.0 * std::log10(1.0 / mse(a, b)), 1e-9);
}

TEST(ParamCount, SingleLayer) {
  MlpModel m;
  DenseLayer l;
  l.weights = Matrix::Zero(256, 256);
  l.biases = Vector::Zero(256);
  m.layers.push_back(l);
  EXPECT_EQ(param_count(m), 65792u);
}

TEST(ParamCount, ClosedFormAgreesWithModels) {
  RngStream rng(5);
  for (std::size_t w : {1u, 7u, 64u, 256u}) {
    const ArchSpec a = ArchSpec::proxy(w);
    EXPECT_EQ(param_count(init_model(a, rng)), arch_param_count(a));
  }
  for (std::size_t w : {64u, 128u, 256u}) {
    const ArchSpec a = ArchSpec::nerf_replica(w);
    EXPECT_EQ(param_count(zero_model(a)), arch_param_count(a));
  }
}

TEST(ParamCount, ReplicaGeometryWithinTwoPercent) {
  EXPECT_NEAR(static_cast<double>(arch_param_count(ArchSpec::nerf_replica(256))), 595e3, 0.02 * 595e3);
  EXPECT_NEAR(static_cast<double>(arch_param_count(ArchSpec::nerf_replica(128))), 288e3, 0.02 * 288e3);
  EXPECT_NEAR(static_cast<double>(arch_param_count(ArchSpec::nerf_replica(64))), 177e3, 0.02 * 177e3);
}

TEST(ModelSize, HeaderPlusFloatPayload) {
  const MlpModel m = zero_model(ArchSpec::nerf_replica(256));
  const std::size_t header = checkpoint_header_bytes(m.arch);
  EXPECT_EQ(model_size_bytes(m), header + 4 * param_count(m));
  EXPECT_NEAR(static_cast<double>(model_size_bytes(m) - header), 2.38e6, 0.02 * 2.38e6);
  const MlpModel small = zero_model(ArchSpec::nerf_replica(64));
  EXPECT_NEAR(static_cast<double>(model_size_bytes(small) - header), 0.7e6, 0.02 * 0.7e6);
}

TEST(ModelSize, EmptyModelIsHeaderOnly) {
  MlpModel m;
  m.arch = ArchSpec::proxy(8);
  EXPECT_EQ(model_size_bytes(m), checkpoint_header_bytes(m.arch));
  // magic + 9 fixed fields + one entry per width
  EXPECT_EQ(checkpoint_header_bytes(m.arch), 8u + 4u * (9u + 8u));
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(20.0), "20");
  RngStream rng(6);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-1e6, 1e6) * std::pow(10.0, rng.uniform(-12, 12));
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(Report, CsvLayout) {
  const std::string csv = format_report({sample_row()}, ReportFormat::csv);
  std::istringstream in(csv);
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "label,strategy,params,size_bytes,psnr,mse,sec_per_iter,remaining_edge_pct");
  EXPECT_EQ(row.rfind("coreset-64,coreset,177284,709228,", 0), 0u);
  EXPECT_FALSE(std::getline(in, extra) && !extra.empty());
}

TEST(Report, RoundTripBothFormats) {
  ExperimentReport inf_row = sample_row();
  inf_row.label = "self";
  inf_row.psnr = Psnr::infinite();
  inf_row.mse = 0.0;
  inf_row.remaining_edge_pct.reset();
  const std::vector<ExperimentReport> rows{sample_row(), inf_row};
  for (ReportFormat f : {ReportFormat::csv, ReportFormat::json}) {
    EXPECT_EQ(parse_report(format_report(rows, f), f), rows);
  }
}

TEST(Report, InfinitySentinelEncoding) {
  ExperimentReport r = sample_row();
  r.psnr = Psnr::infinite();
  const std::string csv = format_report({r}, ReportFormat::csv);
  EXPECT_NE(csv.find(",inf,"), std::string::npos);
  const auto j = nlohmann::json::parse(format_report({r}, ReportFormat::json));
  const auto& row = j.at("reports").at(0);
  EXPECT_TRUE(row.at("psnr").is_null());
  EXPECT_TRUE(row.at("psnr_infinite").get<bool>());
  EXPECT_EQ(j.at("schema"), "prunefield-report-v1");
}

TEST(Report, EmitWritesFileAndRejectsBadInput) {
  const auto dir = temp_dir("report");
  emit_report({sample_row()}, ReportFormat::csv, dir / "r.csv");
  std::ifstream in(dir / "r.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), format_report({sample_row()}, ReportFormat::csv));
  EXPECT_THROW(emit_report({}, ReportFormat::csv, dir / "empty.csv"), InvalidArgument);
  EXPECT_THROW(emit_report({sample_row()}, ReportFormat::json, dir / "missing" / "deeper" / "r.json"),
               IoError);
  std::filesystem::remove_all(dir);
}

TEST(Report, MalformedInputIsRejected) {
  EXPECT_THROW(parse_report("nonsense\n", ReportFormat::csv), InvalidArgument);
  EXPECT_THROW(parse_report("{\"schema\": \"other\", \"reports\": []}", ReportFormat::json), InvalidArgument);
  EXPECT_THROW(parse_report("{", ReportFormat::json), InvalidArgument);
}
