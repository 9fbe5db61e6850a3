#include <gtest/gtest.h>
#include <png.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "imscat/harness.hpp"
#include "imscat/heatmap.hpp"
#include "imscat/io.hpp"
#include "imscat/noise.hpp"

using namespace imscat;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("imscat_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.M = 4;
  c.J = 8;
  c.N = 8;
  c.fine_grid = 64;
  c.iters = 2;
  return c;
}

}  // namespace

TEST(Noise, ZeroSigmaIsBitwiseIdentity) {
  FarFieldSet clean;
  clean.values = CMatrix::Random(5, 4);
  const FarFieldSet out = add_noise(clean, NoiseModel{0.0, 3});
  EXPECT_TRUE((out.values.array() == clean.values.array()).all());
}

TEST(Noise, SampleVarianceAndDeterminism) {
  const double sigma = 0.1;
  FarFieldSet clean;
  clean.values = CMatrix::Zero(100, 1000);
  const FarFieldSet a = add_noise(clean, NoiseModel{sigma, 42});
  const FarFieldSet b = add_noise(clean, NoiseModel{sigma, 42});
  const FarFieldSet c = add_noise(clean, NoiseModel{sigma, 43});
  EXPECT_TRUE((a.values.array() == b.values.array()).all());
  EXPECT_FALSE((a.values.array() == c.values.array()).all());
  const double n = static_cast<double>(a.values.size());
  const double mean_re = a.values.real().sum() / n;
  const double var_re = (a.values.real().array() - mean_re).square().sum() / (n - 1);
  const double var_im = (a.values.imag().array() - a.values.imag().mean()).square().sum() / (n - 1);
  EXPECT_GE(var_re, 0.97 * sigma * sigma);
  EXPECT_LE(var_re, 1.03 * sigma * sigma);
  EXPECT_GE(var_im, 0.97 * sigma * sigma);
  EXPECT_LE(var_im, 1.03 * sigma * sigma);
  // Real and imaginary parts are uncorrelated.
  const double cov = ((a.values.real().array() - mean_re) * (a.values.imag().array() - a.values.imag().mean())).sum() / n;
  EXPECT_LT(std::abs(cov), 0.02 * sigma * sigma);
  EXPECT_EQ(a.sigma, sigma);
}

TEST(Noise, CounterStreamIsPure) {
  EXPECT_EQ(counter_uniform(7, 123), counter_uniform(7, 123));
  for (std::uint64_t c = 0; c < 1000; ++c) {
    const double u = counter_uniform(1, c);
    EXPECT_GT(u, 0.0);
    EXPECT_LE(u, 1.0);
  }
}

TEST(Io, MediumRoundTrip) {
  const fs::path dir = scratch("medium");
  const CellGrid g = make_grid(3.0, 8);
  CVector v = CVector::Random(256);
  v[3] = Complex(1.0 / 3.0, -2e-300);
  const Medium m(g, v);
  write_medium_csv(dir / "m.csv", m);
  const Medium back = read_medium_csv(dir / "m.csv", g);
  EXPECT_TRUE((back.values().array() == m.values().array()).all());
  std::ifstream in(dir / "m.csv");
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(header, "m1,m2,x,y,re_q,im_q");
  EXPECT_EQ(first.substr(0, 6), "-8,-8,");
  EXPECT_EQ(second.substr(0, 6), "-7,-8,");
}

TEST(Io, FarFieldRoundTripWithMeta) {
  const fs::path dir = scratch("farfield");
  FarFieldSet f;
  f.obs_count = 3;
  f.inc_count = 2;
  f.values = CMatrix::Random(3, 2);
  write_farfield_csv(dir / "farfield.csv", f);
  const FarFieldSet back = read_farfield_csv(dir / "farfield.csv", 3, 2);
  EXPECT_TRUE((back.values.array() == f.values.array()).all());
  EXPECT_THROW(read_farfield_csv(dir / "farfield.csv", 4, 2), DimensionMismatch);
  FarFieldMeta meta;
  meta.k = 7;
  meta.J = 3;
  meta.N = 2;
  meta.sigma = 0.1;
  meta.seed = 99;
  meta.S = 3;
  meta.M = 8;
  write_farfield_meta(dir / "farfield.meta.json", meta);
  const FarFieldMeta m2 = read_farfield_meta(dir / "farfield.meta.json");
  EXPECT_EQ(m2.k, 7.0);
  EXPECT_EQ(m2.seed, 99u);
  EXPECT_EQ(m2.sigma, 0.1);
}

TEST(Heatmap, ZeroUniformAndDiskPixelRatio) {
  const fs::path dir = scratch("heatmap");
  const CellGrid g = make_grid(3.0, 8);
  auto read = [](const fs::path& p) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    EXPECT_TRUE(png_image_begin_read_from_file(&img, p.c_str()));
    img.format = PNG_FORMAT_RGB;
    std::vector<unsigned char> buf(PNG_IMAGE_SIZE(img));
    EXPECT_TRUE(png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr));
    return std::make_pair(img.width, buf);
  };
  render_heatmap(Medium(g), dir / "zero.png");
  auto [w0, zero] = read(dir / "zero.png");
  EXPECT_EQ(w0, 16u * 16u);
  EXPECT_TRUE(std::all_of(zero.begin(), zero.end(), [](unsigned char c) { return c == 0; }));

  const Medium truth = characteristic_medium(ShapeId{ShapeTag::B1}, g);
  render_heatmap(truth, dir / "b1.png");
  render_heatmap(truth, dir / "b1_again.png");
  EXPECT_EQ(slurp(dir / "b1.png"), slurp(dir / "b1_again.png"));
  auto [w1, px] = read(dir / "b1.png");
  std::size_t bright = 0;
  for (std::size_t i = 1; i < px.size(); i += 3) bright += px[i] > 0;
  int cells = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) cells += truth[i].real() > 0;
  EXPECT_DOUBLE_EQ(static_cast<double>(bright) / (w1 * w1), cells / 256.0);
  EXPECT_EQ(heatmap_level(0.12), 255);
  EXPECT_EQ(heatmap_level(-1.0), 0);
}

TEST(Harness, ConfigValidation) {
  ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  c.rho = 1.2;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = ExperimentConfig{};
  c.fine_grid = 96;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(parse_algo("EKF"), Algo::EKF);
  EXPECT_THROW(parse_algo("ukf"), std::invalid_argument);
}

TEST(Harness, GenerateDataProperties) {
  ExperimentConfig c = small_config();
  c.sigma = 0.0;
  const FarFieldSet clean = generate_data(c);
  // Reciprocity on the data grid: J = N = 8 closed under negation.
  for (int j = 0; j < 8; ++j) {
    for (int n = 0; n < 8; ++n) {
      EXPECT_LE(std::abs(clean.values(j, n) - clean.values((n + 4) % 8, (j + 4) % 8)), 1e-6 * std::abs(clean.values(j, n)));
    }
  }
  c.sigma = 0.01;
  const FarFieldSet zero = generate_data(c, Medium(c.grid()));
  EXPECT_GT(zero.values.norm(), 0.0);
  EXPECT_LT(zero.values.cwiseAbs().maxCoeff(), 0.1);
  ExperimentConfig c2 = c;
  c2.seed = c.seed + 1;
  const FarFieldSet a = generate_data(c), b = generate_data(c2);
  EXPECT_GT((a.values - b.values).norm(), 0.0);
  EXPECT_LT(((a.values - clean.values) + (clean.values - b.values) - (a.values - b.values)).norm(), 1e-15);
}

TEST(Harness, ZeroIterationsReportsE0) {
  ExperimentConfig c = small_config();
  c.iters = 0;
  const FarFieldSet data = generate_data(c);
  for (Algo algo : {Algo::FLM, Algo::KFL, Algo::EKF}) {
    c.algo = algo;
    const ExperimentReport r = run_experiment(c, data);
    ASSERT_EQ(r.run.records.size(), 1u);
    EXPECT_DOUBLE_EQ(r.mse_series()[0], mse(c.truth(), Medium(c.grid())));
  }
}

TEST(Harness, CompareWritesDeterministicOutputs) {
  ExperimentConfig c = small_config();
  c.png = true;
  c.verbose_trace = true;
  const fs::path a = scratch("cmp_a"), b = scratch("cmp_b");
  EXPECT_EQ(command_compare(c, a, std::nullopt), 0);
  EXPECT_EQ(command_compare(c, b, std::nullopt), 0);
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    EXPECT_EQ(slurp(entry.path()), slurp(b / rel)) << rel;
  }
  EXPECT_TRUE(fs::exists(a / "mse.csv"));
  EXPECT_TRUE(fs::exists(a / "meta.json"));
  EXPECT_TRUE(fs::exists(a / "farfield.csv"));
  EXPECT_TRUE(fs::exists(a / "kfl" / "medium_iter_0.csv"));
  EXPECT_TRUE(fs::exists(a / "ekf" / "medium_iter_0.png"));
  EXPECT_TRUE(fs::exists(a / "ekf" / "kalman_trace.csv"));
  std::ifstream in(a / "mse.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "iter,algo,mse,alpha,seconds");
}

TEST(Harness, ReconstructFromSavedDataMatchesInline) {
  ExperimentConfig c = small_config();
  const fs::path gen = scratch("rec_gen"), inl = scratch("rec_inline"), saved = scratch("rec_saved");
  ASSERT_EQ(command_forward(c, gen), 0);
  ASSERT_EQ(command_reconstruct(c, inl, std::nullopt), 0);
  ASSERT_EQ(command_reconstruct(c, saved, gen), 0);
  EXPECT_EQ(slurp(inl / "mse.csv"), slurp(saved / "mse.csv"));
  ExperimentConfig wrong = c;
  wrong.k = 7.0;
  EXPECT_THROW(command_reconstruct(wrong, saved, gen), std::invalid_argument);
}
