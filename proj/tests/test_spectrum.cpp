#include <gtest/gtest.h>

#include <geoscat/spectrum.hpp>
#include <geoscat/spectrum_io.hpp>
#include <geoscat/pointcloud.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

using namespace geoscat;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Independent quadrature oracle: plain summation loops, no Eigen products.
double gram_entry(const Spectrum& s, Eigen::Index a, Eigen::Index b) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.n_nodes(); ++i)
    acc += s.nodes.weights[i] * s.eigenfunctions(i, a) * s.eigenfunctions(i, b);
  return acc;
}

double max_gram_defect(const Spectrum& s) {
  double worst = 0.0;
  for (Eigen::Index a = 0; a < s.n_modes(); ++a)
    for (Eigen::Index b = 0; b < s.n_modes(); ++b) {
      double want = (a == b) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(gram_entry(s, a, b) - want));
    }
  return worst;
}

Eigen::MatrixXd circle_points(Eigen::Index n, double radius, const std::vector<double>& angles) {
  Eigen::MatrixXd pts(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    pts(i, 0) = radius * std::cos(angles[static_cast<std::size_t>(i)]);
    pts(i, 1) = radius * std::sin(angles[static_cast<std::size_t>(i)]);
  }
  return pts;
}

std::vector<double> uniform_angles(Eigen::Index n) {
  std::vector<double> a(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = kTwoPi * double(i) / double(n);
  return a;
}

std::vector<double> random_angles(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  std::vector<double> a(static_cast<std::size_t>(n));
  for (auto& x : a) x = u(gen);
  std::sort(a.begin(), a.end());
  return a;
}

}  // namespace

TEST(CircleSpectrum, EigenvaluesAreSquaredFrequencies) {
  auto s = build_circle_spectrum(256, 33);
  ASSERT_EQ(s->n_modes(), 33);
  ASSERT_EQ(s->n_nodes(), 256);
  EXPECT_EQ(s->eigenvalues[0], 0.0);
  // lambda pattern 0, 1, 1, 4, 4, 9, 9, ...
  for (Eigen::Index n = 1; n < s->n_modes(); ++n) {
    double k = std::floor((double(n) + 1.0) / 2.0);
    EXPECT_DOUBLE_EQ(s->eigenvalues[n], k * k) << "mode " << n;
  }
  for (Eigen::Index n = 1; n < s->n_modes(); ++n)
    EXPECT_GE(s->eigenvalues[n], s->eigenvalues[n - 1]);
}

TEST(CircleSpectrum, ConstantModeValue) {
  auto s = build_circle_spectrum(64, 5);
  for (Eigen::Index i = 0; i < s->n_nodes(); ++i)
    EXPECT_NEAR(s->eigenfunctions(i, 0), 0.39894228040143268, 1e-15);
}

TEST(CircleSpectrum, CosineBeforeSineOrdering) {
  auto s = build_circle_spectrum(64, 5);
  // mode 1 is cos(theta)/sqrt(pi): value 1/sqrt(pi) at theta=0.
  EXPECT_NEAR(s->eigenfunctions(0, 1), 0.56418958354775628, 1e-15);
  // mode 2 is sin(theta)/sqrt(pi): value 0 at theta=0.
  EXPECT_NEAR(s->eigenfunctions(0, 2), 0.0, 1e-15);
  Eigen::Index quarter = 16;  // theta = pi/2
  EXPECT_NEAR(s->eigenfunctions(quarter, 2), 0.56418958354775628, 1e-12);
}

TEST(CircleSpectrum, OrthonormalUnderQuadrature) {
  auto s = build_circle_spectrum(256, 33);
  EXPECT_LT(max_gram_defect(*s), 1e-10);
}

TEST(CircleSpectrum, WeightsSumToCircumference) {
  auto s = build_circle_spectrum(100, 7);
  EXPECT_NEAR(s->nodes.weights.sum(), kTwoPi, 1e-12);
  EXPECT_NEAR(s->volume(), kTwoPi, 1e-12);
  for (Eigen::Index i = 0; i < s->n_nodes(); ++i) EXPECT_GT(s->nodes.weights[i], 0.0);
}

TEST(CircleSpectrum, GeodesicIsArcDistance) {
  auto s = build_circle_spectrum(64, 5);
  ASSERT_TRUE(static_cast<bool>(s->nodes.geodesic));
  EXPECT_NEAR(s->nodes.geodesic(0, 16), kTwoPi / 4.0, 1e-12);
  EXPECT_NEAR(s->nodes.geodesic(0, 32), kTwoPi / 2.0, 1e-12);
  // wraparound: nodes 0 and 63 are one step apart
  EXPECT_NEAR(s->nodes.geodesic(0, 63), kTwoPi / 64.0, 1e-12);
  EXPECT_NEAR(s->nodes.geodesic(5, 9), s->nodes.geodesic(9, 5), 0.0);
}

TEST(CircleSpectrum, RejectsAliasedGrid) {
  // 33 modes reach frequency 16; fewer than 64 nodes would alias.
  EXPECT_THROW(build_circle_spectrum(63, 33), std::invalid_argument);
  EXPECT_NO_THROW(build_circle_spectrum(64, 33));
  EXPECT_THROW(build_circle_spectrum(3, 1), std::invalid_argument);
  EXPECT_THROW(build_circle_spectrum(64, 0), std::invalid_argument);
}

TEST(CircleSpectrum, AnalyticBasisMatchesSampledValues) {
  auto s = build_circle_spectrum(64, 9);
  ASSERT_TRUE(s->has_analytic_basis());
  Eigen::VectorXd p(1);
  for (Eigen::Index i : {0, 7, 33}) {
    p[0] = s->intrinsic(i, 0);
    for (Eigen::Index n = 0; n < s->n_modes(); ++n)
      EXPECT_NEAR(s->basis_value(n, p), s->eigenfunctions(i, n), 1e-12);
  }
}

TEST(TorusSpectrum, EigenvalueLadderWithMultiplicities) {
  auto s = build_torus_spectrum(32, 25);
  ASSERT_EQ(s->n_nodes(), 1024);
  ASSERT_EQ(s->n_modes(), 25);
  std::vector<double> want = {0, 1, 1, 1, 1, 2, 2, 2, 2, 4, 4, 4, 4,
                              5, 5, 5, 5, 5, 5, 5, 5, 8, 8, 8, 8};
  for (Eigen::Index n = 0; n < 25; ++n)
    EXPECT_DOUBLE_EQ(s->eigenvalues[n], want[static_cast<std::size_t>(n)]) << "mode " << n;
}

TEST(TorusSpectrum, ConstantModeAndWeights) {
  auto s = build_torus_spectrum(16, 9);
  for (Eigen::Index i = 0; i < 10; ++i)
    EXPECT_NEAR(s->eigenfunctions(i, 0), 0.15915494309189535, 1e-15);
  EXPECT_NEAR(s->volume(), kTwoPi * kTwoPi, 1e-10);
  EXPECT_EQ(s->dimension, 2);
}

TEST(TorusSpectrum, OrthonormalUnderQuadrature) {
  auto s = build_torus_spectrum(16, 25);
  EXPECT_LT(max_gram_defect(*s), 1e-10);
}

TEST(TorusSpectrum, ProductGeodesic) {
  auto s = build_torus_spectrum(16, 9);
  // node layout: index = i1 * 16 + i2, step 2*pi/16 per axis
  double step = kTwoPi / 16.0;
  EXPECT_NEAR(s->nodes.geodesic(0, 16), step, 1e-12);         // one step along axis 1
  EXPECT_NEAR(s->nodes.geodesic(0, 1), step, 1e-12);          // one step along axis 2
  EXPECT_NEAR(s->nodes.geodesic(0, 17), step * std::sqrt(2.0), 1e-12);
}

TEST(TorusSpectrum, AnalyticBasisMatchesSampledValues) {
  auto s = build_torus_spectrum(16, 25);
  ASSERT_TRUE(s->has_analytic_basis());
  Eigen::VectorXd p(2);
  for (Eigen::Index i : {0, 37, 200}) {
    p[0] = s->intrinsic(i, 0);
    p[1] = s->intrinsic(i, 1);
    for (Eigen::Index n = 0; n < s->n_modes(); ++n)
      EXPECT_NEAR(s->basis_value(n, p), s->eigenfunctions(i, n), 1e-12);
  }
}

TEST(TorusSpectrum, DeterministicRebuild) {
  auto a = build_torus_spectrum(16, 25);
  auto b = build_torus_spectrum(16, 25);
  EXPECT_TRUE(a->eigenfunctions == b->eigenfunctions);
  EXPECT_TRUE(a->eigenvalues == b->eigenvalues);
}

TEST(SpectrumCache, RoundTripIsBitExact) {
  auto s = build_circle_spectrum(128, 17);
  fs::path file = fs::path(::testing::TempDir()) / "roundtrip.gspc";
  save_spectrum(*s, file);
  auto r = load_spectrum(file);
  EXPECT_TRUE(r->eigenvalues == s->eigenvalues);
  EXPECT_TRUE(r->eigenfunctions == s->eigenfunctions);
  EXPECT_TRUE(r->nodes.weights == s->nodes.weights);
  EXPECT_EQ(r->dimension, s->dimension);
  EXPECT_EQ(r->n_nodes(), s->n_nodes());
  EXPECT_EQ(r->n_modes(), s->n_modes());
}

namespace {

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::vector<char>((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void spit(const fs::path& p, const std::vector<char>& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void expect_load_error(const fs::path& p, const char* needle) {
  try {
    load_spectrum(p);
    FAIL() << "expected failure mentioning '" << needle << "'";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(SpectrumCache, RejectsWrongMagic) {
  auto s = build_circle_spectrum(32, 5);
  fs::path file = fs::path(::testing::TempDir()) / "magic.gspc";
  save_spectrum(*s, file);
  auto bytes = slurp(file);
  bytes[0] = 'X';
  spit(file, bytes);
  expect_load_error(file, "magic");
}

TEST(SpectrumCache, RejectsUnsupportedVersion) {
  auto s = build_circle_spectrum(32, 5);
  fs::path file = fs::path(::testing::TempDir()) / "version.gspc";
  save_spectrum(*s, file);
  auto bytes = slurp(file);
  bytes[4] = 99;  // version field follows the 4-byte magic
  bytes[5] = bytes[6] = bytes[7] = 0;
  spit(file, bytes);
  expect_load_error(file, "version");
}

TEST(SpectrumCache, RejectsTruncatedFile) {
  auto s = build_circle_spectrum(32, 5);
  fs::path file = fs::path(::testing::TempDir()) / "short.gspc";
  save_spectrum(*s, file);
  auto bytes = slurp(file);
  bytes.resize(bytes.size() - 16);
  spit(file, bytes);
  expect_load_error(file, "truncated");
}

TEST(SpectrumCache, RejectsCorruptedPayload) {
  auto s = build_circle_spectrum(32, 5);
  fs::path file = fs::path(::testing::TempDir()) / "corrupt.gspc";
  save_spectrum(*s, file);
  auto bytes = slurp(file);
  bytes[bytes.size() / 2] ^= 0x40;
  spit(file, bytes);
  expect_load_error(file, "checksum");
}

TEST(PointCloudText, ParsesDelimitersAndComments) {
  fs::path file = fs::path(::testing::TempDir()) / "pts.txt";
  {
    std::ofstream out(file);
    out << "# two dimensional points\n";
    out << "1.0, 0.0\n";
    out << "0.0\t1.0\n";
    out << "\n";
    out << "-1, 0  # trailing comment\n";
  }
  Eigen::MatrixXd pts = read_points_text(file);
  ASSERT_EQ(pts.rows(), 3);
  ASSERT_EQ(pts.cols(), 2);
  EXPECT_DOUBLE_EQ(pts(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(pts(1, 1), 1.0);
  EXPECT_DOUBLE_EQ(pts(2, 0), -1.0);
}

TEST(PointCloudText, RejectsRaggedRows) {
  fs::path file = fs::path(::testing::TempDir()) / "ragged.txt";
  {
    std::ofstream out(file);
    out << "1 2\n1 2 3\n";
  }
  EXPECT_THROW(read_points_text(file), std::runtime_error);
}

TEST(PointCloudSpectrum, RecoversCircleEigenvalues) {
  Eigen::Index n = 512;
  auto pts = circle_points(n, 1.0, uniform_angles(n));
  auto s = build_pointcloud_spectrum(pts, 9, 0.10);
  EXPECT_NEAR(s->eigenvalues[0], 0.0, 1e-8);
  std::vector<double> want = {1, 1, 4, 4, 9, 9, 16, 16};
  for (int k = 0; k < 8; ++k) {
    double rel = std::abs(s->eigenvalues[k + 1] - want[static_cast<std::size_t>(k)]) /
                 want[static_cast<std::size_t>(k)];
    EXPECT_LT(rel, 0.10) << "eigenvalue " << k + 1 << " = " << s->eigenvalues[k + 1];
  }
}

TEST(PointCloudSpectrum, RadiusScalesEigenvalues) {
  Eigen::Index n = 512;
  auto pts = circle_points(n, 2.0, uniform_angles(n));
  auto s = build_pointcloud_spectrum(pts, 5, 0.20);
  // radius 2 circle: first nonzero eigenvalue 1/4
  EXPECT_NEAR(s->eigenvalues[1], 0.25, 0.025);
}

TEST(PointCloudSpectrum, VolumeEstimateNearCircumference) {
  Eigen::Index n = 512;
  auto pts = circle_points(n, 1.0, uniform_angles(n));
  auto s = build_pointcloud_spectrum(pts, 5, 0.10);
  EXPECT_NEAR(s->volume(), kTwoPi, 0.05 * kTwoPi);
  // uniform weights
  EXPECT_NEAR(s->nodes.weights[0], s->nodes.weights[n / 2], 1e-15);
}

TEST(PointCloudSpectrum, NearOrthonormalModes) {
  Eigen::Index n = 512;
  auto pts = circle_points(n, 1.0, uniform_angles(n));
  auto s = build_pointcloud_spectrum(pts, 9, 0.10);
  EXPECT_LT(max_gram_defect(*s), 5e-2);
}

TEST(PointCloudSpectrum, GraphGeodesicTracksArcLength) {
  Eigen::Index n = 256;
  auto pts = circle_points(n, 1.0, uniform_angles(n));
  auto s = build_pointcloud_spectrum(pts, 5, 0.15);
  ASSERT_TRUE(static_cast<bool>(s->nodes.geodesic));
  double quarter = s->nodes.geodesic(0, 64);
  EXPECT_NEAR(quarter, kTwoPi / 4.0, 0.01 * kTwoPi);
}

TEST(PointCloudSpectrum, ErrorShrinksAsSamplingGrows) {
  // seeded irregular clouds; eigenvalue error for the first five modes
  // decreases as the sample count doubles
  std::vector<double> errs;
  const std::uint64_t seed = 20240817;
  struct Cfg { Eigen::Index n; double bw; };
  for (auto [n, bw] : {Cfg{256, 0.35}, Cfg{512, 0.29}, Cfg{1024, 0.25}}) {
    auto pts = circle_points(n, 1.0, random_angles(n, seed));
    auto s = build_pointcloud_spectrum(pts, 5, bw);
    std::vector<double> want = {0, 1, 1, 4, 4};
    double worst = 0.0;
    for (int k = 1; k < 5; ++k)
      worst = std::max(worst, std::abs(s->eigenvalues[k] - want[static_cast<std::size_t>(k)]) /
                                  want[static_cast<std::size_t>(k)]);
    errs.push_back(worst);
  }
  EXPECT_GT(errs[0], errs[1]);
  EXPECT_GT(errs[1], errs[2]);
}

TEST(PointCloudSpectrum, RejectsDisconnectedCloud) {
  // two tight clusters far apart, bandwidth far below the gap
  Eigen::MatrixXd pts(32, 2);
  for (int i = 0; i < 16; ++i) {
    pts(i, 0) = 0.001 * i;
    pts(i, 1) = 0.0;
    pts(16 + i, 0) = 10.0 + 0.001 * i;
    pts(16 + i, 1) = 0.0;
  }
  EXPECT_THROW(build_pointcloud_spectrum(pts, 3, 0.01), std::runtime_error);
}

TEST(PointCloudSpectrum, RejectsOversizedCloud) {
  Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(9000, 2);
  EXPECT_THROW(build_pointcloud_spectrum(pts, 3, 0.1), std::invalid_argument);
}
