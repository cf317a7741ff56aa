#include <gtest/gtest.h>

#include <geoscat/profile.hpp>
#include <geoscat/spectrum.hpp>
#include <geoscat/wavelets.hpp>

#include <cmath>
#include <vector>

using namespace geoscat;

TEST(Profile, ExponentialValues) {
  auto p = make_profile(ProfileKind::exponential, 1.0);
  EXPECT_DOUBLE_EQ(p(0.0), 1.0);
  EXPECT_DOUBLE_EQ(p(1.0), std::exp(-1.0));
  EXPECT_STREQ(p.name(), "exponential");
  auto p3 = make_profile(ProfileKind::exponential, 3.0);
  EXPECT_DOUBLE_EQ(p3(0.0), 3.0);
  EXPECT_DOUBLE_EQ(p3(2.0), 3.0 * std::exp(-2.0));
}

TEST(Profile, GaussianValues) {
  auto p = make_profile(ProfileKind::gaussian, 1.0);
  EXPECT_DOUBLE_EQ(p(0.0), 1.0);
  EXPECT_DOUBLE_EQ(p(2.0), std::exp(-4.0));
  EXPECT_STREQ(p.name(), "gaussian");
}

TEST(Profile, RejectsNonPositiveConstant) {
  EXPECT_THROW(make_profile(ProfileKind::exponential, 0.0), std::invalid_argument);
  EXPECT_THROW(make_profile(ProfileKind::gaussian, -1.0), std::invalid_argument);
}

TEST(Profile, MonotoneScanPasses) {
  for (auto kind : {ProfileKind::exponential, ProfileKind::gaussian}) {
    auto scan = validate_profile(make_profile(kind, 1.5));
    EXPECT_TRUE(scan.nonincreasing);
    EXPECT_TRUE(scan.tail_vanishes);
    EXPECT_GE(scan.samples, 10000);
  }
}

TEST(Profile, ParsesNames) {
  EXPECT_EQ(profile_kind_from_name("exponential"), ProfileKind::exponential);
  EXPECT_EQ(profile_kind_from_name("gaussian"), ProfileKind::gaussian);
  EXPECT_THROW(profile_kind_from_name("bump"), std::invalid_argument);
}

TEST(Radicand, ClampsRoundoffAndRejectsLargeNegatives) {
  EXPECT_DOUBLE_EQ(clamped_radicand(2.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(clamped_radicand(1.0, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(clamped_radicand(1.0, 1.0 + 1e-16), 0.0);
  EXPECT_THROW(clamped_radicand(1.0, 1.0 + 1e-13), std::domain_error);
}

namespace {

// closed-form coefficient, kept independent of the bank internals
double coeff(const LowPassProfile& g, int j, double lam) {
  double a = g(std::ldexp(lam, j - 1));
  double b = g(std::ldexp(lam, j));
  return std::sqrt(a * a - b * b);
}

}  // namespace

TEST(WaveletBank, UnitScaleCoefficientAtLambdaOne) {
  auto s = build_circle_spectrum(64, 5);
  auto bank = build_wavelet_bank(make_profile(ProfileKind::exponential, 1.0), s, -20, 20);
  // sqrt(exp(-1) - exp(-2))
  EXPECT_NEAR(bank.coefficient(0, 1), 0.48222832552104364, 1e-14);
}

TEST(WaveletBank, MatchesClosedFormAcrossWindow) {
  auto s = build_circle_spectrum(256, 33);
  for (auto kind : {ProfileKind::exponential, ProfileKind::gaussian}) {
    auto g = make_profile(kind, 1.0);
    auto bank = build_wavelet_bank(g, s, -8, 8);
    for (int j = -8; j <= 8; ++j)
      for (Eigen::Index n = 0; n < s->n_modes(); ++n)
        EXPECT_NEAR(bank.coefficient(j, n), coeff(g, j, s->eigenvalues[n]), 1e-14);
  }
}

TEST(WaveletBank, VanishesOnConstantMode) {
  auto s = build_circle_spectrum(64, 5);
  auto bank = build_wavelet_bank(make_profile(ProfileKind::gaussian, 2.0), s, -10, 10);
  for (int j = -10; j <= 10; ++j) EXPECT_EQ(bank.coefficient(j, 0), 0.0);
}

TEST(WaveletBank, EqualEigenvaluesGiveIdenticalCoefficients) {
  auto s = build_circle_spectrum(64, 9);
  auto bank = build_wavelet_bank(make_profile(ProfileKind::exponential, 1.0), s, -6, 6);
  for (int j = -6; j <= 6; ++j) {
    EXPECT_EQ(bank.coefficient(j, 1), bank.coefficient(j, 2));
    EXPECT_EQ(bank.coefficient(j, 3), bank.coefficient(j, 4));
  }
}

TEST(WaveletBank, DefaultWindowIsTwenty) {
  auto s = build_circle_spectrum(64, 5);
  auto bank = build_wavelet_bank(make_profile(ProfileKind::exponential, 1.0), s);
  EXPECT_EQ(bank.j_min(), -20);
  EXPECT_EQ(bank.j_max(), 20);
  EXPECT_EQ(bank.scale_count(), 41);
}

TEST(WaveletBank, RejectsInvertedWindow) {
  auto s = build_circle_spectrum(64, 5);
  EXPECT_THROW(build_wavelet_bank(make_profile(ProfileKind::exponential, 1.0), s, 3, -3),
               std::invalid_argument);
}

TEST(WaveletBank, LinearInProfileConstant) {
  auto s = build_circle_spectrum(64, 9);
  auto b1 = build_wavelet_bank(make_profile(ProfileKind::exponential, 1.0), s, -5, 5);
  auto b2 = build_wavelet_bank(make_profile(ProfileKind::exponential, 2.0), s, -5, 5);
  for (int j = -5; j <= 5; ++j)
    for (Eigen::Index n = 0; n < s->n_modes(); ++n)
      EXPECT_NEAR(b2.coefficient(j, n), 2.0 * b1.coefficient(j, n), 1e-13);
}

TEST(Telescoping, PartialSumsMatchClosedForm) {
  auto s = build_circle_spectrum(256, 33);
  for (auto kind : {ProfileKind::exponential, ProfileKind::gaussian}) {
    auto g = make_profile(kind, 1.0);
    for (int J : {5, 10, 20}) {
      auto bank = build_wavelet_bank(g, s, -J, J);
      for (Eigen::Index n = 0; n < s->n_modes(); ++n) {
        double lam = s->eigenvalues[n];
        double sum = 0.0;
        for (int j = -J; j <= J; ++j) {
          double c = bank.coefficient(j, n);
          sum += c * c;
        }
        double lo = g(std::ldexp(lam, -J - 1));
        double hi = g(std::ldexp(lam, J));
        EXPECT_NEAR(sum, lo * lo - hi * hi, 1e-12) << "J=" << J << " lam=" << lam;
      }
    }
  }
}

TEST(Telescoping, FrozenValuesAtLambdaOne) {
  auto s = build_circle_spectrum(64, 3);
  auto g = make_profile(ProfileKind::exponential, 1.0);
  struct Case { int J; double value; };
  for (auto [J, value] : {Case{5, 0.96923323447634408},
                          Case{10, 0.99902391418197566},
                          Case{20, 0.99999904632613834}}) {
    auto bank = build_wavelet_bank(g, s, -J, J);
    double sum = 0.0;
    for (int j = -J; j <= J; ++j) sum += bank.coefficient(j, 1) * bank.coefficient(j, 1);
    EXPECT_NEAR(sum, value, 1e-13);
  }
}

TEST(FrameDefect, ConstantModeCarriesFullWeight) {
  auto s = build_circle_spectrum(64, 5);
  for (double C : {1.0, 2.0}) {
    auto bank = build_wavelet_bank(make_profile(ProfileKind::exponential, C), s, -20, 20);
    Eigen::VectorXd d = frame_defect(bank);
    ASSERT_EQ(d.size(), s->n_modes());
    EXPECT_NEAR(d[0], C * C, 1e-13);
  }
}

TEST(FrameDefect, TinyOnUnitEigenvalueWithWideWindow) {
  auto s = build_circle_spectrum(64, 5);
  auto bank = build_wavelet_bank(make_profile(ProfileKind::exponential, 1.0), s, -20, 20);
  Eigen::VectorXd d = frame_defect(bank);
  EXPECT_NEAR(d[1], 9.5367386165904367e-07, 1e-15);
  for (Eigen::Index n = 1; n < d.size(); ++n) {
    EXPECT_GE(d[n], -1e-15);
    EXPECT_LT(d[n], 1e-5);
  }
}

TEST(Lowpass, DilatedProfileOnEigenvalues) {
  auto s = build_circle_spectrum(64, 5);
  auto g = make_profile(ProfileKind::exponential, 1.0);
  auto phi = lowpass_filter(g, s, 3);
  ASSERT_EQ(phi.coefficients.size(), s->n_modes());
  EXPECT_DOUBLE_EQ(phi.coefficients[0], 1.0);
  EXPECT_NEAR(phi.coefficients[1], 3.3546262790251185e-04, 1e-17);  // exp(-8)
  EXPECT_NEAR(phi.coefficients[3], std::exp(-32.0), 1e-21);
}
