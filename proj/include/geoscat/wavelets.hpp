#pragma once

// Diffusion wavelet filter bank from a monotone low-pass window G:
//   psi_j(lambda) = sqrt(G(2^{j-1} lambda)^2 - G(2^j lambda)^2),
//   phi_J(lambda) = G(2^J lambda).
// The squares telescope, so partial sums over j in [-J, J] collapse to
// G(2^{-J-1} lambda)^2 - G(2^J lambda)^2; as the window widens this tends to
// G(0)^2 = C^2 for every lambda > 0, while every wavelet vanishes on the
// constant mode.  frame_defect reports the per-mode gap to C^2.

#include <geoscat/profile.hpp>
#include <geoscat/signal.hpp>
#include <geoscat/spectrum.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace geoscat {

// Difference of squared window values.  Monotone profiles keep it
// nonnegative up to roundoff; anything below -1e-15 means the profile is
// broken and is a hard error rather than something to hide.
inline double clamped_radicand(double a_squared, double b_squared) {
  double d = a_squared - b_squared;
  if (d < -1e-15) throw std::domain_error("wavelet radicand is negative beyond roundoff");
  return d < 0.0 ? 0.0 : d;
}

class WaveletBank {
 public:
  WaveletBank(LowPassProfile profile, SpectrumPtr spectrum, int j_min, int j_max)
      : profile_(profile), spectrum_(std::move(spectrum)), j_min_(j_min), j_max_(j_max) {
    if (!spectrum_) throw std::invalid_argument("wavelet bank: null spectrum");
    if (j_min_ > j_max_) throw std::invalid_argument("wavelet bank: j_min exceeds j_max");
    coeffs_.resize(scale_count(), spectrum_->n_modes());
    for (Eigen::Index n = 0; n < spectrum_->n_modes(); ++n) {
      double lam = spectrum_->eigenvalues[n];
      for (int j = j_min_; j <= j_max_; ++j) {
        double a = profile_(std::ldexp(lam, j - 1));
        double b = profile_(std::ldexp(lam, j));
        coeffs_(j - j_min_, n) = std::sqrt(clamped_radicand(a * a, b * b));
      }
    }
  }

  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }
  Eigen::Index scale_count() const { return Eigen::Index(j_max_) - j_min_ + 1; }
  const LowPassProfile& profile() const { return profile_; }
  const SpectrumPtr& spectrum() const { return spectrum_; }

  double coefficient(int j, Eigen::Index mode) const {
    return coeffs_(check_scale(j), mode);
  }

  // coefficient row of one scale as a filter
  SpectralFilter filter(int j) const {
    return SpectralFilter{spectrum_, coeffs_.row(check_scale(j)).transpose()};
  }

  std::vector<int> scales() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(scale_count()));
    for (int j = j_min_; j <= j_max_; ++j) out.push_back(j);
    return out;
  }

 private:
  Eigen::Index check_scale(int j) const {
    if (j < j_min_ || j > j_max_) throw std::invalid_argument("wavelet bank: scale out of window");
    return j - j_min_;
  }

  LowPassProfile profile_;
  SpectrumPtr spectrum_;
  int j_min_, j_max_;
  Eigen::MatrixXd coeffs_;  // scale_count x n_modes
};

inline WaveletBank build_wavelet_bank(const LowPassProfile& profile, SpectrumPtr spectrum,
                                      int j_min = -20, int j_max = 20) {
  return WaveletBank(profile, std::move(spectrum), j_min, j_max);
}

inline SpectralFilter lowpass_filter(const LowPassProfile& profile, const SpectrumPtr& spectrum,
                                     int J) {
  return make_filter(spectrum, [&](double lam) { return profile(std::ldexp(lam, J)); });
}

// C^2 minus the bank's squared coefficient sum, one entry per mode.  The
// constant mode always reports C^2: its energy lives in the low-pass.
inline Eigen::VectorXd frame_defect(const WaveletBank& bank) {
  const auto& s = *bank.spectrum();
  double c2 = bank.profile().constant * bank.profile().constant;
  Eigen::VectorXd defect(s.n_modes());
  for (Eigen::Index n = 0; n < s.n_modes(); ++n) {
    double sum = 0.0;
    for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
      double c = bank.coefficient(j, n);
      sum += c * c;
    }
    defect[n] = c2 - sum;
  }
  return defect;
}

}  // namespace geoscat
