#pragma once

// Seeded bandlimited test signals.  Gaussian draws go through an explicit
// Box-Muller transform on mt19937_64 words, so a seed pins the exact same
// signal on every platform and standard library.

#include <geoscat/signal.hpp>
#include <geoscat/spectrum.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace geoscat {

class GaussianDraw {
 public:
  explicit GaussianDraw(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double r = std::sqrt(-2.0 * std::log(unit()));
    double a = two_pi * unit();
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  // top 53 bits shifted into (0, 1]; log never sees zero
  double unit() { return double((rng_() >> 11) + 1) * 0x1.0p-53; }

  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Standard normal coefficients on modes with lambda_n < lam.  The constant
// mode is zeroed by default: wavelet banks annihilate it, so frame and
// scattering identities are exact only on zero-mean inputs.
inline Eigen::VectorXd random_bandlimited_coefficients(const Spectrum& s, double lam,
                                                       std::uint64_t seed,
                                                       bool zero_mean = true) {
  if (!(lam > 0.0)) throw std::invalid_argument("random signal: need positive bandlimit");
  GaussianDraw draw(seed);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(s.n_modes());
  for (Eigen::Index n = 0; n < s.n_modes(); ++n)
    if (s.eigenvalues[n] < lam) c[n] = draw();
  if (zero_mean && s.eigenvalues[0] == 0.0) c[0] = 0.0;
  return c;
}

inline Signal random_bandlimited_signal(const SpectrumPtr& s, double lam, std::uint64_t seed,
                                        bool zero_mean = true) {
  if (!s) throw std::invalid_argument("random signal: null spectrum");
  return synthesize(s, random_bandlimited_coefficients(*s, lam, seed, zero_mean));
}

// A few reproducing-kernel bumps at random positions with Gaussian heights:
// concentrated mass that excites every retained mode, the shape weak-type
// experiments care about.  Needs a closed-form basis to place bumps off the
// node lattice.
inline Signal random_spiky_signal(const SpectrumPtr& s, std::uint64_t seed, int bumps = 3) {
  if (!s) throw std::invalid_argument("spiky signal: null spectrum");
  if (!s->has_analytic_basis())
    throw std::invalid_argument("spiky signal: spectrum has no closed-form basis");
  if (bumps < 1) throw std::invalid_argument("spiky signal: need at least one bump");
  GaussianDraw heights(seed);
  std::mt19937_64 positions(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> angle(0.0, two_pi);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(s->n_modes());
  for (int b = 0; b < bumps; ++b) {
    double h = heights();
    Eigen::VectorXd p(s->dimension);
    for (int d = 0; d < s->dimension; ++d) p[d] = angle(positions);
    for (Eigen::Index n = 0; n < s->n_modes(); ++n) c[n] += h * s->basis_value(n, p);
  }
  return synthesize(s, c);
}

}  // namespace geoscat
