#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace geoscat {

enum class ProfileKind { exponential, gaussian };

// Monotone low-pass window G on [0, inf) with G(0) = C > 0 and rapid decay.
// Both built-in shapes are Schwartz class, which the wavelet frame bounds
// and the kernel decay diagnostics rely on.
struct LowPassProfile {
  ProfileKind kind = ProfileKind::exponential;
  double constant = 1.0;
  bool schwartz = true;

  double operator()(double x) const {
    switch (kind) {
      case ProfileKind::exponential: return constant * std::exp(-x);
      case ProfileKind::gaussian: return constant * std::exp(-x * x);
    }
    throw std::logic_error("profile: unknown kind");
  }

  const char* name() const {
    switch (kind) {
      case ProfileKind::exponential: return "exponential";
      case ProfileKind::gaussian: return "gaussian";
    }
    throw std::logic_error("profile: unknown kind");
  }
};

inline LowPassProfile make_profile(ProfileKind kind, double constant = 1.0) {
  if (!(constant > 0.0) || !std::isfinite(constant))
    throw std::invalid_argument("profile: constant must be positive and finite");
  return LowPassProfile{kind, constant, true};
}

inline ProfileKind profile_kind_from_name(const std::string& name) {
  if (name == "exponential") return ProfileKind::exponential;
  if (name == "gaussian") return ProfileKind::gaussian;
  throw std::invalid_argument("profile: unknown name '" + name + "'");
}

struct ProfileScan {
  bool nonincreasing = false;
  bool tail_vanishes = false;
  long samples = 0;
};

// Scan monotonicity on a log grid spanning [0, 2^40] and check that the far
// tail has dropped below 1e-12 of the zero value.
inline ProfileScan validate_profile(const LowPassProfile& g, long samples = 10001) {
  if (samples < 2) throw std::invalid_argument("profile scan: need at least two samples");
  ProfileScan scan;
  scan.samples = samples;
  scan.nonincreasing = true;
  double prev = g(0.0);
  const double lo = 1e-8, hi = std::ldexp(1.0, 40);
  for (long i = 0; i < samples; ++i) {
    double x = lo * std::pow(hi / lo, double(i) / double(samples - 1));
    double v = g(x);
    if (v > prev + 1e-15 * g.constant) scan.nonincreasing = false;
    prev = v;
  }
  scan.tail_vanishes = g(hi) < 1e-12 * g.constant;
  return scan;
}

}  // namespace geoscat
