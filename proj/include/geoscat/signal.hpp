#pragma once

// Signals on a sampled manifold and spectral-multiplier convolution.
//
// A Signal stores node values f(x_i) and computes its spectral coefficients
//   fhat(n) = sum_i w_i f(x_i) e_n(x_i)
// lazily.  The cache is set once and then shared; concurrent first calls may
// duplicate the computation but never publish a torn vector.
//
// Convolution acts mode by mode,
//   (f * h)(x) = sum_n fhat(n) hhat(n) e_n(x),
// so a SpectralFilter is just the coefficient sequence hhat on the retained
// modes.  Filters must be constant across eigenspaces of equal eigenvalue or
// the operation loses its geometric meaning; the factory from a symbol of
// lambda enforces that by construction.

#include <geoscat/spectrum.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace geoscat {

struct SpectralFilter {
  SpectrumPtr spectrum;
  Eigen::VectorXd coefficients;  // one per retained mode
};

inline SpectralFilter make_filter(SpectrumPtr spectrum,
                                  const std::function<double(double)>& symbol) {
  if (!spectrum) throw std::invalid_argument("filter: null spectrum");
  SpectralFilter h;
  h.spectrum = std::move(spectrum);
  h.coefficients.resize(h.spectrum->n_modes());
  for (Eigen::Index n = 0; n < h.spectrum->n_modes(); ++n)
    h.coefficients[n] = symbol(h.spectrum->eigenvalues[n]);
  return h;
}

// true when coefficients agree exactly on every repeated eigenvalue
inline bool filter_constant_on_eigenspaces(const SpectralFilter& h) {
  const auto& lam = h.spectrum->eigenvalues;
  for (Eigen::Index n = 1; n < lam.size(); ++n)
    if (lam[n] == lam[n - 1] && h.coefficients[n] != h.coefficients[n - 1]) return false;
  return true;
}

class Signal {
 public:
  Signal(SpectrumPtr spectrum, Eigen::VectorXd values)
      : spectrum_(std::move(spectrum)), values_(std::move(values)) {
    if (!spectrum_) throw std::invalid_argument("signal: null spectrum");
    if (values_.size() != spectrum_->n_nodes())
      throw std::invalid_argument("signal: value count does not match node count");
  }

  // caller vouches that coefficients are the analysis of values; the cache is
  // seeded so synthesized signals keep their exact spectral content
  Signal(SpectrumPtr spectrum, Eigen::VectorXd values, Eigen::VectorXd coefficients)
      : Signal(std::move(spectrum), std::move(values)) {
    if (coefficients.size() != spectrum_->n_modes())
      throw std::invalid_argument("signal: coefficient count does not match mode count");
    coeffs_ = std::make_shared<const Eigen::VectorXd>(std::move(coefficients));
  }

  Signal(const Signal& o) : spectrum_(o.spectrum_), values_(o.values_), coeffs_(o.snapshot()) {}
  Signal& operator=(const Signal& o) {
    if (this != &o) {
      spectrum_ = o.spectrum_;
      values_ = o.values_;
      coeffs_ = o.snapshot();
    }
    return *this;
  }
  Signal(Signal&&) noexcept = default;
  Signal& operator=(Signal&&) noexcept = default;

  const SpectrumPtr& spectrum() const { return spectrum_; }
  const Eigen::VectorXd& values() const { return values_; }

  // quadrature analysis, cached after the first call
  const Eigen::VectorXd& coefficients() const {
    {
      std::scoped_lock lock(mutex_);
      if (coeffs_) return *coeffs_;
    }
    auto fresh = std::make_shared<Eigen::VectorXd>(
        spectrum_->eigenfunctions.transpose() *
        (spectrum_->nodes.weights.array() * values_.array()).matrix());
    std::scoped_lock lock(mutex_);
    if (!coeffs_) coeffs_ = std::move(fresh);
    return *coeffs_;
  }

 private:
  std::shared_ptr<const Eigen::VectorXd> snapshot() const {
    std::scoped_lock lock(o_mutex());
    return coeffs_;
  }
  std::mutex& o_mutex() const { return mutex_; }

  SpectrumPtr spectrum_;
  Eigen::VectorXd values_;
  mutable std::shared_ptr<const Eigen::VectorXd> coeffs_;
  mutable std::mutex mutex_;
};

inline const Eigen::VectorXd& analyze(const Signal& f) { return f.coefficients(); }

inline Signal synthesize(const SpectrumPtr& spectrum, const Eigen::VectorXd& coefficients) {
  if (!spectrum) throw std::invalid_argument("synthesize: null spectrum");
  if (coefficients.size() != spectrum->n_modes())
    throw std::invalid_argument("synthesize: coefficient count does not match mode count");
  return Signal(spectrum, spectrum->eigenfunctions * coefficients, coefficients);
}

inline Signal convolve(const Signal& f, const SpectralFilter& h) {
  if (f.spectrum() != h.spectrum)
    throw std::invalid_argument("convolve: signal and filter live on different spectra");
  return synthesize(f.spectrum(),
                    (f.coefficients().array() * h.coefficients.array()).matrix());
}

inline double weighted_dot(const Signal& f, const Signal& g) {
  if (f.spectrum() != g.spectrum())
    throw std::invalid_argument("dot: signals live on different spectra");
  return (f.spectrum()->nodes.weights.array() * f.values().array() * g.values().array()).sum();
}

inline double l2_norm(const Signal& f) { return std::sqrt(weighted_dot(f, f)); }

inline double lq_norm(const Signal& f, double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw std::invalid_argument("lq_norm: need finite q >= 1");
  const auto& w = f.spectrum()->nodes.weights;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    acc += w[i] * std::pow(std::abs(f.values()[i]), q);
  return std::pow(acc, 1.0 / q);
}

}  // namespace geoscat
