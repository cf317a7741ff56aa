#pragma once

// Kernel-side view of spectral filters.
//
// A filter h acts through the symmetric kernel
//   K_h(x, y) = sum_n hhat(n) e_n(x) e_n(y),
// and applying K_h against the quadrature measure reproduces convolution.
// The decay and regularity reports probe the localization of the band
// kernels K_t built from F(t^2 lambda) with F(x) = sqrt(G(x/2)^2 - G(x)^2):
//   decay       |K_t(x,y)|          <= C t^{-n} (1 + r/t)^{-(n+1)}
//   regularity  |K_t(x,y)-K_t(x,z)| <= C r(y,z) t^{-n-1} (1 + r(x,y)/t)^{-(n+1)}
// Scales follow t = 2^{-j/2}; K_t carries the same band as the wavelet at
// scale -j, matching the operator-side indexing of the filter vector.
// Fitted constants are empirical maxima over node pairs or triples and are
// reported, never asserted here.

#include <geoscat/profile.hpp>
#include <geoscat/signal.hpp>
#include <geoscat/spectrum.hpp>
#include <geoscat/wavelets.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace geoscat {

inline Eigen::MatrixXd kernel_matrix(const SpectralFilter& h, Eigen::Index node_cap = 4096) {
  if (!h.spectrum) throw std::invalid_argument("kernel: null spectrum");
  const Spectrum& s = *h.spectrum;
  if (s.n_nodes() > node_cap)
    throw std::invalid_argument("kernel: node count exceeds cap, raise it explicitly");
  if (h.coefficients.size() != s.n_modes())
    throw std::invalid_argument("kernel: coefficient count does not match mode count");
  return s.eigenfunctions * h.coefficients.asDiagonal() * s.eigenfunctions.transpose();
}

// band window F(t^2 lambda) at kernel scale t
inline Eigen::VectorXd band_coefficients(const Spectrum& s, const LowPassProfile& g, double t) {
  Eigen::VectorXd c(s.n_modes());
  for (Eigen::Index n = 0; n < s.n_modes(); ++n) {
    double x = t * t * s.eigenvalues[n];
    double a = g(x / 2.0), b = g(x);
    c[n] = std::sqrt(clamped_radicand(a * a, b * b));
  }
  return c;
}

struct KernelDecayReport {
  std::vector<int> scales;
  std::vector<double> t_values;
  std::vector<double> fitted;  // max over pairs of |K| t^n (1 + r/t)^{n+1}
  double variation = 0.0;      // max/min - 1 across scales
};

inline KernelDecayReport kernel_decay_report(const Spectrum& s, const LowPassProfile& g,
                                             const std::vector<int>& scales,
                                             Eigen::Index node_cap = 4096) {
  if (!s.nodes.geodesic) throw std::runtime_error("kernel decay: spectrum has no geodesics");
  if (s.n_nodes() > node_cap) throw std::invalid_argument("kernel decay: node count exceeds cap");
  KernelDecayReport report;
  report.scales = scales;
  const double n_dim = double(s.dimension);
  for (int j : scales) {
    double t = std::pow(2.0, -double(j) / 2.0);
    Eigen::VectorXd c = band_coefficients(s, g, t);
    Eigen::MatrixXd K = s.eigenfunctions * c.asDiagonal() * s.eigenfunctions.transpose();
    double best = 0.0;
    for (Eigen::Index a = 0; a < s.n_nodes(); ++a)
      for (Eigen::Index b = 0; b < s.n_nodes(); ++b) {
        double r = s.nodes.geodesic(a, b);
        double w = std::abs(K(a, b)) * std::pow(t, n_dim) * std::pow(1.0 + r / t, n_dim + 1.0);
        best = std::max(best, w);
      }
    report.t_values.push_back(t);
    report.fitted.push_back(best);
  }
  if (!report.fitted.empty()) {
    double lo = *std::min_element(report.fitted.begin(), report.fitted.end());
    double hi = *std::max_element(report.fitted.begin(), report.fitted.end());
    report.variation = lo > 0.0 ? hi / lo - 1.0 : std::numeric_limits<double>::infinity();
  }
  return report;
}

struct KernelRegularityReport {
  std::vector<int> scales;
  std::vector<double> fitted;
  long triples_checked = 0;
  double variation = 0.0;
};

// Empirical constant for the kernel difference bound over triples with
// r(y,z) < min(r(x,y)/2, delta).  Meaningful when the chart atlas satisfies
// c1 c2 < 2, which holds on the circle atlases used here.
inline KernelRegularityReport kernel_regularity_report(const Spectrum& s,
                                                       const LowPassProfile& g,
                                                       const std::vector<int>& scales,
                                                       double delta,
                                                       Eigen::Index node_cap = 1024) {
  if (!s.nodes.geodesic) throw std::runtime_error("kernel regularity: spectrum has no geodesics");
  if (s.n_nodes() > node_cap)
    throw std::invalid_argument("kernel regularity: node count exceeds cap");
  if (!(delta > 0.0)) throw std::invalid_argument("kernel regularity: need positive delta");
  KernelRegularityReport report;
  report.scales = scales;
  const double n_dim = double(s.dimension);
  for (int j : scales) {
    double t = std::pow(2.0, -double(j) / 2.0);
    Eigen::VectorXd c = band_coefficients(s, g, t);
    Eigen::MatrixXd K = s.eigenfunctions * c.asDiagonal() * s.eigenfunctions.transpose();
    double best = 0.0;
    long checked = 0;
    for (Eigen::Index x = 0; x < s.n_nodes(); ++x)
      for (Eigen::Index y = 0; y < s.n_nodes(); ++y) {
        double rxy = s.nodes.geodesic(x, y);
        if (rxy == 0.0) continue;
        double cap = std::min(rxy / 2.0, delta);
        for (Eigen::Index z = y + 1; z < s.n_nodes(); ++z) {
          double ryz = s.nodes.geodesic(y, z);
          if (ryz <= 0.0 || ryz >= cap) continue;
          ++checked;
          double ratio = std::abs(K(x, y) - K(x, z)) * std::pow(t, n_dim + 1.0) *
                         std::pow(1.0 + rxy / t, n_dim + 1.0) / ryz;
          best = std::max(best, ratio);
        }
      }
    report.fitted.push_back(best);
    report.triples_checked += checked;
  }
  if (!report.fitted.empty()) {
    double lo = *std::min_element(report.fitted.begin(), report.fitted.end());
    double hi = *std::max_element(report.fitted.begin(), report.fitted.end());
    report.variation = lo > 0.0 ? hi / lo - 1.0 : std::numeric_limits<double>::infinity();
  }
  return report;
}

}  // namespace geoscat
