#pragma once

// Square function of a wavelet bank:
//   g(f)(x) = sqrt( sum_j |(f * psi_j)(x)|^2 ).
// Telescoping makes sum_j psihat_j^2 flat up to the window tails, so the
// energy of g(f) tracks the energy of f minus its mean.  Constants are
// annihilated: every band vanishes at lambda = 0.

#include <geoscat/signal.hpp>
#include <geoscat/wavelets.hpp>

#include <Eigen/Dense>

#include <cmath>

namespace geoscat {

inline Signal g_function(const Signal& f, const WaveletBank& bank) {
  const Eigen::VectorXd& fhat = f.coefficients();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.spectrum()->n_nodes());
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    Eigen::VectorXd band =
        f.spectrum()->eigenfunctions * bank.filter(j).coefficients.cwiseProduct(fhat);
    acc.array() += band.array().square();
  }
  return Signal(f.spectrum(), acc.array().sqrt());
}

// ||g(f)||_q / ||f||_q.  Zero input is rejected; a zero square function
// (constant input) reports ratio 0.
inline double vector_norm_ratio(const Signal& f, const WaveletBank& bank, double q) {
  double denom = lq_norm(f, q);
  if (!(denom > 0.0)) throw std::invalid_argument("vector norm ratio: zero signal");
  return lq_norm(g_function(f, bank), q) / denom;
}

}  // namespace geoscat
