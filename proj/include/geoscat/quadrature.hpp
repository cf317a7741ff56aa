#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>

namespace geoscat {

// Sample nodes of a compact manifold together with quadrature weights.
// weights[i] > 0 and sum(weights) equals the manifold volume, so that
//   integral(f) ~ sum_i weights[i] * f(x_i).
// geodesic(i, j) returns the geodesic distance between nodes i and j; it is
// empty for spectra restored from cache files, which persist no geometry.
struct QuadratureNodes {
  Eigen::MatrixXd points;   // n_nodes x ambient_dim, may be empty after load
  Eigen::VectorXd weights;  // n_nodes, strictly positive
  std::function<double(Eigen::Index, Eigen::Index)> geodesic;

  double volume() const { return weights.sum(); }
};

inline void check_weights(const Eigen::VectorXd& w) {
  if (w.size() == 0) throw std::invalid_argument("quadrature: empty weight vector");
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (!(w[i] > 0.0)) throw std::invalid_argument("quadrature: weights must be positive");
}

}  // namespace geoscat
