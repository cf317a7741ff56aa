#pragma once

// Discrete Laplace-Beltrami spectra on sampled compact manifolds.
//
// A Spectrum holds the first n_modes eigenpairs of the (positive) Laplacian
// sampled at quadrature nodes:
//   eigenvalues   0 = lambda_0 <= lambda_1 <= ...
//   eigenfunctions E with E(i, n) = e_n(x_i), orthonormal under the node
//                  quadrature: sum_i w_i e_a(x_i) e_b(x_i) = delta_ab.
// Analytic backends (circle, flat torus) sample closed-form eigenfunctions
// and additionally support pointwise evaluation away from the nodes, which
// group actions need.

#include <geoscat/quadrature.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace geoscat {

inline constexpr double two_pi = 2.0 * std::numbers::pi_v<double>;

enum class Backend { circle, torus, point_cloud, loaded };

// Closed-form mode descriptor on S^1: k == 0 is the constant mode,
// otherwise cos(k theta)/sqrt(pi) or sin(k theta)/sqrt(pi).
struct CircleMode {
  int k = 0;
  bool sine = false;

  double value(double theta) const {
    if (k == 0) return 1.0 / std::sqrt(two_pi);
    double inv = 1.0 / std::sqrt(std::numbers::pi_v<double>);
    return sine ? inv * std::sin(k * theta) : inv * std::cos(k * theta);
  }
};

// Product mode on the flat torus S^1 x S^1.
struct TorusMode {
  CircleMode a, b;

  double value(double t1, double t2) const {
    // product of 1-d factors; each factor carries its own normalization
    auto factor = [](const CircleMode& m, double t) {
      if (m.k == 0) return 1.0 / std::sqrt(two_pi);
      double inv = 1.0 / std::sqrt(std::numbers::pi_v<double>);
      return m.sine ? inv * std::sin(m.k * t) : inv * std::cos(m.k * t);
    };
    return factor(a, t1) * factor(b, t2);
  }
};

struct Spectrum {
  Eigen::VectorXd eigenvalues;    // n_modes
  Eigen::MatrixXd eigenfunctions; // n_nodes x n_modes
  QuadratureNodes nodes;
  int dimension = 0;              // intrinsic manifold dimension
  Backend backend = Backend::loaded;

  Eigen::MatrixXd intrinsic;      // n_nodes x dimension chart coordinates, may be empty
  std::vector<CircleMode> circle_modes;
  std::vector<TorusMode> torus_modes;

  Eigen::Index n_nodes() const { return eigenfunctions.rows(); }
  Eigen::Index n_modes() const { return eigenfunctions.cols(); }
  double volume() const { return nodes.volume(); }

  bool has_analytic_basis() const {
    return backend == Backend::circle || backend == Backend::torus;
  }

  // e_n evaluated at an arbitrary intrinsic point; analytic backends only.
  double basis_value(Eigen::Index n, const Eigen::VectorXd& point) const {
    if (n < 0 || n >= n_modes()) throw std::invalid_argument("basis_value: mode out of range");
    if (backend == Backend::circle) {
      if (point.size() != 1) throw std::invalid_argument("basis_value: expected angle");
      return circle_modes[static_cast<std::size_t>(n)].value(point[0]);
    }
    if (backend == Backend::torus) {
      if (point.size() != 2) throw std::invalid_argument("basis_value: expected two angles");
      return torus_modes[static_cast<std::size_t>(n)].value(point[0], point[1]);
    }
    throw std::runtime_error("basis_value: spectrum has no closed-form basis");
  }
};

using SpectrumPtr = std::shared_ptr<const Spectrum>;

// max |E^T W E - I|; orthonormality certificate used by summaries and tests
inline double orthonormality_defect(const Spectrum& s) {
  Eigen::MatrixXd gram =
      s.eigenfunctions.transpose() * s.nodes.weights.asDiagonal() * s.eigenfunctions;
  gram -= Eigen::MatrixXd::Identity(s.n_modes(), s.n_modes());
  return gram.cwiseAbs().maxCoeff();
}

inline double circle_arc_distance(double a, double b) {
  double d = std::fmod(std::abs(a - b), two_pi);
  return std::min(d, two_pi - d);
}

// Unit circle, uniform angular grid theta_i = 2 pi i / n_nodes with trapezoid
// weights 2 pi / n_nodes.  Modes come in eigenvalue order with cos before sin
// at each frequency, so the basis is deterministic even on the degenerate
// eigenspaces.  n_nodes must stay at least four times the highest retained
// frequency to keep the discrete Gram matrix at the identity.
inline SpectrumPtr build_circle_spectrum(Eigen::Index n_nodes, Eigen::Index n_modes) {
  if (n_modes < 1) throw std::invalid_argument("circle spectrum: need at least one mode");
  Eigen::Index k_max = n_modes / 2;
  Eigen::Index min_nodes = std::max<Eigen::Index>(4, 4 * k_max);
  if (n_nodes < min_nodes)
    throw std::invalid_argument("circle spectrum: grid too coarse for requested modes");

  auto s = std::make_shared<Spectrum>();
  s->backend = Backend::circle;
  s->dimension = 1;
  s->eigenvalues.resize(n_modes);
  s->eigenfunctions.resize(n_nodes, n_modes);
  s->intrinsic.resize(n_nodes, 1);
  s->nodes.points.resize(n_nodes, 2);
  s->nodes.weights = Eigen::VectorXd::Constant(n_nodes, two_pi / double(n_nodes));
  s->circle_modes.resize(static_cast<std::size_t>(n_modes));

  for (Eigen::Index n = 0; n < n_modes; ++n) {
    int k = int((n + 1) / 2);
    bool sine = (n > 0) && (n % 2 == 0);
    s->circle_modes[static_cast<std::size_t>(n)] = CircleMode{k, sine};
    s->eigenvalues[n] = double(k) * double(k);
  }

  for (Eigen::Index i = 0; i < n_nodes; ++i) {
    double theta = two_pi * double(i) / double(n_nodes);
    s->intrinsic(i, 0) = theta;
    s->nodes.points(i, 0) = std::cos(theta);
    s->nodes.points(i, 1) = std::sin(theta);
    for (Eigen::Index n = 0; n < n_modes; ++n)
      s->eigenfunctions(i, n) = s->circle_modes[static_cast<std::size_t>(n)].value(theta);
  }

  const double step = two_pi / double(n_nodes);
  const Eigen::Index nn = n_nodes;
  s->nodes.geodesic = [step, nn](Eigen::Index i, Eigen::Index j) {
    Eigen::Index d = std::abs(i - j);
    d = std::min(d, nn - d);
    return step * double(d);
  };
  return s;
}

// Flat torus S^1 x S^1, uniform n x n angular grid, weights (2 pi / n)^2.
// Node index = i1 * n + i2.  Mode order: eigenvalue k1^2 + k2^2, then
// (k1, k2, cos-before-sin on each axis).
inline SpectrumPtr build_torus_spectrum(Eigen::Index nodes_per_axis, Eigen::Index n_modes) {
  if (n_modes < 1) throw std::invalid_argument("torus spectrum: need at least one mode");

  struct Key {
    long lam;
    int k1, k2, s1, s2;
    bool operator<(const Key& o) const {
      if (lam != o.lam) return lam < o.lam;
      if (k1 != o.k1) return k1 < o.k1;
      if (k2 != o.k2) return k2 < o.k2;
      if (s1 != o.s1) return s1 < o.s1;
      return s2 < o.s2;
    }
  };

  // enumerate frequencies up to a box that provably contains the first
  // n_modes eigenvalues: grow K until the count below K^2 suffices
  int K = 1;
  std::vector<Key> keys;
  for (;; ++K) {
    keys.clear();
    for (int k1 = 0; k1 <= K; ++k1)
      for (int k2 = 0; k2 <= K; ++k2) {
        long lam = long(k1) * k1 + long(k2) * k2;
        for (int s1 = 0; s1 < (k1 == 0 ? 1 : 2); ++s1)
          for (int s2 = 0; s2 < (k2 == 0 ? 1 : 2); ++s2)
            keys.push_back(Key{lam, k1, k2, s1, s2});
      }
    std::sort(keys.begin(), keys.end());
    long within = 0;
    for (const auto& k : keys)
      if (k.lam <= long(K) * K) ++within;
    if (within >= n_modes) break;
    if (K > 4096) throw std::invalid_argument("torus spectrum: mode request too large");
  }
  keys.resize(static_cast<std::size_t>(n_modes));

  int freq_max = 0;
  for (const auto& k : keys) freq_max = std::max({freq_max, k.k1, k.k2});
  Eigen::Index min_axis = std::max<Eigen::Index>(4, 4 * freq_max);
  if (nodes_per_axis < min_axis)
    throw std::invalid_argument("torus spectrum: grid too coarse for requested modes");

  Eigen::Index n_nodes = nodes_per_axis * nodes_per_axis;
  auto s = std::make_shared<Spectrum>();
  s->backend = Backend::torus;
  s->dimension = 2;
  s->eigenvalues.resize(n_modes);
  s->eigenfunctions.resize(n_nodes, n_modes);
  s->intrinsic.resize(n_nodes, 2);
  s->nodes.points.resize(n_nodes, 4);
  double w = (two_pi / double(nodes_per_axis)) * (two_pi / double(nodes_per_axis));
  s->nodes.weights = Eigen::VectorXd::Constant(n_nodes, w);
  s->torus_modes.resize(static_cast<std::size_t>(n_modes));

  for (Eigen::Index n = 0; n < n_modes; ++n) {
    const Key& k = keys[static_cast<std::size_t>(n)];
    s->eigenvalues[n] = double(k.lam);
    s->torus_modes[static_cast<std::size_t>(n)] =
        TorusMode{CircleMode{k.k1, k.s1 == 1}, CircleMode{k.k2, k.s2 == 1}};
  }

  for (Eigen::Index i1 = 0; i1 < nodes_per_axis; ++i1)
    for (Eigen::Index i2 = 0; i2 < nodes_per_axis; ++i2) {
      Eigen::Index i = i1 * nodes_per_axis + i2;
      double t1 = two_pi * double(i1) / double(nodes_per_axis);
      double t2 = two_pi * double(i2) / double(nodes_per_axis);
      s->intrinsic(i, 0) = t1;
      s->intrinsic(i, 1) = t2;
      s->nodes.points(i, 0) = std::cos(t1);
      s->nodes.points(i, 1) = std::sin(t1);
      s->nodes.points(i, 2) = std::cos(t2);
      s->nodes.points(i, 3) = std::sin(t2);
      for (Eigen::Index n = 0; n < n_modes; ++n)
        s->eigenfunctions(i, n) = s->torus_modes[static_cast<std::size_t>(n)].value(t1, t2);
    }

  const double step = two_pi / double(nodes_per_axis);
  const Eigen::Index na = nodes_per_axis;
  s->nodes.geodesic = [step, na](Eigen::Index i, Eigen::Index j) {
    Eigen::Index a1 = i / na, a2 = i % na;
    Eigen::Index b1 = j / na, b2 = j % na;
    Eigen::Index d1 = std::abs(a1 - b1);
    d1 = std::min(d1, na - d1);
    Eigen::Index d2 = std::abs(a2 - b2);
    d2 = std::min(d2, na - d2);
    double x = step * double(d1), y = step * double(d2);
    return std::sqrt(x * x + y * y);
  };
  return s;
}

}  // namespace geoscat
