#pragma once

// Group actions on sampled manifolds: isometries (rotations of the circle and
// flat torus) and controlled diffeomorphisms theta -> theta + t sin(k theta).
//
// A signal is moved by pulling it back through the inverse map and evaluating
// the analytic basis off the node lattice,
//    (A f)(x_i) = sum_n fhat(n) e_n(map^{-1}(x_i)),
// which is exact for the spectral content the signal already carries.  Only
// backends with closed-form eigenfunctions support this; interpolating on a
// point cloud would smuggle in an uncontrolled error term, so we refuse.

#include <geoscat/signal.hpp>
#include <geoscat/spectrum.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>

namespace geoscat {

enum class MapKind { isometry, diffeomorphism };

// Invertible self-map written in intrinsic coordinates (one angle for the
// circle, two for the torus).  sup_displacement bounds the geodesic distance
// any point travels; stability experiments read it as the abscissa.
//
// Rotations additionally carry an exact coefficient transport: the rotation
// of cos k theta and sin k theta stays inside the frequency-k pair, so the
// moved signal can be synthesized from transported coefficients instead of
// sampled off the lattice.  That keeps "rotation of a constant" and friends
// exact to the last bit.  Content at a frequency whose partner mode fell past
// the retention cutoff is projected onto the retained span.
struct PointMap {
  MapKind kind = MapKind::isometry;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> forward;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> inverse;
  std::function<Eigen::VectorXd(const Spectrum&, const Eigen::VectorXd&)> transport;
  double sup_displacement = 0.0;
};

inline PointMap circle_rotation(double angle) {
  PointMap m;
  m.kind = MapKind::isometry;
  m.forward = [angle](const Eigen::VectorXd& p) {
    Eigen::VectorXd q = p;
    q[0] += angle;
    return q;
  };
  m.inverse = [angle](const Eigen::VectorXd& p) {
    Eigen::VectorXd q = p;
    q[0] -= angle;
    return q;
  };
  m.transport = [angle](const Spectrum& s, const Eigen::VectorXd& c) {
    if (s.backend != Backend::circle)
      throw std::invalid_argument("rotation transport: circle spectrum required");
    auto partner = [&s](int k, bool sine) {
      for (Eigen::Index n = 0; n < s.n_modes(); ++n)
        if (s.circle_modes[std::size_t(n)].k == k && s.circle_modes[std::size_t(n)].sine == sine)
          return n;
      return Eigen::Index(-1);
    };
    Eigen::VectorXd out = Eigen::VectorXd::Zero(s.n_modes());
    for (Eigen::Index n = 0; n < s.n_modes(); ++n) {
      const CircleMode& mode = s.circle_modes[std::size_t(n)];
      if (mode.k == 0) {
        out[n] += c[n];
        continue;
      }
      // cos k(t-a) = ca cos kt + sa sin kt, sin k(t-a) = ca sin kt - sa cos kt
      double ca = std::cos(mode.k * angle), sa = std::sin(mode.k * angle);
      Eigen::Index p = partner(mode.k, !mode.sine);
      out[n] += ca * c[n];
      if (p >= 0) out[p] += (mode.sine ? -sa : sa) * c[n];
    }
    return out;
  };
  m.sup_displacement = circle_arc_distance(0.0, angle);
  return m;
}

inline PointMap torus_rotation(double a1, double a2) {
  PointMap m;
  m.kind = MapKind::isometry;
  m.forward = [a1, a2](const Eigen::VectorXd& p) {
    Eigen::VectorXd q = p;
    q[0] += a1;
    q[1] += a2;
    return q;
  };
  m.inverse = [a1, a2](const Eigen::VectorXd& p) {
    Eigen::VectorXd q = p;
    q[0] -= a1;
    q[1] -= a2;
    return q;
  };
  m.transport = [a1, a2](const Spectrum& s, const Eigen::VectorXd& c) {
    if (s.backend != Backend::torus)
      throw std::invalid_argument("rotation transport: torus spectrum required");
    auto find = [&s](int ka, bool sa, int kb, bool sb) {
      for (Eigen::Index n = 0; n < s.n_modes(); ++n) {
        const TorusMode& t = s.torus_modes[std::size_t(n)];
        if (t.a.k == ka && t.a.sine == sa && t.b.k == kb && t.b.sine == sb) return n;
      }
      return Eigen::Index(-1);
    };
    // each factor expands into at most two modes of the same frequency, so a
    // product mode spreads over at most four targets
    struct Term {
      bool sine;
      double weight;
    };
    auto expand = [](const CircleMode& mode, double a, Term terms[2]) {
      if (mode.k == 0) {
        terms[0] = {false, 1.0};
        terms[1] = {false, 0.0};
        return 1;
      }
      double ca = std::cos(mode.k * a), sa = std::sin(mode.k * a);
      if (mode.sine) {
        terms[0] = {true, ca};
        terms[1] = {false, -sa};
      } else {
        terms[0] = {false, ca};
        terms[1] = {true, sa};
      }
      return 2;
    };
    Eigen::VectorXd out = Eigen::VectorXd::Zero(s.n_modes());
    for (Eigen::Index n = 0; n < s.n_modes(); ++n) {
      if (c[n] == 0.0) continue;
      const TorusMode& t = s.torus_modes[std::size_t(n)];
      Term ta[2], tb[2];
      int na = expand(t.a, a1, ta);
      int nb = expand(t.b, a2, tb);
      for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j) {
          Eigen::Index target = find(t.a.k, ta[i].sine, t.b.k, tb[j].sine);
          if (target >= 0) out[target] += ta[i].weight * tb[j].weight * c[n];
        }
    }
    return out;
  };
  double d1 = circle_arc_distance(0.0, a1);
  double d2 = circle_arc_distance(0.0, a2);
  m.sup_displacement = std::sqrt(d1 * d1 + d2 * d2);
  return m;
}

// theta -> theta + t sin(k theta).  The derivative 1 + t k cos(k theta) stays
// positive exactly when |t| k < 1, so that is the admissible range.  The
// inverse is a safeguarded Newton solve inside the bracket [y - |t|, y + |t|].
inline PointMap circle_wave_diffeo(double t, int k) {
  if (k < 1) throw std::invalid_argument("wave diffeo: wave number must be positive");
  if (!(std::abs(t) * double(k) < 1.0))
    throw std::invalid_argument("wave diffeo: need |t| * k < 1 for invertibility");
  PointMap m;
  m.kind = t == 0.0 ? MapKind::isometry : MapKind::diffeomorphism;
  m.forward = [t, k](const Eigen::VectorXd& p) {
    Eigen::VectorXd q = p;
    q[0] = p[0] + t * std::sin(double(k) * p[0]);
    return q;
  };
  m.inverse = [t, k](const Eigen::VectorXd& p) {
    const double y = p[0];
    double lo = y - std::abs(t), hi = y + std::abs(t);
    double x = y;
    for (int it = 0; it < 200; ++it) {
      double g = x + t * std::sin(double(k) * x) - y;
      if (std::abs(g) < 1e-15 * (1.0 + std::abs(y))) break;
      if (g > 0.0) hi = x; else lo = x;
      double step = g / (1.0 + t * double(k) * std::cos(double(k) * x));
      double next = x - step;
      x = (next > lo && next < hi) ? next : 0.5 * (lo + hi);
    }
    Eigen::VectorXd q = p;
    q[0] = x;
    return q;
  };
  m.sup_displacement = std::abs(t);
  return m;
}

inline PointMap circle_sine_diffeo(double t) { return circle_wave_diffeo(t, 1); }

inline Signal apply_action(const Signal& f, const PointMap& map) {
  const SpectrumPtr& s = f.spectrum();
  if (!s->has_analytic_basis())
    throw std::invalid_argument("apply action: spectrum has no closed-form basis");
  if (map.transport) return synthesize(s, map.transport(*s, f.coefficients()));
  if (!map.inverse) throw std::invalid_argument("apply action: map has no inverse");
  const Eigen::VectorXd& c = f.coefficients();
  Eigen::VectorXd out(s->n_nodes());
  for (Eigen::Index i = 0; i < s->n_nodes(); ++i) {
    Eigen::VectorXd y = map.inverse(s->intrinsic.row(i).transpose());
    double v = 0.0;
    for (Eigen::Index n = 0; n < s->n_modes(); ++n) v += c[n] * s->basis_value(n, y);
    out[i] = v;
  }
  // no coefficient seed: off-lattice evaluation leaves nothing exact to vouch for
  return Signal(s, out);
}

// geodesic distance between intrinsic points of an analytic backend
inline double intrinsic_distance(const Spectrum& s, const Eigen::VectorXd& a,
                                 const Eigen::VectorXd& b) {
  if (s.backend == Backend::circle) return circle_arc_distance(a[0], b[0]);
  if (s.backend == Backend::torus) {
    double d1 = circle_arc_distance(a[0], b[0]);
    double d2 = circle_arc_distance(a[1], b[1]);
    return std::sqrt(d1 * d1 + d2 * d2);
  }
  throw std::invalid_argument("intrinsic distance: no closed-form metric for this backend");
}

// max over sampled pairs of |r(map x, map y) - r(x, y)|; zero for isometries
inline double max_pair_distortion(const PointMap& map, const Spectrum& s, int n_pairs,
                                  std::uint64_t seed) {
  if (!s.has_analytic_basis())
    throw std::invalid_argument("pair distortion: spectrum has no closed-form metric");
  if (n_pairs < 1) throw std::invalid_argument("pair distortion: need at least one pair");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(0.0, two_pi);
  double worst = 0.0;
  for (int p = 0; p < n_pairs; ++p) {
    Eigen::VectorXd x(s.dimension), y(s.dimension);
    for (int d = 0; d < s.dimension; ++d) {
      x[d] = ang(rng);
      y[d] = ang(rng);
    }
    double before = intrinsic_distance(s, x, y);
    double after = intrinsic_distance(s, map.forward(x), map.forward(y));
    worst = std::max(worst, std::abs(after - before));
  }
  return worst;
}

// Keep only modes with eigenvalue strictly below lam.  Returns a synthesized
// signal, so projecting twice is the identity bit for bit.
inline Signal bandlimit_project(const Signal& f, double lam) {
  if (!(lam > 0.0)) throw std::invalid_argument("bandlimit: need a positive cutoff");
  const SpectrumPtr& s = f.spectrum();
  Eigen::VectorXd c = f.coefficients();
  for (Eigen::Index n = 0; n < s->n_modes(); ++n)
    if (!(s->eigenvalues[n] < lam)) c[n] = 0.0;
  return synthesize(s, c);
}

// true when every coefficient at or above the cutoff is negligible relative
// to the largest one
inline bool is_bandlimited(const Signal& f, double lam, double tol = 1e-10) {
  const SpectrumPtr& s = f.spectrum();
  const Eigen::VectorXd& c = f.coefficients();
  double scale = 1.0 + c.cwiseAbs().maxCoeff();
  for (Eigen::Index n = 0; n < s->n_modes(); ++n)
    if (!(s->eigenvalues[n] < lam) && std::abs(c[n]) > tol * scale) return false;
  return true;
}

}  // namespace geoscat
