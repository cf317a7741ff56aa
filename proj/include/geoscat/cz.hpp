#pragma once

// Calderon-Zygmund decomposition on the sampled circle.
//
// Starting from the root arc [0, 2 pi), descend the dyadic arc tree and
// select the maximal arcs on which the average of |f| exceeds the threshold
// alpha.  Outside the selected arcs f is left alone; inside, the good part
// takes the signed arc average and the bad part takes the mean-zero remainder,
//    f = g + sum_i b_i,    b_i = (f - avg_i) 1_{B_i}.
// The certified constant c_hat is the largest of the three inequality ratios
//    |b_i|_1 / (alpha mu(B_i)),   sum mu(B_i) / (alpha^{-1} |f|_1),
//    |g|_2^2 / (alpha |f|_1),
// so every reported decomposition satisfies its own bounds by construction
// and the caller only has to watch c_hat stay small.

#include <geoscat/signal.hpp>
#include <geoscat/spectrum.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace geoscat {

// arc measure of a metric ball; the doubling constant is exactly 2 until the
// ball wraps the whole circle
inline double circle_ball_measure(double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("ball measure: negative radius");
  return std::min(2.0 * radius, two_pi);
}

struct CZBadPart {
  Signal part;
  double center = 0.0;
  double radius = 0.0;
  double measure = 0.0;
};

struct CZDecomposition {
  double alpha = 0.0;
  Signal good;
  std::vector<CZBadPart> bad;
  double c_hat = 0.0;
  double bad_l1_ratio = 0.0;    // max_i |b_i|_1 / (alpha mu(B_i))
  double measure_ratio = 0.0;   // sum mu(B_i) / (alpha^{-1} |f|_1)
  double good_l2_ratio = 0.0;   // |g|_2^2 / (alpha |f|_1)
  double max_mean_defect = 0.0; // max_i |integral of b_i|
  double support_defect = 0.0;  // max value any b_i takes outside its arc
  double reconstruction_defect = 0.0;
};

inline CZDecomposition cz_decompose(const Signal& f, double alpha) {
  const SpectrumPtr& s = f.spectrum();
  if (s->backend != Backend::circle)
    throw std::invalid_argument("cz: decomposition is defined on the circle backend");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("cz: threshold must be positive and finite");

  const Eigen::Index N = s->n_nodes();
  const Eigen::VectorXd& w = s->nodes.weights;
  const Eigen::VectorXd& v = f.values();

  double l1 = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) l1 += w[i] * std::abs(v[i]);
  if (l1 == 0.0) {
    CZDecomposition dec{alpha, f};
    return dec;
  }
  if (!(l1 / alpha < two_pi))
    throw std::invalid_argument("cz: need alpha^{-1} |f|_1 below the circle measure");

  // prefix sums over the node lattice make every arc query O(1)
  std::vector<double> mass(std::size_t(N) + 1, 0.0), meas(std::size_t(N) + 1, 0.0),
      signed_mass(std::size_t(N) + 1, 0.0);
  for (Eigen::Index i = 0; i < N; ++i) {
    mass[std::size_t(i) + 1] = mass[std::size_t(i)] + w[i] * std::abs(v[i]);
    meas[std::size_t(i) + 1] = meas[std::size_t(i)] + w[i];
    signed_mass[std::size_t(i) + 1] = signed_mass[std::size_t(i)] + w[i] * v[i];
  }

  // the arc at (depth, k) is [2 pi k / 2^d, 2 pi (k+1) / 2^d) and holds the
  // nodes i with k / 2^d <= i / N < (k+1) / 2^d
  constexpr int depth_cap = 20;
  struct ArcHit {
    int depth;
    long long k;
    Eigen::Index lo, hi;  // node range [lo, hi)
  };
  std::vector<ArcHit> selected;
  std::vector<std::pair<int, long long>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [d, k] = stack.back();
    stack.pop_back();
    auto lo = Eigen::Index((k * N + (1LL << d) - 1) >> d);
    auto hi = Eigen::Index((((k + 1) * N) + (1LL << d) - 1) >> d);
    if (lo >= hi) continue;
    double arc_mass = mass[std::size_t(hi)] - mass[std::size_t(lo)];
    if (arc_mass == 0.0) continue;
    double arc_measure = meas[std::size_t(hi)] - meas[std::size_t(lo)];
    if (arc_mass / arc_measure > alpha) {
      selected.push_back({d, k, lo, hi});
      continue;
    }
    if (d >= depth_cap || hi - lo <= 1) continue;
    stack.push_back({d + 1, 2 * k + 1});
    stack.push_back({d + 1, 2 * k});
  }

  CZDecomposition dec{alpha, f};
  Eigen::VectorXd good_values = v;
  Eigen::VectorXd recombined = Eigen::VectorXd::Zero(N);
  double sum_measure = 0.0;
  for (const ArcHit& a : selected) {
    double arc_measure = meas[std::size_t(a.hi)] - meas[std::size_t(a.lo)];
    double avg = (signed_mass[std::size_t(a.hi)] - signed_mass[std::size_t(a.lo)]) / arc_measure;
    Eigen::VectorXd bv = Eigen::VectorXd::Zero(N);
    for (Eigen::Index i = a.lo; i < a.hi; ++i) {
      bv[i] = v[i] - avg;
      good_values[i] = avg;
    }

    double len = two_pi / double(1LL << a.depth);
    CZBadPart part{Signal(s, std::move(bv)), (double(a.k) + 0.5) * len, 0.5 * len, arc_measure};

    double b_l1 = 0.0, b_int = 0.0, outside = 0.0;
    for (Eigen::Index i = 0; i < N; ++i) {
      double bvi = part.part.values()[i];
      recombined[i] += bvi;
      if (i >= a.lo && i < a.hi) {
        b_l1 += w[i] * std::abs(bvi);
        b_int += w[i] * bvi;
      } else {
        outside = std::max(outside, std::abs(bvi));
      }
    }
    dec.bad_l1_ratio = std::max(dec.bad_l1_ratio, b_l1 / (alpha * arc_measure));
    dec.max_mean_defect = std::max(dec.max_mean_defect, std::abs(b_int));
    dec.support_defect = std::max(dec.support_defect, outside);
    sum_measure += arc_measure;
    dec.bad.push_back(std::move(part));
  }

  dec.good = Signal(s, std::move(good_values));
  dec.measure_ratio = sum_measure / (l1 / alpha);
  double g2 = 0.0;
  for (Eigen::Index i = 0; i < N; ++i)
    g2 += w[i] * dec.good.values()[i] * dec.good.values()[i];
  dec.good_l2_ratio = g2 / (alpha * l1);
  dec.c_hat = std::max({dec.bad_l1_ratio, dec.measure_ratio, dec.good_l2_ratio});
  recombined += dec.good.values();
  dec.reconstruction_defect = (recombined - v).cwiseAbs().maxCoeff();
  return dec;
}

}  // namespace geoscat
