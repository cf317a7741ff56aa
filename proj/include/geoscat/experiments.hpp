#pragma once

// Experiment runners that turn operator guarantees into measured numbers:
// invariance of moment tables under isometries, deviation growth under small
// diffeomorphisms, weak-type behavior of the square function, and family
// maxima for fitted constants.  Fitted constants are reported, never asserted
// against hoped-for values; deciding whether a number is small enough is the
// caller's job.
//
// Runners parallelize over family members or grid points.  Each trial is pure
// and writes to its own slot, so the reduction is deterministic at any thread
// count.

#include <geoscat/actions.hpp>
#include <geoscat/littlewood_paley.hpp>
#include <geoscat/parallel.hpp>
#include <geoscat/random_signals.hpp>
#include <geoscat/scattering.hpp>
#include <geoscat/signal.hpp>
#include <geoscat/wavelets.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace geoscat {

struct InvarianceReport {
  int order = 1;
  double q = 2.0;
  double max_abs = 0.0;
  double max_rel = 0.0;
  double noise_floor = 0.0;  // 1e-9 of max(dominant entry, |f|_q)
  double tolerance = 1e-8;
  bool pass = false;
};

// Moment tables before and after an isometry should agree to round-off.  The
// per-entry denominator is max(|a|, |b|, noise_floor).  Each cascade stage
// injects absolute round-off proportional to the magnitudes flowing through
// it, so entries orders of magnitude below the signal's own norm carry no
// meaningful relative reading; without the floor, comparing such residue
// against itself reports spurious disagreement.  Entries under the floor are
// still held to an absolute gate of tolerance * noise_floor, about fifty
// machine epsilons of the signal norm.
inline InvarianceReport isometry_invariance_report(const Signal& f, const WaveletBank& bank,
                                                   int m, double q, const PointMap& map,
                                                   const MomentOptions& opts = {}) {
  if (map.kind != MapKind::isometry)
    throw std::invalid_argument("invariance report: map is not an isometry");
  MomentTable a = moments(f, bank, m, q, opts);
  MomentTable b = moments(apply_action(f, map), bank, m, q, opts);
  InvarianceReport rep;
  rep.order = m;
  rep.q = q;
  double scale = lq_norm(f, q);
  for (std::size_t k = 0; k < a.entries.size(); ++k)
    scale = std::max({scale, std::abs(a.entries[k]), std::abs(b.entries[k])});
  rep.noise_floor = 1e-9 * scale;
  for (std::size_t k = 0; k < a.entries.size(); ++k) {
    double diff = std::abs(a.entries[k] - b.entries[k]);
    double den = std::max({std::abs(a.entries[k]), std::abs(b.entries[k]), rep.noise_floor});
    rep.max_abs = std::max(rep.max_abs, diff);
    if (den > 0.0) rep.max_rel = std::max(rep.max_rel, diff / den);
  }
  rep.pass = rep.max_rel <= rep.tolerance;
  return rep;
}

inline std::function<PointMap(double)> circle_wave_family(int k) {
  return [k](double t) { return circle_wave_diffeo(t, k); };
}

inline std::function<PointMap(double)> circle_sine_family() { return circle_wave_family(1); }

struct StabilityPoint {
  double displacement = 0.0;
  double deviation = 0.0;
};

struct StabilityCurve {
  std::vector<StabilityPoint> points;
  double slope = 0.0;            // log-log fit over points with positive displacement
  double fitted_constant = 0.0;  // max deviation / (lam^n * displacement * |f|_q)
};

// Moves a bandlimited signal by each diffeomorphism in the family and records
// the Euclidean distance between the moment tables.  Linear growth in the
// displacement shows up as a log-log slope near one.
inline StabilityCurve stability_curve(
    const Signal& f, const WaveletBank& bank, int m, double q, double lam,
    const std::vector<double>& t_grid,
    const std::function<PointMap(double)>& family = circle_sine_family(),
    const MomentOptions& opts = {}) {
  if (t_grid.empty()) throw std::invalid_argument("stability curve: empty parameter grid");
  if (!is_bandlimited(f, lam))
    throw std::invalid_argument("stability curve: signal is not bandlimited at the declared cutoff");
  MomentTable base = moments(f, bank, m, q, opts);

  StabilityCurve curve;
  curve.points.resize(t_grid.size());
  MomentOptions inner = opts;
  inner.threads = 1;  // the outer loop owns the parallelism
  parallel_for(static_cast<long long>(t_grid.size()), resolve_thread_count(opts.threads),
               [&](long long i) {
                 PointMap map = family(t_grid[std::size_t(i)]);
                 MomentTable moved = moments(apply_action(f, map), bank, m, q, inner);
                 curve.points[std::size_t(i)] = {map.sup_displacement,
                                                 scattering_norm(base, moved)};
               });

  double fq = lq_norm(f, q);
  double lam_n = std::pow(lam, double(f.spectrum()->dimension));
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  long n_fit = 0;
  for (const StabilityPoint& p : curve.points) {
    if (!(p.displacement > 0.0)) continue;
    if (fq > 0.0 && lam_n > 0.0)
      curve.fitted_constant =
          std::max(curve.fitted_constant, p.deviation / (lam_n * p.displacement * fq));
    if (!(p.deviation > 0.0)) continue;
    double x = std::log(p.displacement), y = std::log(p.deviation);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n_fit;
  }
  if (n_fit >= 2) {
    double den = double(n_fit) * sxx - sx * sx;
    if (den != 0.0) curve.slope = (double(n_fit) * sxy - sx * sy) / den;
  }
  return curve;
}

struct Weak11Report {
  double ratio = 0.0;        // sup_delta delta * mu{g > delta} / |f|_1
  double best_delta = 0.0;
  double strong_ratio = 0.0; // |g|_1 / |f|_1; dominates ratio by Chebyshev
  long grid_points = 0;
};

// Superlevel-set mass of the square function against a log-spaced threshold
// grid centered on the signal's mean absolute size.
inline Weak11Report weak_11_ratio(const Signal& f, const WaveletBank& bank,
                                  long grid_points = 181) {
  if (grid_points < 2) throw std::invalid_argument("weak ratio: need at least two thresholds");
  double l1 = lq_norm(f, 1.0);
  if (!(l1 > 0.0)) throw std::invalid_argument("weak ratio: zero signal");
  Signal g = g_function(f, bank);

  Weak11Report rep;
  rep.grid_points = grid_points;
  rep.strong_ratio = lq_norm(g, 1.0) / l1;
  const Eigen::VectorXd& w = f.spectrum()->nodes.weights;
  double base = l1 / f.spectrum()->volume();
  for (long i = 0; i < grid_points; ++i) {
    double delta = base * 1e-6 * std::pow(1e9, double(i) / double(grid_points - 1));
    double mass = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j)
      if (g.values()[j] > delta) mass += w[j];
    double value = delta * mass / l1;
    if (value > rep.ratio) {
      rep.ratio = value;
      rep.best_delta = delta;
    }
  }
  return rep;
}

// max over a seeded bandlimited family of |Gf|_q / |f|_q; the empirical
// square-function operator norm
inline double max_square_function_ratio(const WaveletBank& bank, double q, double lam, int count,
                                        std::uint64_t seed, int threads = 1) {
  if (count < 1) throw std::invalid_argument("square function ratio: need at least one signal");
  std::vector<double> slot(std::size_t(count), 0.0);
  parallel_for(count, resolve_thread_count(threads), [&](long long k) {
    Signal f = random_bandlimited_signal(bank.spectrum(), lam, seed + std::uint64_t(k));
    slot[std::size_t(k)] = vector_norm_ratio(f, bank, q);
  });
  return *std::max_element(slot.begin(), slot.end());
}

// max over a seeded bandlimited family of the moment-table norm against the
// signal norm, both raised to the q-th power
inline double max_scattering_ratio(const WaveletBank& bank, int m, double q, double lam, int count,
                                   std::uint64_t seed, const MomentOptions& opts = {}) {
  if (count < 1) throw std::invalid_argument("scattering ratio: need at least one signal");
  std::vector<double> slot(std::size_t(count), 0.0);
  MomentOptions inner = opts;
  inner.threads = 1;
  parallel_for(count, resolve_thread_count(opts.threads), [&](long long k) {
    Signal f = random_bandlimited_signal(bank.spectrum(), lam, seed + std::uint64_t(k));
    MomentTable table = moments(f, bank, m, q, inner);
    double den = std::pow(lq_norm(f, q), q);
    slot[std::size_t(k)] = den > 0.0 ? scattering_norm_qth_power(table) / den : 0.0;
  });
  return *std::max_element(slot.begin(), slot.end());
}

struct WindowedLimitReport {
  double measured = 0.0;              // quadrature mean of the windowed output
  double flatness = 0.0;              // sup minus inf of the windowed output
  double mean_gain_candidate = 0.0;   // G(0) * |U f|_1 / vol
  double sqrt_volume_candidate = 0.0; // G(0) * |U f|_1 / sqrt(vol)
  double relative_gap = 0.0;          // measured against the mean-gain candidate
};

// At a deep window the low pass keeps only the constant mode, so the windowed
// output flattens to a single number; this report pins down which closed form
// that number follows.
inline WindowedLimitReport windowed_limit_report(const Signal& f, const ScatteringPath& path,
                                                 const WaveletBank& bank, int J) {
  Signal u = propagate(f, path, bank);
  Signal win = windowed_scattering(f, path, bank, J);
  WindowedLimitReport rep;
  double vol = f.spectrum()->volume();
  const Eigen::VectorXd& w = f.spectrum()->nodes.weights;
  rep.measured = (w.array() * win.values().array()).sum() / vol;
  rep.flatness = win.values().maxCoeff() - win.values().minCoeff();
  double gain = bank.profile()(0.0);
  double u1 = lq_norm(u, 1.0);
  rep.mean_gain_candidate = gain * u1 / vol;
  rep.sqrt_volume_candidate = gain * u1 / std::sqrt(vol);
  if (rep.mean_gain_candidate != 0.0)
    rep.relative_gap =
        std::abs(rep.measured - rep.mean_gain_candidate) / std::abs(rep.mean_gain_candidate);
  return rep;
}

}  // namespace geoscat
