#pragma once

// The four-chart atlas of the unit circle built from overlapping arcs around
// the axis points, with chart coordinates given by the ambient coordinate
// functions sin and cos.  On each arc the coordinate map is bilipschitz,
//    c1 |phi(y) - phi(z)| <= r(y, z) <= c2 |phi(y) - phi(z)|,
// with c1 = 1 and c2 = 1 / sqrt(1 - sin^2(pi/3 - omega)); the product c1 c2
// stays below 2 for every admissible shrink angle omega, and that headroom is
// what the kernel regularity estimates spend.
//
// Arcs overlap by pi/6 - 2 omega, so open balls of radius up to
// (pi/12 - omega) land inside a single chart; one third of that radius is
// stored as lebesgue_delta.

#include <geoscat/spectrum.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace geoscat {

struct Chart {
  double lo = 0.0, hi = 0.0;  // open arc (lo, hi) in angle coordinates
  std::function<double(double)> coord;

  double center() const { return 0.5 * (lo + hi); }

  // wrap-aware: true when theta + 2 pi k lies in (lo, hi) for some integer k
  bool contains(double theta) const {
    double t = theta - two_pi * std::round((theta - center()) / two_pi);
    return t > lo && t < hi;
  }
};

struct ChartAtlas {
  std::vector<Chart> charts;
  double lebesgue_delta = 0.0;  // open balls of radius 3 delta fit in one chart
  double c1 = 1.0, c2 = 1.0;

  // index of a chart containing the open ball B(center, radius), or -1;
  // comparisons carry a 1e-12 slack so exactly-critical balls do not flip
  // on rounding
  int chart_containing_ball(double center, double radius) const {
    for (std::size_t i = 0; i < charts.size(); ++i) {
      const Chart& c = charts[i];
      double t = center - two_pi * std::round((center - c.center()) / two_pi);
      if (c.lo <= t - radius + 1e-12 && t + radius <= c.hi + 1e-12) return int(i);
    }
    return -1;
  }
};

struct ChartConstants {
  double c1 = 1.0, c2 = 1.0, product = 1.0;
  ChartAtlas atlas;
  long pairs_checked = 0;
  double min_stretch = 0.0, max_stretch = 0.0;  // observed r / |phi(y) - phi(z)|
};

// Builds the atlas for a shrink angle omega in (0, pi/12), certifies the
// covering radius and the bilipschitz bounds on a deterministic dense pair
// sample, and returns the constants.  delta may be overridden (range
// (0, pi/36), and 3 delta must not exceed the overlap margin pi/12 - omega);
// by default it is set to the largest admissible value.
inline ChartConstants chart_constants_circle(double omega, double delta = -1.0,
                                             long pair_samples = 10000) {
  constexpr double pi = std::numbers::pi_v<double>;
  if (!(omega > 0.0) || !(omega < pi / 12.0))
    throw std::invalid_argument("chart constants: omega must lie in (0, pi/12)");
  if (pair_samples < 4) throw std::invalid_argument("chart constants: need pair samples");
  double margin = pi / 12.0 - omega;
  if (delta < 0.0) {
    delta = margin / 3.0;
  } else {
    if (!(delta > 0.0) || !(delta < pi / 36.0))
      throw std::invalid_argument("chart constants: delta must lie in (0, pi/36)");
    if (3.0 * delta > margin)
      throw std::invalid_argument("chart constants: 3 delta exceeds the chart overlap");
  }

  ChartConstants out;
  out.c1 = 1.0;
  double s = std::sin(pi / 3.0 - omega);
  out.c2 = 1.0 / std::sqrt(1.0 - s * s);
  out.product = out.c1 * out.c2;
  if (!(out.product < 2.0))
    throw std::runtime_error("chart constants: product reached 2, atlas unusable");

  auto sine = [](double t) { return std::sin(t); };
  auto cosine = [](double t) { return std::cos(t); };
  out.atlas.charts = {
      Chart{-pi / 3.0 + omega, pi / 3.0 - omega, sine},
      Chart{pi / 6.0 + omega, 5.0 * pi / 6.0 - omega, cosine},
      Chart{2.0 * pi / 3.0 + omega, 4.0 * pi / 3.0 - omega, sine},
      Chart{7.0 * pi / 6.0 + omega, 11.0 * pi / 6.0 - omega, cosine},
  };
  out.atlas.lebesgue_delta = delta;
  out.atlas.c1 = out.c1;
  out.atlas.c2 = out.c2;

  // covering certificate: every triple ball around a dense grid of centers
  // fits inside one chart
  for (int i = 0; i < 1440; ++i) {
    double theta = two_pi * double(i) / 1440.0;
    if (out.atlas.chart_containing_ball(theta, 3.0 * delta) < 0)
      throw std::runtime_error("chart constants: covering radius certificate failed");
  }

  // bilipschitz certificate on a deterministic pair sample, per chart
  std::mt19937_64 rng(0x9d2c5680u);
  out.min_stretch = out.c2;
  out.max_stretch = out.c1;
  long per_chart = pair_samples / long(out.atlas.charts.size());
  for (const Chart& chart : out.atlas.charts) {
    std::uniform_real_distribution<double> in_arc(chart.lo, chart.hi);
    for (long p = 0; p < per_chart; ++p) {
      double y = in_arc(rng), z = in_arc(rng);
      double r = circle_arc_distance(y, z);
      double d = std::abs(chart.coord(y) - chart.coord(z));
      if (d == 0.0) continue;
      double stretch = r / d;
      out.min_stretch = std::min(out.min_stretch, stretch);
      out.max_stretch = std::max(out.max_stretch, stretch);
      if (out.c1 * d > r * (1.0 + 1e-12))
        throw std::runtime_error("chart constants: lower bilipschitz bound failed");
      if (r > out.c2 * d * (1.0 + 1e-12))
        throw std::runtime_error("chart constants: upper bilipschitz bound failed");
      ++out.pairs_checked;
    }
  }
  return out;
}

}  // namespace geoscat
