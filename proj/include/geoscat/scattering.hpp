#pragma once

// Propagator cascades and nonwindowed scattering moments.
//
// U[j1,...,jm]f applies convolve-then-modulus once per scale; a moment is the
// L^q norm of the propagated signal, tabulated over the full scale grid
// [j_min, j_max]^m.  The cascade is a tree: each path prefix is computed once
// and shared by all extensions, and the first layer fans out across worker
// threads into disjoint table slots, so results are identical at any thread
// count.  The modulus leaves the retained modes; every further convolution
// implicitly re-projects, and projection_defect records the worst energy
// discarded that way.  boundary_mass reports how much of a table's l2 mass
// sits on window-edge scales, quantifying grid truncation.

#include <geoscat/parallel.hpp>
#include <geoscat/signal.hpp>
#include <geoscat/wavelets.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoscat {

struct ScatteringPath {
  std::vector<int> scales;  // (j1, ..., jm); empty path is the identity
  int order() const { return int(scales.size()); }
  friend bool operator==(const ScatteringPath&, const ScatteringPath&) = default;
};

inline Signal modulus(const Signal& f) { return Signal(f.spectrum(), f.values().cwiseAbs()); }

inline Signal propagate(const Signal& f, const ScatteringPath& path, const WaveletBank& bank) {
  if (f.spectrum() != bank.spectrum())
    throw std::invalid_argument("propagate: signal and bank live on different spectra");
  Signal u = f;
  for (int j : path.scales) u = modulus(convolve(u, bank.filter(j)));
  return u;
}

inline Signal windowed_scattering(const Signal& f, const ScatteringPath& path,
                                  const WaveletBank& bank, int J) {
  for (int j : path.scales)
    if (j > J) throw std::invalid_argument("windowed scattering: path scale exceeds J");
  return convolve(propagate(f, path, bank), lowpass_filter(bank.profile(), f.spectrum(), J));
}

struct MomentTable {
  double q = 2.0;
  int order = 1;
  int j_min = 0;
  int j_max = 0;
  std::vector<double> entries;  // lexicographic over [j_min, j_max]^order

  bool sparsified = false;
  double sparsity_threshold = 0.0;

  // provenance echoed into the CSV header
  std::string profile = "exponential";
  double profile_constant = 1.0;
  Eigen::Index n_modes = 0;
  std::uint64_t seed = 0;

  double projection_defect = 0.0;
  double boundary_mass = 0.0;

  int window_width() const { return j_max - j_min + 1; }

  std::size_t index_of(const ScatteringPath& p) const {
    if (p.order() != order) throw std::invalid_argument("moment table: path order mismatch");
    std::size_t idx = 0;
    for (int j : p.scales) {
      if (j < j_min || j > j_max)
        throw std::invalid_argument("moment table: path scale out of window");
      idx = idx * std::size_t(window_width()) + std::size_t(j - j_min);
    }
    return idx;
  }

  ScatteringPath path_at(std::size_t idx) const {
    ScatteringPath p;
    p.scales.assign(std::size_t(order), j_min);
    for (int i = order - 1; i >= 0; --i) {
      p.scales[std::size_t(i)] = j_min + int(idx % std::size_t(window_width()));
      idx /= std::size_t(window_width());
    }
    return p;
  }

  double at(const ScatteringPath& p) const { return entries[index_of(p)]; }
};

struct MomentOptions {
  long long path_cap = 100000;
  double sparsity_threshold = 0.0;  // opt in: entries below threshold * max drop to zero
  int threads = 1;
  std::uint64_t seed = 0;  // provenance only
};

namespace detail {

// quadrature energy minus retained coefficient energy, clamped at zero
inline double discarded_energy(const Signal& u) {
  return std::max(0.0, weighted_dot(u, u) - u.coefficients().squaredNorm());
}

struct CascadeSink {
  std::vector<MomentTable>* tables;  // laid out orders-major, qs-minor
  const std::vector<int>* orders;
  const std::vector<double>* qs;
  int max_order;
};

inline void descend(const Signal& u, int depth, std::size_t prefix, const WaveletBank& bank,
                    const CascadeSink& sink, double& defect) {
  for (std::size_t oi = 0; oi < sink.orders->size(); ++oi)
    if ((*sink.orders)[oi] == depth)
      for (std::size_t qi = 0; qi < sink.qs->size(); ++qi)
        (*sink.tables)[oi * sink.qs->size() + qi].entries[prefix] = lq_norm(u, (*sink.qs)[qi]);
  if (depth == sink.max_order) return;
  defect = std::max(defect, discarded_energy(u));
  const std::size_t width = std::size_t(bank.scale_count());
  for (std::size_t jj = 0; jj < width; ++jj) {
    Signal child = modulus(convolve(u, bank.filter(bank.j_min() + int(jj))));
    descend(child, depth + 1, prefix * width + jj, bank, sink, defect);
  }
}

}  // namespace detail

inline std::vector<MomentTable> moment_tables(const Signal& f, const WaveletBank& bank,
                                              const std::vector<int>& orders,
                                              const std::vector<double>& qs,
                                              const MomentOptions& opts = {}) {
  if (f.spectrum() != bank.spectrum())
    throw std::invalid_argument("moments: signal and bank live on different spectra");
  if (orders.empty() || qs.empty()) throw std::invalid_argument("moments: empty request");
  for (double q : qs)
    if (!(q >= 1.0 && q <= 2.0)) throw std::invalid_argument("moments: q must be in [1, 2]");
  const long long width = bank.scale_count();
  int max_order = 0;
  for (int m : orders) {
    if (m < 1) throw std::invalid_argument("moments: order must be at least 1");
    max_order = std::max(max_order, m);
    long long paths = 1;
    for (int k = 0; k < m; ++k) {
      paths *= width;
      if (paths > opts.path_cap)
        throw std::invalid_argument("moments: path grid exceeds the configured cap");
    }
  }

  std::vector<MomentTable> tables;
  tables.reserve(orders.size() * qs.size());
  for (int m : orders)
    for (double q : qs) {
      MomentTable t;
      t.q = q;
      t.order = m;
      t.j_min = bank.j_min();
      t.j_max = bank.j_max();
      std::size_t n = 1;
      for (int k = 0; k < m; ++k) n *= std::size_t(width);
      t.entries.assign(n, 0.0);
      t.profile = bank.profile().name();
      t.profile_constant = bank.profile().constant;
      t.n_modes = f.spectrum()->n_modes();
      t.seed = opts.seed;
      tables.push_back(std::move(t));
    }

  detail::CascadeSink sink{&tables, &orders, &qs, max_order};
  double defect = detail::discarded_energy(f);  // also warms the root's cache
  std::vector<double> subtree_defects(std::size_t(width), 0.0);
  parallel_for(width, opts.threads, [&](long long jj) {
    Signal child = modulus(convolve(f, bank.filter(bank.j_min() + int(jj))));
    detail::descend(child, 1, std::size_t(jj), bank, sink, subtree_defects[std::size_t(jj)]);
  });
  for (double d : subtree_defects) defect = std::max(defect, d);

  for (auto& t : tables) {
    t.projection_defect = defect;
    double total = 0.0, edge = 0.0;
    for (std::size_t k = 0; k < t.entries.size(); ++k) {
      double e2 = t.entries[k] * t.entries[k];
      total += e2;
      for (int j : t.path_at(k).scales)
        if (j == t.j_min || j == t.j_max) {
          edge += e2;
          break;
        }
    }
    t.boundary_mass = total > 0.0 ? std::sqrt(edge / total) : 0.0;
  }

  if (opts.sparsity_threshold > 0.0)
    for (auto& t : tables) {
      double mx = t.entries.empty() ? 0.0 : *std::max_element(t.entries.begin(), t.entries.end());
      double cut = opts.sparsity_threshold * mx;
      for (double& e : t.entries)
        if (e < cut) e = 0.0;
      t.sparsified = true;
      t.sparsity_threshold = opts.sparsity_threshold;
    }

  return tables;
}

inline MomentTable moments(const Signal& f, const WaveletBank& bank, int m, double q,
                           const MomentOptions& opts = {}) {
  return std::move(moment_tables(f, bank, {m}, {q}, opts).front());
}

namespace detail {

inline void check_compatible(const MomentTable& a, const MomentTable& b) {
  if (a.q != b.q || a.order != b.order || a.j_min != b.j_min || a.j_max != b.j_max ||
      a.entries.size() != b.entries.size())
    throw std::invalid_argument("scattering norm: incompatible tables");
}

}  // namespace detail

inline double scattering_norm(const MomentTable& a) {
  double sum = 0.0;
  for (double e : a.entries) sum += e * e;
  return std::sqrt(sum);
}

inline double scattering_norm(const MomentTable& a, const MomentTable& b) {
  detail::check_compatible(a, b);
  double sum = 0.0;
  for (std::size_t k = 0; k < a.entries.size(); ++k) {
    double d = a.entries[k] - b.entries[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

inline double scattering_norm_qth_power(const MomentTable& a) {
  return std::pow(scattering_norm(a), a.q);
}

inline double scattering_norm_qth_power(const MomentTable& a, const MomentTable& b) {
  return std::pow(scattering_norm(a, b), a.q);
}

namespace detail {

inline void append_number(std::string& out, double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

inline void append_number(std::string& out, long long v) {
  char buf[24];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

inline void append_number(std::string& out, std::uint64_t v) {
  char buf[24];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, r.ptr);
}

}  // namespace detail

// shortest round-trip number formatting keeps the bytes stable across runs
inline void write_moment_csv(std::ostream& os, const MomentTable& t) {
  std::string out = "q,m,j_min,j_max,profile,C,n_modes,seed,sparsity\n";
  detail::append_number(out, t.q);
  out += ',';
  detail::append_number(out, (long long)t.order);
  out += ',';
  detail::append_number(out, (long long)t.j_min);
  out += ',';
  detail::append_number(out, (long long)t.j_max);
  out += ',';
  out += t.profile;
  out += ',';
  detail::append_number(out, t.profile_constant);
  out += ',';
  detail::append_number(out, (long long)t.n_modes);
  out += ',';
  detail::append_number(out, t.seed);
  out += ',';
  detail::append_number(out, t.sparsified ? t.sparsity_threshold : 0.0);
  out += '\n';
  for (std::size_t k = 0; k < t.entries.size(); ++k) {
    for (int j : t.path_at(k).scales) {
      detail::append_number(out, (long long)j);
      out += ',';
    }
    detail::append_number(out, t.entries[k]);
    out += '\n';
  }
  os.write(out.data(), std::streamsize(out.size()));
}

}  // namespace geoscat
