#pragma once

// Subcommand drivers behind the gscat binary.  Orchestration is single
// threaded; worker parallelism stays inside library calls, and thread count
// never leaks into any output byte.

#include <geoscat/actions.hpp>
#include <geoscat/charts.hpp>
#include <geoscat/config.hpp>
#include <geoscat/cz.hpp>
#include <geoscat/experiments.hpp>
#include <geoscat/kernel.hpp>
#include <geoscat/littlewood_paley.hpp>
#include <geoscat/pointcloud.hpp>
#include <geoscat/random_signals.hpp>
#include <geoscat/scattering.hpp>
#include <geoscat/signal_io.hpp>
#include <geoscat/spectrum_io.hpp>
#include <geoscat/wavelets.hpp>

#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace geoscat {

namespace detail {

inline std::string short_double(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string backend_label(Backend b) {
  switch (b) {
    case Backend::circle: return "circle";
    case Backend::torus: return "torus";
    case Backend::point_cloud: return "point_cloud";
    default: return "loaded";
  }
}

}  // namespace detail

// execution-only keys (threads, out.dir, cache.dir) are deliberately absent:
// outputs must not depend on where they land or how many workers ran
inline nlohmann::ordered_json config_echo_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["manifold.backend"] = detail::backend_label(c.backend);
  if (c.backend == Backend::point_cloud) {
    j["manifold.cloud"] = c.cloud_path;
    j["manifold.bandwidth"] = c.bandwidth;
    j["manifold.dimension"] = c.cloud_dimension;
  } else {
    j["manifold.nodes"] = (long long)c.nodes;
  }
  j["manifold.modes"] = (long long)c.modes;
  j["profile.kind"] = c.profile_kind == ProfileKind::exponential ? "exponential" : "gaussian";
  j["profile.constant"] = c.profile_constant;
  j["window.j_min"] = c.j_min;
  j["window.j_max"] = c.j_max;
  j["scattering.order"] = c.order;
  j["scattering.q"] = c.qs;
  j["signal.kind"] = c.signal_kind;
  if (!c.signal_path.empty()) j["signal.path"] = c.signal_path;
  j["signal.bandlimit"] = c.signal_bandlimit;
  j["verify.suites"] = c.suites;
  j["verify.frame_j_min"] = c.frame_j_min;
  j["verify.frame_j_max"] = c.frame_j_max;
  j["verify.frame_tol"] = c.frame_tol;
  j["verify.invariance_tol"] = c.invariance_tol;
  j["verify.slope_lo"] = c.slope_lo;
  j["verify.slope_hi"] = c.slope_hi;
  j["verify.stability_bandlimit"] = c.stability_bandlimit;
  j["verify.cz_trials"] = c.cz_trials;
  j["verify.cz_chat_max"] = c.cz_chat_max;
  j["verify.chart_omega"] = c.chart_omega;
  j["verify.family"] = c.family;
  return j;
}

inline SpectrumPtr build_spectrum_from_config(const RunConfig& c) {
  switch (c.backend) {
    case Backend::circle:
      return build_circle_spectrum(c.nodes, c.modes);
    case Backend::torus:
      return build_torus_spectrum(c.nodes, c.modes);
    case Backend::point_cloud:
      return build_pointcloud_spectrum(read_points_text(c.cloud_path), c.modes, c.bandwidth,
                                       c.cloud_dimension);
    default:
      throw UsageError("cannot build a spectrum for this backend");
  }
}

inline std::filesystem::path spectrum_cache_path(const RunConfig& c) {
  std::string stem = detail::backend_label(c.backend);
  if (c.backend == Backend::point_cloud)
    stem += "_" + std::filesystem::path(c.cloud_path).stem().string() + "_m" +
            std::to_string(c.modes) + "_h" + detail::short_double(c.bandwidth);
  else
    stem += "_n" + std::to_string(c.nodes) + "_m" + std::to_string(c.modes);
  return std::filesystem::path(c.cache_dir) / (stem + ".gspc");
}

struct SpectrumHandle {
  SpectrumPtr spectrum;
  std::string cache_note;
};

// A restored spectrum carries no node geometry, so callers needing analytic
// signals or geodesics must build rather than load.
inline SpectrumHandle cached_spectrum(const RunConfig& c) {
  std::filesystem::path file = spectrum_cache_path(c);
  if (std::filesystem::exists(file)) {
    SpectrumPtr s = load_spectrum(file);
    bool fresh = s->n_modes() == c.modes;
    if (c.backend == Backend::circle) fresh = fresh && s->n_nodes() == c.nodes;
    if (c.backend == Backend::torus) fresh = fresh && s->n_nodes() == c.nodes * c.nodes;
    if (fresh) return {s, "cache hit: loaded " + file.string()};
  }
  SpectrumPtr s = build_spectrum_from_config(c);
  std::filesystem::create_directories(file.parent_path());
  save_spectrum(*s, file);
  return {s, "cache miss: built and wrote " + file.string()};
}

namespace detail {

inline std::string echo_lines(const RunConfig& c) {
  std::string out;
  const nlohmann::ordered_json echo = config_echo_json(c);
  for (const auto& [key, value] : echo.items()) {
    out += "config: " + key + " = ";
    out += value.is_string() ? value.get<std::string>() : value.dump();
    out += '\n';
  }
  return out;
}

}  // namespace detail

inline int cmd_spectrum(const RunConfig& cfg) {
  SpectrumHandle h = cached_spectrum(cfg);
  const Spectrum& s = *h.spectrum;
  std::string out = "gscat spectrum\n" + detail::echo_lines(cfg) + h.cache_note + "\n";
  out += "nodes: " + std::to_string(s.n_nodes()) + "\n";
  out += "eigenvalues:";
  Eigen::Index shown = std::min<Eigen::Index>(12, s.n_modes());
  for (Eigen::Index n = 0; n < shown; ++n) out += " " + detail::short_double(s.eigenvalues[n]);
  if (shown < s.n_modes()) out += " ...";
  out += "\northonormality defect: " + detail::short_double(orthonormality_defect(s)) + "\n";
  std::cout << out;
  return 0;
}

inline Signal config_signal(const RunConfig& cfg, const SpectrumPtr& s) {
  if (signal_needs_seed(cfg.signal_kind) && !cfg.seed)
    throw UsageError("signal.kind " + cfg.signal_kind + " requires a seed");
  if (cfg.signal_kind == "cos") {
    if (s->intrinsic.cols() < 1)
      throw UsageError("signal.kind cos needs intrinsic coordinates; use a text or raw signal");
    Eigen::VectorXd v(s->n_nodes());
    for (Eigen::Index i = 0; i < s->n_nodes(); ++i) v[i] = std::cos(s->intrinsic(i, 0));
    return Signal(s, v);
  }
  if (cfg.signal_kind == "constant")
    return synthesize(s, Eigen::VectorXd::Unit(s->n_modes(), 0));
  if (cfg.signal_kind == "random")
    return random_bandlimited_signal(s, cfg.signal_bandlimit, *cfg.seed);
  if (cfg.signal_kind == "spiky") return random_spiky_signal(s, *cfg.seed);
  Eigen::VectorXd v = cfg.signal_kind == "text" ? read_signal_text(cfg.signal_path)
                                                : read_signal_raw(cfg.signal_path);
  if (v.size() != s->n_nodes())
    throw std::runtime_error("signal has " + std::to_string(v.size()) + " samples, manifold has " +
                             std::to_string(s->n_nodes()) + " nodes");
  return Signal(s, v);
}

inline int cmd_moments(const RunConfig& cfg) {
  SpectrumPtr s = cfg.backend == Backend::point_cloud ? cached_spectrum(cfg).spectrum
                                                      : build_spectrum_from_config(cfg);
  WaveletBank bank =
      build_wavelet_bank(make_profile(cfg.profile_kind, cfg.profile_constant), s, cfg.j_min,
                         cfg.j_max);
  Signal f = config_signal(cfg, s);

  std::vector<int> orders;
  for (int m = 1; m <= cfg.order; ++m) orders.push_back(m);
  MomentOptions opts;
  opts.threads = cfg.threads;
  opts.seed = cfg.seed.value_or(0);
  std::vector<MomentTable> tables = moment_tables(f, bank, orders, cfg.qs, opts);

  std::filesystem::create_directories(cfg.out_dir);
  nlohmann::ordered_json manifest;
  manifest["tool"] = "gscat moments";
  manifest["config"] = config_echo_json(cfg);
  if (cfg.seed)
    manifest["seed"] = *cfg.seed;
  else
    manifest["seed"] = nullptr;
  manifest["outputs"] = nlohmann::ordered_json::array();

  std::string log = "gscat moments\n";
  for (const MomentTable& t : tables) {
    std::string name =
        "moments_m" + std::to_string(t.order) + "_q" + detail::short_double(t.q) + ".csv";
    std::filesystem::path file = std::filesystem::path(cfg.out_dir) / name;
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    write_moment_csv(out, t);
    manifest["outputs"].push_back(name);
    log += "wrote " + file.string() + "\n";
  }
  std::filesystem::path mfile = std::filesystem::path(cfg.out_dir) / "moments_manifest.json";
  std::ofstream mout(mfile, std::ios::binary | std::ios::trunc);
  mout << manifest.dump(2) << "\n";
  log += "wrote " + mfile.string() + "\n";
  std::cout << log;
  return 0;
}

struct SuiteOutcome {
  std::string name;
  nlohmann::ordered_json parameters;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

namespace detail {

inline SuiteOutcome suite_frame(const RunConfig& cfg, const SpectrumPtr& s) {
  SuiteOutcome out;
  out.name = "frame";
  WaveletBank bank(make_profile(cfg.profile_kind, cfg.profile_constant), s, cfg.frame_j_min,
                   cfg.frame_j_max);
  Eigen::VectorXd d = frame_defect(bank);
  int shown = 0;
  for (Eigen::Index n = 0; n < s->n_modes(); ++n) {
    if (!(s->eigenvalues[n] > 0.0)) continue;  // constant mode lives in the low pass
    out.measured = std::max(out.measured, std::abs(d[n]));
    if (shown < 8) {
      out.rows.push_back({{"lambda", s->eigenvalues[n]}, {"defect", d[n]}});
      ++shown;
    }
  }
  out.parameters = {{"j_min", cfg.frame_j_min},
                    {"j_max", cfg.frame_j_max},
                    {"constant", cfg.profile_constant}};
  out.tolerance = cfg.frame_tol;
  out.pass = out.measured <= out.tolerance;
  return out;
}

inline SuiteOutcome suite_square(const RunConfig& cfg, const SpectrumPtr& s) {
  SuiteOutcome out;
  out.name = "square";
  WaveletBank bank(make_profile(cfg.profile_kind, cfg.profile_constant), s, cfg.frame_j_min,
                   cfg.frame_j_max);
  const double bandlimit = 20.0;
  for (int k = 0; k < cfg.family; ++k) {
    std::uint64_t seed = *cfg.seed + std::uint64_t(k);
    Signal f = random_bandlimited_signal(s, bandlimit, seed);
    double ratio = vector_norm_ratio(f, bank, 2.0);
    double deviation = std::abs(ratio / cfg.profile_constant - 1.0);
    out.measured = std::max(out.measured, deviation);
    if (k < 8) out.rows.push_back({{"seed", seed}, {"ratio", ratio}, {"deviation", deviation}});
  }
  out.parameters = {{"family", cfg.family}, {"bandlimit", bandlimit}, {"q", 2.0}};
  out.tolerance = cfg.frame_tol;
  out.pass = out.measured <= out.tolerance;
  return out;
}

inline SuiteOutcome suite_invariance(const RunConfig& cfg, const SpectrumPtr& s) {
  SuiteOutcome out;
  out.name = "invariance";
  LowPassProfile profile = make_profile(cfg.profile_kind, cfg.profile_constant);
  MomentOptions opts;
  opts.threads = cfg.threads;

  const int torus_axis = 24;
  const Eigen::Index torus_modes = 25;
  double circle_angle = two_pi * 5.0 / double(s->n_nodes());
  double torus_a1 = two_pi * 3.0 / double(torus_axis);
  double torus_a2 = two_pi * 7.0 / double(torus_axis);

  struct Case {
    const char* backend;
    SpectrumPtr spectrum;
    Signal signal;
    PointMap map;
  };
  SpectrumPtr st = build_torus_spectrum(torus_axis, torus_modes);
  std::vector<Case> cases;
  cases.push_back({"circle", s, random_bandlimited_signal(s, 20.0, *cfg.seed),
                   circle_rotation(circle_angle)});
  cases.push_back({"torus", st, random_bandlimited_signal(st, 20.0, *cfg.seed + 1),
                   torus_rotation(torus_a1, torus_a2)});

  for (const Case& c : cases) {
    WaveletBank bank(profile, c.spectrum, cfg.j_min, cfg.j_max);
    for (int m : {1, 2, 3})
      for (double q : {1.25, 1.5, 2.0}) {
        InvarianceReport rep = isometry_invariance_report(c.signal, bank, m, q, c.map, opts);
        out.measured = std::max(out.measured, rep.max_rel);
        out.rows.push_back(
            {{"backend", c.backend}, {"m", m}, {"q", q}, {"max_rel", rep.max_rel}});
      }
  }
  out.parameters = {{"circle_angle", circle_angle},
                    {"torus_angles", {torus_a1, torus_a2}},
                    {"orders", {1, 2, 3}},
                    {"qs", {1.25, 1.5, 2.0}}};
  out.tolerance = cfg.invariance_tol;
  out.pass = out.measured <= out.tolerance;
  return out;
}

inline SuiteOutcome suite_stability(const RunConfig& cfg, const SpectrumPtr& s) {
  SuiteOutcome out;
  out.name = "stability";
  WaveletBank bank(make_profile(cfg.profile_kind, cfg.profile_constant), s, cfg.j_min, cfg.j_max);
  Signal f = random_bandlimited_signal(s, cfg.stability_bandlimit, *cfg.seed + 2);
  std::vector<double> grid;
  for (int i = 0; i < 5; ++i) grid.push_back(1e-3 * std::pow(10.0, 0.5 * i));
  MomentOptions opts;
  opts.threads = cfg.threads;
  bool all_in_window = true;
  for (int m : {1, 2})
    for (double q : {1.5, 2.0}) {
      StabilityCurve curve =
          stability_curve(f, bank, m, q, cfg.stability_bandlimit, grid, circle_sine_family(), opts);
      all_in_window = all_in_window && curve.slope >= cfg.slope_lo && curve.slope <= cfg.slope_hi;
      out.measured = std::max(out.measured, std::abs(curve.slope - 1.0));
      out.rows.push_back({{"m", m},
                          {"q", q},
                          {"slope", curve.slope},
                          {"fitted_constant", curve.fitted_constant}});
    }
  out.parameters = {{"bandlimit", cfg.stability_bandlimit},
                    {"t_grid", grid},
                    {"slope_window", {cfg.slope_lo, cfg.slope_hi}}};
  out.tolerance = std::max(cfg.slope_hi - 1.0, 1.0 - cfg.slope_lo);
  out.pass = all_in_window;
  return out;
}

inline SuiteOutcome suite_cz(const RunConfig& cfg, const SpectrumPtr& s) {
  SuiteOutcome out;
  out.name = "cz";
  const double bandlimit = 80.0;
  bool ok = true;
  for (int trial = 0; trial < cfg.cz_trials; ++trial) {
    Signal f =
        random_bandlimited_signal(s, bandlimit, *cfg.seed + 1000 + std::uint64_t(trial), false);
    double l1 = lq_norm(f, 1.0);
    if (l1 == 0.0) continue;
    double u = double(trial) / double(cfg.cz_trials);
    double alpha = (l1 / two_pi) * (1.5 + 2.0 * u);
    CZDecomposition dec = cz_decompose(f, alpha);
    ok = ok && dec.reconstruction_defect < 1e-10 && dec.support_defect < 1e-12 &&
         dec.max_mean_defect < 1e-8 && dec.c_hat <= cfg.cz_chat_max;
    for (const CZBadPart& b : dec.bad)
      ok = ok && lq_norm(b.part, 1.0) <= dec.c_hat * alpha * b.measure * (1.0 + 1e-12);
    out.measured = std::max(out.measured, dec.c_hat);
    if (trial < 5)
      out.rows.push_back({{"alpha", alpha},
                          {"c_hat", dec.c_hat},
                          {"parts", dec.bad.size()},
                          {"reconstruction_defect", dec.reconstruction_defect}});
  }
  out.parameters = {{"trials", cfg.cz_trials}, {"bandlimit", bandlimit}, {"defect_tol", 1e-10}};
  out.tolerance = cfg.cz_chat_max;
  out.pass = ok && out.measured <= out.tolerance;
  return out;
}

inline SuiteOutcome suite_weak(const RunConfig& cfg, const SpectrumPtr& s) {
  SuiteOutcome out;
  out.name = "weak";
  WaveletBank bank(make_profile(cfg.profile_kind, cfg.profile_constant), s, cfg.frame_j_min,
                   cfg.frame_j_max);
  bool ok = true;
  for (int k = 0; k < cfg.family; ++k) {
    std::uint64_t seed = *cfg.seed + 300 + std::uint64_t(k);
    Signal f = random_spiky_signal(s, seed);
    Weak11Report rep = weak_11_ratio(f, bank);
    double quotient = rep.strong_ratio > 0.0
                          ? rep.ratio / rep.strong_ratio
                          : (rep.ratio == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    ok = ok && quotient <= 1.0 + 1e-12;
    out.measured = std::max(out.measured, quotient);
    if (k < 8)
      out.rows.push_back({{"seed", seed},
                          {"weak_ratio", rep.ratio},
                          {"strong_ratio", rep.strong_ratio},
                          {"best_delta", rep.best_delta}});
  }
  out.parameters = {{"family", cfg.family}};
  out.tolerance = 1.0 + 1e-12;
  out.pass = ok;
  return out;
}

inline SuiteOutcome suite_charts(const RunConfig& cfg) {
  SuiteOutcome out;
  out.name = "charts";
  ChartConstants cc = chart_constants_circle(cfg.chart_omega);
  // independent route: 1 - sin^2 = cos^2, so c2 = 1 / cos(pi/3 - omega)
  double expected = cc.c1 / std::abs(std::cos(two_pi / 6.0 - cfg.chart_omega));
  out.measured = cc.product;
  out.tolerance = 1e-10;
  out.pass = std::abs(cc.product - expected) <= out.tolerance && cc.product < 2.0 &&
             cc.pairs_checked >= 10000;
  out.rows.push_back({{"c1", cc.c1},
                      {"c2", cc.c2},
                      {"product", cc.product},
                      {"min_stretch", cc.min_stretch},
                      {"max_stretch", cc.max_stretch},
                      {"pairs_checked", cc.pairs_checked}});
  for (const Chart& chart : cc.atlas.charts)
    out.rows.push_back({{"lo", chart.lo}, {"hi", chart.hi}});
  out.parameters = {{"omega", cfg.chart_omega}, {"lebesgue_delta", cc.atlas.lebesgue_delta}};
  return out;
}

inline SuiteOutcome suite_kernel(const RunConfig& cfg, const SpectrumPtr& s) {
  SuiteOutcome out;
  out.name = "kernel";
  std::vector<int> scales;
  for (int j = -4; j <= 4; ++j) scales.push_back(j);
  KernelDecayReport rep =
      kernel_decay_report(*s, make_profile(cfg.profile_kind, cfg.profile_constant), scales);
  for (std::size_t i = 0; i < rep.scales.size(); ++i)
    out.rows.push_back(
        {{"j", rep.scales[i]}, {"t", rep.t_values[i]}, {"fitted", rep.fitted[i]}});
  out.parameters = {{"scales", scales}};
  out.measured = rep.variation;
  out.tolerance = 0.2;
  out.pass = out.measured <= out.tolerance;
  return out;
}

inline SuiteOutcome suite_windowed(const RunConfig& cfg, const SpectrumPtr& s) {
  SuiteOutcome out;
  out.name = "windowed";
  WaveletBank bank(make_profile(cfg.profile_kind, cfg.profile_constant), s, cfg.j_min, cfg.j_max);
  Eigen::VectorXd v(s->n_nodes());
  for (Eigen::Index i = 0; i < s->n_nodes(); ++i) v[i] = std::cos(s->intrinsic(i, 0));
  const int J = 20;
  WindowedLimitReport rep = windowed_limit_report(Signal(s, v), ScatteringPath{{0}}, bank, J);
  out.rows.push_back({{"measured_level", rep.measured},
                      {"mean_gain_candidate", rep.mean_gain_candidate},
                      {"sqrt_volume_candidate", rep.sqrt_volume_candidate},
                      {"flatness", rep.flatness}});
  out.parameters = {{"path", {0}}, {"J", J}, {"signal", "cos"}};
  out.measured = rep.relative_gap;
  out.tolerance = 1e-6;
  out.pass = out.measured <= out.tolerance;
  return out;
}

}  // namespace detail

inline int cmd_verify(const RunConfig& cfg) {
  for (const std::string& name : cfg.suites)
    if (suite_is_randomized(name) && !cfg.seed)
      throw UsageError("suite '" + name + "' is randomized and requires a seed");
  if (cfg.backend != Backend::circle)
    throw UsageError("verify runs on the circle backend");

  SpectrumPtr s = build_circle_spectrum(cfg.nodes, cfg.modes);
  std::vector<SuiteOutcome> outcomes;
  for (const std::string& name : cfg.suites) {
    if (name == "frame")
      outcomes.push_back(detail::suite_frame(cfg, s));
    else if (name == "square")
      outcomes.push_back(detail::suite_square(cfg, s));
    else if (name == "invariance")
      outcomes.push_back(detail::suite_invariance(cfg, s));
    else if (name == "stability")
      outcomes.push_back(detail::suite_stability(cfg, s));
    else if (name == "cz")
      outcomes.push_back(detail::suite_cz(cfg, s));
    else if (name == "weak")
      outcomes.push_back(detail::suite_weak(cfg, s));
    else if (name == "charts")
      outcomes.push_back(detail::suite_charts(cfg));
    else if (name == "kernel")
      outcomes.push_back(detail::suite_kernel(cfg, s));
    else
      outcomes.push_back(detail::suite_windowed(cfg, s));
  }

  nlohmann::ordered_json report;
  report["tool"] = "gscat verify";
  report["config"] = config_echo_json(cfg);
  if (cfg.seed)
    report["seed"] = *cfg.seed;
  else
    report["seed"] = nullptr;
  report["suites"] = nlohmann::ordered_json::array();
  bool all_pass = true;
  std::string log = "gscat verify\n";
  std::string failures;
  for (const SuiteOutcome& o : outcomes) {
    report["suites"].push_back({{"name", o.name},
                                {"parameters", o.parameters},
                                {"rows", o.rows},
                                {"measured", o.measured},
                                {"tolerance", o.tolerance},
                                {"pass", o.pass}});
    all_pass = all_pass && o.pass;
    log += "suite " + o.name + (o.pass ? ": pass\n" : ": FAIL\n");
    if (!o.pass) failures += "verify failed: " + o.name + "\n";
  }
  report["all_pass"] = all_pass;

  std::filesystem::create_directories(cfg.out_dir);
  std::filesystem::path file = std::filesystem::path(cfg.out_dir) / "verify.json";
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << report.dump(2) << "\n";
  log += "wrote " + file.string() + "\n";
  std::cout << log;
  std::cerr << failures;
  return all_pass ? 0 : 1;
}

}  // namespace geoscat
