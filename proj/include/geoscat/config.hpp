#pragma once

// Run configuration: a line-based "key = value" file plus flag overrides.
// Parsing is strict: unknown keys, duplicate keys, malformed numbers and
// out-of-range values are all errors, never warnings.

#include <geoscat/profile.hpp>
#include <geoscat/spectrum.hpp>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoscat {

// exit-code contract: 0 pass, 1 verification failure, 2 usage, 3 runtime
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Backend backend = Backend::circle;
  Eigen::Index nodes = 256;
  // at the default frame window [-20, 20] the per-mode defect grows like
  // lambda * 2^{j_min}, so the default ladder stops at lambda = 9 to keep the
  // frame suite inside its 1e-5 gate
  Eigen::Index modes = 7;
  std::string cloud_path;
  double bandwidth = 0.15;
  int cloud_dimension = 1;

  ProfileKind profile_kind = ProfileKind::exponential;
  double profile_constant = 1.0;

  int j_min = -8;
  int j_max = 8;

  int order = 1;
  std::vector<double> qs = {2.0};

  std::string signal_kind = "cos";
  std::string signal_path;
  double signal_bandlimit = 20.0;

  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out_dir = ".";
  std::string cache_dir = ".";

  std::vector<std::string> suites = {"frame", "square",  "invariance", "stability",
                                     "cz",    "weak",    "charts"};
  int frame_j_min = -20;
  int frame_j_max = 20;
  double frame_tol = 1e-5;
  double invariance_tol = 1e-8;
  double slope_lo = 0.9;
  double slope_hi = 1.1;
  double stability_bandlimit = 5.0;
  int cz_trials = 50;
  double cz_chat_max = 16.0;
  double chart_omega = two_pi / 48.0;
  int family = 16;
};

inline bool signal_needs_seed(const std::string& kind) {
  return kind == "random" || kind == "spiky";
}

inline bool suite_is_randomized(const std::string& name) {
  return name == "square" || name == "invariance" || name == "stability" || name == "cz" ||
         name == "weak";
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline long long config_int(const std::string& v, const std::string& where) {
  long long out = 0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw UsageError(where + ": expected an integer, got '" + v + "'");
  return out;
}

inline std::uint64_t config_u64(const std::string& v, const std::string& where) {
  std::uint64_t out = 0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw UsageError(where + ": expected an unsigned integer, got '" + v + "'");
  return out;
}

inline double config_double(const std::string& v, const std::string& where) {
  double out = 0.0;
  auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw UsageError(where + ": expected a number, got '" + v + "'");
  return out;
}

inline std::vector<std::string> config_list(const std::string& v, const std::string& where) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = v.find(',', start);
    std::string part = trim(comma == std::string::npos ? v.substr(start)
                                                       : v.substr(start, comma - start));
    if (part.empty()) throw UsageError(where + ": empty list entry");
    parts.push_back(part);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return parts;
}

inline void apply_config_key(RunConfig& c, const std::string& key, const std::string& value,
                             const std::string& where) {
  if (key == "manifold.backend") {
    if (value == "circle")
      c.backend = Backend::circle;
    else if (value == "torus")
      c.backend = Backend::torus;
    else if (value == "point_cloud")
      c.backend = Backend::point_cloud;
    else
      throw UsageError(where + ": backend must be circle, torus or point_cloud");
  } else if (key == "manifold.nodes") {
    long long n = config_int(value, where);
    if (n < 4 || n > 1000000) throw UsageError(where + ": manifold.nodes must be in [4, 1e6]");
    c.nodes = Eigen::Index(n);
  } else if (key == "manifold.modes") {
    long long n = config_int(value, where);
    if (n < 1 || n > 4096) throw UsageError(where + ": manifold.modes must be in [1, 4096]");
    c.modes = Eigen::Index(n);
  } else if (key == "manifold.cloud") {
    c.cloud_path = value;
  } else if (key == "manifold.bandwidth") {
    double h = config_double(value, where);
    if (!(h > 0.0)) throw UsageError(where + ": manifold.bandwidth must be positive");
    c.bandwidth = h;
  } else if (key == "manifold.dimension") {
    long long d = config_int(value, where);
    if (d < 1 || d > 3) throw UsageError(where + ": manifold.dimension must be in [1, 3]");
    c.cloud_dimension = int(d);
  } else if (key == "profile.kind") {
    if (value == "exponential")
      c.profile_kind = ProfileKind::exponential;
    else if (value == "gaussian")
      c.profile_kind = ProfileKind::gaussian;
    else
      throw UsageError(where + ": profile.kind must be exponential or gaussian");
  } else if (key == "profile.constant") {
    double v = config_double(value, where);
    if (!(v > 0.0)) throw UsageError(where + ": profile.constant must be positive");
    c.profile_constant = v;
  } else if (key == "window.j_min") {
    long long j = config_int(value, where);
    if (j < -40 || j > 40) throw UsageError(where + ": window scales must be in [-40, 40]");
    c.j_min = int(j);
  } else if (key == "window.j_max") {
    long long j = config_int(value, where);
    if (j < -40 || j > 40) throw UsageError(where + ": window scales must be in [-40, 40]");
    c.j_max = int(j);
  } else if (key == "scattering.order") {
    long long m = config_int(value, where);
    if (m < 1 || m > 4) throw UsageError(where + ": scattering.order must be in [1, 4]");
    c.order = int(m);
  } else if (key == "scattering.q") {
    c.qs.clear();
    for (const std::string& part : config_list(value, where)) {
      double q = config_double(part, where);
      if (!(q > 1.0 && q <= 2.0)) throw UsageError(where + ": scattering.q must lie in (1,2]");
      c.qs.push_back(q);
    }
  } else if (key == "signal.kind") {
    if (value != "cos" && value != "constant" && value != "random" && value != "spiky" &&
        value != "text" && value != "raw")
      throw UsageError(where + ": signal.kind must be cos, constant, random, spiky, text or raw");
    c.signal_kind = value;
  } else if (key == "signal.path") {
    c.signal_path = value;
  } else if (key == "signal.bandlimit") {
    double v = config_double(value, where);
    if (!(v > 0.0)) throw UsageError(where + ": signal.bandlimit must be positive");
    c.signal_bandlimit = v;
  } else if (key == "seed") {
    c.seed = config_u64(value, where);
  } else if (key == "threads") {
    long long t = config_int(value, where);
    if (t < 1 || t > 256) throw UsageError(where + ": threads must be in [1, 256]");
    c.threads = int(t);
  } else if (key == "out.dir") {
    c.out_dir = value;
  } else if (key == "cache.dir") {
    c.cache_dir = value;
  } else if (key == "verify.suites") {
    c.suites.clear();
    std::set<std::string> seen;
    for (const std::string& part : config_list(value, where)) {
      if (part != "frame" && part != "square" && part != "invariance" && part != "stability" &&
          part != "cz" && part != "weak" && part != "charts" && part != "kernel" &&
          part != "windowed")
        throw UsageError(where + ": unknown suite '" + part + "'");
      if (!seen.insert(part).second)
        throw UsageError(where + ": suite '" + part + "' listed twice");
      c.suites.push_back(part);
    }
  } else if (key == "verify.frame_j_min") {
    long long j = config_int(value, where);
    if (j < -40 || j > 40) throw UsageError(where + ": frame window scales must be in [-40, 40]");
    c.frame_j_min = int(j);
  } else if (key == "verify.frame_j_max") {
    long long j = config_int(value, where);
    if (j < -40 || j > 40) throw UsageError(where + ": frame window scales must be in [-40, 40]");
    c.frame_j_max = int(j);
  } else if (key == "verify.frame_tol") {
    double v = config_double(value, where);
    if (!(v > 0.0)) throw UsageError(where + ": verify.frame_tol must be positive");
    c.frame_tol = v;
  } else if (key == "verify.invariance_tol") {
    double v = config_double(value, where);
    if (!(v > 0.0)) throw UsageError(where + ": verify.invariance_tol must be positive");
    c.invariance_tol = v;
  } else if (key == "verify.slope_lo") {
    double v = config_double(value, where);
    if (!(v > 0.0)) throw UsageError(where + ": verify.slope_lo must be positive");
    c.slope_lo = v;
  } else if (key == "verify.slope_hi") {
    double v = config_double(value, where);
    if (!(v > 0.0)) throw UsageError(where + ": verify.slope_hi must be positive");
    c.slope_hi = v;
  } else if (key == "verify.stability_bandlimit") {
    double v = config_double(value, where);
    if (!(v > 0.0)) throw UsageError(where + ": verify.stability_bandlimit must be positive");
    c.stability_bandlimit = v;
  } else if (key == "verify.cz_trials") {
    long long n = config_int(value, where);
    if (n < 1 || n > 10000) throw UsageError(where + ": verify.cz_trials must be in [1, 10000]");
    c.cz_trials = int(n);
  } else if (key == "verify.cz_chat_max") {
    double v = config_double(value, where);
    if (!(v > 0.0)) throw UsageError(where + ": verify.cz_chat_max must be positive");
    c.cz_chat_max = v;
  } else if (key == "verify.chart_omega") {
    double v = config_double(value, where);
    if (!(v > 0.0 && v < two_pi / 24.0))
      throw UsageError(where + ": verify.chart_omega must lie in (0, pi/12)");
    c.chart_omega = v;
  } else if (key == "verify.family") {
    long long n = config_int(value, where);
    if (n < 1 || n > 4096) throw UsageError(where + ": verify.family must be in [1, 4096]");
    c.family = int(n);
  } else {
    throw UsageError(where + ": unknown key '" + key + "'");
  }
}

}  // namespace detail

inline void validate_config(const RunConfig& c, const std::string& origin) {
  if (c.j_min > c.j_max) throw UsageError(origin + ": window.j_min exceeds window.j_max");
  if (c.frame_j_min > c.frame_j_max)
    throw UsageError(origin + ": verify.frame_j_min exceeds verify.frame_j_max");
  if (!(c.slope_lo < c.slope_hi))
    throw UsageError(origin + ": verify.slope_lo must be below verify.slope_hi");
  if (c.backend == Backend::point_cloud && c.cloud_path.empty())
    throw UsageError(origin + ": point_cloud backend requires manifold.cloud");
  if ((c.signal_kind == "text" || c.signal_kind == "raw") && c.signal_path.empty())
    throw UsageError(origin + ": signal.kind " + c.signal_kind + " requires signal.path");
}

inline RunConfig parse_config_text(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = detail::trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    std::string where = origin + ":" + std::to_string(lineno);
    std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) throw UsageError(where + ": expected 'key = value'");
    std::string key = detail::trim(stripped.substr(0, eq));
    std::string value = detail::trim(stripped.substr(eq + 1));
    if (key.empty()) throw UsageError(where + ": missing key");
    if (!seen.insert(key).second) throw UsageError(where + ": duplicate key '" + key + "'");
    detail::apply_config_key(cfg, key, value, where);
  }
  validate_config(cfg, origin);
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw UsageError("cannot open config file: " + file.string());
  return parse_config_text(in, file.string());
}

}  // namespace geoscat
