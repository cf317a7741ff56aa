#pragma once

// Graph-Laplacian spectra for unstructured point samples of a manifold.
//
// Pipeline: Gaussian affinity exp(-|x-y|^2 / bw^2), density normalization
// K / (q_i q_j) to remove sampling-density bias, then the symmetric
// normalized operator M = D^{-1/2} K~ D^{-1/2}.  Eigenvalues of the
// Laplace-Beltrami operator are recovered as (4 / bw^2) (1 - mu) with mu an
// eigenvalue of M; the 4 comes from matching exp(-r^2/bw^2) against the heat
// kernel at time bw^2/4.  Volume is estimated from the mean kernel density,
// vol = N (sqrt(pi) bw)^dim / mean(q), and the quadrature weights are the
// uniform share vol / N.
//
// Geodesic distances are shortest paths in the 3*bw neighborhood graph with
// Euclidean edge lengths (precomputed up to 2048 nodes; absent above that).

#include <geoscat/spectrum.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

namespace geoscat {

inline Eigen::MatrixXd parse_points_text(std::istream& in, const std::string& origin) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (auto& c : line)
      if (c == ',' || c == '\t') c = ' ';
    std::istringstream fields(line);
    std::vector<double> row;
    double v;
    while (fields >> v) row.push_back(v);
    if (!fields.eof())
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": malformed number");
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error(origin + ": no points");
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = 0; j < pts.cols(); ++j)
      pts(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return pts;
}

inline Eigen::MatrixXd read_points_text(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open point file: " + file.string());
  return parse_points_text(in, file.string());
}

namespace detail {

// all-pairs shortest paths in the epsilon-graph; throws if disconnected
inline std::shared_ptr<Eigen::MatrixXd> graph_geodesics(const Eigen::MatrixXd& pts,
                                                        double radius) {
  const Eigen::Index n = pts.rows();
  std::vector<std::vector<std::pair<Eigen::Index, double>>> adj(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double d = (pts.row(i) - pts.row(j)).norm();
      if (d <= radius) {
        adj[static_cast<std::size_t>(i)].push_back({j, d});
        adj[static_cast<std::size_t>(j)].push_back({i, d});
      }
    }

  auto dist = std::make_shared<Eigen::MatrixXd>(n, n);
  dist->setConstant(std::numeric_limits<double>::infinity());
  using Item = std::pair<double, Eigen::Index>;
  for (Eigen::Index src = 0; src < n; ++src) {
    auto row = dist->row(src);
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    row[src] = 0.0;
    heap.push({0.0, src});
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d > row[u]) continue;
      for (auto [v, w] : adj[static_cast<std::size_t>(u)])
        if (d + w < row[v]) {
          row[v] = d + w;
          heap.push({row[v], v});
        }
    }
    if (!row.allFinite())
      throw std::runtime_error("point cloud: neighborhood graph is disconnected");
  }
  return dist;
}

}  // namespace detail

inline SpectrumPtr build_pointcloud_spectrum(const Eigen::MatrixXd& points,
                                             Eigen::Index n_modes, double bandwidth,
                                             int dimension = 1) {
  const Eigen::Index n = points.rows();
  if (n > 8192) throw std::invalid_argument("point cloud: more than 8192 points");
  if (n_modes < 1 || n_modes > n)
    throw std::invalid_argument("point cloud: mode count out of range");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("point cloud: bandwidth must be positive");
  if (dimension < 1) throw std::invalid_argument("point cloud: dimension must be positive");
  if (n < 16) throw std::invalid_argument("point cloud: need at least 16 points");

  Eigen::MatrixXd kernel(n, n);
  const double inv_bw2 = 1.0 / (bandwidth * bandwidth);
  for (Eigen::Index i = 0; i < n; ++i) {
    kernel(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double d2 = (points.row(i) - points.row(j)).squaredNorm();
      double v = std::exp(-d2 * inv_bw2);
      kernel(i, j) = v;
      kernel(j, i) = v;
    }
  }

  Eigen::VectorXd q = kernel.rowwise().sum();
  double vol = double(n) * std::pow(std::sqrt(std::numbers::pi_v<double>) * bandwidth, dimension) /
               q.mean();

  // density normalization, then symmetric normalization
  Eigen::VectorXd qinv = q.cwiseInverse();
  Eigen::MatrixXd tilde = qinv.asDiagonal() * kernel * qinv.asDiagonal();
  Eigen::VectorXd d = tilde.rowwise().sum();
  Eigen::VectorXd dsqrt_inv = d.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd sym = dsqrt_inv.asDiagonal() * tilde * dsqrt_inv.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("point cloud: eigensolver failed to converge");

  auto s = std::make_shared<Spectrum>();
  s->backend = Backend::point_cloud;
  s->dimension = dimension;
  s->nodes.points = points;
  s->nodes.weights = Eigen::VectorXd::Constant(n, vol / double(n));
  s->eigenvalues.resize(n_modes);
  s->eigenfunctions.resize(n, n_modes);

  const double scale = 4.0 * inv_bw2;
  for (Eigen::Index m = 0; m < n_modes; ++m) {
    Eigen::Index src = n - 1 - m;  // ascending mu -> take from the top
    double lam = scale * (1.0 - solver.eigenvalues()[src]);
    if (lam < 0.0) {
      if (lam < -1e-8) throw std::runtime_error("point cloud: negative eigenvalue");
      lam = 0.0;
    }
    s->eigenvalues[m] = lam;
    Eigen::VectorXd phi = dsqrt_inv.asDiagonal() * solver.eigenvectors().col(src);
    double norm = std::sqrt((s->nodes.weights.array() * phi.array().square()).sum());
    phi /= norm;
    Eigen::Index peak;
    phi.cwiseAbs().maxCoeff(&peak);
    if (phi[peak] < 0.0) phi = -phi;
    s->eigenfunctions.col(m) = phi;
  }

  // enforce the nondecreasing contract against eigensolver roundoff
  for (Eigen::Index m = 1; m < n_modes; ++m)
    if (s->eigenvalues[m] < s->eigenvalues[m - 1]) s->eigenvalues[m] = s->eigenvalues[m - 1];

  if (n <= 2048) {
    auto dist = detail::graph_geodesics(points, 3.0 * bandwidth);
    s->nodes.geodesic = [dist](Eigen::Index i, Eigen::Index j) { return (*dist)(i, j); };
  }
  return s;
}

}  // namespace geoscat
