#pragma once

// Binary spectrum cache.
//
// Layout, all little-endian:
//   bytes 0..3   magic "GSPC"
//   u32          format version (currently 1)
//   u32          intrinsic dimension
//   u64          n_nodes
//   u64          n_modes
//   f64 x n_nodes            quadrature weights
//   f64 x n_modes            eigenvalues
//   f64 x n_nodes*n_modes    eigenfunctions, row major: E[i][n] = e_n(x_i)
//   u64          FNV-1a checksum of every preceding byte
//
// Node coordinates and geodesic distances are not persisted; a restored
// spectrum supports coefficient analysis and synthesis but no geometry.

#include <geoscat/spectrum.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace geoscat {

namespace detail {

inline std::uint64_t fnv1a64(const unsigned char* data, std::size_t n) {
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xff));
}

inline void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xff));
}

inline void put_f64(std::vector<unsigned char>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

struct Reader {
  const unsigned char* p;
  std::size_t left;

  void need(std::size_t n) const {
    if (left < n) throw std::runtime_error("spectrum cache: truncated file");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= std::uint32_t(p[b]) << (8 * b);
    p += 4;
    left -= 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= std::uint64_t(p[b]) << (8 * b);
    p += 8;
    left -= 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
};

}  // namespace detail

inline void save_spectrum(const Spectrum& s, const std::filesystem::path& file) {
  std::vector<unsigned char> buf;
  buf.reserve(28 + 8 * static_cast<std::size_t>(s.n_nodes() * (s.n_modes() + 1) + s.n_modes()));
  buf.push_back('G');
  buf.push_back('S');
  buf.push_back('P');
  buf.push_back('C');
  detail::put_u32(buf, 1u);
  detail::put_u32(buf, static_cast<std::uint32_t>(s.dimension));
  detail::put_u64(buf, static_cast<std::uint64_t>(s.n_nodes()));
  detail::put_u64(buf, static_cast<std::uint64_t>(s.n_modes()));
  for (Eigen::Index i = 0; i < s.n_nodes(); ++i) detail::put_f64(buf, s.nodes.weights[i]);
  for (Eigen::Index n = 0; n < s.n_modes(); ++n) detail::put_f64(buf, s.eigenvalues[n]);
  for (Eigen::Index i = 0; i < s.n_nodes(); ++i)
    for (Eigen::Index n = 0; n < s.n_modes(); ++n) detail::put_f64(buf, s.eigenfunctions(i, n));
  detail::put_u64(buf, detail::fnv1a64(buf.data(), buf.size()));

  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("spectrum cache: cannot open for writing: " + file.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw std::runtime_error("spectrum cache: write failed: " + file.string());
}

inline SpectrumPtr load_spectrum(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("spectrum cache: cannot open: " + file.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());

  detail::Reader r{buf.data(), buf.size()};
  r.need(4);
  if (std::memcmp(r.p, "GSPC", 4) != 0)
    throw std::runtime_error("spectrum cache: bad magic bytes");
  r.p += 4;
  r.left -= 4;

  std::uint32_t version = r.u32();
  if (version != 1u)
    throw std::runtime_error("spectrum cache: unsupported version " + std::to_string(version));

  auto s = std::make_shared<Spectrum>();
  s->backend = Backend::loaded;
  s->dimension = static_cast<int>(r.u32());
  std::uint64_t n_nodes = r.u64();
  std::uint64_t n_modes = r.u64();
  if (n_nodes == 0 || n_modes == 0 || n_nodes > (1ull << 32) || n_modes > (1ull << 32))
    throw std::runtime_error("spectrum cache: implausible header counts");

  std::size_t payload = static_cast<std::size_t>(8 * (n_nodes + n_modes + n_nodes * n_modes));
  r.need(payload + 8);
  if (r.left != payload + 8)
    throw std::runtime_error("spectrum cache: unexpected trailing bytes");

  std::uint64_t want = detail::fnv1a64(buf.data(), buf.size() - 8);
  detail::Reader tail{buf.data() + (buf.size() - 8), 8};
  if (tail.u64() != want) throw std::runtime_error("spectrum cache: checksum mismatch");

  s->nodes.weights.resize(static_cast<Eigen::Index>(n_nodes));
  for (std::uint64_t i = 0; i < n_nodes; ++i)
    s->nodes.weights[static_cast<Eigen::Index>(i)] = r.f64();
  check_weights(s->nodes.weights);

  s->eigenvalues.resize(static_cast<Eigen::Index>(n_modes));
  for (std::uint64_t n = 0; n < n_modes; ++n)
    s->eigenvalues[static_cast<Eigen::Index>(n)] = r.f64();

  s->eigenfunctions.resize(static_cast<Eigen::Index>(n_nodes), static_cast<Eigen::Index>(n_modes));
  for (std::uint64_t i = 0; i < n_nodes; ++i)
    for (std::uint64_t n = 0; n < n_modes; ++n)
      s->eigenfunctions(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n)) = r.f64();

  return s;
}

}  // namespace geoscat
