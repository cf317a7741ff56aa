#pragma once

// Signal import/export.
//
// Text: one node per line, "index value".  Blank lines and lines whose first
// non-space character is '#' are skipped.  Indices must run 0..n-1 in order.
//
// Raw, all little-endian:
//   bytes 0..3   magic "GSIG"
//   u32          format version (currently 1)
//   u64          sample count
//   f64 x count  values

#include <Eigen/Dense>

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoscat {

inline void write_signal_text(std::ostream& os, const Eigen::VectorXd& v) {
  std::string out;
  char buf[32];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    auto idx = std::to_chars(buf, buf + sizeof buf, (long long)i);
    out.append(buf, idx.ptr);
    out += ' ';
    auto val = std::to_chars(buf, buf + sizeof buf, v[i]);
    out.append(buf, val.ptr);
    out += '\n';
  }
  os.write(out.data(), std::streamsize(out.size()));
}

inline void write_signal_text(const std::filesystem::path& file, const Eigen::VectorXd& v) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write signal file: " + file.string());
  write_signal_text(out, v);
  if (!out) throw std::runtime_error("short write: " + file.string());
}

inline Eigen::VectorXd read_signal_text(std::istream& in, const std::string& origin) {
  std::vector<double> vals;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    std::istringstream fields(line);
    long long idx = 0;
    double val = 0.0;
    std::string extra;
    if (!(fields >> idx >> val) || (fields >> extra))
      throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                               ": expected 'index value'");
    if (idx != (long long)vals.size())
      throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": index out of order");
    vals.push_back(val);
  }
  if (vals.empty()) throw std::runtime_error(origin + ": no samples");
  return Eigen::Map<const Eigen::VectorXd>(vals.data(), (Eigen::Index)vals.size());
}

inline Eigen::VectorXd read_signal_text(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open signal file: " + file.string());
  return read_signal_text(in, file.string());
}

inline void write_signal_raw(const std::filesystem::path& file, const Eigen::VectorXd& v) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write signal file: " + file.string());
  unsigned char header[16] = {'G', 'S', 'I', 'G'};
  std::uint32_t version = 1;
  std::uint64_t count = std::uint64_t(v.size());
  for (int b = 0; b < 4; ++b) header[4 + b] = (unsigned char)((version >> (8 * b)) & 0xff);
  for (int b = 0; b < 8; ++b) header[8 + b] = (unsigned char)((count >> (8 * b)) & 0xff);
  out.write(reinterpret_cast<const char*>(header), sizeof header);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v[i]);
    unsigned char word[8];
    for (int b = 0; b < 8; ++b) word[b] = (unsigned char)((bits >> (8 * b)) & 0xff);
    out.write(reinterpret_cast<const char*>(word), sizeof word);
  }
  if (!out) throw std::runtime_error("short write: " + file.string());
}

inline Eigen::VectorXd read_signal_raw(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open signal file: " + file.string());
  unsigned char header[16];
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (!in || std::memcmp(header, "GSIG", 4) != 0)
    throw std::runtime_error("not a raw signal file: " + file.string());
  std::uint32_t version = 0;
  std::uint64_t count = 0;
  for (int b = 0; b < 4; ++b) version |= std::uint32_t(header[4 + b]) << (8 * b);
  for (int b = 0; b < 8; ++b) count |= std::uint64_t(header[8 + b]) << (8 * b);
  if (version != 1) throw std::runtime_error("unsupported signal version: " + file.string());
  if (count == 0 || count > (1ull << 32))
    throw std::runtime_error("bad sample count: " + file.string());
  Eigen::VectorXd v((Eigen::Index)count);
  for (std::uint64_t i = 0; i < count; ++i) {
    unsigned char word[8];
    in.read(reinterpret_cast<char*>(word), sizeof word);
    if (!in) throw std::runtime_error("truncated signal file: " + file.string());
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= std::uint64_t(word[b]) << (8 * b);
    v[(Eigen::Index)i] = std::bit_cast<double>(bits);
  }
  return v;
}

}  // namespace geoscat
