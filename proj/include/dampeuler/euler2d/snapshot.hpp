#pragma once

// Flat binary field snapshot:
//   "DEL1" | u32 n | f64 L | f64 t | n*n f64 theta | n*n f64 u1 | n*n f64 u2
// All numbers little-endian, fields row-major with x2 as the row index.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "dampeuler/core/errors.hpp"
#include "dampeuler/euler2d/state.hpp"

namespace dampeuler::euler2d {

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_u64_le(std::ostream& os, std::uint64_t v) {
  char b[8];
  for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
  os.write(b, 8);
}

inline std::uint64_t get_u64_le(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw SnapshotError("snapshot: truncated");
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) v |= std::uint64_t{b[k]} << (8 * k);
  return v;
}

inline void put_f64(std::ostream& os, double x) { put_u64_le(os, std::bit_cast<std::uint64_t>(x)); }
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64_le(is)); }

}  // namespace detail

inline void write_snapshot(std::ostream& os, const FlowState2D& s) {
  os.write("DEL1", 4);
  const auto n = static_cast<std::uint32_t>(s.grid.n);
  char b[4];
  for (int k = 0; k < 4; ++k) b[k] = static_cast<char>((n >> (8 * k)) & 0xffu);
  os.write(b, 4);
  detail::put_f64(os, s.grid.L);
  detail::put_f64(os, s.t);
  for (const Field* f : {&s.theta, &s.u1, &s.u2}) {
    for (int j = 0; j < s.grid.n; ++j) {
      for (int i = 0; i < s.grid.n; ++i) detail::put_f64(os, (*f)(i, j));
    }
  }
  if (!os) throw SnapshotError("snapshot: write failed");
}

inline FlowState2D read_snapshot(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "DEL1", 4) != 0) {
    throw SnapshotError("snapshot: bad magic");
  }
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw SnapshotError("snapshot: truncated");
  const std::uint32_t n = b[0] | (b[1] << 8) | (b[2] << 16) | (std::uint32_t{b[3]} << 24);
  if (n < 8 || n > (1u << 15)) throw SnapshotError("snapshot: implausible n");
  const double L = detail::get_f64(is);
  const double t = detail::get_f64(is);
  FlowState2D s(Grid2D(L, static_cast<int>(n)), t);
  for (Field* f : {&s.theta, &s.u1, &s.u2}) {
    for (int j = 0; j < s.grid.n; ++j) {
      for (int i = 0; i < s.grid.n; ++i) (*f)(i, j) = detail::get_f64(is);
    }
  }
  return s;
}

inline void write_snapshot_file(const std::string& path, const FlowState2D& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw SnapshotError("snapshot: cannot open " + path);
  write_snapshot(os, s);
}

inline FlowState2D read_snapshot_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SnapshotError("snapshot: cannot open " + path);
  return read_snapshot(is);
}

}  // namespace dampeuler::euler2d
