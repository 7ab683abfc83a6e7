#pragma once

// Binary snapshot format shared by every module:
//
//   bytes 0-3   magic "ELLF"
//   u32         version (1 = field, 2 = density kernel)
//   u32         d
//   u32         n
//   f64         L
//   u32         k        (version 2 only: kernel order)
//   payload     complex doubles (re, im), axis-major
//
// All integers and doubles are little-endian. A field carries n^d values; a
// kernel of order k carries n^(2kd) values ordered (x_1..x_k; x'_1..x'_k).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "elab/grid.hpp"

namespace elab::snapshot {

inline constexpr std::uint32_t kFieldVersion = 1;
inline constexpr std::uint32_t kKernelVersion = 2;

struct Header {
  std::uint32_t version = kFieldVersion;
  BoxSpec box;
  std::uint32_t k = 0;  // 0 for plain fields

  std::size_t payload_count() const;
};

void write(std::ostream& os, const Header& header, std::span<const cplx> payload);
Header read_header(std::istream& is);
std::vector<cplx> read_payload(std::istream& is, const Header& header);

void write_field(std::ostream& os, const Field& f);
Field read_field(std::istream& is);
void save_field(const std::string& path, const Field& f);
Field load_field(const std::string& path);

}  // namespace elab::snapshot
