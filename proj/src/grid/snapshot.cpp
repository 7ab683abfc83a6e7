#include "elab/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace elab::snapshot {

static_assert(std::endian::native == std::endian::little, "snapshot IO assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'E', 'L', 'L', 'F'};

template <class T>
void put(std::ostream& os, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  os.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& is) {
  char buf[sizeof(T)];
  if (!is.read(buf, sizeof(T))) throw Error("snapshot: truncated header");
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace

std::size_t Header::payload_count() const {
  const std::size_t cell = box.size();
  if (version == kFieldVersion) return cell;
  std::size_t total = 1;
  for (std::uint32_t i = 0; i < 2 * k; ++i) total *= cell;
  return total;
}

void write(std::ostream& os, const Header& header, std::span<const cplx> payload) {
  if (payload.size() != header.payload_count()) throw Error("snapshot: payload size does not match header");
  os.write(kMagic, 4);
  put<std::uint32_t>(os, header.version);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(header.box.d));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(header.box.n));
  put<double>(os, header.box.L);
  if (header.version == kKernelVersion) put<std::uint32_t>(os, header.k);
  for (const auto& v : payload) {
    put<double>(os, v.real());
    put<double>(os, v.imag());
  }
  if (!os) throw Error("snapshot: write failed");
}

Header read_header(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw Error("snapshot: bad magic");
  Header h;
  h.version = get<std::uint32_t>(is);
  if (h.version != kFieldVersion && h.version != kKernelVersion)
    throw Error("snapshot: unsupported version " + std::to_string(h.version));
  const auto d = static_cast<int>(get<std::uint32_t>(is));
  const auto n = static_cast<int>(get<std::uint32_t>(is));
  const double L = get<double>(is);
  h.box = BoxSpec::make(d, L, n);
  if (h.version == kKernelVersion) h.k = get<std::uint32_t>(is);
  return h;
}

std::vector<cplx> read_payload(std::istream& is, const Header& header) {
  std::vector<cplx> out(header.payload_count());
  for (auto& v : out) {
    const double re = get<double>(is);
    const double im = get<double>(is);
    v = {re, im};
  }
  return out;
}

void write_field(std::ostream& os, const Field& f) { write(os, Header{kFieldVersion, f.box(), 0}, f.values()); }

Field read_field(std::istream& is) {
  const auto h = read_header(is);
  if (h.version != kFieldVersion) throw Error("snapshot: expected a field, found a kernel");
  return Field(h.box, read_payload(is, h));
}

void save_field(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path);
  write_field(os, f);
}

Field load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return read_field(is);
}

}  // namespace elab::snapshot
