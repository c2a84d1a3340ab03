#include "ssg/snapshot_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "ssg/error.hpp"

namespace ssg {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxSide = 1u << 16;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : path_(path), os_(path, std::ios::binary) {
    if (!os_) throw IoError("cannot open " + path.string() + " for writing");
  }
  void bytes(const void* p, std::size_t n) { os_.write(static_cast<const char*>(p), n); }
  void u32(std::uint32_t v) { bytes(&v, sizeof v); }
  void u8(std::uint8_t v) { bytes(&v, 1); }
  void f64(double v) { bytes(&v, sizeof v); }
  void finish() {
    os_.flush();
    if (!os_) throw IoError("write failed: " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream os_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), is_(path, std::ios::binary) {
    if (!is_) throw IoError("cannot open " + path.string());
  }
  void bytes(void* p, std::size_t n) {
    is_.read(static_cast<char*>(p), n);
    if (static_cast<std::size_t>(is_.gcount()) != n) throw IoError("truncated file: " + path_.string());
  }
  std::uint32_t u32() { std::uint32_t v; bytes(&v, sizeof v); return v; }
  std::uint8_t u8() { std::uint8_t v; bytes(&v, 1); return v; }
  double f64() { double v; bytes(&v, sizeof v); return v; }
  void magic(const char* m) {
    char buf[4];
    bytes(buf, 4);
    if (std::memcmp(buf, m, 4) != 0) throw IoError(path_.string() + ": bad magic, expected " + m);
  }
  void expect_end() {
    if (is_.peek() != std::char_traits<char>::eof()) throw IoError("trailing bytes in " + path_.string());
  }
  TorusGrid grid(std::uint32_t n1, std::uint32_t n2) {
    if (n1 > kMaxSide || n2 > kMaxSide) throw IoError(path_.string() + ": implausible grid size");
    try {
      return TorusGrid(static_cast<int>(n1), static_cast<int>(n2));
    } catch (const Error& e) {
      throw IoError(path_.string() + ": " + e.what());
    }
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ifstream is_;
};

void put_spectrum(Writer& w, const SpectralField2D& f) {
  const TorusGrid& g = f.grid();
  const auto d = f.data();
  for (int r = 0; r < g.n1(); ++r) {
    for (int c = 0; c < g.n2(); ++c) {
      Complex z = c < g.half_n2() ? d[g.spectral_index(r, c)]
                                  : std::conj(d[g.spectral_index((g.n1() - r) % g.n1(), g.n2() - c)]);
      w.f64(z.real());
      w.f64(z.imag());
    }
  }
}

SpectralField2D get_spectrum(Reader& rd, const TorusGrid& g) {
  SpectralField2D f(g);
  auto d = f.data();
  for (int r = 0; r < g.n1(); ++r) {
    for (int c = 0; c < g.n2(); ++c) {
      const double re = rd.f64();
      const double im = rd.f64();
      if (c < g.half_n2()) d[g.spectral_index(r, c)] = {re, im};
    }
  }
  return f;
}

void put_header(Writer& w, const TorusGrid& g, SnapshotKind kind) {
  w.bytes("SSGF", 4);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(g.n1()));
  w.u32(static_cast<std::uint32_t>(g.n2()));
  w.u8(static_cast<std::uint8_t>(kind));
}

struct FieldHeader {
  TorusGrid grid;
  SnapshotKind kind;
};

FieldHeader get_header(Reader& rd) {
  rd.magic("SSGF");
  const std::uint32_t version = rd.u32();
  if (version != kVersion) throw IoError(rd.path().string() + ": unsupported version " + std::to_string(version));
  const std::uint32_t n1 = rd.u32();
  const std::uint32_t n2 = rd.u32();
  const std::uint8_t kind = rd.u8();
  if (kind > 1) throw IoError(rd.path().string() + ": unknown kind " + std::to_string(kind));
  return {rd.grid(n1, n2), static_cast<SnapshotKind>(kind)};
}

}  // namespace

void write_field(const std::filesystem::path& path, const GridField& f) {
  Writer w(path);
  put_header(w, f.grid(), SnapshotKind::Physical);
  for (double v : f.values()) w.f64(v);
  w.finish();
}

void write_field(const std::filesystem::path& path, const SpectralField2D& f) {
  Writer w(path);
  put_header(w, f.grid(), SnapshotKind::Spectral);
  put_spectrum(w, f);
  w.finish();
}

void write_strip(const std::filesystem::path& path, const StripField3D& u) {
  Writer w(path);
  const TorusGrid& g = u.grid().horizontal();
  w.bytes("SSG3", 4);
  w.u32(static_cast<std::uint32_t>(g.n1()));
  w.u32(static_cast<std::uint32_t>(g.n2()));
  w.u32(static_cast<std::uint32_t>(u.n3()));
  for (int j = 0; j < u.n3(); ++j) put_spectrum(w, u.level(j));
  w.finish();
}

SnapshotKind read_field_kind(const std::filesystem::path& path) {
  Reader rd(path);
  return get_header(rd).kind;
}

SpectralField2D read_spectral_field(const std::filesystem::path& path) {
  Reader rd(path);
  const FieldHeader h = get_header(rd);
  if (h.kind == SnapshotKind::Spectral) {
    SpectralField2D f = get_spectrum(rd, h.grid);
    rd.expect_end();
    return f;
  }
  GridField f(h.grid);
  for (double& v : f.values()) v = rd.f64();
  rd.expect_end();
  return to_spectral(f);
}

GridField read_grid_field(const std::filesystem::path& path) {
  Reader rd(path);
  const FieldHeader h = get_header(rd);
  if (h.kind == SnapshotKind::Spectral) {
    SpectralField2D f = get_spectrum(rd, h.grid);
    rd.expect_end();
    return to_physical(f);
  }
  GridField f(h.grid);
  for (double& v : f.values()) v = rd.f64();
  rd.expect_end();
  return f;
}

StripField3D read_strip(const std::filesystem::path& path) {
  Reader rd(path);
  rd.magic("SSG3");
  const std::uint32_t n1 = rd.u32();
  const std::uint32_t n2 = rd.u32();
  const std::uint32_t n3 = rd.u32();
  const TorusGrid g = rd.grid(n1, n2);
  StripField3D u = [&] {
    try {
      return StripField3D(StripGrid(g, static_cast<int>(n3)));
    } catch (const Error& e) {
      throw IoError(path.string() + ": " + e.what());
    }
  }();
  for (int j = 0; j < u.n3(); ++j) u.level(j) = get_spectrum(rd, g);
  rd.expect_end();
  return u;
}

}  // namespace ssg
