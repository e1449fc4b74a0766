#pragma once

// Binary field snapshots:
//   "FRFL", u32 version, u32 d, u32 N, f64 L, u32 name length, name bytes,
//   then N^d little-endian f64 samples in row-major order.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "field.hpp"

namespace frfl {

inline constexpr std::uint32_t snapshot_version = 1;

struct NamedField {
  std::string name;
  ScalarField field;
};

namespace snapshot_detail {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

template <class T>
void put(std::ostream& os, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  os.write(buf, sizeof(T));
}

template <class T>
T get(std::istream& is, const std::string& path) {
  char buf[sizeof(T)];
  if (!is.read(buf, sizeof(T))) throw DomainError("truncated snapshot " + path);
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

}  // namespace snapshot_detail

inline void write_snapshot(const std::string& path, const std::string& name, const ScalarField& f) {
  namespace sd = snapshot_detail;
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DomainError("cannot open " + path + " for writing");
  os.write("FRFL", 4);
  sd::put<std::uint32_t>(os, snapshot_version);
  sd::put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid().dim()));
  sd::put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid().n()));
  sd::put<double>(os, f.grid().length());
  sd::put<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
  os.write(name.data(), static_cast<std::streamsize>(name.size()));
  auto v = f.values();
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!os) throw DomainError("write failed for " + path);
}

inline NamedField read_snapshot(const std::string& path) {
  namespace sd = snapshot_detail;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open snapshot " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "FRFL", 4) != 0) throw ConfigError(path + " is not a field snapshot");
  const auto version = sd::get<std::uint32_t>(is, path);
  if (version != snapshot_version) throw ConfigError("unsupported snapshot version " + std::to_string(version));
  const auto d = sd::get<std::uint32_t>(is, path);
  const auto n = sd::get<std::uint32_t>(is, path);
  const auto length = sd::get<double>(is, path);
  const auto name_len = sd::get<std::uint32_t>(is, path);
  if (name_len > 4096) throw ConfigError("corrupt snapshot name in " + path);
  std::string name(name_len, '\0');
  if (!is.read(name.data(), name_len)) throw DomainError("truncated snapshot " + path);
  Grid g(static_cast<int>(d), static_cast<int>(n), length);
  std::vector<double> v(g.size());
  if (!is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double))))
    throw DomainError("truncated snapshot " + path);
  return {std::move(name), ScalarField::from_values(g, std::move(v))};
}

}  // namespace frfl
