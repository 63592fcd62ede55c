#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "phasekd/errors.hpp"

namespace phasekd {

// Little-endian primitive I/O shared by the PKDV / PKDW / PKDF formats.

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; add byte swapping for this platform");

inline void write_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

inline void write_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

inline void write_f64(std::ostream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

inline void write_u16(std::ostream& os, std::uint16_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_raw(std::istream& is, const char* what) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw IoError(std::string("unexpected end of file reading ") + what);
  return v;
}

inline std::uint16_t read_u16(std::istream& is, const char* what) { return read_raw<std::uint16_t>(is, what); }
inline std::uint32_t read_u32(std::istream& is, const char* what) { return read_raw<std::uint32_t>(is, what); }
inline std::uint64_t read_u64(std::istream& is, const char* what) { return read_raw<std::uint64_t>(is, what); }
inline double read_f64(std::istream& is, const char* what) { return read_raw<double>(is, what); }

inline void write_magic(std::ostream& os, const char magic[4]) { os.write(magic, 4); }

inline void expect_magic(std::istream& is, const char magic[4], const char* format_name) {
  char buf[4];
  is.read(buf, 4);
  if (!is || std::memcmp(buf, magic, 4) != 0) {
    throw IoError(std::string("not a ") + format_name + " file (bad magic)");
  }
}

inline void expect_version(std::istream& is, std::uint32_t supported, const char* format_name) {
  const std::uint32_t v = read_u32(is, "version");
  if (v != supported) {
    throw IoError(std::string(format_name) + " version " + std::to_string(v) +
                  " is not supported (expected " + std::to_string(supported) + ")");
  }
}

}  // namespace phasekd
