#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "rkg/field.hpp"

namespace rkg {

inline constexpr const char* normalization_tag = "fourier-2pi-continuous";

// CSV layout:
//   # n=<n> L=<L> normalization=<tag>
//   kx_index,ky_index,re,im
//   one row per mode, signed indices, storage order
inline void write_field_csv(std::ostream& os, const SpectralField& f) {
  const Grid& g = f.grid();
  char buf[128];
  std::snprintf(buf, sizeof buf, "# n=%d L=%.17g normalization=%s\n", g.n, g.length, normalization_tag);
  os << buf << "kx_index,ky_index,re,im\n";
  for (int ix = 0; ix < g.n; ++ix) {
    for (int iy = 0; iy < g.n; ++iy) {
      const cplx c = f(ix, iy);
      std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", g.signed_index(ix), g.signed_index(iy), c.real(),
                    c.imag());
      os << buf;
    }
  }
}

inline SpectralField read_field_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
    throw std::runtime_error("field csv: missing header line");
  }
  int n = 0;
  double length = 0.0;
  char tag[64] = {};
  if (std::sscanf(line.c_str(), "# n=%d L=%lg normalization=%63s", &n, &length, tag) != 3) {
    throw std::runtime_error("field csv: malformed header '" + line + "'");
  }
  if (std::string(tag) != normalization_tag) {
    throw std::runtime_error("field csv: unsupported normalization '" + std::string(tag) + "'");
  }
  SpectralField f(make_grid(n, length));
  std::getline(is, line);  // column names
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    int wx = 0, wy = 0;
    double re = 0.0, im = 0.0;
    if (std::sscanf(line.c_str(), "%d,%d,%lg,%lg", &wx, &wy, &re, &im) != 4) {
      throw std::runtime_error("field csv: malformed row '" + line + "'");
    }
    if (wx < -n / 2 || wx >= n / 2 || wy < -n / 2 || wy >= n / 2) {
      throw std::runtime_error("field csv: mode index out of range");
    }
    f(f.grid().storage_index(wx), f.grid().storage_index(wy)) = {re, im};
    ++rows;
  }
  if (rows != f.grid().size()) throw std::runtime_error("field csv: expected n*n rows");
  return f;
}

// Binary layout (little endian host order):
//   char[8] "RKGFLD01", int32 n, float64 L, char[32] tag (zero padded),
//   n*n complex128 in storage order.
inline void write_field_binary(std::ostream& os, const SpectralField& f) {
  const char magic[8] = {'R', 'K', 'G', 'F', 'L', 'D', '0', '1'};
  const std::int32_t n = f.grid().n;
  const double length = f.grid().length;
  char tag[32] = {};
  std::strncpy(tag, normalization_tag, sizeof tag - 1);
  os.write(magic, sizeof magic);
  os.write(reinterpret_cast<const char*>(&n), sizeof n);
  os.write(reinterpret_cast<const char*>(&length), sizeof length);
  os.write(tag, sizeof tag);
  os.write(reinterpret_cast<const char*>(f.data().data()),
           static_cast<std::streamsize>(f.data().size() * sizeof(cplx)));
}

inline SpectralField read_field_binary(std::istream& is) {
  char magic[8];
  std::int32_t n = 0;
  double length = 0.0;
  char tag[32];
  is.read(magic, sizeof magic);
  is.read(reinterpret_cast<char*>(&n), sizeof n);
  is.read(reinterpret_cast<char*>(&length), sizeof length);
  is.read(tag, sizeof tag);
  if (!is || std::memcmp(magic, "RKGFLD01", 8) != 0) throw std::runtime_error("field binary: bad header");
  tag[31] = '\0';
  if (std::string(tag) != normalization_tag) throw std::runtime_error("field binary: unsupported normalization");
  SpectralField f(make_grid(n, length));
  is.read(reinterpret_cast<char*>(f.data().data()), static_cast<std::streamsize>(f.data().size() * sizeof(cplx)));
  if (!is) throw std::runtime_error("field binary: truncated payload");
  return f;
}

}  // namespace rkg
