#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rkg {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Periodic n x n grid on the box [-L/2, L/2)^2.
///
/// Storage is row-major with the first index along x1. Storage index i maps
/// to the signed wavenumber index w = i for i < n/2 and w = i - n otherwise,
/// so the physical wavenumber is k = 2*pi*w/L with w in [-n/2, n/2). The
/// single row and column with w = -n/2 form the Nyquist set; admissible
/// fields carry zero amplitude there. Physical sample i sits at
/// x = -L/2 + i*L/n.
struct Grid {
  int n = 0;
  double length = 0.0;

  [[nodiscard]] double dx() const { return length / n; }
  [[nodiscard]] double dk() const { return 2.0 * pi / length; }
  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  }

  [[nodiscard]] int signed_index(int i) const { return i < n / 2 ? i : i - n; }
  [[nodiscard]] int storage_index(int w) const { return w >= 0 ? w : w + n; }
  [[nodiscard]] double wavenumber(int i) const { return dk() * signed_index(i); }
  [[nodiscard]] double coordinate(int i) const { return -0.5 * length + i * dx(); }
  [[nodiscard]] bool is_nyquist(int ix, int iy) const { return ix == n / 2 || iy == n / 2; }
  [[nodiscard]] std::size_t flat(int ix, int iy) const {
    return static_cast<std::size_t>(ix) * static_cast<std::size_t>(n) + static_cast<std::size_t>(iy);
  }
  /// Storage index of the mode -k, wrapping the Nyquist index onto itself.
  [[nodiscard]] int negated(int i) const { return i == 0 ? 0 : n - i; }

  /// Largest wavenumber magnitude kept by the 2/3-rule product filter.
  [[nodiscard]] double dealias_radius() const { return dk() * (n / 3.0); }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n == b.n && a.length == b.length;
  }
};

inline Grid make_grid(int n, double length) {
  if (n < 16 || n % 2 != 0) {
    throw std::invalid_argument("make_grid: n must be even and >= 16, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw std::invalid_argument("make_grid: box length must be positive");
  }
  return Grid{n, length};
}

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(where) + ": grid mismatch");
  }
}

/// omega_M(k) = sqrt(M^2 + |k|^2).
inline double omega(double mass, double kx, double ky) {
  return std::sqrt(mass * mass + kx * kx + ky * ky);
}

}  // namespace rkg
