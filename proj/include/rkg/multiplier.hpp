#pragma once

#include <variant>

#include "rkg/fft.hpp"

namespace rkg {

namespace mult {
/// omega_M(k)^s
struct Omega {
  double mass;
  double power = 1.0;
};
/// (1 - Laplacian)^s, symbol (1 + |k|^2)^s
struct OneMinusLaplacian {
  double power;
};
/// e^{i eps omega_M(k) t}
struct Phase {
  double mass;
  int sign;
  double time;
};
/// Multiplication by the centered coordinate x_axis (axis 0 or 1).
struct Coordinate {
  int axis;
};
/// Spectral derivative d/dx_axis, symbol i k_axis.
struct Derivative {
  int axis;
};
}  // namespace mult

using MultiplierSpec =
    std::variant<mult::Omega, mult::OneMinusLaplacian, mult::Phase, mult::Coordinate, mult::Derivative>;

namespace detail {

template <class Symbol>
SpectralField apply_symbol(SpectralField f, Symbol&& symbol) {
  const Grid& g = f.grid();
  for (int ix = 0; ix < g.n; ++ix) {
    const double kx = g.wavenumber(ix);
    for (int iy = 0; iy < g.n; ++iy) {
      f(ix, iy) *= symbol(kx, g.wavenumber(iy));
    }
  }
  return f;
}

inline void check_axis(int axis) {
  if (axis != 0 && axis != 1) throw std::invalid_argument("multiplier: axis must be 0 or 1");
}

}  // namespace detail

/// Multiplies physical samples by x_axis (centered box coordinates).
inline PhysicalField multiply_coordinate(PhysicalField u, int axis) {
  detail::check_axis(axis);
  const Grid& g = u.grid();
  for (int ix = 0; ix < g.n; ++ix) {
    for (int iy = 0; iy < g.n; ++iy) {
      u(ix, iy) *= g.coordinate(axis == 0 ? ix : iy);
    }
  }
  return u;
}

inline SpectralField apply_multiplier(const SpectralField& f, const MultiplierSpec& spec) {
  return std::visit(
      [&](const auto& m) -> SpectralField {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, mult::Omega>) {
          if (!(m.mass > 0.0)) throw std::invalid_argument("omega multiplier: mass must be positive");
          return detail::apply_symbol(f, [&](double kx, double ky) {
            return std::pow(omega(m.mass, kx, ky), m.power);
          });
        } else if constexpr (std::is_same_v<T, mult::OneMinusLaplacian>) {
          return detail::apply_symbol(f, [&](double kx, double ky) {
            return std::pow(1.0 + kx * kx + ky * ky, m.power);
          });
        } else if constexpr (std::is_same_v<T, mult::Phase>) {
          return detail::apply_symbol(f, [&](double kx, double ky) {
            return std::polar(1.0, m.sign * omega(m.mass, kx, ky) * m.time);
          });
        } else if constexpr (std::is_same_v<T, mult::Derivative>) {
          detail::check_axis(m.axis);
          return detail::apply_symbol(f, [&](double kx, double ky) {
            return cplx{0.0, m.axis == 0 ? kx : ky};
          });
        } else {
          SpectralField out = transform(multiply_coordinate(inverse_transform(f), m.axis));
          out.zero_nyquist();
          return out;
        }
      },
      spec);
}

/// V(t) on one component: multiplies mode k by e^{i eps omega_M(k) t}.
inline SpectralField free_propagate(const SpectralField& f, double mass, int sign, double t) {
  if (!(mass > 0.0)) throw std::invalid_argument("free_propagate: mass must be positive");
  if (t == 0.0) return f;
  return apply_multiplier(f, mult::Phase{mass, sign, t});
}

/// Cached symbol table of omega_M over a grid, in storage order.
inline std::vector<double> omega_table(const Grid& g, double mass) {
  std::vector<double> w(g.size());
  for (int ix = 0; ix < g.n; ++ix) {
    const double kx = g.wavenumber(ix);
    for (int iy = 0; iy < g.n; ++iy) w[g.flat(ix, iy)] = omega(mass, kx, g.wavenumber(iy));
  }
  return w;
}

}  // namespace rkg
