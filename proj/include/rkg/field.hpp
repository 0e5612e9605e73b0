#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "rkg/grid.hpp"

namespace rkg {

/// Fourier coefficients of one scalar field, normalized as the continuous
/// transform f^(k) = (2 pi)^-1 \int e^{-ikx} f(x) dx sampled at grid modes.
/// With this normalization ||f||_{L2} = (sum |f^(k)|^2 dk^2)^{1/2}.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(Grid grid) : grid_(grid), coef_(grid.size(), cplx{}) {}
  SpectralField(Grid grid, std::vector<cplx> coef) : grid_(grid), coef_(std::move(coef)) {
    if (coef_.size() != grid_.size()) {
      throw std::invalid_argument("SpectralField: coefficient count does not match grid");
    }
  }

  /// Samples fn(kx, ky) at every mode; Nyquist modes are left at zero.
  template <class Fn>
  static SpectralField from_symbol(Grid grid, Fn&& fn) {
    SpectralField out(grid);
    for (int ix = 0; ix < grid.n; ++ix) {
      const double kx = grid.wavenumber(ix);
      for (int iy = 0; iy < grid.n; ++iy) {
        if (grid.is_nyquist(ix, iy)) continue;
        out.coef_[grid.flat(ix, iy)] = fn(kx, grid.wavenumber(iy));
      }
    }
    return out;
  }

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] std::span<cplx> coef() { return coef_; }
  [[nodiscard]] std::span<const cplx> coef() const { return coef_; }
  [[nodiscard]] std::vector<cplx>& data() { return coef_; }
  [[nodiscard]] const std::vector<cplx>& data() const { return coef_; }

  cplx& operator()(int ix, int iy) { return coef_[grid_.flat(ix, iy)]; }
  const cplx& operator()(int ix, int iy) const { return coef_[grid_.flat(ix, iy)]; }
  cplx& operator[](std::size_t i) { return coef_[i]; }
  const cplx& operator[](std::size_t i) const { return coef_[i]; }

  /// Coefficient at the signed wavenumber index (wx, wy).
  [[nodiscard]] cplx at_mode(int wx, int wy) const {
    return (*this)(grid_.storage_index(wx), grid_.storage_index(wy));
  }

  SpectralField& operator+=(const SpectralField& o) {
    require_same_grid(grid_, o.grid_, "SpectralField +=");
    for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += o.coef_[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    require_same_grid(grid_, o.grid_, "SpectralField -=");
    for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] -= o.coef_[i];
    return *this;
  }
  SpectralField& operator*=(cplx s) {
    for (auto& c : coef_) c *= s;
    return *this;
  }
  /// this += s * o
  SpectralField& axpy(cplx s, const SpectralField& o) {
    require_same_grid(grid_, o.grid_, "SpectralField axpy");
    for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] += s * o.coef_[i];
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(cplx s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= cplx{s, 0.0}; }

  [[nodiscard]] double l2_norm() const {
    double s = 0.0;
    for (const auto& c : coef_) s += std::norm(c);
    return std::sqrt(s) * grid_.dk();
  }

  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (const auto& c : coef_) m = std::max(m, std::abs(c));
    return m;
  }

  [[nodiscard]] double nyquist_max_abs() const {
    double m = 0.0;
    const int h = grid_.n / 2;
    for (int i = 0; i < grid_.n; ++i) {
      m = std::max({m, std::abs((*this)(h, i)), std::abs((*this)(i, h))});
    }
    return m;
  }

  void zero_nyquist() {
    const int h = grid_.n / 2;
    for (int i = 0; i < grid_.n; ++i) {
      (*this)(h, i) = cplx{};
      (*this)(i, h) = cplx{};
    }
  }

  [[nodiscard]] bool is_finite() const {
    return std::all_of(coef_.begin(), coef_.end(),
                       [](const cplx& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
  }

  /// Coefficientwise product with a real or complex symbol table of the same size.
  template <class T>
  SpectralField& multiply_by(std::span<const T> symbol) {
    for (std::size_t i = 0; i < coef_.size(); ++i) coef_[i] *= symbol[i];
    return *this;
  }

 private:
  Grid grid_{};
  std::vector<cplx> coef_;
};

/// Physical-space samples on the same grid (complex storage; real fields
/// carry zero imaginary parts).
class PhysicalField {
 public:
  PhysicalField() = default;
  explicit PhysicalField(Grid grid) : grid_(grid), values_(grid.size(), cplx{}) {}
  PhysicalField(Grid grid, std::vector<cplx> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw std::invalid_argument("PhysicalField: sample count does not match grid");
    }
  }

  template <class Fn>
  static PhysicalField sample(Grid grid, Fn&& fn) {
    PhysicalField out(grid);
    for (int ix = 0; ix < grid.n; ++ix) {
      const double x1 = grid.coordinate(ix);
      for (int iy = 0; iy < grid.n; ++iy) {
        out.values_[grid.flat(ix, iy)] = fn(x1, grid.coordinate(iy));
      }
    }
    return out;
  }

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] std::vector<cplx>& data() { return values_; }
  [[nodiscard]] const std::vector<cplx>& data() const { return values_; }
  cplx& operator()(int ix, int iy) { return values_[grid_.flat(ix, iy)]; }
  const cplx& operator()(int ix, int iy) const { return values_[grid_.flat(ix, iy)]; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  [[nodiscard]] double l2_norm() const {
    double s = 0.0;
    for (const auto& v : values_) s += std::norm(v);
    return std::sqrt(s) * grid_.dx();
  }
  [[nodiscard]] double sup_norm() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
  }
  [[nodiscard]] double max_imag() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v.imag()));
    return m;
  }

  PhysicalField& operator-=(const PhysicalField& o) {
    require_same_grid(grid_, o.grid_, "PhysicalField -=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  friend PhysicalField operator-(PhysicalField a, const PhysicalField& b) { return a -= b; }

 private:
  Grid grid_{};
  std::vector<cplx> values_;
};

}  // namespace rkg
