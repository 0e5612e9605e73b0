#pragma once

#include <array>

#include "rkg/fft.hpp"

namespace rkg {

/// True for modes kept by the 2/3-rule filter: |w|^2 < (n/3)^2 in index units.
/// Two such modes sum to a mode whose alias lies strictly outside the filter.
inline bool in_dealias_band(const Grid& g, int ix, int iy) {
  const double wx = g.signed_index(ix), wy = g.signed_index(iy);
  const double r = g.n / 3.0;
  return wx * wx + wy * wy < r * r;
}

inline SpectralField dealias(SpectralField f) {
  const Grid& g = f.grid();
  for (int ix = 0; ix < g.n; ++ix)
    for (int iy = 0; iy < g.n; ++iy)
      if (!in_dealias_band(g, ix, iy)) f(ix, iy) = cplx{};
  return f;
}

/// Pointwise product with the continuous normalization:
/// (fg)^(k) = (2 pi)^-1 \int f^(p) g^(k-p) dp, restricted to the dealias band.
inline SpectralField product(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "product");
  PhysicalField u = inverse_transform(dealias(f));
  const PhysicalField v = inverse_transform(dealias(g));
  for (std::size_t i = 0; i < u.data().size(); ++i) u[i] *= v[i];
  return dealias(transform(u));
}

namespace detail {

/// Real-to-complex plans for one size; half spectra hold iy in [0, n/2].
class RealFftPlan {
 public:
  explicit RealFftPlan(int n) {
    std::vector<double> r(static_cast<std::size_t>(n) * n);
    std::vector<cplx> c(static_cast<std::size_t>(n) * (n / 2 + 1));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    r2c_ = fftw_plan_dft_r2c_2d(n, n, r.data(), reinterpret_cast<fftw_complex*>(c.data()), flags);
    c2r_ = fftw_plan_dft_c2r_2d(n, n, reinterpret_cast<fftw_complex*>(c.data()), r.data(), flags);
  }
  RealFftPlan(const RealFftPlan&) = delete;
  RealFftPlan& operator=(const RealFftPlan&) = delete;
  ~RealFftPlan() {
    fftw_destroy_plan(r2c_);
    fftw_destroy_plan(c2r_);
  }
  void forward(double* in, cplx* out) const {
    fftw_execute_dft_r2c(r2c_, in, reinterpret_cast<fftw_complex*>(out));
  }
  /// Destroys the input.
  void backward(cplx* in, double* out) const {
    fftw_execute_dft_c2r(c2r_, reinterpret_cast<fftw_complex*>(in), out);
  }

 private:
  fftw_plan r2c_{};
  fftw_plan c2r_{};
};

inline const RealFftPlan& real_plan_for(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<RealFftPlan>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<RealFftPlan>(n);
  return *slot;
}

}  // namespace detail

/// Dealiased products of real fields through half spectra.
///
/// Inputs are written into half-spectrum buffers (modes iy in [0, n/2]) by
/// the caller, which lets the integrator assemble them without building
/// full intermediate states. The (-1)^(ix+iy) origin factors of the forward
/// and inverse transforms cancel in a product and are omitted.
class RealProductEngine {
 public:
  explicit RealProductEngine(const Grid& g)
      : grid_(g), plan_(&detail::real_plan_for(g.n)), half_(g.n / 2 + 1), band_(half_size()) {
    for (int ix = 0; ix < g.n; ++ix)
      for (int iy = 0; iy < half_; ++iy) band_[hidx(ix, iy)] = in_dealias_band(g, ix, iy) && iy != g.n / 2;
    for (auto& b : spec_) b.resize(half_size());
    for (auto& b : phys_) b.resize(g.size());
    // coef = (dk^2/2pi)^2 (dx^2/2pi) F[B f . B g], B and F unnormalized.
    const double c1 = g.dk() * g.dk() / (2.0 * pi);
    scale_ = c1 * c1 * g.dx() * g.dx() / (2.0 * pi);
  }

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] std::size_t half_size() const { return static_cast<std::size_t>(grid_.n) * half_; }
  [[nodiscard]] std::size_t hidx(int ix, int iy) const {
    return static_cast<std::size_t>(ix) * static_cast<std::size_t>(half_) + static_cast<std::size_t>(iy);
  }
  [[nodiscard]] int half_width() const { return half_; }
  [[nodiscard]] bool in_band(std::size_t h) const { return band_[h]; }

  /// Half-spectrum input buffer (0 or 1); out-of-band entries must be zero.
  cplx* input(int which) { return spec_[which].data(); }

  /// Fills input `which` from a full spectrum, applying the band filter.
  void load(int which, const SpectralField& f) {
    cplx* dst = input(which);
    for (int ix = 0; ix < grid_.n; ++ix)
      for (int iy = 0; iy < half_; ++iy) {
        const std::size_t h = hidx(ix, iy);
        dst[h] = band_[h] ? f(ix, iy) : cplx{};
      }
  }

  /// out = dealiased spectrum of (input 0) * (input 1), or (input 0)^2.
  void multiply(SpectralField& out, bool square) {
    plan_->backward(spec_[0].data(), phys_[0].data());
    double* u = phys_[0].data();
    if (square) {
      for (std::size_t i = 0; i < grid_.size(); ++i) u[i] *= u[i];
    } else {
      plan_->backward(spec_[1].data(), phys_[1].data());
      const double* v = phys_[1].data();
      for (std::size_t i = 0; i < grid_.size(); ++i) u[i] *= v[i];
    }
    plan_->forward(u, spec_[0].data());
    const cplx* h = spec_[0].data();
    const int n = grid_.n;
    if (out.grid() != grid_) out = SpectralField(grid_);
    for (int ix = 0; ix < n; ++ix) {
      for (int iy = 0; iy < half_; ++iy) {
        const std::size_t k = hidx(ix, iy);
        out(ix, iy) = band_[k] ? scale_ * h[k] : cplx{};
      }
      for (int iy = half_; iy < n; ++iy) {
        const std::size_t k = hidx(grid_.negated(ix), n - iy);
        out(ix, iy) = band_[k] ? scale_ * std::conj(h[k]) : cplx{};
      }
    }
  }

 private:
  Grid grid_;
  const detail::RealFftPlan* plan_;
  int half_;
  std::vector<char> band_;
  std::array<std::vector<cplx>, 2> spec_;
  std::array<std::vector<double>, 2> phys_;
  double scale_ = 1.0;
};

/// product() for spectra of real fields (Hermitian coefficients); only the
/// half spectrum iy in [0, n/2] of each input is read.
inline SpectralField real_product(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "real_product");
  RealProductEngine e(f.grid());
  e.load(0, f);
  const bool square = &f == &g;
  if (!square) e.load(1, g);
  SpectralField out(f.grid());
  e.multiply(out, square);
  return out;
}

/// Outcome of a frequency resampling that may lose information.
struct SamplingDiagnostic {
  bool lossless = true;
  /// Largest coefficient magnitude that could not be represented.
  double dropped_max = 0.0;
};

/// Coefficient at mode k becomes f^(k/2).
///
/// The physical field is embedded into a box of side 2L with the same
/// spacing; the doubled box resolves the frequencies k/2. Exact as long as
/// f is negligible near the box edge.
inline SpectralField half_frequency_sample(const SpectralField& f) {
  const Grid& g = f.grid();
  const PhysicalField u = inverse_transform(f);
  const Grid big{2 * g.n, 2.0 * g.length};
  PhysicalField embedded(big);
  const int off = g.n / 2;
  for (int ix = 0; ix < g.n; ++ix)
    for (int iy = 0; iy < g.n; ++iy) embedded(ix + off, iy + off) = u(ix, iy);
  const SpectralField wide = transform(embedded);
  SpectralField out(g);
  for (int ix = 0; ix < g.n; ++ix) {
    for (int iy = 0; iy < g.n; ++iy) {
      if (g.is_nyquist(ix, iy)) continue;
      out(ix, iy) = wide.at_mode(g.signed_index(ix), g.signed_index(iy));
    }
  }
  return out;
}

/// Coefficient at mode k becomes f^(2k) where 2k lies on the grid, zero
/// otherwise. Exact when f is band-limited to half the Nyquist wavenumber;
/// content beyond that is reported through diag.
inline SpectralField double_frequency_sample(const SpectralField& f, SamplingDiagnostic* diag = nullptr,
                                             double tolerance = 1e-12) {
  const Grid& g = f.grid();
  const int h = g.n / 2;
  SpectralField out(g);
  SamplingDiagnostic d;
  for (int ix = 0; ix < g.n; ++ix) {
    for (int iy = 0; iy < g.n; ++iy) {
      const int wx = g.signed_index(ix), wy = g.signed_index(iy);
      if (2 * std::abs(wx) < h && 2 * std::abs(wy) < h) out(ix, iy) = f.at_mode(2 * wx, 2 * wy);
      if (2 * std::abs(wx) >= h || 2 * std::abs(wy) >= h) {
        d.dropped_max = std::max(d.dropped_max, std::abs(f(ix, iy)));
      }
    }
  }
  d.lossless = d.dropped_max <= tolerance * std::max(f.max_abs(), 1e-300);
  if (diag) *diag = d;
  return out;
}

}  // namespace rkg
