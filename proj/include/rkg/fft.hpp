#pragma once

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "rkg/field.hpp"

namespace rkg {

namespace detail {

/// Forward/backward 2D plans for one size. Plans are created with
/// FFTW_ESTIMATE so the chosen algorithm, and therefore every rounding
/// pattern, is identical across runs.
class FftPlan {
 public:
  explicit FftPlan(int n) {
    std::vector<cplx> scratch_in(static_cast<std::size_t>(n) * n), scratch_out(scratch_in.size());
    auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
    auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_2d(n, n, in, out, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_2d(n, n, in, out, FFTW_BACKWARD, flags);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  // fftw_execute_dft is thread-safe on an existing plan.
  void forward(const cplx* in, cplx* out) const {
    fftw_execute_dft(forward_, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }
  void backward(const cplx* in, cplx* out) const {
    fftw_execute_dft(backward_, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }

 private:
  fftw_plan forward_{};
  fftw_plan backward_{};
};

inline const FftPlan& plan_for(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<FftPlan>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftPlan>(n);
  return *slot;
}

}  // namespace detail

/// Physical samples -> continuous-normalized Fourier coefficients.
///
/// coef(k) = (dx^2 / 2pi) sum_x e^{-ik.x} u(x); the origin offset x0 = -L/2
/// contributes the sign (-1)^(ix+iy).
inline SpectralField transform(const PhysicalField& u) {
  const Grid& g = u.grid();
  SpectralField out(g);
  detail::plan_for(g.n).forward(u.data().data(), out.data().data());
  const double scale = g.dx() * g.dx() / (2.0 * pi);
  for (int ix = 0; ix < g.n; ++ix) {
    for (int iy = 0; iy < g.n; ++iy) {
      const double s = ((ix + iy) % 2 == 0) ? scale : -scale;
      out(ix, iy) *= s;
    }
  }
  return out;
}

inline PhysicalField inverse_transform(const SpectralField& f) {
  const Grid& g = f.grid();
  std::vector<cplx> signed_coef(f.data());
  const double scale = g.dk() * g.dk() / (2.0 * pi);
  for (int ix = 0; ix < g.n; ++ix) {
    for (int iy = 0; iy < g.n; ++iy) {
      const double s = ((ix + iy) % 2 == 0) ? scale : -scale;
      signed_coef[g.flat(ix, iy)] *= s;
    }
  }
  PhysicalField out(g);
  detail::plan_for(g.n).backward(signed_coef.data(), out.data().data());
  return out;
}

}  // namespace rkg
