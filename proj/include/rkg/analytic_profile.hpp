#pragma once

#include <functional>
#include <vector>

#include "rkg/field.hpp"

namespace rkg {

/// Frequency-space evaluator f^(kx, ky).
using SpectralFunction = std::function<cplx(double, double)>;

/// A * He_a(u1) He_b(u2) exp(-|u|^2/2) exp(-i k.x0),  u = (k - k0)/width.
/// He are probabilists' Hermite polynomials, a + b <= 2. The amplitude is
/// the peak value of f^ for a = b = 0.
struct CatalogTerm {
  cplx amplitude{1.0, 0.0};
  std::array<double, 2> center{0.0, 0.0};
  double width = 1.0;
  std::array<int, 2> hermite{0, 0};
  std::array<double, 2> shift{0.0, 0.0};
};

namespace detail {
inline double hermite_he(int n, double u) {
  switch (n) {
    case 0: return 1.0;
    case 1: return u;
    case 2: return u * u - 1.0;
    default: throw std::invalid_argument("hermite order above 2 is not in the catalog");
  }
}
}  // namespace detail

/// Finite sum of catalog terms; Schwartz class by construction.
class AnalyticProfile {
 public:
  AnalyticProfile() = default;
  explicit AnalyticProfile(std::vector<CatalogTerm> terms) : terms_(std::move(terms)) {
    for (const auto& t : terms_) {
      if (!(t.width > 0.0)) throw std::invalid_argument("catalog: width must be positive");
      if (t.hermite[0] < 0 || t.hermite[1] < 0 || t.hermite[0] + t.hermite[1] > 2) {
        throw std::invalid_argument("catalog: hermite multi-index must satisfy |a| <= 2");
      }
    }
  }
  static AnalyticProfile gaussian(cplx amplitude, double width, std::array<double, 2> center = {0.0, 0.0}) {
    return AnalyticProfile({CatalogTerm{amplitude, center, width, {0, 0}, {0.0, 0.0}}});
  }

  [[nodiscard]] const std::vector<CatalogTerm>& terms() const { return terms_; }
  [[nodiscard]] bool empty() const { return terms_.empty(); }

  [[nodiscard]] cplx operator()(double kx, double ky) const {
    cplx s{};
    for (const auto& t : terms_) {
      const double u1 = (kx - t.center[0]) / t.width;
      const double u2 = (ky - t.center[1]) / t.width;
      const double env = std::exp(-0.5 * (u1 * u1 + u2 * u2));
      if (env == 0.0) continue;
      s += t.amplitude * (detail::hermite_he(t.hermite[0], u1) * detail::hermite_he(t.hermite[1], u2) * env) *
           std::polar(1.0, -(kx * t.shift[0] + ky * t.shift[1]));
    }
    return s;
  }

  [[nodiscard]] SpectralFunction as_function() const {
    return [p = *this](double kx, double ky) { return p(kx, ky); };
  }

  /// Profile of k -> conj(f^(-k)), the partner component under the reality constraint.
  [[nodiscard]] AnalyticProfile mirrored() const {
    std::vector<CatalogTerm> out = terms_;
    for (auto& t : out) {
      const int parity = (t.hermite[0] + t.hermite[1]) % 2 == 0 ? 1 : -1;
      t.amplitude = std::conj(t.amplitude) * double(parity);
      t.center = {-t.center[0], -t.center[1]};
    }
    return AnalyticProfile(std::move(out));
  }

  /// Profile of f(x - s), i.e. f^ multiplied by e^{-ik.s}.
  [[nodiscard]] AnalyticProfile shifted(std::array<double, 2> s) const {
    std::vector<CatalogTerm> out = terms_;
    for (auto& t : out) t.shift = {t.shift[0] + s[0], t.shift[1] + s[1]};
    return AnalyticProfile(std::move(out));
  }

  [[nodiscard]] AnalyticProfile scaled(cplx c) const {
    std::vector<CatalogTerm> out = terms_;
    for (auto& t : out) t.amplitude *= c;
    return AnalyticProfile(std::move(out));
  }

  /// Radius K_eff beyond which |f^| < threshold.
  [[nodiscard]] double effective_band_limit(double threshold = 1e-14) const {
    double k = 0.0;
    for (const auto& t : terms_) {
      const double a = std::abs(t.amplitude);
      if (a == 0.0) continue;
      const int deg = t.hermite[0] + t.hermite[1];
      double r = 0.0;
      while (a * std::pow(1.0 + r * r, 0.5 * deg) * std::exp(-0.5 * r * r) >= threshold) r += 0.01;
      k = std::max(k, std::hypot(t.center[0], t.center[1]) + t.width * r);
    }
    return k;
  }

  /// Largest |f^| (over a fine scan of each term's support).
  [[nodiscard]] double peak_abs() const {
    double m = 0.0;
    for (const auto& t : terms_) {
      for (int i = -40; i <= 40; ++i)
        for (int j = -40; j <= 40; ++j) {
          const double kx = t.center[0] + t.width * 0.1 * i;
          const double ky = t.center[1] + t.width * 0.1 * j;
          m = std::max(m, std::abs((*this)(kx, ky)));
        }
    }
    return m;
  }

  /// Grid coefficients; Nyquist modes stay zero.
  [[nodiscard]] SpectralField sample(const Grid& g) const {
    return SpectralField::from_symbol(g, [this](double kx, double ky) { return (*this)(kx, ky); });
  }

 private:
  std::vector<CatalogTerm> terms_;
};

}  // namespace rkg
