#pragma once

#include <map>

#include "json.hpp"
#include "rkg/phase_state.hpp"

namespace rkg {

/// ( sum_{j,eps} || omega_{jm}^{-1/2} a_{j,eps} ||^2 )^{1/2}
inline double e_norm(const PhaseState& a) {
  double s = 0.0;
  for (int slot_id = 0; slot_id < 4; ++slot_id) {
    const double M = a.mass_of(slot_field(slot_id));
    const Grid& g = a.grid();
    const SpectralField& f = a[slot_id];
    double part = 0.0;
    for (int ix = 0; ix < g.n; ++ix) {
      const double kx = g.wavenumber(ix);
      for (int iy = 0; iy < g.n; ++iy) part += std::norm(f(ix, iy)) / omega(M, kx, g.wavenumber(iy));
    }
    s += part;
  }
  return std::sqrt(s) * a.grid().dk();
}

/// Multi-indices (a, b) with a + b <= n.
inline std::vector<std::array<int, 2>> multi_indices(int n) {
  std::vector<std::array<int, 2>> out;
  for (int total = 0; total <= n; ++total)
    for (int a = total; a >= 0; --a) out.push_back({a, total - a});
  return out;
}

namespace detail {

/// nabla^nu f in physical space (spectral derivative).
inline PhysicalField derivative_samples(const SpectralField& f, std::array<int, 2> nu) {
  const Grid& g = f.grid();
  SpectralField d(g);
  for (int ix = 0; ix < g.n; ++ix) {
    const cplx ikx{0.0, g.wavenumber(ix)};
    for (int iy = 0; iy < g.n; ++iy) {
      const cplx iky{0.0, g.wavenumber(iy)};
      d(ix, iy) = f(ix, iy) * std::pow(ikx, nu[0]) * std::pow(iky, nu[1]);
    }
  }
  return inverse_transform(d);
}

/// sum_mu || weight(x) x^mu u ||^2 over |mu| <= n.
template <class Weight>
double moment_sum(const PhysicalField& u, int n, Weight&& weight) {
  const Grid& g = u.grid();
  double total = 0.0;
  for (const auto& mu : multi_indices(n)) {
    double s = 0.0;
    for (int ix = 0; ix < g.n; ++ix) {
      const double x1 = g.coordinate(ix);
      for (int iy = 0; iy < g.n; ++iy) {
        const double x2 = g.coordinate(iy);
        const double w = weight(x1, x2) * std::pow(x1, mu[0]) * std::pow(x2, mu[1]);
        s += std::norm(u(ix, iy)) * w * w;
      }
    }
    total += s;
  }
  return total * g.dx() * g.dx();
}

}  // namespace detail

/// (sum_{|mu|,|nu| <= n} || x^mu nabla^nu f ||^2)^{1/2}
inline double q_bar_norm(const SpectralField& f, int n) {
  if (n < 0) throw std::invalid_argument("q_bar_norm: n must be nonnegative");
  double total = 0.0;
  for (const auto& nu : multi_indices(n)) {
    total += detail::moment_sum(detail::derivative_samples(f, nu), n, [](double, double) { return 1.0; });
  }
  return std::sqrt(total);
}

inline double q_norm(const SpectralField& f, int n) {
  return q_bar_norm(apply_multiplier(f, mult::OneMinusLaplacian{-0.25}), n);
}

/// ||f||_inf + ( sum_{|mu| <= N, 1 <= |nu| <= N} || x^mu (1+|x|^2)^{-1/4} nabla^nu f ||^2 )^{1/2}
inline double q_big_norm(const SpectralField& f, int N) {
  if (N < 1) throw std::invalid_argument("q_big_norm: N must be >= 1");
  double total = 0.0;
  for (const auto& nu : multi_indices(N)) {
    if (nu[0] + nu[1] == 0) continue;
    total += detail::moment_sum(detail::derivative_samples(f, nu), N, [](double x1, double x2) {
      return std::pow(1.0 + x1 * x1 + x2 * x2, -0.25);
    });
  }
  return inverse_transform(f).sup_norm() + std::sqrt(total);
}

/// Root-sum-of-squares of q_N over the four components; stands in for the
/// representation-derived norm, to which it is equivalent.
inline double e_N_norm(const PhaseState& a, int N) {
  double s = 0.0;
  for (int slot_id = 0; slot_id < 4; ++slot_id) {
    const double q = q_norm(a[slot_id], N);
    s += q * q;
  }
  return std::sqrt(s);
}

/// Root-sum-of-squares of q-bar_N over the four components.
inline double q_bar_state(const PhaseState& a, int N) {
  double s = 0.0;
  for (int slot_id = 0; slot_id < 4; ++slot_id) {
    const double q = q_bar_norm(a[slot_id], N);
    s += q * q;
  }
  return std::sqrt(s);
}

/// Fraction of L2 mass outside the central half of the box.
inline double locality_defect(const SpectralField& f) {
  const PhysicalField u = inverse_transform(f);
  const Grid& g = u.grid();
  double inner = 0.0, total = 0.0;
  const double quarter = 0.25 * g.length;
  for (int ix = 0; ix < g.n; ++ix) {
    for (int iy = 0; iy < g.n; ++iy) {
      const double m = std::norm(u(ix, iy));
      total += m;
      if (std::abs(g.coordinate(ix)) < quarter && std::abs(g.coordinate(iy)) < quarter) inner += m;
    }
  }
  return total > 0.0 ? (total - inner) / total : 0.0;
}

struct NormReport {
  double t = 0.0;
  double e_norm = 0.0;
  std::map<int, double> q;
  std::map<int, double> q_bar;
  std::map<int, double> q_big;
};

inline NormReport norm_report(const PhaseState& a, double t, const std::vector<int>& q_orders,
                              const std::vector<int>& big_orders = {}) {
  NormReport r;
  r.t = t;
  r.e_norm = e_norm(a);
  for (int n : q_orders) r.q[n] = e_N_norm(a, n);
  for (int N : big_orders) {
    double s = 0.0;
    for (int slot_id = 0; slot_id < 4; ++slot_id) s = std::max(s, q_big_norm(a[slot_id], N));
    r.q_big[N] = s;
  }
  return r;
}

inline void to_json(nlohmann::json& j, const NormReport& r) {
  j = nlohmann::json{{"t", r.t}, {"e_norm", r.e_norm}};
  for (const auto& [n, v] : r.q) j["q_" + std::to_string(n)] = v;
  for (const auto& [n, v] : r.q_bar) j["qbar_" + std::to_string(n)] = v;
  for (const auto& [n, v] : r.q_big) j["Q_" + std::to_string(n)] = v;
}

}  // namespace rkg
