#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace rkg {

struct DecaySeries {
  std::vector<double> times;
  std::vector<double> values;
  std::string norm_tag;
};

enum class DecayModel {
  power,  ///< v = c t^alpha, fitted on (ln t, ln v)
  log,    ///< v = c0 + c1 ln t, fitted on (ln t, v)
};

struct DecayFit {
  DecayModel model = DecayModel::power;
  double slope = 0.0;      ///< alpha (power) or c1 (log)
  double intercept = 0.0;  ///< ln c (power) or c0 (log)
  double r_squared = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t samples = 0;
};

/// Least-squares fit over samples with t in [t_lo, t_hi].
inline DecayFit fit_decay(const DecaySeries& s, DecayModel model,
                          double t_lo = 0.0, double t_hi = std::numeric_limits<double>::infinity(),
                          std::size_t min_samples = 10) {
  if (s.times.size() != s.values.size()) throw std::invalid_argument("fit_decay: size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    const double t = s.times[i];
    if (t < t_lo || t > t_hi) continue;
    if (!(t > 0.0)) throw std::invalid_argument("fit_decay: times must be positive");
    const double v = s.values[i];
    if (model == DecayModel::power) {
      if (!(v > 0.0)) throw std::invalid_argument("fit_decay: power model needs positive values");
      ys.push_back(std::log(v));
    } else {
      ys.push_back(v);
    }
    xs.push_back(std::log(t));
  }
  if (xs.size() < min_samples) {
    throw std::invalid_argument("fit_decay: " + std::to_string(xs.size()) + " samples in window, need " +
                                std::to_string(min_samples));
  }
  const double n = double(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_decay: window holds a single time");
  DecayFit f;
  f.model = model;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? std::min(1.0, std::max(0.0, sxy * sxy / (sxx * syy))) : 1.0;
  f.t_lo = xs.empty() ? 0.0 : std::exp(xs.front());
  f.t_hi = xs.empty() ? 0.0 : std::exp(xs.back());
  f.samples = xs.size();
  return f;
}

/// n points geometrically spaced on [a, b], each rounded to a multiple of dt.
inline std::vector<double> geometric_times(double a, double b, int n, double dt = 0.0) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) {
    double v = a * std::pow(b / a, n == 1 ? 0.0 : double(i) / (n - 1));
    if (dt > 0.0) v = std::round(v / dt) * dt;
    if (t.empty() || v > t.back()) t.push_back(v);
  }
  return t;
}

}  // namespace rkg
