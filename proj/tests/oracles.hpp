#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cascadefuse/point_process.hpp"

namespace testutil {

/// Adaptive Gauss-Kronrod evaluation of the exposure integral, split at the
/// kernel's two kinks so each piece is smooth.
inline double kernel_integral_oracle(double t_i, double t, const cascadefuse::KernelParams& p, double tol = 1e-10) {
  const double span = t - t_i;
  auto f = [&](double u) {
    const double phi = u <= p.s0 ? p.c : p.c * std::pow(u / p.s0, -(1.0 + p.theta));
    const double k = std::max(1.0 - 2.0 * (span - u) / t, 0.0);
    return k * phi;
  };
  std::vector<double> cuts{0.0};
  for (double x : {p.s0, span - t / 2})
    if (x > 0 && x < span) cuts.push_back(x);
  cuts.push_back(span);
  std::sort(cuts.begin(), cuts.end());
  double total = 0;
  for (std::size_t k = 1; k < cuts.size(); ++k) {
    if (cuts[k] <= cuts[k - 1]) continue;
    double err = 0;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[k - 1], cuts[k], 30, tol, &err);
  }
  return total;
}

/// Composite Simpson rule with n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, std::size_t n) {
  const double h = (b - a) / static_cast<double>(n);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

/// Expected event count of a cascade with constant infectiousness s, seed
/// audience n0 and reshare audience mean nbar, over [0, T] seconds. Solves
/// the renewal equation m(t) = s n0 phi(t) + s nbar int_0^t phi(t - u) m(u) du
/// with trapezoidal product integration on a step of `dt` seconds.
inline double expected_count(double s, double n0, double nbar, double horizon, const cascadefuse::KernelParams& p,
                             double dt = 1.0) {
  const std::size_t n = static_cast<std::size_t>(horizon / dt);
  std::vector<double> phi(n + 1), m(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double u = static_cast<double>(k) * dt;
    phi[k] = u <= p.s0 ? p.c : p.c * std::pow(u / p.s0, -(1.0 + p.theta));
  }
  m[0] = s * n0 * phi[0];
  for (std::size_t k = 1; k <= n; ++k) {
    double conv = 0.5 * phi[k] * m[0];
    for (std::size_t j = 1; j < k; ++j) conv += phi[k - j] * m[j];
    // m[k] appears with weight phi[0] dt / 2 on the right-hand side.
    const double rhs = s * n0 * phi[k] + s * nbar * dt * conv;
    m[k] = rhs / (1.0 - s * nbar * dt * 0.5 * phi[0]);
  }
  double total = 0;
  for (std::size_t k = 1; k <= n; ++k) total += 0.5 * dt * (m[k - 1] + m[k]);
  return 1.0 + total;
}

}  // namespace testutil
