#pragma once

#include <cstddef>
#include <vector>

namespace cascadefuse {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes are the roots of P_n found by Newton iteration from the Chebyshev guess.
GaussLegendreRule make_gauss_legendre(std::size_t n);

/// Applies `rule` to f on [a, b].
template <class F>
double integrate_fixed(const GaussLegendreRule& rule, F&& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
  return sum * half;
}

}  // namespace cascadefuse
