#pragma once

#include "cascadefuse/nn/params.hpp"

namespace cascadefuse::nn {

/// AdaDelta:
///   E[g^2]  <- rho E[g^2]  + (1 - rho) g^2
///   dx      <- -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g
///   E[dx^2] <- rho E[dx^2] + (1 - rho) dx^2
///   x       <- x + lr * dx
/// Gradients are zeroed afterwards. `lr` = 1 is the textbook rule.
struct AdaDelta {
  double rho = 0.95;
  double eps = 1e-6;
  double lr = 1.0;

  void step(ParameterSet& params) const;
};

}  // namespace cascadefuse::nn
