#include "cascadefuse/nn/adadelta.hpp"

#include <cmath>

namespace cascadefuse::nn {

void AdaDelta::step(ParameterSet& params) const {
  for (Parameter& p : params) {
    auto x = p.value.data();
    auto g = p.grad.data();
    auto eg = p.sq_grad_avg.data();
    auto ed = p.sq_delta_avg.data();
    for (std::size_t i = 0; i < x.size(); ++i) {
      eg[i] = rho * eg[i] + (1.0 - rho) * g[i] * g[i];
      const double dx = -std::sqrt(ed[i] + eps) / std::sqrt(eg[i] + eps) * g[i];
      ed[i] = rho * ed[i] + (1.0 - rho) * dx * dx;
      x[i] += lr * dx;
      g[i] = 0.0;
    }
  }
}

}  // namespace cascadefuse::nn
