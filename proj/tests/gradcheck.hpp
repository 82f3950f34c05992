#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "cascadefuse/nn/params.hpp"
#include "cascadefuse/nn/tape.hpp"

namespace testutil {

struct GradCheck {
  double max_rel_error = 0;
  std::string worst;  ///< "name[index]"
  std::size_t checked = 0;
};

/// Relative error with a floor for entries where both gradients vanish.
inline double relative_error(double analytic, double numeric) {
  const double scale = std::max(std::abs(analytic), std::abs(numeric));
  if (scale < 1e-7) return std::abs(analytic - numeric) < 1e-9 ? 0.0 : std::abs(analytic - numeric) / 1e-7;
  return std::abs(analytic - numeric) / scale;
}

/// `loss` builds a scalar on the given tape from `params`. Compares reverse-mode
/// gradients with central differences of step `h` on every parameter entry.
inline GradCheck check_gradients(cascadefuse::nn::ParameterSet& params,
                                 const std::function<cascadefuse::nn::Var(cascadefuse::nn::Tape&)>& loss,
                                 double h = 1e-5) {
  using cascadefuse::nn::Tape;
  params.zero_grad();
  {
    Tape tape(true);
    tape.backward(loss(tape));
  }
  auto evaluate = [&] {
    Tape tape(false);
    return tape.value(loss(tape))[0];
  };
  GradCheck out;
  for (auto& p : params) {
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value[i];
      p.value[i] = saved + h;
      const double up = evaluate();
      p.value[i] = saved - h;
      const double down = evaluate();
      p.value[i] = saved;
      const double numeric = (up - down) / (2 * h);
      const double err = relative_error(p.grad[i], numeric);
      ++out.checked;
      if (err > out.max_rel_error) {
        out.max_rel_error = err;
        out.worst = p.name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return out;
}

/// Fills every parameter with uniform values in [lo, hi].
inline void randomize(cascadefuse::nn::ParameterSet& params, std::uint64_t seed, double lo = -1, double hi = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  for (auto& p : params)
    for (double& v : p.value.data()) v = u(rng);
}

}  // namespace testutil
