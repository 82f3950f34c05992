#pragma once

#include <cstddef>
#include <vector>

#include "cascadefuse/cascade.hpp"

namespace cascadefuse {

/// Constants of the flat-then-power-law memory kernel.
struct KernelParams {
  double c = 6.27e-4;   ///< flat rate, per second
  double s0 = 300.0;    ///< end of the flat regime, seconds
  double theta = 0.242; ///< power-law exponent

  void validate() const;
  bool operator==(const KernelParams&) const = default;
};

struct InfectiousnessSeries {
  std::vector<double> grid_hours;
  std::vector<double> values;
};

struct IntensityValue {
  double lambda = 0;   ///< events per second
  double at_time = 0;  ///< seconds
};

constexpr double kSecondsPerHour = 3600.0;

/// phi(s): c on (0, s0], c (s/s0)^-(1+theta) beyond. Throws NonPositiveDelay for s <= 0.
double memory_kernel(double s, const KernelParams& params = {});

/// max{1 - 2s/t, 0}. Throws NonPositiveWindow for t <= 0.
double triangular_kernel(double s, double t);

/// Integral over s in [t_i, t] of K_t(t - s) phi(s - t_i). Closed form on the
/// flat and power-law pieces; short power-law pieces where the closed form
/// would cancel fall back to Gauss-Legendre. Throws InvalidInterval when t_i >= t.
double kernel_integral(double t_i, double t, const KernelParams& params = {});

/// lambda_t = s_h * sum_{t_i <= t} n_i phi(t - t_i), with phi(0) taken as c.
IntensityValue intensity(const NewsStory& story, double s_h, double t,
                         const KernelParams& params = {});

/// Point estimate of s^h at time t (seconds). Post 0 is the source; the
/// numerator runs over reshares only. Returns 0 when no reshare falls in the
/// kernel window; throws ZeroDenominator if the exposure integral is zero.
double estimate_infectiousness(const NewsStory& story, double t, const KernelParams& params = {});

/// Evaluates the estimator at each grid hour. A zero exposure at a grid point
/// yields 0 with a warning instead of aborting.
InfectiousnessSeries infectiousness_series(const NewsStory& story, const std::vector<double>& grid_hours,
                                           const KernelParams& params = {});

/// Posts per bin: bin 0 is [0, grid[0]], bin k is (grid[k-1], grid[k]].
std::vector<double> post_count_series(const NewsStory& story, const std::vector<double>& grid_hours);

/// Hours 1..n.
std::vector<double> hourly_grid(std::size_t n = 47);

/// Hours 1..(24 d - 1); empty for d = 0.
std::vector<double> grid_for_days(std::size_t days);

void check_grid(const std::vector<double>& grid_hours);

}  // namespace cascadefuse
