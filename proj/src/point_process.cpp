#include "cascadefuse/point_process.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cascadefuse/error.hpp"
#include "cascadefuse/log.hpp"
#include "cascadefuse/quadrature.hpp"

namespace cascadefuse {

void KernelParams::validate() const {
  if (!(c > 0) || !(s0 > 0) || !(theta > 0) || !std::isfinite(c) || !std::isfinite(s0) ||
      !std::isfinite(theta))
    throw Error(ErrorCode::InvalidParams, "kernel parameters c, s0, theta must be finite and > 0");
}

namespace {

// phi with the s -> 0+ limit at s = 0.
double phi_closed(double s, const KernelParams& p) {
  return s <= p.s0 ? p.c : p.c * std::pow(s / p.s0, -(1.0 + p.theta));
}

// Below this log-ratio the power-law closed form loses digits to cancellation.
constexpr double kShortPieceLogRatio = 0.05;

const GaussLegendreRule& fallback_rule() {
  static const GaussLegendreRule rule = make_gauss_legendre(16);
  return rule;
}

// Integral over u in [a, b] (s0 <= a < b) of (u - z) u^-(1+theta).
double power_piece(double a, double b, double z, double theta) {
  const double log_ratio = std::log1p((b - a) / a);
  if (log_ratio < kShortPieceLogRatio)
    return integrate_fixed(
        fallback_rule(), [&](double u) { return (u - z) * std::pow(u, -(1.0 + theta)); }, a, b);
  // Split (u - z) = (u - a) + (a - z) so both terms stay non-negative.
  const double one_minus = 1.0 - theta;
  const double j1 = std::abs(one_minus) < 1e-12
                        ? log_ratio
                        : std::pow(a, one_minus) * std::expm1(one_minus * log_ratio) / one_minus;
  const double j2 = -std::pow(a, -theta) * std::expm1(-theta * log_ratio) / theta;
  return (j1 - a * j2) + (a - z) * j2;
}

}  // namespace

double memory_kernel(double s, const KernelParams& params) {
  if (!(s > 0)) throw Error(ErrorCode::NonPositiveDelay, "memory kernel needs s > 0");
  params.validate();
  return phi_closed(s, params);
}

double triangular_kernel(double s, double t) {
  if (!(t > 0)) throw Error(ErrorCode::NonPositiveWindow, "kernel window t must be > 0");
  return std::max(1.0 - 2.0 * s / t, 0.0);
}

double kernel_integral(double t_i, double t, const KernelParams& params) {
  if (!(t_i < t) || t_i < 0)
    throw Error(ErrorCode::InvalidInterval,
                "kernel integral needs 0 <= t_i < t (got " + std::to_string(t_i) + ", " +
                    std::to_string(t) + ")");
  params.validate();
  // With u = s - t_i the weight is beta (u - z) on [lo, D], zero below.
  const double span = t - t_i;
  const double beta = 2.0 / t;
  const double z = span - 0.5 * t;
  const double lo = std::max(0.0, z);

  double total = 0;
  const double flat_hi = std::min(span, params.s0);
  if (lo < flat_hi) total += 0.5 * params.c * beta * (flat_hi - lo) * (flat_hi + lo - 2.0 * z);

  const double pow_lo = std::max(lo, params.s0);
  if (pow_lo < span)
    total += params.c * std::pow(params.s0, 1.0 + params.theta) * beta *
             power_piece(pow_lo, span, z, params.theta);
  return total;
}

IntensityValue intensity(const NewsStory& story, double s_h, double t, const KernelParams& params) {
  if (t < 0) throw Error(ErrorCode::TimeBeforeOrigin, "intensity requested before t = 0");
  if (!(s_h >= 0)) throw Error(ErrorCode::InvalidParams, "s_h must be >= 0");
  double excitation = 0;
  for (const Post& post : story.posts) {
    if (post.t > t) break;
    excitation += post.followers * phi_closed(t - post.t, params);
  }
  return {s_h * excitation, t};
}

double estimate_infectiousness(const NewsStory& story, double t, const KernelParams& params) {
  if (!(t > 0)) throw Error(ErrorCode::NonPositiveTime, "estimator needs t > 0");
  const auto& posts = story.posts;
  const auto end = std::upper_bound(posts.begin(), posts.end(), t,
                                    [](double value, const Post& p) { return value < p.t; });
  const std::size_t observed = static_cast<std::size_t>(end - posts.begin());

  double numerator = 0;
  for (std::size_t i = 1; i < observed; ++i) numerator += std::max(1.0 - 2.0 * (t - posts[i].t) / t, 0.0);
  if (numerator == 0) return 0;

  double denominator = 0;
  for (std::size_t i = 0; i < observed; ++i) {
    if (posts[i].t >= t || posts[i].followers == 0) continue;
    denominator += posts[i].followers * kernel_integral(posts[i].t, t, params);
  }
  if (!(denominator > 0))
    throw Error(ErrorCode::ZeroDenominator, "story '" + story.id + "' has zero exposure at t = " +
                                                std::to_string(t) + " s");
  return numerator / denominator;
}

void check_grid(const std::vector<double>& grid_hours) {
  if (grid_hours.empty()) throw Error(ErrorCode::EmptyGrid, "evaluation grid is empty");
  for (std::size_t k = 0; k < grid_hours.size(); ++k) {
    if (!(grid_hours[k] > 0))
      throw Error(ErrorCode::InvalidParams, "grid hours must be > 0");
    if (k > 0 && !(grid_hours[k] > grid_hours[k - 1]))
      throw Error(ErrorCode::InvalidParams, "grid hours must be strictly increasing");
  }
}

InfectiousnessSeries infectiousness_series(const NewsStory& story, const std::vector<double>& grid_hours,
                                           const KernelParams& params) {
  check_grid(grid_hours);
  params.validate();
  InfectiousnessSeries series{grid_hours, std::vector<double>(grid_hours.size(), 0.0)};
  for (std::size_t k = 0; k < grid_hours.size(); ++k) {
    try {
      series.values[k] = estimate_infectiousness(story, grid_hours[k] * kSecondsPerHour, params);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroDenominator) throw;
      warn(std::string(e.what()) + "; using 0");
    }
  }
  return series;
}

std::vector<double> post_count_series(const NewsStory& story, const std::vector<double>& grid_hours) {
  check_grid(grid_hours);
  std::vector<double> counts(grid_hours.size(), 0.0);
  std::size_t bin = 0;
  for (const Post& post : story.posts) {
    const double hours = post.t / kSecondsPerHour;
    while (bin < grid_hours.size() && hours > grid_hours[bin]) ++bin;
    if (bin == grid_hours.size()) break;
    counts[bin] += 1;
  }
  return counts;
}

std::vector<double> hourly_grid(std::size_t n) {
  std::vector<double> grid(n);
  for (std::size_t k = 0; k < n; ++k) grid[k] = static_cast<double>(k + 1);
  return grid;
}

std::vector<double> grid_for_days(std::size_t days) {
  return days == 0 ? std::vector<double>{} : hourly_grid(24 * days - 1);
}

}  // namespace cascadefuse
