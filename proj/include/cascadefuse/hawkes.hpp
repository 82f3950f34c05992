#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cascadefuse/cascade.hpp"
#include "cascadefuse/point_process.hpp"

namespace cascadefuse {

/// Infectiousness over time (hours), piecewise linear between knots and held
/// constant outside them. Piecewise-linear keeps the window maximum exact,
/// which the thinning sampler needs as an upper bound.
class InfectiousnessProfile {
 public:
  static InfectiousnessProfile constant(double value);
  static InfectiousnessProfile piecewise_linear(std::vector<double> hours, std::vector<double> values);
  /// Samples `f` on [0, horizon_hours] every `step_hours`.
  template <class F>
  static InfectiousnessProfile tabulate(F&& f, double horizon_hours, double step_hours) {
    std::vector<double> hours, values;
    for (double h = 0; h <= horizon_hours + 1e-12; h += step_hours) {
      hours.push_back(h);
      values.push_back(f(h));
    }
    return piecewise_linear(std::move(hours), std::move(values));
  }

  double at(double hours) const;
  /// Maximum over [h0, h1].
  double max_over(double h0, double h1) const;

  const std::vector<double>& knots() const { return hours_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> hours_;
  std::vector<double> values_;
};

/// Audience-size distribution for simulated posts.
struct FollowerSampler {
  enum class Kind { Constant, LogNormal, UniformInt };
  Kind kind = Kind::Constant;
  double a = 1;  ///< constant value | log-median | low
  double b = 0;  ///< unused | log-sigma | high
  double cap = 1e7;

  static FollowerSampler constant(double n) { return {Kind::Constant, n, 0}; }
  static FollowerSampler lognormal(double median, double sigma, double cap = 1e7);
  static FollowerSampler uniform_int(double low, double high) { return {Kind::UniformInt, low, high}; }
  /// "const:N", "lognormal:MEDIAN:SIGMA" or "uniform:LO:HI".
  static FollowerSampler parse(const std::string& spec);

  double sample(std::mt19937_64& rng) const;
  /// Mean ignoring the cap.
  double mean() const;
};

struct SimulationOptions {
  KernelParams kernel{};
  std::optional<double> seed_followers;  ///< drawn from the sampler when unset
  double lookahead_seconds = 60.0;
  std::size_t max_events = 100000;
};

/// Ogata thinning of lambda(t) = s(t) sum n_i phi(t - t_i). Event 0 is the seed
/// post at t = 0. Deterministic for a fixed seed. Throws ExplodingCascade once
/// the event count exceeds `max_events`.
NewsStory simulate_hawkes(const InfectiousnessProfile& profile, const FollowerSampler& followers,
                          double horizon_seconds, std::uint64_t seed,
                          const SimulationOptions& options = {});

/// Integral of phi over [0, s].
double memory_kernel_mass(double s, const KernelParams& params = {});
/// Integral of phi over [0, inf) = c s0 (1 + 1/theta).
double memory_kernel_total_mass(const KernelParams& params = {});

/// Derives an independent sub-seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace cascadefuse
