#include "cascadefuse/hawkes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cascadefuse/error.hpp"

namespace cascadefuse {

InfectiousnessProfile InfectiousnessProfile::constant(double value) {
  return piecewise_linear({0.0}, {value});
}

InfectiousnessProfile InfectiousnessProfile::piecewise_linear(std::vector<double> hours,
                                                              std::vector<double> values) {
  if (hours.empty() || hours.size() != values.size())
    throw Error(ErrorCode::InvalidParams, "profile needs matching, non-empty knots and values");
  for (std::size_t k = 0; k < hours.size(); ++k) {
    if (!(values[k] >= 0) || !std::isfinite(values[k]))
      throw Error(ErrorCode::InvalidParams, "profile values must be finite and >= 0");
    if (k > 0 && !(hours[k] > hours[k - 1]))
      throw Error(ErrorCode::InvalidParams, "profile knots must be strictly increasing");
  }
  InfectiousnessProfile p;
  p.hours_ = std::move(hours);
  p.values_ = std::move(values);
  return p;
}

double InfectiousnessProfile::at(double hours) const {
  if (hours <= hours_.front()) return values_.front();
  if (hours >= hours_.back()) return values_.back();
  const auto it = std::upper_bound(hours_.begin(), hours_.end(), hours);
  const std::size_t k = static_cast<std::size_t>(it - hours_.begin());
  const double w = (hours - hours_[k - 1]) / (hours_[k] - hours_[k - 1]);
  return values_[k - 1] + w * (values_[k] - values_[k - 1]);
}

double InfectiousnessProfile::max_over(double h0, double h1) const {
  double best = std::max(at(h0), at(h1));
  auto it = std::upper_bound(hours_.begin(), hours_.end(), h0);
  for (; it != hours_.end() && *it < h1; ++it)
    best = std::max(best, values_[static_cast<std::size_t>(it - hours_.begin())]);
  return best;
}

FollowerSampler FollowerSampler::lognormal(double median, double sigma, double cap) {
  return {Kind::LogNormal, std::log(median), sigma, cap};
}

FollowerSampler FollowerSampler::parse(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  try {
    if (parts.size() == 2 && (parts[0] == "const" || parts[0] == "constant"))
      return constant(std::stod(parts[1]));
    if (parts.size() == 3 && parts[0] == "lognormal")
      return lognormal(std::stod(parts[1]), std::stod(parts[2]));
    if (parts.size() == 3 && parts[0] == "uniform")
      return uniform_int(std::stod(parts[1]), std::stod(parts[2]));
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::UsageError, "bad follower distribution '" + spec +
                                         "' (expected const:N, lognormal:MEDIAN:SIGMA or uniform:LO:HI)");
}

double FollowerSampler::sample(std::mt19937_64& rng) const {
  switch (kind) {
    case Kind::Constant: return a;
    case Kind::LogNormal: {
      std::lognormal_distribution<double> dist(a, b);
      return std::min(std::round(dist(rng)), cap);
    }
    case Kind::UniformInt: {
      std::uniform_int_distribution<long long> dist(static_cast<long long>(a), static_cast<long long>(b));
      return static_cast<double>(dist(rng));
    }
  }
  return a;
}

double FollowerSampler::mean() const {
  switch (kind) {
    case Kind::Constant: return a;
    case Kind::LogNormal: return std::exp(a + 0.5 * b * b);
    case Kind::UniformInt: return 0.5 * (a + b);
  }
  return a;
}

double memory_kernel_mass(double s, const KernelParams& p) {
  if (s <= p.s0) return p.c * std::max(s, 0.0);
  return p.c * p.s0 + p.c * p.s0 / p.theta * (1.0 - std::pow(s / p.s0, -p.theta));
}

double memory_kernel_total_mass(const KernelParams& p) { return p.c * p.s0 * (1.0 + 1.0 / p.theta); }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

NewsStory simulate_hawkes(const InfectiousnessProfile& profile, const FollowerSampler& followers,
                          double horizon_seconds, std::uint64_t seed, const SimulationOptions& options) {
  options.kernel.validate();
  if (!(horizon_seconds > 0)) throw Error(ErrorCode::InvalidParams, "horizon must be > 0");
  if (!(options.lookahead_seconds > 0)) throw Error(ErrorCode::InvalidParams, "lookahead must be > 0");
  const KernelParams& kp = options.kernel;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> times{0.0};
  std::vector<double> audience{options.seed_followers ? *options.seed_followers : followers.sample(rng)};

  // Sum of n_i phi(t - t_i); each term is non-increasing in t.
  auto excitation = [&](double t) {
    double total = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double s = t - times[i];
      total += audience[i] * (s <= kp.s0 ? kp.c : kp.c * std::pow(s / kp.s0, -(1.0 + kp.theta)));
    }
    return total;
  };

  double t = 0;
  while (t < horizon_seconds) {
    const double window_end = std::min(t + options.lookahead_seconds, horizon_seconds);
    const double s_max = profile.max_over(t / kSecondsPerHour, window_end / kSecondsPerHour);
    if (s_max <= 0) {
      if (profile.max_over(t / kSecondsPerHour, horizon_seconds / kSecondsPerHour) <= 0) break;
      t = window_end;
      continue;
    }
    const double bound = s_max * excitation(t);
    if (bound <= 0) {
      t = window_end;
      continue;
    }
    std::exponential_distribution<double> wait(bound);
    const double candidate = t + wait(rng);
    if (candidate > window_end) {
      t = window_end;
      continue;
    }
    t = candidate;
    const double rate = profile.at(t / kSecondsPerHour) * excitation(t);
    if (unit(rng) * bound <= rate) {
      if (times.size() >= options.max_events)
        throw Error(ErrorCode::ExplodingCascade,
                    "cascade exceeded " + std::to_string(options.max_events) + " events");
      times.push_back(t);
      audience.push_back(followers.sample(rng));
    }
  }

  NewsStory story;
  story.id = "sim-" + std::to_string(seed);
  story.posts.resize(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    story.posts[i].t = times[i];
    story.posts[i].followers = audience[i];
    story.posts[i].user.followers = audience[i];
  }
  return story;
}

}  // namespace cascadefuse
