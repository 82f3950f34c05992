#include "cascadefuse/parallel.hpp"

#include <cstdlib>

#include <omp.h>

#include "cascadefuse/error.hpp"

namespace cascadefuse::parallel {

int resolve_threads(std::optional<int> flag) {
  if (flag) {
    if (*flag < 1) throw Error(ErrorCode::UsageError, "--threads must be >= 1");
    return *flag;
  }
  if (const char* env = std::getenv("CASCADEFUSE_THREADS"); env && *env) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) throw Error(ErrorCode::UsageError, "CASCADEFUSE_THREADS must be a positive integer");
    return static_cast<int>(n);
  }
  return omp_get_max_threads();
}

void set_threads(int n) { omp_set_num_threads(n); }

int max_threads() { return omp_get_max_threads(); }

std::vector<InfectiousnessSeries> infectiousness_serial(const std::vector<NewsStory>& stories,
                                                        const std::vector<double>& grid, const KernelParams& kernel) {
  std::vector<InfectiousnessSeries> out;
  out.reserve(stories.size());
  for (const auto& story : stories) out.push_back(infectiousness_series(story, grid, kernel));
  return out;
}

std::vector<InfectiousnessSeries> infectiousness_omp(const std::vector<NewsStory>& stories,
                                                     const std::vector<double>& grid, const KernelParams& kernel) {
  std::vector<InfectiousnessSeries> out(stories.size());
  for_each_index(stories.size(), [&](std::size_t i) { out[i] = infectiousness_series(stories[i], grid, kernel); });
  return out;
}

std::vector<FeatureBundle> featurize_serial(const Featurizer& featurizer, const std::vector<NewsStory>& stories) {
  std::vector<FeatureBundle> out;
  out.reserve(stories.size());
  for (const auto& story : stories) out.push_back(featurizer.featurize(story));
  return out;
}

std::vector<FeatureBundle> featurize_omp(const Featurizer& featurizer, const std::vector<NewsStory>& stories) {
  std::vector<FeatureBundle> out(stories.size());
  for_each_index(stories.size(), [&](std::size_t i) { out[i] = featurizer.featurize(stories[i]); });
  return out;
}

std::vector<std::vector<double>> predict_serial(const FusionModel& model, const nn::ParameterSet& params,
                                                const std::vector<FeatureBundle>& bundles) {
  std::vector<std::vector<double>> out;
  out.reserve(bundles.size());
  for (const auto& b : bundles) out.push_back(model.predict(params, b));
  return out;
}

std::vector<std::vector<double>> predict_omp(const FusionModel& model, const nn::ParameterSet& params,
                                             const std::vector<FeatureBundle>& bundles) {
  std::vector<std::vector<double>> out(bundles.size());
  for_each_index(bundles.size(), [&](std::size_t i) { out[i] = model.predict(params, bundles[i]); });
  return out;
}

std::vector<NewsStory> simulate_serial(const InfectiousnessProfile& profile, const FollowerSampler& followers,
                                       double horizon_seconds, std::uint64_t base_seed, std::size_t count,
                                       const SimulationOptions& options) {
  std::vector<NewsStory> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(simulate_hawkes(profile, followers, horizon_seconds, derive_seed(base_seed, i), options));
  return out;
}

std::vector<NewsStory> simulate_omp(const InfectiousnessProfile& profile, const FollowerSampler& followers,
                                    double horizon_seconds, std::uint64_t base_seed, std::size_t count,
                                    const SimulationOptions& options) {
  std::vector<NewsStory> out(count);
  for_each_index(count, [&](std::size_t i) {
    out[i] = simulate_hawkes(profile, followers, horizon_seconds, derive_seed(base_seed, i), options);
  });
  return out;
}

}  // namespace cascadefuse::parallel
