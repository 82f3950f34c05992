#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "cascadefuse/features.hpp"
#include "cascadefuse/hawkes.hpp"
#include "cascadefuse/model.hpp"
#include "cascadefuse/point_process.hpp"

namespace cascadefuse::parallel {

/// `flag` if set, else CASCADEFUSE_THREADS, else the OpenMP default. Values < 1 are rejected.
int resolve_threads(std::optional<int> flag);
void set_threads(int n);
int max_threads();

/// Runs body(i) for i in [0, n) over OpenMP threads. Every index runs; the
/// exception from the lowest failing index is rethrown afterwards.
template <class Body>
void for_each_index(std::size_t n, Body&& body) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Each pair below computes the same values; the serial forms are the reference.

std::vector<InfectiousnessSeries> infectiousness_serial(const std::vector<NewsStory>& stories,
                                                        const std::vector<double>& grid_hours,
                                                        const KernelParams& kernel = {});
std::vector<InfectiousnessSeries> infectiousness_omp(const std::vector<NewsStory>& stories,
                                                     const std::vector<double>& grid_hours,
                                                     const KernelParams& kernel = {});

std::vector<FeatureBundle> featurize_serial(const Featurizer& featurizer, const std::vector<NewsStory>& stories);
std::vector<FeatureBundle> featurize_omp(const Featurizer& featurizer, const std::vector<NewsStory>& stories);

std::vector<std::vector<double>> predict_serial(const FusionModel& model, const nn::ParameterSet& params,
                                                const std::vector<FeatureBundle>& bundles);
std::vector<std::vector<double>> predict_omp(const FusionModel& model, const nn::ParameterSet& params,
                                             const std::vector<FeatureBundle>& bundles);

/// Story i uses seed derive_seed(base_seed, i).
std::vector<NewsStory> simulate_serial(const InfectiousnessProfile& profile, const FollowerSampler& followers,
                                       double horizon_seconds, std::uint64_t base_seed, std::size_t count,
                                       const SimulationOptions& options = {});
std::vector<NewsStory> simulate_omp(const InfectiousnessProfile& profile, const FollowerSampler& followers,
                                    double horizon_seconds, std::uint64_t base_seed, std::size_t count,
                                    const SimulationOptions& options = {});

}  // namespace cascadefuse::parallel
