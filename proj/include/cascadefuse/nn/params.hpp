#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "cascadefuse/nn/tensor.hpp"

namespace cascadefuse::nn {

/// A trainable array with its gradient buffer and AdaDelta accumulators,
/// all of identical shape.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;
  Tensor sq_grad_avg;   ///< running E[g^2]
  Tensor sq_delta_avg;  ///< running E[dx^2]
};

class ParameterSet {
 public:
  /// Adds a zero-initialised parameter. Names must be unique.
  Parameter& add(std::string name, std::vector<std::size_t> shape);

  bool contains(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;
  Parameter& at(std::size_t i) { return params_[i]; }
  const Parameter& at(std::size_t i) const { return params_[i]; }
  Parameter& operator[](std::string_view name) { return params_[index_of(name)]; }
  const Parameter& operator[](std::string_view name) const { return params_[index_of(name)]; }

  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  void zero_grad();
  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)); parameters whose name
  /// ends in ".b" are biases and start at zero.
  void glorot_init(std::mt19937_64& rng);
  /// Copies values only; shapes must agree.
  void copy_values_from(const ParameterSet& other);

 private:
  std::vector<Parameter> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Writes `path` (binary, shape-tagged float64 arrays) and `path + ".json"`
/// (the manifest plus the parameter table).
void save_checkpoint(const ParameterSet& params, const std::string& path, const nlohmann::json& manifest);
ParameterSet load_checkpoint(const std::string& path, nlohmann::json* manifest = nullptr);

}  // namespace cascadefuse::nn
