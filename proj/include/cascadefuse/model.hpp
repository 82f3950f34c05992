#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascadefuse/features.hpp"
#include "cascadefuse/nn/layers.hpp"
#include "cascadefuse/nn/params.hpp"
#include "cascadefuse/nn/tape.hpp"

namespace cascadefuse {

/// full: linguistic + user + CIM + temporal; no_cim drops the attention
/// stream; no_time drops the temporal stream; freq feeds post counts in
/// place of infectiousness.
enum class Variant { Full, NoCim, NoTime, Freq };

std::string to_string(Variant v);
Variant parse_variant(const std::string& text);
TemporalKind temporal_kind_for(Variant v);

struct ModelConfig {
  Variant variant = Variant::Full;
  std::size_t vocab_size = 5000;   // K
  std::size_t embed_dim = 100;     // I^l
  std::size_t seq_len = 30;        // T^l = T^u
  std::size_t temporal_len = 47;   // T^s
  std::size_t hidden_l = 32;       // E^l
  std::size_t hidden_u = 32;       // E^u
  std::size_t hidden_s = 32;       // E^s
  std::size_t f2_divisor = 1;      // f2 width = E^con / f2_divisor
  std::size_t tau = 2;
  double dropout = 0.5;
  std::size_t max_epochs = 500;
  std::size_t patience = 10;
  double min_delta = 1e-6;
  std::size_t batch_size = 1;
  std::uint64_t seed = 1;
  nn::GateForm gate_form = nn::GateForm::Multiplicative;
  double rho = 0.95;
  double eps = 1e-6;
  double lr = 1.0;

  bool uses_cim() const { return variant == Variant::Full || variant == Variant::NoTime || variant == Variant::Freq; }
  bool uses_time() const { return variant != Variant::NoTime; }
  /// E^con: E^l + E^u (+ 2 E^l with CIM) (+ E^s with time).
  std::size_t concat_dim() const;
  std::size_t f2_dim() const;
  void validate() const;

  nlohmann::json to_json() const;
  /// Missing keys keep `base` values.
  static ModelConfig from_json(const nlohmann::json& doc, ModelConfig base);
  static ModelConfig from_json(const nlohmann::json& doc);
};

struct ForwardPass {
  nn::Var probs;
  nn::Var f1;
  nn::Var f2;
  nn::HiddenSequence h_l, h_u, h_s;
  std::optional<nn::CimVars> cim;
};

/// The three-stream GRU classifier with optional inter-modal attention.
class FusionModel {
 public:
  explicit FusionModel(ModelConfig config);

  const ModelConfig& config() const { return config_; }

  /// Every parameter with its shape, zero-valued.
  nn::ParameterSet make_parameters() const;
  /// Glorot-uniform weights, zero biases.
  nn::ParameterSet init_parameters(std::uint64_t seed) const;

  /// Records the forward pass. Dropout is active only when `training`, in
  /// which case `rng` must be non-null. Throws ConfigMismatch when the bundle
  /// or parameters do not match the configuration.
  ForwardPass forward(nn::Tape& tape, nn::ParameterSet& params, const FeatureBundle& bundle, bool training,
                      std::mt19937_64* rng) const;
  ForwardPass forward(nn::Tape& tape, const nn::ParameterSet& params, const FeatureBundle& bundle) const;

  /// Class probabilities without recording gradients.
  std::vector<double> predict(const nn::ParameterSet& params, const FeatureBundle& bundle) const;

  /// Forward + backward for one story; gradients accumulate into params. Returns the loss.
  double accumulate_gradients(nn::ParameterSet& params, const FeatureBundle& bundle, std::mt19937_64& rng) const;

  void check_bundle(const FeatureBundle& bundle) const;

 private:
  template <class Params>
  ForwardPass forward_impl(nn::Tape& tape, Params& params, const FeatureBundle& bundle, bool training,
                           std::mt19937_64* rng) const;

  ModelConfig config_;
};

}  // namespace cascadefuse
