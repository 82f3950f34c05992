#include "cascadefuse/model.hpp"

#include <array>
#include <type_traits>

#include "cascadefuse/error.hpp"

namespace cascadefuse {

using nn::Tape;
using nn::Tensor;
using nn::Var;

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::NoCim: return "no_cim";
    case Variant::NoTime: return "no_time";
    case Variant::Freq: return "freq";
  }
  return "full";
}

Variant parse_variant(const std::string& text) {
  if (text == "full") return Variant::Full;
  if (text == "no_cim" || text == "wo_cim") return Variant::NoCim;
  if (text == "no_time" || text == "wo_time") return Variant::NoTime;
  if (text == "freq") return Variant::Freq;
  throw Error(ErrorCode::UsageError, "unknown variant '" + text + "' (full, no_cim, no_time, freq)");
}

TemporalKind temporal_kind_for(Variant v) {
  switch (v) {
    case Variant::Full:
    case Variant::NoCim: return TemporalKind::Infectiousness;
    case Variant::Freq: return TemporalKind::PostCounts;
    case Variant::NoTime: return TemporalKind::None;
  }
  return TemporalKind::None;
}

std::size_t ModelConfig::concat_dim() const {
  std::size_t dim = hidden_l + hidden_u;
  if (uses_cim()) dim += 2 * hidden_l;
  if (uses_time()) dim += hidden_s;
  return dim;
}

std::size_t ModelConfig::f2_dim() const { return std::max<std::size_t>(1, concat_dim() / f2_divisor); }

void ModelConfig::validate() const {
  if (uses_cim() && hidden_l != hidden_u)
    throw Error(ErrorCode::DimensionalityMismatch, "CIM variants need E^l == E^u");
  if (vocab_size == 0 || embed_dim == 0 || seq_len == 0 || hidden_l == 0 || hidden_u == 0 || hidden_s == 0 ||
      f2_divisor == 0 || batch_size == 0)
    throw Error(ErrorCode::ConfigMismatch, "model dimensions must be > 0");
  if (uses_time() && temporal_len == 0) throw Error(ErrorCode::ConfigMismatch, "temporal variants need T^s > 0");
  if (tau < 2) throw Error(ErrorCode::ConfigMismatch, "need at least two classes");
  if (!(dropout >= 0 && dropout < 1)) throw Error(ErrorCode::ConfigMismatch, "dropout must be in [0, 1)");
}

nlohmann::json ModelConfig::to_json() const {
  return {{"variant", to_string(variant)},
          {"vocab_size", vocab_size},
          {"embed_dim", embed_dim},
          {"seq_len", seq_len},
          {"temporal_len", temporal_len},
          {"hidden_l", hidden_l},
          {"hidden_u", hidden_u},
          {"hidden_s", hidden_s},
          {"f2_divisor", f2_divisor},
          {"tau", tau},
          {"dropout", dropout},
          {"max_epochs", max_epochs},
          {"patience", patience},
          {"min_delta", min_delta},
          {"batch_size", batch_size},
          {"seed", seed},
          {"gate_form", gate_form == nn::GateForm::Multiplicative ? "multiplicative" : "standard"},
          {"rho", rho},
          {"eps", eps},
          {"lr", lr}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& doc, ModelConfig c) {
  try {
    auto take = [&](const char* key, auto& field) {
      if (doc.contains(key)) field = doc.at(key).get<std::decay_t<decltype(field)>>();
    };
    if (doc.contains("variant")) c.variant = parse_variant(doc.at("variant").get<std::string>());
    take("vocab_size", c.vocab_size);
    take("embed_dim", c.embed_dim);
    take("seq_len", c.seq_len);
    take("temporal_len", c.temporal_len);
    take("hidden_l", c.hidden_l);
    take("hidden_u", c.hidden_u);
    take("hidden_s", c.hidden_s);
    take("f2_divisor", c.f2_divisor);
    take("tau", c.tau);
    take("dropout", c.dropout);
    take("max_epochs", c.max_epochs);
    take("patience", c.patience);
    take("min_delta", c.min_delta);
    take("batch_size", c.batch_size);
    take("seed", c.seed);
    take("rho", c.rho);
    take("eps", c.eps);
    take("lr", c.lr);
    if (doc.contains("gate_form"))
      c.gate_form = doc.at("gate_form").get<std::string>() == "standard" ? nn::GateForm::Standard : nn::GateForm::Multiplicative;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("model config: ") + e.what());
  }
  return c;
}

ModelConfig ModelConfig::from_json(const nlohmann::json& doc) { return from_json(doc, ModelConfig{}); }

FusionModel::FusionModel(ModelConfig config) : config_(std::move(config)) { config_.validate(); }

nn::ParameterSet FusionModel::make_parameters() const {
  const auto& c = config_;
  nn::ParameterSet p;
  p.add("embedding", {c.vocab_size, c.embed_dim});
  nn::add_gru_parameters(p, "gru_l", c.embed_dim, c.hidden_l);
  nn::add_fc_parameters(p, "fc_l", c.hidden_l, c.hidden_l);
  nn::add_gru_parameters(p, "gru_u", kUserFeatureCount, c.hidden_u);
  nn::add_fc_parameters(p, "fc_u", c.hidden_u, c.hidden_u);
  if (c.uses_time()) {
    nn::add_gru_parameters(p, "gru_s", 1, c.hidden_s);
    nn::add_fc_parameters(p, "fc_s", c.hidden_s, c.hidden_s);
  }
  nn::add_fc_parameters(p, "fc1", c.concat_dim(), c.f2_dim());
  nn::add_fc_parameters(p, "fc2", c.f2_dim(), c.tau);
  return p;
}

nn::ParameterSet FusionModel::init_parameters(std::uint64_t seed) const {
  nn::ParameterSet p = make_parameters();
  std::mt19937_64 rng(seed);
  p.glorot_init(rng);
  return p;
}

void FusionModel::check_bundle(const FeatureBundle& b) const {
  const auto& c = config_;
  if (b.linguistic.size() != c.seq_len || b.users.size() != c.seq_len || b.mask.size() != c.seq_len)
    throw Error(ErrorCode::ConfigMismatch, "bundle '" + b.story_id + "' length differs from T^l = " + std::to_string(c.seq_len));
  for (const auto& l : b.linguistic)
    if (l.dim != c.vocab_size)
      throw Error(ErrorCode::ConfigMismatch, "bundle '" + b.story_id + "' vocabulary size differs from K = " + std::to_string(c.vocab_size));
  if (b.real_length() == 0) throw Error(ErrorCode::AllMasked, "bundle '" + b.story_id + "' has no real posts");
  if (c.uses_time()) {
    if (!b.temporal) throw Error(ErrorCode::ConfigMismatch, "bundle '" + b.story_id + "' lacks a temporal stream");
    if (b.temporal->size() != c.temporal_len)
      throw Error(ErrorCode::ConfigMismatch, "bundle '" + b.story_id + "' temporal length differs from T^s = " + std::to_string(c.temporal_len));
  }
  if (label_index(b.label) >= c.tau)
    throw Error(ErrorCode::InvalidClass, "bundle '" + b.story_id + "' label outside " + std::to_string(c.tau) + " classes");
}

template <class Params>
ForwardPass FusionModel::forward_impl(Tape& t, Params& params, const FeatureBundle& b, bool training,
                                      std::mt19937_64* rng) const {
  const auto& c = config_;
  check_bundle(b);
  if (params.at(params.index_of("embedding")).value.shape()[0] != c.vocab_size)
    throw Error(ErrorCode::ConfigMismatch, "embedding rows differ from K");
  if (training && !rng) throw Error(ErrorCode::ConfigMismatch, "training forward needs a generator");
  std::mt19937_64 unused;
  std::mt19937_64& gen = rng ? *rng : unused;
  const double rate = c.dropout;
  auto drop = [&](Var v) { return nn::dropout(t, v, rate, training, gen); };

  ForwardPass pass;
  // Linguistic stream.
  const Var embedding = t.parameter(params["embedding"]);
  std::vector<Var> l_inputs;
  l_inputs.reserve(c.seq_len);
  for (std::size_t i = 0; i < c.seq_len; ++i)
    l_inputs.push_back(b.mask[i] ? nn::sparse_linear(t, b.linguistic[i], embedding) : t.constant(Tensor({c.embed_dim})));
  const auto gru_l = nn::bind_gru(t, params, "gru_l");
  const auto fc_l = nn::bind_fc(t, params, "fc_l");
  const auto raw_l = nn::gru_unroll(t, l_inputs, b.mask, gru_l, c.hidden_l, c.gate_form);
  pass.h_l = nn::map_real(t, raw_l, c.hidden_l, [&](Var h) { return drop(nn::fc(t, drop(h), fc_l)); });

  // User stream.
  std::vector<Var> u_inputs;
  u_inputs.reserve(c.seq_len);
  for (std::size_t i = 0; i < c.seq_len; ++i)
    u_inputs.push_back(t.constant(Tensor::vector(std::vector<double>(b.users[i].begin(), b.users[i].end()))));
  const auto gru_u = nn::bind_gru(t, params, "gru_u");
  const auto fc_u = nn::bind_fc(t, params, "fc_u");
  const auto raw_u = nn::gru_unroll(t, u_inputs, b.mask, gru_u, c.hidden_u, c.gate_form);
  pass.h_u = nn::map_real(t, raw_u, c.hidden_u, [&](Var h) { return drop(nn::fc(t, drop(h), fc_u)); });

  std::vector<Var> pooled{nn::maxpool_time(t, pass.h_l), nn::maxpool_time(t, pass.h_u)};

  if (c.uses_cim()) {
    pass.cim = nn::cim_attention(t, pass.h_l, pass.h_u);
    pooled.push_back(nn::maxpool_rows(t, pass.cim->h_ul, b.mask));
  }

  if (c.uses_time()) {
    std::vector<Var> s_inputs;
    s_inputs.reserve(c.temporal_len);
    for (double v : *b.temporal) s_inputs.push_back(t.constant(Tensor::vector({v})));
    const std::vector<std::uint8_t> all_real(c.temporal_len, 1);
    const auto gru_s = nn::bind_gru(t, params, "gru_s");
    const auto fc_s = nn::bind_fc(t, params, "fc_s");
    const auto raw_s = nn::gru_unroll(t, s_inputs, all_real, gru_s, c.hidden_s, c.gate_form);
    pass.h_s = nn::map_real(t, raw_s, c.hidden_s, [&](Var h) { return drop(nn::fc(t, drop(h), fc_s)); });
    pooled.push_back(nn::maxpool_time(t, pass.h_s));
  }

  pass.f1 = drop(nn::concat(t, pooled));
  pass.f2 = drop(nn::relu(t, nn::fc(t, pass.f1, nn::bind_fc(t, params, "fc1"))));
  pass.probs = nn::softmax(t, nn::fc(t, pass.f2, nn::bind_fc(t, params, "fc2")));
  return pass;
}

ForwardPass FusionModel::forward(Tape& tape, nn::ParameterSet& params, const FeatureBundle& bundle, bool training,
                                 std::mt19937_64* rng) const {
  return forward_impl(tape, params, bundle, training, rng);
}

ForwardPass FusionModel::forward(Tape& tape, const nn::ParameterSet& params, const FeatureBundle& bundle) const {
  return forward_impl(tape, params, bundle, false, nullptr);
}

std::vector<double> FusionModel::predict(const nn::ParameterSet& params, const FeatureBundle& bundle) const {
  Tape tape(false);
  const auto pass = forward(tape, params, bundle);
  const auto values = tape.value(pass.probs).data();
  return {values.begin(), values.end()};
}

double FusionModel::accumulate_gradients(nn::ParameterSet& params, const FeatureBundle& bundle,
                                         std::mt19937_64& rng) const {
  Tape tape(true);
  const auto pass = forward(tape, params, bundle, config_.dropout > 0, &rng);
  const Var loss = nn::cross_entropy(tape, pass.probs, label_index(bundle.label));
  tape.backward(loss);
  return tape.value(loss)[0];
}

}  // namespace cascadefuse
