#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cascadefuse/nn/ops.hpp"
#include "cascadefuse/nn/params.hpp"

namespace cascadefuse::nn {

/// Candidate-state gating. Multiplicative: f = tanh(x U_h + h (.) (r W_h)).
/// Standard: f = tanh(x U_h + (r (.) h) W_h).
enum class GateForm { Multiplicative, Standard };

/// Tape handles of one GRU's weights. U_* are in x hidden, W_* hidden x hidden.
struct GruWeights {
  Var u_z, u_r, u_h;
  Var w_z, w_r, w_h;
};

/// Registers "<prefix>.U_z" ... "<prefix>.W_h"; no biases.
void add_gru_parameters(ParameterSet& params, const std::string& prefix, std::size_t input_dim, std::size_t hidden_dim);
/// Registers "<prefix>.W" (in x out) and "<prefix>.b".
void add_fc_parameters(ParameterSet& params, const std::string& prefix, std::size_t in, std::size_t out);

template <class Params>
GruWeights bind_gru(Tape& t, Params& params, const std::string& prefix) {
  return {t.parameter(params[prefix + ".U_z"]), t.parameter(params[prefix + ".U_r"]),
          t.parameter(params[prefix + ".U_h"]), t.parameter(params[prefix + ".W_z"]),
          t.parameter(params[prefix + ".W_r"]), t.parameter(params[prefix + ".W_h"])};
}

struct FcWeights {
  Var w, b;
};

template <class Params>
FcWeights bind_fc(Tape& t, Params& params, const std::string& prefix) {
  return {t.parameter(params[prefix + ".W"]), t.parameter(params[prefix + ".b"])};
}

struct GruStep {
  Var z, r, f, h;
};

GruStep gru_step(Tape& t, Var x, Var h_prev, const GruWeights& w, GateForm form = GateForm::Multiplicative);

/// Hidden states with a validity mask; padded positions hold zero vectors.
struct HiddenSequence {
  std::vector<Var> states;
  std::vector<std::uint8_t> mask;
};

/// Runs the GRU over the real positions of `inputs` from a zero state.
/// Padded positions (mask 0) emit zeros and leave the carried state alone.
HiddenSequence gru_unroll(Tape& t, std::span<const Var> inputs, std::span<const std::uint8_t> mask,
                          const GruWeights& w, std::size_t hidden_dim, GateForm form = GateForm::Multiplicative);

Var fc(Tape& t, Var x, const FcWeights& w);

/// Applies `fn` to every real position; padded positions stay zero.
template <class Fn>
HiddenSequence map_real(Tape& t, const HiddenSequence& seq, std::size_t out_dim, Fn&& fn) {
  HiddenSequence out{{}, seq.mask};
  out.states.reserve(seq.states.size());
  for (std::size_t i = 0; i < seq.states.size(); ++i)
    out.states.push_back(seq.mask[i] ? fn(seq.states[i]) : t.constant(Tensor({out_dim})));
  return out;
}

/// Per-dimension max over real positions. Throws AllMasked.
Var maxpool_time(Tape& t, const HiddenSequence& seq);

/// Matching, attention and gating matrices recorded by cim_attention.
struct CimVars {
  Var m1, m2, n1, n2, o1, o2, a1, a2;
  Var h_ul;  ///< T x 2E
};

struct AttentionTrace {
  Tensor m1, m2, n1, n2, o1, o2, a1, a2;
};

/// Pairwise contextual inter-modal attention between two equally long,
/// equally wide hidden sequences sharing one mask. Masked columns are
/// excluded from each row's softmax. Throws DimensionalityMismatch when the
/// widths differ and ShapeMismatch when lengths or masks differ.
CimVars cim_attention(Tape& t, const HiddenSequence& h_l, const HiddenSequence& h_u);

AttentionTrace trace_of(const Tape& t, const CimVars& vars);

}  // namespace cascadefuse::nn
