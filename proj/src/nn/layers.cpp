#include "cascadefuse/nn/layers.hpp"

#include "cascadefuse/error.hpp"

namespace cascadefuse::nn {

void add_gru_parameters(ParameterSet& params, const std::string& prefix, std::size_t input_dim,
                        std::size_t hidden_dim) {
  for (const char* gate : {".U_z", ".U_r", ".U_h"}) params.add(prefix + gate, {input_dim, hidden_dim});
  for (const char* gate : {".W_z", ".W_r", ".W_h"}) params.add(prefix + gate, {hidden_dim, hidden_dim});
}

void add_fc_parameters(ParameterSet& params, const std::string& prefix, std::size_t in, std::size_t out) {
  params.add(prefix + ".W", {in, out});
  params.add(prefix + ".b", {out});
}

GruStep gru_step(Tape& t, Var x, Var h_prev, const GruWeights& w, GateForm form) {
  const Var z = sigmoid(t, add(t, linear(t, x, w.u_z), linear(t, h_prev, w.w_z)));
  const Var r = sigmoid(t, add(t, linear(t, x, w.u_r), linear(t, h_prev, w.w_r)));
  const Var recurrent = form == GateForm::Multiplicative ? mul(t, h_prev, linear(t, r, w.w_h))
                                                  : linear(t, mul(t, r, h_prev), w.w_h);
  const Var f = tanh(t, add(t, linear(t, x, w.u_h), recurrent));
  const Var h = add(t, mul(t, one_minus(t, z), h_prev), mul(t, z, f));
  return {z, r, f, h};
}

HiddenSequence gru_unroll(Tape& t, std::span<const Var> inputs, std::span<const std::uint8_t> mask,
                          const GruWeights& w, std::size_t hidden_dim, GateForm form) {
  if (inputs.size() != mask.size()) throw Error(ErrorCode::ShapeMismatch, "gru_unroll: mask length differs");
  HiddenSequence out{{}, std::vector<std::uint8_t>(mask.begin(), mask.end())};
  out.states.reserve(inputs.size());
  Var state = t.constant(Tensor({hidden_dim}));
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!mask[i]) {
      out.states.push_back(t.constant(Tensor({hidden_dim})));
      continue;
    }
    state = gru_step(t, inputs[i], state, w, form).h;
    out.states.push_back(state);
  }
  return out;
}

Var fc(Tape& t, Var x, const FcWeights& w) { return add(t, linear(t, x, w.w), w.b); }

Var maxpool_time(Tape& t, const HiddenSequence& seq) {
  return maxpool_rows(t, stack_rows(t, seq.states), seq.mask);
}

CimVars cim_attention(Tape& t, const HiddenSequence& h_l, const HiddenSequence& h_u) {
  if (h_l.states.size() != h_u.states.size() || h_l.mask != h_u.mask)
    throw Error(ErrorCode::ShapeMismatch, "CIM needs equal sequence lengths and masks");
  if (h_l.states.empty()) throw Error(ErrorCode::ShapeMismatch, "CIM over empty sequences");
  if (t.value(h_l.states[0]).size() != t.value(h_u.states[0]).size())
    throw Error(ErrorCode::DimensionalityMismatch, "CIM needs equal hidden widths for both modalities");

  CimVars v;
  const Var hl = stack_rows(t, h_l.states);
  const Var hu = stack_rows(t, h_u.states);
  v.m1 = matmul_nt(t, hl, hu);
  v.m2 = matmul_nt(t, hu, hl);
  v.n1 = masked_softmax_rows(t, v.m1, h_l.mask);
  v.n2 = masked_softmax_rows(t, v.m2, h_l.mask);
  v.o1 = matmul(t, v.n1, hu);
  v.o2 = matmul(t, v.n2, hl);
  v.a1 = mul(t, v.o1, hl);
  v.a2 = mul(t, v.o2, hu);
  v.h_ul = concat_cols(t, v.a1, v.a2);
  return v;
}

AttentionTrace trace_of(const Tape& t, const CimVars& v) {
  return {t.value(v.m1), t.value(v.m2), t.value(v.n1), t.value(v.n2),
          t.value(v.o1), t.value(v.o2), t.value(v.a1), t.value(v.a2)};
}

}  // namespace cascadefuse::nn
