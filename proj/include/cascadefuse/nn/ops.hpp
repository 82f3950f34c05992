#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "cascadefuse/nn/tape.hpp"

namespace cascadefuse::nn {

// Vectors have shape {n}; matrices {rows, cols}. Linear maps use the
// row-vector convention y = x M with M stored as in x out.

Var linear(Tape& t, Var x, Var m);
/// y = x M for sparse x; only the touched rows of M receive gradient.
Var sparse_linear(Tape& t, const SparseVector& x, Var m);

Var add(Tape& t, Var a, Var b);
Var sub(Tape& t, Var a, Var b);
Var mul(Tape& t, Var a, Var b);
Var one_minus(Tape& t, Var a);
Var sigmoid(Tape& t, Var a);
Var tanh(Tape& t, Var a);
Var relu(Tape& t, Var a);

/// Vector softmax.
Var softmax(Tape& t, Var a);
/// -ln(max(z[label], 1e-12)) as a scalar. Throws InvalidClass.
Var cross_entropy(Tape& t, Var probs, std::size_t label);

/// Inverted dropout: active only when `training`; kept units scale by 1/(1-rate).
Var dropout(Tape& t, Var a, double rate, bool training, std::mt19937_64& rng);

/// Stacks equal-length vectors into a T x E matrix.
Var stack_rows(Tape& t, std::span<const Var> rows);
/// Vector concatenation.
Var concat(Tape& t, std::span<const Var> parts);
/// [A | B] for matrices with equal row counts.
Var concat_cols(Tape& t, Var a, Var b);
/// A B^T.
Var matmul_nt(Tape& t, Var a, Var b);
/// A B.
Var matmul(Tape& t, Var a, Var b);
/// Row-wise softmax over the columns whose mask entry is set; masked columns get 0.
Var masked_softmax_rows(Tape& t, Var m, std::span<const std::uint8_t> col_mask);
/// Column-wise maximum over the rows whose mask entry is set. Throws AllMasked.
Var maxpool_rows(Tape& t, Var h, std::span<const std::uint8_t> row_mask);
/// Scalar sum_i w_i a_i; handy as a probe loss.
Var weighted_sum(Tape& t, Var a, const Tensor& weights);

}  // namespace cascadefuse::nn
