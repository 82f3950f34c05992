#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "cascadefuse/nn/params.hpp"
#include "cascadefuse/nn/tensor.hpp"

namespace cascadefuse::nn {

/// Handle to a value recorded on a Tape.
struct Var {
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t id = kNone;
  bool valid() const { return id != kNone; }
};

/// Wengert list for reverse-mode differentiation. Nodes are appended in
/// evaluation order; backward() walks them in reverse. Parameter leaves read
/// their value in place and accumulate gradients straight into the
/// Parameter's gradient buffer. A tape built with `record = false` keeps no
/// closures and never touches parameter gradients, so concurrent inference
/// on a shared ParameterSet is safe.
class Tape {
 public:
  /// Called with the tape and the output node; reads grad(out), accumulates into inputs.
  using Backward = std::function<void(Tape&, Var out)>;

  explicit Tape(bool record = true) : record_(record) {}

  bool recording() const { return record_; }

  Var constant(Tensor value);
  /// Trainable leaf (gradients flow into `p.grad` when recording).
  Var parameter(Parameter& p);
  /// Read-only leaf.
  Var parameter(const Parameter& p);

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id].requires_grad; }
  /// Gradient buffer of `v`, zero-filled on first access.
  Tensor& grad(Var v);
  bool has_grad(Var v) const;

  /// Records an op output. `fn` is dropped unless recording and some input needs gradients.
  Var push(Tensor value, bool requires_grad, Backward fn);

  /// Seeds d(root)/d(root) = 1 and propagates. Root must be a single scalar.
  /// Throws GraphNotBuilt when nothing upstream requires gradients.
  void backward(Var root);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    const Tensor* external_value = nullptr;
    Tensor* external_grad = nullptr;
    bool requires_grad = false;
    Backward backward;
  };

  bool record_;
  std::vector<Node> nodes_;
};

}  // namespace cascadefuse::nn
