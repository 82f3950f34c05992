#include "cascadefuse/nn/tape.hpp"

#include "cascadefuse/error.hpp"

namespace cascadefuse::nn {

Var Tape::constant(Tensor value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return {nodes_.size() - 1};
}

Var Tape::parameter(Parameter& p) {
  Node node;
  node.external_value = &p.value;
  if (record_) {
    node.external_grad = &p.grad;
    node.requires_grad = true;
  }
  nodes_.push_back(std::move(node));
  return {nodes_.size() - 1};
}

Var Tape::parameter(const Parameter& p) {
  Node node;
  node.external_value = &p.value;
  nodes_.push_back(std::move(node));
  return {nodes_.size() - 1};
}

const Tensor& Tape::value(Var v) const {
  const Node& node = nodes_[v.id];
  return node.external_value ? *node.external_value : node.value;
}

Tensor& Tape::grad(Var v) {
  Node& node = nodes_[v.id];
  if (node.external_grad) return *node.external_grad;
  if (node.grad.empty()) node.grad = Tensor(value(v).shape());
  return node.grad;
}

bool Tape::has_grad(Var v) const {
  const Node& node = nodes_[v.id];
  return node.external_grad != nullptr || !node.grad.empty();
}

Var Tape::push(Tensor value, bool requires_grad, Backward fn) {
#ifndef NDEBUG
  if (!value.all_finite()) throw Error(ErrorCode::NonFinite, "non-finite value recorded on tape");
#endif
  Node node;
  node.value = std::move(value);
  node.requires_grad = record_ && requires_grad;
  if (node.requires_grad) node.backward = std::move(fn);
  nodes_.push_back(std::move(node));
  return {nodes_.size() - 1};
}

void Tape::backward(Var root) {
  if (!root.valid() || root.id >= nodes_.size() || !record_ || !nodes_[root.id].requires_grad)
    throw Error(ErrorCode::GraphNotBuilt, "no recorded computation requires gradients");
  if (value(root).size() != 1) throw Error(ErrorCode::ShapeMismatch, "backward needs a scalar root");
  grad(root)[0] += 1.0;
  for (std::size_t i = root.id + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.backward || node.grad.empty()) continue;
    node.backward(*this, Var{i});
  }
}

}  // namespace cascadefuse::nn
