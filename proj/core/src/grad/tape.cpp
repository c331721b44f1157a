// Copyright 2026 The mplexnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mplex/grad/tape.hpp"

namespace mplex::grad {

const Tensor& Var::value() const {
  if (!tape_) throw Error("use of an unbound Var");
  return tape_->value(id_);
}

double Var::item() const {
  if (!is_scalar()) throw ShapeError("item() on a non-scalar value");
  return value()(0, 0);
}

Tensor Gradients::wrt(std::size_t node_id) const {
  if (node_id >= grads_.size()) throw Error("gradient requested for unknown node");
  if (grads_[node_id].size() == 0) return Tensor::Zero(rows_[node_id], cols_[node_id]);
  return grads_[node_id];
}

Tensor Gradients::wrt(const Var& v) const { return wrt(v.id()); }

bool Gradients::reached(const Var& v) const {
  return v.id() < grads_.size() && grads_[v.id()].size() != 0;
}

Var Tape::leaf(Tensor value) {
  nodes_.push_back({std::move(value), {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  nodes_.push_back({std::move(value), {}});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, Backward backward) {
  nodes_.push_back({std::move(value), std::move(backward)});
  return Var(this, nodes_.size() - 1);
}

void accumulate(std::vector<Tensor>& grads, std::size_t id, const Tensor& delta) {
  Tensor& slot = grads[id];
  if (slot.size() == 0) {
    slot = delta;
  } else {
    slot += delta;
  }
}

Gradients Tape::backward(const Var& out) const {
  if (out.tape() != this) throw Error("backward: output belongs to another tape");
  if (!out.is_scalar()) throw ShapeError("backward requires a scalar output");

  std::vector<Tensor> grads(nodes_.size());
  grads[out.id()] = Tensor::Ones(1, 1);
  for (std::size_t i = out.id() + 1; i-- > 0;) {
    if (grads[i].size() == 0 || !nodes_[i].backward) continue;
    nodes_[i].backward(grads[i], grads);
  }

  std::vector<Eigen::Index> rows(nodes_.size()), cols(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    rows[i] = nodes_[i].value.rows();
    cols[i] = nodes_[i].value.cols();
  }
  return Gradients(std::move(grads), std::move(rows), std::move(cols));
}

}  // namespace mplex::grad
