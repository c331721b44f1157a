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

// Minimal reverse-mode differentiation over dense matrices.
//
// Every value is an Eigen matrix; scalars are 1x1 and batches are stored one
// sample per row. A Tape records operations in creation order, which is a
// topological order, so backward() is a single reverse sweep.

#ifndef MPLEX_GRAD_TAPE_HPP_
#define MPLEX_GRAD_TAPE_HPP_

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mplex/error.hpp"

namespace mplex::grad {

using Tensor = Eigen::MatrixXd;

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error("shape error: " + what) {}
};

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid while the Tape lives.
class Var {
 public:
  Var() = default;

  // Valid until the next operation is recorded on the same tape.
  const Tensor& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool is_scalar() const { return rows() == 1 && cols() == 1; }
  // Value of a 1x1 node.
  double item() const;

  std::size_t id() const { return id_; }
  Tape* tape() const { return tape_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Gradient of one scalar output with respect to every node on the tape.
class Gradients {
 public:
  Gradients() = default;
  explicit Gradients(std::vector<Tensor> grads, std::vector<Eigen::Index> rows,
                     std::vector<Eigen::Index> cols)
      : grads_(std::move(grads)), rows_(std::move(rows)), cols_(std::move(cols)) {}

  // Zero-filled for nodes the output does not depend on.
  Tensor wrt(const Var& v) const;
  Tensor wrt(std::size_t node_id) const;
  bool reached(const Var& v) const;

 private:
  std::vector<Tensor> grads_;
  std::vector<Eigen::Index> rows_;
  std::vector<Eigen::Index> cols_;
};

class Tape {
 public:
  // Accumulates the node's upstream gradient into the parents' slots.
  using Backward = std::function<void(const Tensor& upstream, std::vector<Tensor>& grads)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Differentiable input.
  Var leaf(Tensor value);
  // Non-differentiable input.
  Var constant(Tensor value);
  Var scalar(double value) { return constant(Tensor::Constant(1, 1, value)); }

  // Records an operation. Parents must already be on this tape.
  Var record(Tensor value, Backward backward);

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  std::size_t size() const { return nodes_.size(); }

  // Requires a 1x1 output.
  Gradients backward(const Var& out) const;

 private:
  struct Node {
    Tensor value;
    Backward backward;  // empty for leaves and constants
  };
  std::vector<Node> nodes_;
};

// Adds delta into grads[id], allocating on first touch.
void accumulate(std::vector<Tensor>& grads, std::size_t id, const Tensor& delta);

}  // namespace mplex::grad

#endif  // MPLEX_GRAD_TAPE_HPP_
