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

#include "mplex/layer/group_margin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mplex/error.hpp"
#include "mplex/grad/ops.hpp"

namespace mplex::layer {

namespace {

// Relative floor on the softplus gap; large enough to survive the rounding
// of a softmax evaluated in double.
constexpr double kEta = 1e-9;

}  // namespace

std::vector<GroupMarginProgram> compile_group_margin(const Partition& groups, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must lie in (0, 1)");
  if (groups.empty()) throw Error("no groups given");
  std::size_t classes = 0;
  for (const auto& g : groups) {
    if (g.empty()) throw Error("empty group");
    classes += g.size();
  }
  std::vector<int> owner(classes, -1);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    for (auto c : groups[gi]) {
      if (c >= classes || owner[c] != -1) {
        throw Error("groups must partition the classes 0.." + std::to_string(classes - 1));
      }
      owner[c] = static_cast<int>(gi);
    }
  }

  std::vector<GroupMarginProgram> out;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    GroupMarginProgram p;
    p.classes = classes;
    p.alpha = alpha;
    p.log_odds = std::log(alpha) - std::log1p(-alpha);
    for (std::size_t c = 0; c < classes; ++c) {
      (owner[c] == static_cast<int>(gi) ? p.in_group : p.out_group).push_back(c);
    }
    out.push_back(std::move(p));
  }
  return out;
}

grad::Var apply(const GroupMarginProgram& program, const grad::Var& raw) {
  using grad::Var;
  if (static_cast<std::size_t>(raw.cols()) != program.classes) {
    throw grad::ShapeError("logit width does not match the class count");
  }
  // A group that owns every class already holds all of the mass.
  if (program.out_group.empty()) return raw;

  grad::Tape& tape = *raw.tape();
  std::vector<Var> out_cols;
  for (auto c : program.out_group) {
    out_cols.push_back(grad::columns(raw, static_cast<Eigen::Index>(c), 1));
  }
  Var offset = grad::shift(grad::logsumexp_rows(grad::hstack(out_cols)), program.log_odds);
  const grad::Tensor floor = (offset.value().array().abs().max(1.0) * kEta).matrix();
  Var floor_c = tape.constant(floor);

  std::vector<Var> cols(program.classes);
  for (auto c : program.out_group) {
    cols[c] = grad::columns(raw, static_cast<Eigen::Index>(c), 1);
  }
  for (auto c : program.in_group) {
    Var x = grad::columns(raw, static_cast<Eigen::Index>(c), 1);
    cols[c] = grad::maximum(grad::softplus(x), floor_c) + offset;
  }
  return grad::hstack(cols);
}

grad::Tensor apply(const GroupMarginProgram& program, const grad::Tensor& raw) {
  grad::Tape tape;
  return apply(program, tape.constant(raw)).value();
}

double group_mass(const GroupMarginProgram& program, std::span<const double> logits) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : logits) m = std::max(m, v);
  double total = 0.0, in = 0.0;
  for (std::size_t c = 0; c < logits.size(); ++c) total += std::exp(logits[c] - m);
  for (auto c : program.in_group) in += std::exp(logits[c] - m);
  return in / total;
}

bool satisfied(const GroupMarginProgram& program, std::span<const double> logits) {
  return group_mass(program, logits) > program.alpha;
}

}  // namespace mplex::layer
