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

// Logit transforms that force one group of classes to hold more than alpha
// of the softmax mass. The constraint is not linear in the logits, so it is
// handled here rather than through the formula compiler.

#ifndef MPLEX_LAYER_GROUP_MARGIN_HPP_
#define MPLEX_LAYER_GROUP_MARGIN_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "mplex/grad/tape.hpp"

namespace mplex::layer {

struct GroupMarginProgram {
  std::size_t classes = 0;
  std::vector<std::size_t> in_group;
  std::vector<std::size_t> out_group;
  double alpha = 0.5;
  double log_odds = 0.0;  // log(alpha / (1 - alpha))
};

using Partition = std::vector<std::vector<std::size_t>>;

// One program per group. Throws mplex::Error on an empty group, a group
// layout that is not a partition of 0..C-1, or alpha outside (0, 1).
std::vector<GroupMarginProgram> compile_group_margin(const Partition& groups, double alpha);

// raw: batch x C logits. In-group logits become
//   g(raw_j) + log_odds + logsumexp(out-group raw logits);
// out-group logits are left as they are.
grad::Var apply(const GroupMarginProgram& program, const grad::Var& raw);
grad::Tensor apply(const GroupMarginProgram& program, const grad::Tensor& raw);

// Softmax mass of the in-group classes for one logit row.
double group_mass(const GroupMarginProgram& program, std::span<const double> logits);
bool satisfied(const GroupMarginProgram& program, std::span<const double> logits);

}  // namespace mplex::layer

#endif  // MPLEX_LAYER_GROUP_MARGIN_HPP_
