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

// Dataset generators for the three experiments and the satisfaction metric.

#ifndef MPLEX_EXPERIMENTS_DATA_HPP_
#define MPLEX_EXPERIMENTS_DATA_HPP_

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "mplex/experiments/config.hpp"
#include "mplex/layer/group_margin.hpp"
#include "mplex/nets/losses.hpp"
#include "mplex/nets/models.hpp"

namespace mplex::experiments {

using grad::Tensor;
using nets::LabelTuple;

// Disjunction over the boxes of the strict interval conjunctions.
logic::Formula box_formula(const std::vector<BoxRegion>& boxes, const logic::VarOrder& order);

// The constraint of a synthetic config: its formula text when set,
// otherwise the constraint-box disjunction.
logic::Formula synthetic_formula(const SyntheticSettings& settings);

// n points drawn uniformly from the data boxes, one box picked uniformly per
// point. Throws ConfigError if some data box is not inside a constraint box.
Tensor gen_six_mode(std::size_t n, const SyntheticSettings& settings, std::mt19937_64& rng);

// All (i, j, carry, units) with i + j = carry * base + units.
std::vector<LabelTuple> enumerate_valid_assignments(std::size_t base);

// Unlabelled quadruples of 2-D points. The labels that generated them are
// sealed: only SealedKey can read them.
class StructSumData {
 public:
  nets::ItemBatch items;  // items[p] is n x 2
  std::size_t size() const { return static_cast<std::size_t>(items[0].rows()); }
  std::size_t base() const { return base_; }
  // The examples at the given rows, in that order.
  nets::ItemBatch rows(std::span<const Eigen::Index> index) const;

 private:
  friend class SealedKey;
  friend StructSumData gen_struct_sum(std::size_t, const StructSumSettings&, std::mt19937_64&);
  std::vector<LabelTuple> key_;
  std::size_t base_ = 0;
};

StructSumData gen_struct_sum(std::size_t n, const StructSumSettings& settings, std::mt19937_64& rng);

// Symbol centre of class c: evenly spaced on a circle.
Eigen::Vector2d symbol_center(std::size_t c, const StructSumSettings& settings);

// Final evaluation only. Training and model selection never see the labels.
class SealedKey {
 public:
  struct Accuracy {
    double labels = 0.0;  // fraction of the 4 * n individual labels
    double tuples = 0.0;  // fraction of examples with every label right
  };
  static Accuracy score(const StructSumData& data, std::span<const LabelTuple> inferred);
  // Generator self-check: every sealed tuple satisfies the sum identity.
  static bool identity_holds(const StructSumData& data);
};

struct HierarchyData {
  Tensor x;  // n x dim
  std::vector<Eigen::Index> cls;
  std::vector<Eigen::Index> group;
  layer::Partition groups;
  Tensor group_centers;  // G x dim
  Tensor class_centers;  // (G * C) x dim
};

// Class c of group g is g * C + c. Group centres lie on a circle of
// group_radius, class centres on a circle of class_radius around their group.
HierarchyData gen_hierarchy(std::size_t n, const HierarchySettings& settings, std::mt19937_64& rng);

// Exact fraction of rows (columns in var_order) that satisfy f. Throws when
// the column count differs from the order size.
double satisfaction_rate(const Tensor& samples, const logic::Formula& f, const logic::VarOrder& order);

}  // namespace mplex::experiments

#endif  // MPLEX_EXPERIMENTS_DATA_HPP_
