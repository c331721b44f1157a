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

#include "mplex/experiments/data.hpp"

#include <cmath>
#include <numbers>

#include "mplex/logic/parser.hpp"
#include "mplex/logic/rational.hpp"

namespace mplex::experiments {

namespace {

bool contains(const BoxRegion& outer, const BoxRegion& inner) {
  for (std::size_t d = 0; d < outer.bounds.size(); ++d) {
    if (inner.bounds[d].first < outer.bounds[d].first || inner.bounds[d].second > outer.bounds[d].second) {
      return false;
    }
  }
  return true;
}

std::vector<Rational> exact_row(const Tensor& m, Eigen::Index i) {
  std::vector<Rational> out;
  out.reserve(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(logic::from_double(m(i, j)));
  return out;
}

}  // namespace

logic::Formula box_formula(const std::vector<BoxRegion>& boxes, const logic::VarOrder& order) {
  if (boxes.empty()) throw ConfigError("no constraint boxes");
  std::vector<logic::Formula> terms;
  for (const auto& b : boxes) {
    if (b.bounds.size() != order.size()) throw ConfigError("box dimension differs from var_order");
    std::vector<logic::Formula> atoms;
    for (std::size_t d = 0; d < b.bounds.size(); ++d) {
      const auto v = logic::LinExpr::variable(order.at(d));
      atoms.push_back(logic::Formula::atom(v - logic::LinExpr(b.bounds[d].first), logic::Cmp::kGt));
      atoms.push_back(logic::Formula::atom(v - logic::LinExpr(b.bounds[d].second), logic::Cmp::kLt));
    }
    terms.push_back(logic::Formula::conjunction(std::move(atoms)));
  }
  return logic::Formula::disjunction(std::move(terms));
}

logic::Formula synthetic_formula(const SyntheticSettings& settings) {
  if (settings.formula) return logic::parse(*settings.formula, settings.order);
  return box_formula(settings.constraint_boxes, settings.order);
}

Tensor gen_six_mode(std::size_t n, const SyntheticSettings& settings, std::mt19937_64& rng) {
  if (n < 1) throw ConfigError("n must be at least 1");
  if (settings.data_boxes.empty()) throw ConfigError("no data boxes");
  const logic::Formula f = synthetic_formula(settings);
  if (!settings.formula) {
    for (const auto& b : settings.data_boxes) {
      bool inside = false;
      for (const auto& c : settings.constraint_boxes) inside = inside || contains(c, b);
      if (!inside) throw ConfigError("a data box is not inside any constraint box");
    }
  }
  const auto d = static_cast<Eigen::Index>(settings.order.size());
  std::uniform_int_distribution<std::size_t> pick(0, settings.data_boxes.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Tensor out(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    // Redraw the rare point that rounds onto a box edge, and any point of a
    // data box that a custom formula does not cover.
    for (int attempt = 0;; ++attempt) {
      if (attempt == 1000) throw ConfigError("data boxes are not covered by the constraint formula");
      const BoxRegion& b = settings.data_boxes[pick(rng)];
      for (Eigen::Index j = 0; j < d; ++j) {
        const double lo = b.bounds[static_cast<std::size_t>(j)].first.get_d();
        const double hi = b.bounds[static_cast<std::size_t>(j)].second.get_d();
        out(i, j) = lo + (hi - lo) * unit(rng);
      }
      if (logic::eval(f, exact_row(out, i))) break;
    }
  }
  return out;
}

std::vector<LabelTuple> enumerate_valid_assignments(std::size_t base) {
  if (base < 2) throw Error("base must be at least 2");
  std::vector<LabelTuple> out;
  out.reserve(base * base);
  for (std::size_t i = 0; i < base; ++i) {
    for (std::size_t j = 0; j < base; ++j) out.push_back({i, j, (i + j) / base, (i + j) % base});
  }
  return out;
}

nets::ItemBatch StructSumData::rows(std::span<const Eigen::Index> index) const {
  nets::ItemBatch out;
  for (std::size_t p = 0; p < 4; ++p) {
    out[p].resize(static_cast<Eigen::Index>(index.size()), items[p].cols());
    for (std::size_t i = 0; i < index.size(); ++i) {
      out[p].row(static_cast<Eigen::Index>(i)) = items[p].row(index[i]);
    }
  }
  return out;
}

Eigen::Vector2d symbol_center(std::size_t c, const StructSumSettings& settings) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(settings.base);
  return {settings.radius * std::cos(angle), settings.radius * std::sin(angle)};
}

StructSumData gen_struct_sum(std::size_t n, const StructSumSettings& settings, std::mt19937_64& rng) {
  if (settings.base < 2) throw ConfigError("base must be at least 2");
  // A carry is written with the digit symbols 0 and 1, so the four
  // positions share one set of class clusters.
  std::vector<Eigen::Vector2d> centers;
  for (std::size_t c = 0; c < settings.base; ++c) centers.push_back(symbol_center(c, settings));
  std::uniform_int_distribution<std::size_t> digit(0, settings.base - 1);
  std::normal_distribution<double> noise(0.0, settings.spread);
  StructSumData data;
  data.base_ = settings.base;
  for (auto& it : data.items) it.resize(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = digit(rng), b = digit(rng);
    const LabelTuple t{a, b, (a + b) / settings.base, (a + b) % settings.base};
    for (std::size_t p = 0; p < 4; ++p) {
      for (Eigen::Index d = 0; d < 2; ++d) {
        data.items[p](static_cast<Eigen::Index>(i), d) = centers[t[p]](d) + noise(rng);
      }
    }
    data.key_.push_back(t);
  }
  return data;
}

SealedKey::Accuracy SealedKey::score(const StructSumData& data, std::span<const LabelTuple> inferred) {
  if (inferred.size() != data.key_.size()) throw Error("inferred labels do not match the dataset size");
  std::size_t labels = 0, tuples = 0;
  for (std::size_t i = 0; i < inferred.size(); ++i) {
    std::size_t right = 0;
    for (std::size_t p = 0; p < 4; ++p) right += inferred[i][p] == data.key_[i][p] ? 1 : 0;
    labels += right;
    tuples += right == 4 ? 1 : 0;
  }
  const auto n = static_cast<double>(inferred.size());
  return {static_cast<double>(labels) / (4.0 * n), static_cast<double>(tuples) / n};
}

bool SealedKey::identity_holds(const StructSumData& data) {
  for (const auto& t : data.key_) {
    if (t[0] + t[1] != t[2] * data.base_ + t[3] || t[3] >= data.base_ || t[2] > 1) return false;
  }
  return true;
}

HierarchyData gen_hierarchy(std::size_t n, const HierarchySettings& s, std::mt19937_64& rng) {
  if (s.groups * s.classes_per_group < 2) throw ConfigError("need at least two classes");
  if (s.dim < 2) throw ConfigError("hierarchy features need at least two dimensions");
  const auto dim = static_cast<Eigen::Index>(s.dim);
  const std::size_t classes = s.groups * s.classes_per_group;
  HierarchyData data;
  data.group_centers = Tensor::Zero(static_cast<Eigen::Index>(s.groups), dim);
  data.class_centers = Tensor::Zero(static_cast<Eigen::Index>(classes), dim);
  for (std::size_t g = 0; g < s.groups; ++g) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(g) / static_cast<double>(s.groups);
    const auto gi = static_cast<Eigen::Index>(g);
    data.group_centers(gi, 0) = s.groups > 1 ? s.group_radius * std::cos(a) : 0.0;
    data.group_centers(gi, 1) = s.groups > 1 ? s.group_radius * std::sin(a) : 0.0;
    data.groups.emplace_back();
    for (std::size_t c = 0; c < s.classes_per_group; ++c) {
      const double b = a + 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(s.classes_per_group);
      const auto ci = static_cast<Eigen::Index>(g * s.classes_per_group + c);
      data.class_centers.row(ci) = data.group_centers.row(gi);
      data.class_centers(ci, 0) += s.class_radius * std::cos(b);
      data.class_centers(ci, 1) += s.class_radius * std::sin(b);
      data.groups.back().push_back(g * s.classes_per_group + c);
    }
  }
  std::uniform_int_distribution<std::size_t> label(0, classes - 1);
  std::normal_distribution<double> noise(0.0, s.noise);
  data.x.resize(static_cast<Eigen::Index>(n), dim);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = label(rng);
    const auto r = static_cast<Eigen::Index>(i);
    for (Eigen::Index d = 0; d < dim; ++d) {
      data.x(r, d) = data.class_centers(static_cast<Eigen::Index>(c), d) + noise(rng);
    }
    data.cls.push_back(static_cast<Eigen::Index>(c));
    data.group.push_back(static_cast<Eigen::Index>(c / s.classes_per_group));
  }
  return data;
}

double satisfaction_rate(const Tensor& samples, const logic::Formula& f, const logic::VarOrder& order) {
  if (samples.cols() != static_cast<Eigen::Index>(order.size())) {
    throw Error("sample width " + std::to_string(samples.cols()) + " differs from " +
                std::to_string(order.size()) + " variables");
  }
  if (samples.rows() == 0) throw Error("no samples");
  std::size_t ok = 0;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    bool finite = true;
    for (Eigen::Index j = 0; j < samples.cols(); ++j) finite = finite && std::isfinite(samples(i, j));
    if (finite && logic::eval(f, exact_row(samples, i))) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(samples.rows());
}

}  // namespace mplex::experiments
