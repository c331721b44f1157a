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

// Compiles a conjunction of linear atoms into a differentiable map from
// unconstrained raw outputs to points that satisfy the conjunction.
//
// Each atom is solved for its highest-index variable. Bounds on a variable
// may reference only lower-index variables, so outputs are produced in index
// order. Before that, bounds are projected downwards (Fourier-Motzkin) so that
// whatever values the earlier variables take, every later variable still has
// a non-empty open interval to land in.

#ifndef MPLEX_LAYER_PROGRAM_HPP_
#define MPLEX_LAYER_PROGRAM_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mplex/dnf/dnf.hpp"
#include "mplex/grad/tape.hpp"
#include "mplex/logic/formula.hpp"

namespace mplex::layer {

using grad::Tensor;
using grad::Var;
using logic::Rational;

class CompileError : public Error {
 public:
  enum class Kind {
    kInfeasible,         // the term has no solution
    kDependentEquality,  // equality linking two or more variables
    kInexactConstant,    // pinned value has no exact double
    kNoInterior,         // solutions exist but only on a lower-dimensional face
  };
  CompileError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class NoFeasibleTerm : public Error {
 public:
  NoFeasibleTerm() : Error("formula has no feasible DNF term") {}
};

class NonFiniteInput : public Error {
 public:
  NonFiniteInput() : Error("raw input contains a non-finite value") {}
};

// Raised when no double satisfies the bounds of a variable at runtime.
class RepresentabilityError : public Error {
 public:
  explicit RepresentabilityError(const std::string& what) : Error(what) {}
};

// sum coeffs[i].second * x[coeffs[i].first] + constant, over earlier
// variables only. Kept exact and lowered once to doubles.
struct Bound {
  std::vector<std::pair<std::size_t, Rational>> coeffs;
  Rational constant;
  bool strict = false;

  std::vector<std::pair<std::size_t, double>> lowered_coeffs;
  double lowered_constant = 0.0;
  // For constant bounds: the extreme double that still satisfies the bound.
  double first_ok = 0.0;

  bool is_constant() const { return coeffs.empty(); }
};

struct TransformStep {
  enum class Kind { kPassthrough, kSetConst, kLowerBound, kUpperBound, kInterval };

  Kind kind = Kind::kPassthrough;
  std::size_t var = 0;
  Rational value;  // kSetConst
  double lowered_value = 0.0;
  std::vector<Bound> lowers;  // kLowerBound, kInterval; combined by max
  std::vector<Bound> uppers;  // kUpperBound, kInterval; combined by min
};

struct TransformProgram {
  std::vector<TransformStep> steps;  // one per variable, in index order
  dnf::DnfTerm term;
  logic::VarOrder order;
};

// Throws CompileError. Variables absent from the term pass through.
TransformProgram compile_term(const dnf::DnfTerm& term, const logic::VarOrder& order);

// raw: batch x J. Returns batch x J outputs recorded on raw's tape.
Var apply(const TransformProgram& program, const Var& raw);
// Non-differentiable convenience; raw is batch x J.
Tensor apply(const TransformProgram& program, const Tensor& raw);
std::vector<double> apply_point(const TransformProgram& program, std::span<const double> raw);

struct MultiplexHead {
  std::vector<TransformProgram> programs;
  logic::Formula formula = logic::Formula::truth();
  logic::VarOrder order;

  std::size_t k() const { return programs.size(); }
  std::size_t dim() const { return order.size(); }
  std::vector<Var> apply_all(const Var& raw) const;
};

// Drops infeasible terms; other compile errors propagate.
MultiplexHead compile_formula(const logic::Formula& f, const logic::VarOrder& order,
                              const dnf::DnfOptions& options = {});

// Human-readable step listing used by the CLI.
std::string describe(const TransformProgram& program);
std::string describe(const Bound& bound, const logic::VarOrder& order);

}  // namespace mplex::layer

#endif  // MPLEX_LAYER_PROGRAM_HPP_
