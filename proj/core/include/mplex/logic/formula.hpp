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

// Quantifier-free linear real arithmetic: expressions, atoms and formulas.

#ifndef MPLEX_LOGIC_FORMULA_HPP_
#define MPLEX_LOGIC_FORMULA_HPP_

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mplex/error.hpp"
#include "mplex/logic/rational.hpp"

namespace mplex::logic {

// A real-valued variable, identified by its position in a VarOrder.
struct VarId {
  std::string name;
  std::size_t index = 0;

  friend bool operator==(const VarId& a, const VarId& b) {
    return a.index == b.index && a.name == b.name;
  }
  friend bool operator<(const VarId& a, const VarId& b) {
    return a.index != b.index ? a.index < b.index : a.name < b.name;
  }
};

// Declared variable order. Names are unique.
class VarOrder {
 public:
  VarOrder() = default;
  explicit VarOrder(std::vector<std::string> names);

  // Splits "x,y,z" (whitespace tolerant).
  static VarOrder from_csv(std::string_view csv);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  VarId at(std::size_t index) const;
  std::optional<VarId> find(std::string_view name) const;

  friend bool operator==(const VarOrder& a, const VarOrder& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

class MissingVariableError : public Error {
 public:
  explicit MissingVariableError(const std::string& name)
      : Error("no value assigned to variable '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

// Sum of c_v * v plus a constant. Zero coefficients are never stored.
class LinExpr {
 public:
  LinExpr() = default;
  explicit LinExpr(Rational constant) : constant_(std::move(constant)) {}
  static LinExpr variable(const VarId& v, Rational coeff = 1);

  const std::map<VarId, Rational>& coeffs() const { return coeffs_; }
  const Rational& constant() const { return constant_; }
  bool is_constant() const { return coeffs_.empty(); }

  // Coefficient of v (zero when absent).
  Rational coeff(const VarId& v) const;
  // Variable with the highest index; requires !is_constant().
  const VarId& max_var() const { return coeffs_.rbegin()->first; }

  void add_term(const VarId& v, const Rational& c);
  void add_constant(const Rational& c) { constant_ += c; }

  LinExpr operator+(const LinExpr& other) const;
  LinExpr operator-(const LinExpr& other) const;
  LinExpr operator-() const;
  LinExpr scaled(const Rational& factor) const;

  // Throws MissingVariableError when assignment is too short.
  Rational evaluate(std::span<const Rational> assignment) const;

  friend bool operator==(const LinExpr& a, const LinExpr& b) {
    return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
  }
  // Total order used for canonical term sorting.
  friend int compare(const LinExpr& a, const LinExpr& b);

 private:
  std::map<VarId, Rational> coeffs_;
  Rational constant_ = 0;
};

enum class Cmp { kGt, kGe, kLt, kLe, kEq };

std::string_view cmp_symbol(Cmp cmp);
// The comparator satisfied exactly when the given one is violated (no kEq).
Cmp negate(Cmp cmp);
// The comparator after multiplying both sides by -1.
Cmp mirror(Cmp cmp);
bool holds(const Rational& lhs, Cmp cmp);

// lhs cmp 0. Constructed through Formula::atom, which folds constants.
struct Atom {
  LinExpr lhs;
  Cmp cmp = Cmp::kGe;

  bool holds(std::span<const Rational> assignment) const {
    return logic::holds(lhs.evaluate(assignment), cmp);
  }

  friend bool operator==(const Atom& a, const Atom& b) {
    return a.cmp == b.cmp && a.lhs == b.lhs;
  }
  friend int compare(const Atom& a, const Atom& b);
  friend bool operator<(const Atom& a, const Atom& b) { return compare(a, b) < 0; }
};

// Immutable formula tree; cheap to copy (shared structure).
class Formula {
 public:
  enum class Kind { kTrue, kFalse, kAtom, kNot, kAnd, kOr };

  static Formula truth();
  static Formula falsity();
  // Returns True/False directly when lhs is constant.
  static Formula atom(LinExpr lhs, Cmp cmp);
  static Formula atom(Atom a) { return atom(std::move(a.lhs), a.cmp); }
  static Formula negation(Formula child);
  // A one-element list returns the element itself. Empty lists are rejected.
  static Formula conjunction(std::vector<Formula> children);
  static Formula disjunction(std::vector<Formula> children);

  Kind kind() const;
  const Atom& as_atom() const;
  // Children of Not (one), And, Or.
  const std::vector<Formula>& children() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Exact Boolean semantics. assignment[i] is the value of the variable with
// index i.
bool eval(const Formula& f, std::span<const Rational> assignment);
// Convenience overload keyed by variable name.
bool eval(const Formula& f, const std::map<std::string, Rational>& assignment);

std::set<VarId> free_vars(const Formula& f);

// Renders in the concrete grammar accepted by parse().
std::string print(const Formula& f);
std::string print(const Atom& a);
std::string print(const LinExpr& e);

}  // namespace mplex::logic

#endif  // MPLEX_LOGIC_FORMULA_HPP_
