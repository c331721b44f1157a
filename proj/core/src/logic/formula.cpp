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

#include "mplex/logic/formula.hpp"

#include <cctype>
#include <sstream>

namespace mplex::logic {

VarOrder::VarOrder(std::vector<std::string> names) : names_(std::move(names)) {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (!lookup_.emplace(names_[i], i).second) {
      throw Error("duplicate variable name '" + names_[i] + "' in order");
    }
  }
}

VarOrder VarOrder::from_csv(std::string_view csv) {
  std::vector<std::string> names;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) names.push_back(current);
    current.clear();
  };
  for (char c : csv) {
    if (c == ',') {
      flush();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      current.push_back(c);
    }
  }
  flush();
  return VarOrder(std::move(names));
}

VarId VarOrder::at(std::size_t index) const {
  if (index >= names_.size()) throw Error("variable index out of range");
  return VarId{names_[index], index};
}

std::optional<VarId> VarOrder::find(std::string_view name) const {
  auto it = lookup_.find(std::string(name));
  if (it == lookup_.end()) return std::nullopt;
  return VarId{it->first, it->second};
}

// ---------------------------------------------------------------------------
// LinExpr

LinExpr LinExpr::variable(const VarId& v, Rational coeff) {
  LinExpr e;
  e.add_term(v, coeff);
  return e;
}

Rational LinExpr::coeff(const VarId& v) const {
  auto it = coeffs_.find(v);
  return it == coeffs_.end() ? Rational(0) : it->second;
}

void LinExpr::add_term(const VarId& v, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = coeffs_.emplace(v, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) coeffs_.erase(it);
  }
}

LinExpr LinExpr::operator+(const LinExpr& other) const {
  LinExpr out = *this;
  for (const auto& [v, c] : other.coeffs_) out.add_term(v, c);
  out.constant_ += other.constant_;
  return out;
}

LinExpr LinExpr::operator-(const LinExpr& other) const { return *this + (-other); }

LinExpr LinExpr::operator-() const { return scaled(-1); }

LinExpr LinExpr::scaled(const Rational& factor) const {
  LinExpr out;
  if (factor == 0) return out;
  for (const auto& [v, c] : coeffs_) out.coeffs_.emplace(v, c * factor);
  out.constant_ = constant_ * factor;
  return out;
}

Rational LinExpr::evaluate(std::span<const Rational> assignment) const {
  Rational sum = constant_;
  for (const auto& [v, c] : coeffs_) {
    if (v.index >= assignment.size()) throw MissingVariableError(v.name);
    sum += c * assignment[v.index];
  }
  return sum;
}

int compare(const LinExpr& a, const LinExpr& b) {
  auto ia = a.coeffs_.begin();
  auto ib = b.coeffs_.begin();
  for (; ia != a.coeffs_.end() && ib != b.coeffs_.end(); ++ia, ++ib) {
    if (ia->first.index != ib->first.index) {
      return ia->first.index < ib->first.index ? -1 : 1;
    }
    if (const int c = cmp(ia->second, ib->second); c != 0) return c < 0 ? -1 : 1;
  }
  if (ia != a.coeffs_.end()) return 1;
  if (ib != b.coeffs_.end()) return -1;
  const int c = cmp(a.constant_, b.constant_);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

// ---------------------------------------------------------------------------
// Comparators and atoms

std::string_view cmp_symbol(Cmp cmp) {
  switch (cmp) {
    case Cmp::kGt: return ">";
    case Cmp::kGe: return ">=";
    case Cmp::kLt: return "<";
    case Cmp::kLe: return "<=";
    case Cmp::kEq: return "=";
  }
  return "?";
}

Cmp negate(Cmp cmp) {
  switch (cmp) {
    case Cmp::kGt: return Cmp::kLe;
    case Cmp::kGe: return Cmp::kLt;
    case Cmp::kLt: return Cmp::kGe;
    case Cmp::kLe: return Cmp::kGt;
    case Cmp::kEq: break;
  }
  throw Error("equality has no single-atom negation");
}

Cmp mirror(Cmp cmp) {
  switch (cmp) {
    case Cmp::kGt: return Cmp::kLt;
    case Cmp::kGe: return Cmp::kLe;
    case Cmp::kLt: return Cmp::kGt;
    case Cmp::kLe: return Cmp::kGe;
    case Cmp::kEq: return Cmp::kEq;
  }
  return cmp;
}

bool holds(const Rational& lhs, Cmp cmp) {
  const int s = sgn(lhs);
  switch (cmp) {
    case Cmp::kGt: return s > 0;
    case Cmp::kGe: return s >= 0;
    case Cmp::kLt: return s < 0;
    case Cmp::kLe: return s <= 0;
    case Cmp::kEq: return s == 0;
  }
  return false;
}

int compare(const Atom& a, const Atom& b) {
  if (const int c = compare(a.lhs, b.lhs); c != 0) return c;
  if (a.cmp == b.cmp) return 0;
  return static_cast<int>(a.cmp) < static_cast<int>(b.cmp) ? -1 : 1;
}

// ---------------------------------------------------------------------------
// Formula

struct Formula::Node {
  Kind kind;
  std::optional<Atom> atom;
  std::vector<Formula> children;
};

Formula Formula::truth() {
  static const auto node = std::make_shared<const Node>(Node{Kind::kTrue, {}, {}});
  return Formula(node);
}

Formula Formula::falsity() {
  static const auto node = std::make_shared<const Node>(Node{Kind::kFalse, {}, {}});
  return Formula(node);
}

Formula Formula::atom(LinExpr lhs, Cmp cmp) {
  if (lhs.is_constant()) {
    return holds(lhs.constant(), cmp) ? truth() : falsity();
  }
  return Formula(std::make_shared<const Node>(
      Node{Kind::kAtom, Atom{std::move(lhs), cmp}, {}}));
}

Formula Formula::negation(Formula child) {
  return Formula(std::make_shared<const Node>(Node{Kind::kNot, {}, {std::move(child)}}));
}

Formula Formula::conjunction(std::vector<Formula> children) {
  if (children.empty()) throw Error("conjunction needs at least one operand");
  if (children.size() == 1) return children.front();
  return Formula(std::make_shared<const Node>(Node{Kind::kAnd, {}, std::move(children)}));
}

Formula Formula::disjunction(std::vector<Formula> children) {
  if (children.empty()) throw Error("disjunction needs at least one operand");
  if (children.size() == 1) return children.front();
  return Formula(std::make_shared<const Node>(Node{Kind::kOr, {}, std::move(children)}));
}

Formula::Kind Formula::kind() const { return node_->kind; }

const Atom& Formula::as_atom() const {
  if (node_->kind != Kind::kAtom) throw Error("formula is not an atom");
  return *node_->atom;
}

const std::vector<Formula>& Formula::children() const { return node_->children; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Formula::Kind::kTrue:
    case Formula::Kind::kFalse:
      return true;
    case Formula::Kind::kAtom:
      return a.as_atom() == b.as_atom();
    default:
      return a.children() == b.children();
  }
}

bool eval(const Formula& f, std::span<const Rational> assignment) {
  switch (f.kind()) {
    case Formula::Kind::kTrue: return true;
    case Formula::Kind::kFalse: return false;
    case Formula::Kind::kAtom: return f.as_atom().holds(assignment);
    case Formula::Kind::kNot: return !eval(f.children().front(), assignment);
    case Formula::Kind::kAnd:
      for (const auto& c : f.children()) {
        if (!eval(c, assignment)) return false;
      }
      return true;
    case Formula::Kind::kOr:
      for (const auto& c : f.children()) {
        if (eval(c, assignment)) return true;
      }
      return false;
  }
  return false;
}

bool eval(const Formula& f, const std::map<std::string, Rational>& assignment) {
  const auto vars = free_vars(f);
  std::size_t width = 0;
  for (const auto& v : vars) width = std::max(width, v.index + 1);
  std::vector<Rational> dense(width);
  for (const auto& v : vars) {
    auto it = assignment.find(v.name);
    if (it == assignment.end()) throw MissingVariableError(v.name);
    dense[v.index] = it->second;
  }
  return eval(f, dense);
}

namespace {

void collect_vars(const Formula& f, std::set<VarId>& out) {
  if (f.kind() == Formula::Kind::kAtom) {
    for (const auto& [v, c] : f.as_atom().lhs.coeffs()) out.insert(v);
    return;
  }
  for (const auto& c : f.children()) collect_vars(c, out);
}

void print_into(const Formula& f, std::ostringstream& os);

void print_operand(const Formula& f, std::ostringstream& os) {
  const auto k = f.kind();
  if (k == Formula::Kind::kAnd || k == Formula::Kind::kOr) {
    os << '(';
    print_into(f, os);
    os << ')';
  } else {
    print_into(f, os);
  }
}

void print_into(const Formula& f, std::ostringstream& os) {
  switch (f.kind()) {
    case Formula::Kind::kTrue: os << "true"; return;
    case Formula::Kind::kFalse: os << "false"; return;
    case Formula::Kind::kAtom: os << print(f.as_atom()); return;
    case Formula::Kind::kNot: {
      // Always parenthesised so "!(x > 1)" never reads as a negated number.
      os << "!(";
      print_into(f.children().front(), os);
      os << ')';
      return;
    }
    case Formula::Kind::kAnd:
    case Formula::Kind::kOr: {
      const char* sep = f.kind() == Formula::Kind::kAnd ? " & " : " | ";
      bool first = true;
      for (const auto& c : f.children()) {
        if (!first) os << sep;
        first = false;
        print_operand(c, os);
      }
      return;
    }
  }
}

}  // namespace

std::set<VarId> free_vars(const Formula& f) {
  std::set<VarId> out;
  collect_vars(f, out);
  return out;
}

std::string print(const LinExpr& e) {
  std::ostringstream os;
  bool first = true;
  auto emit_sign = [&](const Rational& c) {
    if (first) {
      if (sgn(c) < 0) os << '-';
    } else {
      os << (sgn(c) < 0 ? " - " : " + ");
    }
    first = false;
  };
  for (const auto& [v, c] : e.coeffs()) {
    emit_sign(c);
    if (abs(c) != 1) os << magnitude_string(c) << '*';
    os << v.name;
  }
  if (e.constant() != 0 || first) {
    emit_sign(e.constant());
    os << magnitude_string(e.constant());
  }
  return os.str();
}

std::string print(const Atom& a) {
  return print(a.lhs) + " " + std::string(cmp_symbol(a.cmp)) + " 0";
}

std::string print(const Formula& f) {
  std::ostringstream os;
  print_into(f, os);
  return os.str();
}

}  // namespace mplex::logic
