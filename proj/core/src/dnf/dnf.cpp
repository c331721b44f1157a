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

#include "mplex/dnf/dnf.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace mplex::dnf {

using logic::Cmp;
using logic::LinExpr;
using logic::VarId;

bool DnfTerm::holds(std::span<const Rational> assignment) const {
  return std::all_of(atoms.begin(), atoms.end(),
                     [&](const Atom& a) { return a.holds(assignment); });
}

bool operator<(const DnfTerm& a, const DnfTerm& b) {
  return std::lexicographical_compare(a.atoms.begin(), a.atoms.end(), b.atoms.begin(),
                                      b.atoms.end());
}

bool DnfFormula::holds(std::span<const Rational> assignment) const {
  return std::any_of(terms.begin(), terms.end(),
                     [&](const DnfTerm& t) { return t.holds(assignment); });
}

Formula term_to_formula(const DnfTerm& t) {
  if (t.atoms.empty()) return Formula::truth();
  std::vector<Formula> parts;
  parts.reserve(t.atoms.size());
  for (const auto& a : t.atoms) parts.push_back(Formula::atom(a));
  return Formula::conjunction(std::move(parts));
}

Formula DnfFormula::to_formula() const {
  if (terms.empty()) return Formula::falsity();
  std::vector<Formula> parts;
  parts.reserve(terms.size());
  for (const auto& t : terms) parts.push_back(term_to_formula(t));
  return Formula::disjunction(std::move(parts));
}

namespace {

Formula nnf(const Formula& f, bool negated) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::kTrue: return negated ? Formula::falsity() : Formula::truth();
    case K::kFalse: return negated ? Formula::truth() : Formula::falsity();
    case K::kAtom: {
      if (!negated) return f;
      const Atom& a = f.as_atom();
      if (a.cmp == Cmp::kEq) throw DisequalityError(logic::print(a));
      return Formula::atom(a.lhs, logic::negate(a.cmp));
    }
    case K::kNot: return nnf(f.children().front(), !negated);
    case K::kAnd:
    case K::kOr: {
      std::vector<Formula> parts;
      parts.reserve(f.children().size());
      for (const auto& c : f.children()) parts.push_back(nnf(c, negated));
      const bool conj = (f.kind() == K::kAnd) != negated;
      return conj ? Formula::conjunction(std::move(parts))
                  : Formula::disjunction(std::move(parts));
    }
  }
  return f;
}

using TermList = std::vector<DnfTerm>;

void normalize(DnfTerm& t) {
  std::sort(t.atoms.begin(), t.atoms.end());
  t.atoms.erase(std::unique(t.atoms.begin(), t.atoms.end()), t.atoms.end());
}

void normalize(TermList& terms) {
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
}

TermList distribute(const Formula& f, std::size_t cap) {
  using K = Formula::Kind;
  switch (f.kind()) {
    case K::kTrue: return {DnfTerm{}};
    case K::kFalse: return {};
    case K::kAtom: return {DnfTerm{{f.as_atom()}}};
    case K::kNot: throw Error("to_dnf: input not in negation normal form");
    case K::kOr: {
      TermList out;
      for (const auto& c : f.children()) {
        TermList sub = distribute(c, cap);
        out.insert(out.end(), sub.begin(), sub.end());
        normalize(out);
        if (out.size() > cap) throw TermBudgetExceeded(cap);
      }
      return out;
    }
    case K::kAnd: {
      TermList acc{DnfTerm{}};
      for (const auto& c : f.children()) {
        TermList sub = distribute(c, cap);
        if (acc.size() * sub.size() > cap) throw TermBudgetExceeded(cap);
        TermList next;
        next.reserve(acc.size() * sub.size());
        for (const auto& left : acc) {
          for (const auto& right : sub) {
            DnfTerm merged = left;
            merged.atoms.insert(merged.atoms.end(), right.atoms.begin(), right.atoms.end());
            normalize(merged);
            next.push_back(std::move(merged));
          }
        }
        normalize(next);
        acc = std::move(next);
      }
      return acc;
    }
  }
  return {};
}

}  // namespace

Formula to_nnf(const Formula& f) { return nnf(f, false); }

DnfFormula to_dnf(const Formula& f, const DnfOptions& options) {
  TermList terms = distribute(to_nnf(f), options.max_terms);
  normalize(terms);
  return DnfFormula{std::move(terms)};
}

namespace {

// x (cmp) value, after dividing a single-variable atom by its coefficient.
struct ConstBound {
  Rational value;
  Cmp cmp;
  const Atom* source;
};

ConstBound solve_single(const Atom& a) {
  const auto& [v, c] = *a.lhs.coeffs().begin();
  Rational value = -a.lhs.constant() / c;
  Cmp cmp = sgn(c) > 0 ? a.cmp : logic::mirror(a.cmp);
  return {value, cmp, &a};
}

bool is_strict(Cmp c) { return c == Cmp::kGt || c == Cmp::kLt; }

bool satisfies(const Rational& x, const ConstBound& b) {
  return logic::holds(x - b.value, b.cmp);
}

}  // namespace

std::optional<DnfTerm> simplify_term(const DnfTerm& t) {
  std::map<VarId, std::vector<ConstBound>> by_var;
  DnfTerm out;
  for (const auto& a : t.atoms) {
    if (a.lhs.coeffs().size() == 1) {
      by_var[a.lhs.coeffs().begin()->first].push_back(solve_single(a));
    } else {
      out.atoms.push_back(a);
    }
  }

  for (const auto& [var, bounds] : by_var) {
    const ConstBound* lower = nullptr;
    const ConstBound* upper = nullptr;
    const ConstBound* equal = nullptr;
    for (const auto& b : bounds) {
      switch (b.cmp) {
        case Cmp::kGt:
        case Cmp::kGe:
          if (!lower || b.value > lower->value ||
              (b.value == lower->value && is_strict(b.cmp))) {
            lower = &b;
          }
          break;
        case Cmp::kLt:
        case Cmp::kLe:
          if (!upper || b.value < upper->value ||
              (b.value == upper->value && is_strict(b.cmp))) {
            upper = &b;
          }
          break;
        case Cmp::kEq:
          if (equal && equal->value != b.value) return std::nullopt;
          if (!equal) equal = &b;
          break;
      }
    }
    if (equal) {
      if (lower && !satisfies(equal->value, *lower)) return std::nullopt;
      if (upper && !satisfies(equal->value, *upper)) return std::nullopt;
      out.atoms.push_back(*equal->source);
      continue;
    }
    if (lower && upper) {
      if (lower->value > upper->value) return std::nullopt;
      if (lower->value == upper->value) {
        if (is_strict(lower->cmp) || is_strict(upper->cmp)) return std::nullopt;
        // Closed degenerate interval: the only solution is the shared bound.
        LinExpr pinned = LinExpr::variable(var);
        pinned.add_constant(-lower->value);
        out.atoms.push_back(Atom{std::move(pinned), Cmp::kEq});
        continue;
      }
    }
    if (lower) out.atoms.push_back(*lower->source);
    if (upper) out.atoms.push_back(*upper->source);
  }
  normalize(out);
  return out;
}

std::string print(const DnfTerm& t) {
  if (t.atoms.empty()) return "true";
  std::ostringstream os;
  for (std::size_t i = 0; i < t.atoms.size(); ++i) {
    if (i) os << " & ";
    os << logic::print(t.atoms[i]);
  }
  return os.str();
}

}  // namespace mplex::dnf
