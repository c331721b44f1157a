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

// Negation and disjunctive normal forms, plus per-term bound simplification.

#ifndef MPLEX_DNF_DNF_HPP_
#define MPLEX_DNF_DNF_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mplex/error.hpp"
#include "mplex/logic/formula.hpp"

namespace mplex::dnf {

using logic::Atom;
using logic::Formula;
using logic::Rational;

class DisequalityError : public Error {
 public:
  explicit DisequalityError(const std::string& atom)
      : Error("disequality unsupported: !(" + atom + ")") {}
};

class TermBudgetExceeded : public Error {
 public:
  explicit TermBudgetExceeded(std::size_t cap)
      : Error("DNF term budget exceeded (cap " + std::to_string(cap) + ")"), cap_(cap) {}
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

// Conjunction of atoms, sorted and free of duplicates. Empty means true.
struct DnfTerm {
  std::vector<Atom> atoms;

  bool holds(std::span<const Rational> assignment) const;
  friend bool operator==(const DnfTerm&, const DnfTerm&) = default;
  friend bool operator<(const DnfTerm& a, const DnfTerm& b);
};

// Disjunction of terms, sorted and free of duplicates. An empty term list is
// only produced for a formula that folded to false.
struct DnfFormula {
  std::vector<DnfTerm> terms;

  bool holds(std::span<const Rational> assignment) const;
  Formula to_formula() const;
};

struct DnfOptions {
  std::size_t max_terms = 4096;
};

// Pushes negations into atoms by comparator flipping. Throws DisequalityError
// on a negated equality.
Formula to_nnf(const Formula& f);

Formula term_to_formula(const DnfTerm& t);

DnfFormula to_dnf(const Formula& f, const DnfOptions& options = {});

// Merges constant single-variable bounds. nullopt means the term is infeasible.
std::optional<DnfTerm> simplify_term(const DnfTerm& t);

std::string print(const DnfTerm& t);

}  // namespace mplex::dnf

#endif  // MPLEX_DNF_DNF_HPP_
