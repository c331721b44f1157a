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

#include "mplex/layer/program.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "mplex/grad/ops.hpp"

namespace mplex::layer {

using logic::Atom;
using logic::Cmp;
using logic::LinExpr;
using logic::VarId;
using logic::VarOrder;

namespace {

// Relative floor on every softplus gap, so that outputs stay strictly inside
// their bounds after rounding.
constexpr double kEta = 0x1p-40;

bool is_strict(Cmp c) { return c == Cmp::kGt || c == Cmp::kLt; }

LinExpr substitute(const LinExpr& e, const std::map<std::size_t, Rational>& pinned) {
  LinExpr out(e.constant());
  for (const auto& [v, c] : e.coeffs()) {
    auto it = pinned.find(v.index);
    if (it != pinned.end()) {
      out.add_constant(c * it->second);
    } else {
      out.add_term(v, c);
    }
  }
  return out;
}

Bound make_bound(const LinExpr& e, bool strict, bool is_lower) {
  Bound b;
  for (const auto& [v, c] : e.coeffs()) {
    b.coeffs.emplace_back(v.index, c);
    b.lowered_coeffs.emplace_back(v.index, logic::to_nearest_double(c));
  }
  b.constant = e.constant();
  b.lowered_constant = logic::to_nearest_double(e.constant());
  b.strict = strict;
  if (b.is_constant()) {
    // Outputs always land strictly inside, whatever the comparator.
    b.first_ok = is_lower ? logic::double_above(b.constant, true)
                          : logic::double_below(b.constant, true);
  }
  return b;
}

LinExpr bound_expr(const Bound& b, const VarOrder& order) {
  LinExpr e(b.constant);
  for (const auto& [i, c] : b.coeffs) e.add_term(order.at(i), c);
  return e;
}

// Keeps the tightest of several constant bounds; dependent ones are kept.
void prune_constant_bounds(std::vector<Bound>& bounds, bool is_lower) {
  std::optional<std::size_t> best;
  std::vector<Bound> out;
  for (auto& b : bounds) {
    if (!b.is_constant()) {
      out.push_back(std::move(b));
      continue;
    }
    if (!best) {
      best = out.size();
      out.push_back(std::move(b));
      continue;
    }
    Bound& cur = out[*best];
    const int c = cmp(b.constant, cur.constant);
    const bool tighter = is_lower ? c > 0 : c < 0;
    if (tighter || (c == 0 && b.strict && !cur.strict)) cur = std::move(b);
  }
  bounds = std::move(out);
}

[[noreturn]] void fail(CompileError::Kind kind, const std::string& what) {
  throw CompileError(kind, what);
}

}  // namespace

TransformProgram compile_term(const dnf::DnfTerm& term, const VarOrder& order) {
  const std::size_t n = order.size();
  for (const auto& a : term.atoms) {
    for (const auto& [v, c] : a.lhs.coeffs()) {
      if (v.index >= n || order.at(v.index).name != v.name) {
        throw Error("term references variable '" + v.name + "' outside the declared order");
      }
    }
  }

  auto simplified = dnf::simplify_term(term);
  if (!simplified) fail(CompileError::Kind::kInfeasible, "term is infeasible");

  // Pin single-variable equalities and substitute them until nothing changes.
  std::map<std::size_t, Rational> pinned;
  std::vector<Atom> atoms = simplified->atoms;
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<Atom> next;
    for (const auto& a : atoms) {
      LinExpr e = substitute(a.lhs, pinned);
      if (e.is_constant()) {
        if (!logic::holds(e.constant(), a.cmp)) {
          fail(CompileError::Kind::kInfeasible, "term is infeasible");
        }
        continue;
      }
      if (a.cmp == Cmp::kEq && e.coeffs().size() == 1 && !changed) {
        const auto& [v, c] = *e.coeffs().begin();
        pinned[v.index] = -e.constant() / c;
        changed = true;
        continue;
      }
      next.push_back(Atom{std::move(e), a.cmp});
    }
    atoms = std::move(next);
  }
  for (const auto& a : atoms) {
    if (a.cmp == Cmp::kEq) {
      fail(CompileError::Kind::kDependentEquality,
           "equality between variables is not supported: " + logic::print(a));
    }
  }

  TransformProgram program;
  program.term = term;
  program.order = order;
  program.steps.resize(n);
  for (std::size_t i = 0; i < n; ++i) program.steps[i].var = i;

  for (const auto& [i, value] : pinned) {
    TransformStep& s = program.steps[i];
    s.kind = TransformStep::Kind::kSetConst;
    s.value = value;
    s.lowered_value = logic::to_nearest_double(value);
    if (logic::from_double(s.lowered_value) != value) {
      fail(CompileError::Kind::kInexactConstant,
           order.at(i).name + " = " + logic::to_string(value) + " has no exact double value");
    }
  }

  // Eliminate variables from the highest index down. Each pair of a lower and
  // an upper bound on the eliminated variable yields a constraint on earlier
  // variables that keeps the interval non-empty.
  bool infeasible = false;
  bool no_interior = false;
  std::vector<Atom> pool = std::move(atoms);
  for (std::size_t idx = n; idx-- > 0;) {
    std::vector<std::pair<LinExpr, bool>> lowers, uppers;
    std::vector<Atom> rest;
    for (auto& a : pool) {
      if (a.lhs.max_var().index != idx) {
        rest.push_back(std::move(a));
        continue;
      }
      const VarId v = a.lhs.max_var();
      const Rational c = a.lhs.coeff(v);
      LinExpr others = a.lhs;
      others.add_term(v, -c);
      LinExpr bound = others.scaled(Rational(-1) / c);
      const Cmp solved = sgn(c) > 0 ? a.cmp : logic::mirror(a.cmp);
      if (solved == Cmp::kGt || solved == Cmp::kGe) {
        lowers.emplace_back(std::move(bound), is_strict(solved));
      } else {
        uppers.emplace_back(std::move(bound), is_strict(solved));
      }
    }
    pool = std::move(rest);

    for (const auto& [lo, lo_strict] : lowers) {
      for (const auto& [hi, hi_strict] : uppers) {
        LinExpr gap = hi - lo;
        const bool strict = lo_strict || hi_strict;
        if (gap.is_constant()) {
          const int s = sgn(gap.constant());
          if (s < 0 || (s == 0 && strict)) {
            infeasible = true;
          } else if (s == 0) {
            no_interior = true;
          }
        } else {
          pool.push_back(Atom{std::move(gap), strict ? Cmp::kGt : Cmp::kGe});
        }
      }
    }

    if (lowers.empty() && uppers.empty()) continue;
    TransformStep& s = program.steps[idx];
    for (const auto& [e, strict] : lowers) s.lowers.push_back(make_bound(e, strict, true));
    for (const auto& [e, strict] : uppers) s.uppers.push_back(make_bound(e, strict, false));
    prune_constant_bounds(s.lowers, true);
    prune_constant_bounds(s.uppers, false);
    if (s.uppers.empty()) {
      s.kind = TransformStep::Kind::kLowerBound;
    } else if (s.lowers.empty()) {
      s.kind = TransformStep::Kind::kUpperBound;
    } else {
      s.kind = TransformStep::Kind::kInterval;
    }
  }
  if (infeasible) fail(CompileError::Kind::kInfeasible, "term is infeasible");
  if (no_interior) {
    fail(CompileError::Kind::kNoInterior,
         "term forces an implicit equality between variables: " + dnf::print(term));
  }
  return program;
}

namespace {

Var constant_column(grad::Tape& tape, Eigen::Index rows, double value) {
  return tape.constant(Tensor::Constant(rows, 1, value));
}

Var bound_value(grad::Tape& tape, const Bound& b, const std::vector<Var>& cols,
                Eigen::Index rows) {
  if (b.is_constant()) return constant_column(tape, rows, b.lowered_constant);
  Var acc;
  for (const auto& [i, c] : b.lowered_coeffs) {
    Var term = c == 1.0 ? cols[i] : grad::scale(cols[i], c);
    acc = acc.valid() ? grad::add(acc, term) : term;
  }
  return b.lowered_constant == 0.0 ? acc : grad::shift(acc, b.lowered_constant);
}

Var combine(grad::Tape& tape, const std::vector<Bound>& bounds, const std::vector<Var>& cols,
            Eigen::Index rows, bool is_lower) {
  Var acc = bound_value(tape, bounds.front(), cols, rows);
  for (std::size_t i = 1; i < bounds.size(); ++i) {
    Var next = bound_value(tape, bounds[i], cols, rows);
    acc = is_lower ? grad::maximum(acc, next) : grad::minimum(acc, next);
  }
  return acc;
}

Rational exact_bound(const Bound& b, const std::vector<Var>& cols, Eigen::Index row) {
  Rational v = b.constant;
  for (const auto& [i, c] : b.coeffs) v += c * logic::from_double(cols[i].value()(row, 0));
  return v;
}

// Replaces out-of-range rows by the nearest admissible double. The gradient
// passes through unchanged, so this is invisible to training.
Var certify(grad::Tape& tape, const TransformStep& step, const Var& out,
            const std::vector<Var>& cols, const VarOrder& order) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const Tensor& v = out.value();
  Tensor fixed = v;
  bool touched = false;
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    double lo = -kInf, hi = kInf;
    for (const auto& b : step.lowers) {
      lo = std::max(lo, b.is_constant() ? b.first_ok
                                        : logic::double_above(exact_bound(b, cols, r), true));
    }
    for (const auto& b : step.uppers) {
      hi = std::min(hi, b.is_constant() ? b.first_ok
                                        : logic::double_below(exact_bound(b, cols, r), true));
    }
    if (lo > hi) {
      throw RepresentabilityError("no double lies strictly within the bounds of '" +
                                  order.at(step.var).name + "'");
    }
    const double c = std::clamp(v(r, 0), lo, hi);
    if (c != v(r, 0)) {
      fixed(r, 0) = c;
      touched = true;
    }
  }
  if (!touched) return out;
  const std::size_t id = out.id();
  return tape.record(std::move(fixed), [id](const Tensor& up, std::vector<Tensor>& g) {
    grad::accumulate(g, id, up);
  });
}

// Per-row constant eta * max(1, |x|).
Tensor relative_floor(const Tensor& x) {
  return (x.array().abs().max(1.0) * kEta).matrix();
}

}  // namespace

Var apply(const TransformProgram& program, const Var& raw) {
  const std::size_t n = program.order.size();
  if (static_cast<std::size_t>(raw.cols()) != n) {
    throw grad::ShapeError("raw output has " + std::to_string(raw.cols()) +
                           " columns, program expects " + std::to_string(n));
  }
  if (!raw.value().allFinite()) throw NonFiniteInput();
  grad::Tape& tape = *raw.tape();
  const Eigen::Index rows = raw.rows();

  std::vector<Var> cols(n);
  for (const auto& step : program.steps) {
    Var x = grad::columns(raw, static_cast<Eigen::Index>(step.var), 1);
    Var out;
    switch (step.kind) {
      case TransformStep::Kind::kPassthrough:
        out = x;
        break;
      case TransformStep::Kind::kSetConst:
        out = constant_column(tape, rows, step.lowered_value);
        break;
      case TransformStep::Kind::kLowerBound: {
        Var base = combine(tape, step.lowers, cols, rows, true);
        Var floor = tape.constant(relative_floor(base.value()));
        out = base + grad::maximum(grad::softplus(x), floor);
        break;
      }
      case TransformStep::Kind::kUpperBound: {
        Var base = combine(tape, step.uppers, cols, rows, false);
        Var floor = tape.constant(relative_floor(base.value()));
        out = base - grad::maximum(grad::softplus(-x), floor);
        break;
      }
      case TransformStep::Kind::kInterval: {
        Var a = combine(tape, step.lowers, cols, rows, true);
        Var b = combine(tape, step.uppers, cols, rows, false);
        // The exact gap is positive; rounding can still collapse it.
        Var width = grad::maximum(b - a, tape.scalar(std::numeric_limits<double>::min()));
        Var k = grad::softplus_inverse(width);
        Var v = b - grad::softplus(k - grad::softplus(x));
        const Tensor scale =
            a.value().array().abs().max(b.value().array().abs()).max(1.0).matrix();
        const Tensor m = (scale.array() * kEta).min(width.value().array() * 0.25).matrix();
        Var margin = tape.constant(m);
        out = grad::minimum(grad::maximum(v, a + margin), b - margin);
        break;
      }
    }
    if (!step.lowers.empty() || !step.uppers.empty()) {
      out = certify(tape, step, out, cols, program.order);
    }
    cols[step.var] = out;
  }
  return grad::hstack(cols);
}

Tensor apply(const TransformProgram& program, const Tensor& raw) {
  grad::Tape tape;
  Var r = tape.constant(raw);
  return apply(program, r).value();
}

std::vector<double> apply_point(const TransformProgram& program, std::span<const double> raw) {
  Tensor r(1, static_cast<Eigen::Index>(raw.size()));
  for (std::size_t i = 0; i < raw.size(); ++i) r(0, static_cast<Eigen::Index>(i)) = raw[i];
  Tensor out = apply(program, r);
  return std::vector<double>(out.data(), out.data() + out.size());
}

std::vector<Var> MultiplexHead::apply_all(const Var& raw) const {
  std::vector<Var> out;
  out.reserve(programs.size());
  for (const auto& p : programs) out.push_back(apply(p, raw));
  return out;
}

MultiplexHead compile_formula(const logic::Formula& f, const VarOrder& order,
                              const dnf::DnfOptions& options) {
  MultiplexHead head;
  head.formula = f;
  head.order = order;
  const dnf::DnfFormula d = dnf::to_dnf(f, options);
  for (const auto& term : d.terms) {
    try {
      head.programs.push_back(compile_term(term, order));
    } catch (const CompileError& e) {
      if (e.kind() == CompileError::Kind::kInfeasible) continue;
      throw CompileError(e.kind(), "term '" + dnf::print(term) + "': " + e.what());
    }
  }
  if (head.programs.empty()) throw NoFeasibleTerm();
  return head;
}

std::string describe(const Bound& bound, const VarOrder& order) {
  return logic::print(bound_expr(bound, order)) + (bound.strict ? " (strict)" : "");
}

std::string describe(const TransformProgram& program) {
  std::ostringstream os;
  os << "term: " << dnf::print(program.term) << "\n";
  for (const auto& s : program.steps) {
    const std::string& name = program.order.at(s.var).name;
    os << "  " << name << ": ";
    switch (s.kind) {
      case TransformStep::Kind::kPassthrough: os << "passthrough"; break;
      case TransformStep::Kind::kSetConst:
        os << "set-const " << logic::to_string(s.value);
        break;
      case TransformStep::Kind::kLowerBound: os << "lower-bound"; break;
      case TransformStep::Kind::kUpperBound: os << "upper-bound"; break;
      case TransformStep::Kind::kInterval: os << "interval"; break;
    }
    for (const auto& b : s.lowers) os << "  lower " << describe(b, program.order);
    for (const auto& b : s.uppers) os << "  upper " << describe(b, program.order);
    std::vector<std::size_t> deps;
    for (const auto* list : {&s.lowers, &s.uppers}) {
      for (const auto& b : *list) {
        for (const auto& [i, c] : b.coeffs) deps.push_back(i);
      }
    }
    std::sort(deps.begin(), deps.end());
    deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
    if (!deps.empty()) {
      os << "  depends on:";
      for (auto i : deps) os << " " << program.order.at(i).name;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace mplex::layer
