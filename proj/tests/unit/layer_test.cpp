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

#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "formula_gen.hpp"
#include "mplex/grad/finite_diff.hpp"
#include "mplex/grad/ops.hpp"
#include "mplex/layer/group_margin.hpp"
#include "mplex/layer/primitives.hpp"
#include "mplex/layer/program.hpp"
#include "mplex/logic/parser.hpp"
#include "oracle.hpp"

namespace mplex::layer {
namespace {

using Big = boost::multiprecision::cpp_dec_float_50;
using logic::parse;
using logic::VarOrder;

double g(double v) { return softplus(v); }

Big big_softplus(const Big& v) { return log(1 + exp(v)); }

TEST(Primitives, Softplus) {
  EXPECT_DOUBLE_EQ(softplus(0.0), std::log(2.0));
  EXPECT_GT(softplus(-745.0), 0.0);
  EXPECT_TRUE(std::isfinite(softplus(1e6)));
}

TEST(Primitives, OffsetMatchesHighPrecision) {
  const Big e = exp(Big(1));
  const double expected = static_cast<double>(log(e - 1));
  EXPECT_NEAR(softplus_offset(0.0, 1.0), expected, 1e-15);
  for (double w : {1e-3, 0.37, 2.0, 19.5, 45.0}) {
    const double oracle = static_cast<double>(log(exp(Big(w)) - 1));
    EXPECT_NEAR(softplus_offset(1.0, 1.0 + w), oracle, 1e-12 * std::max(1.0, std::abs(oracle)));
  }
  EXPECT_NEAR(softplus_offset(0.0, 500.0), 500.0, 1e-12);
  EXPECT_THROW(softplus_offset(1.0, 1.0), DomainError);
  EXPECT_THROW(softplus_offset(2.0, 1.0), DomainError);
}

TEST(Primitives, IntervalAtZero) {
  // b - g(k(a, b) - g(0)) evaluated to 50 digits.
  const Big k = log(exp(Big(1)) - 1);
  const Big oracle = 1 - big_softplus(k - log(Big(2)));
  const double v = interval_transform(0.0, 0.0, 1.0);
  EXPECT_NEAR(v, static_cast<double>(oracle), 1e-15);
  EXPECT_NEAR(v, 0.379, 1e-3);
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1.0);
}

TEST(Primitives, IntervalRangeAndLimits) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lo(-100.0, 100.0), logw(-3.0, 1.2);
  for (int i = 0; i < 500; ++i) {
    const double a = lo(rng);
    const double w = std::pow(10.0, logw(rng));
    const double b = a + w;
    for (double raw : {-30.0, -3.0, 0.0, 2.5, 30.0}) {
      const double off = interval_offset(raw, w);
      EXPECT_GT(off, 0.0);
      EXPECT_LT(off, w);
    }
    EXPECT_LE(w - interval_offset(30.0, w), 1e-6 * w) << w;
    EXPECT_LE(interval_offset(-30.0, w), 1e-6 * w) << w;
    EXPECT_NEAR(interval_transform(0.5, a, b) - a, interval_offset(0.5, w), 1e-9 * w + 1e-13 * std::abs(a));
  }
}

TEST(Primitives, IntervalMonotone) {
  for (double w : {1e-3, 0.5, 7.0, 15.0, 100.0, 1000.0}) {
    double prev = -1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double raw = -30.0 + 60.0 * i / 1000.0;
      const double v = interval_offset(raw, w);
      EXPECT_GT(v, prev) << "w=" << w << " raw=" << raw;
      prev = v;
    }
  }
}

const VarOrder kX({"x"});
const VarOrder kYX({"y", "x"});

TEST(Compile, TwoSidedGap) {
  MultiplexHead head = compile_formula(parse("x >= 2 | x <= -2", kX), kX);
  ASSERT_EQ(head.k(), 2u);
  // Terms are sorted: x + 2 <= 0 before x - 2 >= 0.
  const TransformProgram* lower = nullptr;
  const TransformProgram* upper = nullptr;
  for (const auto& p : head.programs) {
    (p.steps[0].kind == TransformStep::Kind::kLowerBound ? lower : upper) = &p;
  }
  ASSERT_TRUE(lower && upper);
  for (double raw : {-3.0, 0.0, 0.7, 4.0}) {
    const std::vector<double> in = {raw};
    EXPECT_DOUBLE_EQ(apply_point(*lower, in)[0], g(raw) + 2.0);
    EXPECT_DOUBLE_EQ(apply_point(*upper, in)[0], -g(-raw) - 2.0);
  }
  for (double raw : {-60.0, 60.0}) {
    const std::vector<double> in = {raw};
    EXPECT_GT(apply_point(*lower, in)[0], 2.0);
    EXPECT_LT(apply_point(*upper, in)[0], -2.0);
  }
}

TEST(Compile, DependentInterval) {
  // x > y + 2 & x < 5 with y first: y passes through, x lands in (y + 2, 5).
  MultiplexHead head = compile_formula(parse("x > y + 2 & x < 5", kYX), kYX);
  ASSERT_EQ(head.k(), 1u);
  const TransformProgram& p = head.programs[0];
  EXPECT_EQ(p.steps[1].kind, TransformStep::Kind::kInterval);
  // The projection adds y < 3 so that the interval is never empty.
  EXPECT_EQ(p.steps[0].kind, TransformStep::Kind::kUpperBound);
  for (double ry : {-4.0, 0.0, 2.9}) {
    for (double rx : {-2.0, 0.0, 1.5}) {
      const std::vector<double> out = apply_point(p, std::vector<double>{ry, rx});
      const double y = out[0];
      EXPECT_LT(y, 3.0);
      const double beta = 5.0;
      const double alpha = std::log(std::exp(5.0 - (y + 2.0)) - 1.0);
      EXPECT_NEAR(out[1], -g(-g(rx) + alpha) + beta, 1e-12);
      EXPECT_GT(out[1], y + 2.0);
      EXPECT_LT(out[1], 5.0);
    }
  }
}

TEST(Compile, ConstantEquality) {
  MultiplexHead head = compile_formula(parse("x = 3", kX), kX);
  for (double raw : {-10.0, 0.0, 8.0}) {
    EXPECT_EQ(apply_point(head.programs[0], std::vector<double>{raw})[0], 3.0);
  }
}

TEST(Compile, EqualitySubstitution) {
  const VarOrder o({"x", "y"});
  TransformProgram p = compile_term(dnf::to_dnf(parse("x = 2 & y > 3*x - 1", o)).terms[0], o);
  EXPECT_EQ(p.steps[0].kind, TransformStep::Kind::kSetConst);
  EXPECT_EQ(p.steps[1].kind, TransformStep::Kind::kLowerBound);
  EXPECT_GT(apply_point(p, std::vector<double>{0.0, -40.0})[1], 5.0);
}

TEST(Compile, DropsInfeasibleTerm) {
  MultiplexHead head = compile_formula(parse("(x > 5 & x < 3) | x > 0", kX), kX);
  EXPECT_EQ(head.k(), 1u);
  EXPECT_THROW(compile_formula(parse("x > 5 & x < 3", kX), kX), NoFeasibleTerm);
  // Infeasibility visible only after projection.
  EXPECT_THROW(compile_formula(parse("x > y + 1 & x < y", kYX), kYX), NoFeasibleTerm);
}

TEST(Compile, Rejections) {
  try {
    compile_formula(parse("x = y", kYX), kYX);
    FAIL();
  } catch (const CompileError& e) {
    EXPECT_EQ(e.kind(), CompileError::Kind::kDependentEquality);
  }
  try {
    compile_formula(parse("x >= y & x <= y", kYX), kYX);
    FAIL();
  } catch (const CompileError& e) {
    EXPECT_EQ(e.kind(), CompileError::Kind::kNoInterior);
  }
  try {
    compile_formula(parse("x = 0.1", kX), kX);
    FAIL();
  } catch (const CompileError& e) {
    EXPECT_EQ(e.kind(), CompileError::Kind::kInexactConstant);
  }
}

TEST(Apply, RejectsNonFinite) {
  MultiplexHead head = compile_formula(parse("x > 0", kX), kX);
  EXPECT_THROW(apply_point(head.programs[0], std::vector<double>{std::nan("")}), NonFiniteInput);
  EXPECT_THROW(apply_point(head.programs[0],
                     std::vector<double>{std::numeric_limits<double>::infinity()}),
               NonFiniteInput);
}

TEST(Apply, StrictBoundsSurviveRounding) {
  // Large offsets where g(raw) is far below one ulp of the bound.
  const VarOrder o({"x", "y"});
  MultiplexHead head = compile_formula(
      parse("x > 1000000.1 & y < -0.3 | x < 0.1 & x > 0.09999", o), o);
  for (const auto& p : head.programs) {
    for (double rx : {-50.0, -1e3, 0.0, 50.0, 1e3}) {
      for (double ry : {-50.0, 50.0, 1e3}) {
        auto out = apply_point(p, std::vector<double>{rx, ry});
        EXPECT_TRUE(testing::oracle_eval(dnf::term_to_formula(p.term), out))
            << dnf::print(p.term) << " at " << out[0] << ", " << out[1];
      }
    }
  }
}

TEST(Apply, BatchMatchesRows) {
  const VarOrder o({"x", "y", "z"});
  MultiplexHead head = compile_formula(parse("x > 0 & y < x + 2 & y > -x & z < 3 - y", o), o);
  Tensor raw(4, 3);
  raw << 0.1, -2.0, 3.0, 5.0, 5.0, -5.0, -40.0, 0.0, 0.0, 2.0, 1.0, 30.0;
  Tensor batch = apply(head.programs[0], raw);
  for (Eigen::Index r = 0; r < raw.rows(); ++r) {
    Tensor row = apply(head.programs[0], Tensor(raw.row(r)));
    EXPECT_EQ(row, Tensor(batch.row(r)));
  }
}

TEST(Property, OutputsSatisfyRandomFormulas) {
  testing::FormulaGen gen(77);
  int compiled = 0;
  while (compiled < 200) {
    logic::Formula f = gen.formula();
    MultiplexHead head;
    try {
      head = compile_formula(f, gen.order());
    } catch (const NoFeasibleTerm&) {
      continue;
    } catch (const CompileError&) {
      continue;
    }
    ++compiled;
    Tensor raw(50, static_cast<Eigen::Index>(gen.order().size()));
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (Eigen::Index i = 0; i < raw.size(); ++i) raw.data()[i] = u(gen.rng());
    for (const auto& p : head.programs) {
      Tensor out = apply(p, raw);
      for (Eigen::Index r = 0; r < out.rows(); ++r) {
        std::vector<double> x(out.row(r).begin(), out.row(r).end());
        ASSERT_TRUE(testing::oracle_eval(f, x)) << logic::print(f);
        ASSERT_TRUE(testing::oracle_eval(dnf::term_to_formula(p.term), x));
      }
    }
  }
}

TEST(Property, TransformsAreMonotone) {
  const VarOrder o({"x"});
  for (const char* text : {"x > -7.5", "x <= 12", "x > 0.25 & x < 0.5", "x >= -300 & x < 300"}) {
    const TransformProgram p = compile_formula(parse(text, o), o).programs[0];
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 1000; ++i) {
      const double raw = -20.0 + 40.0 * i / 1000.0;
      const double v = apply_point(p, std::vector<double>{raw})[0];
      EXPECT_GT(v, prev) << text << " at " << raw;
      prev = v;
    }
  }
}

TEST(Gradient, EachStepKind) {
  const VarOrder o({"x", "y", "z"});
  const char* formulas[] = {
      "x > 1.5",                                  // lower
      "y < -2",                                   // upper
      "x > -1 & x < 4",                           // interval
      "x > 0 & x < 1 & y > 2*x & z < y - x",      // dependent bounds
      "x > 0 & y > x & y > 1 - x & y < 4 + x",    // max of two lowers
  };
  Tensor raw(3, 3);
  raw << 0.3, -0.2, 1.1, -1.4, 0.8, 0.05, 2.2, -0.6, -1.7;
  for (const char* text : formulas) {
    MultiplexHead head = compile_formula(parse(text, o), o);
    for (const auto& p : head.programs) {
      auto f = [&](grad::Tape& t, const Var& x) {
        return grad::sum(grad::square(apply(p, x)) * t.scalar(0.5));
      };
      grad::FdReport r = grad::finite_diff_check(f, raw);
      EXPECT_TRUE(r.pass) << text << ": " << r.summary();
      EXPECT_GT(r.checked, 0u);
    }
  }
}

TEST(GroupMargin, Validation) {
  EXPECT_THROW(compile_group_margin({{0}, {}}, 0.5), Error);
  EXPECT_THROW(compile_group_margin({{0, 1}, {1}}, 0.5), Error);
  EXPECT_THROW(compile_group_margin({{0}, {1}}, 1.0), Error);
  EXPECT_THROW(compile_group_margin({{0}, {2}}, 0.5), Error);
}

TEST(GroupMargin, TwoClassesHalf) {
  auto progs = compile_group_margin({{0}, {1}}, 0.5);
  ASSERT_EQ(progs.size(), 2u);
  EXPECT_EQ(progs[0].log_odds, 0.0);
  Tensor raw(3, 2);
  raw << 0.0, 0.0, -5.0, 3.0, 4.0, -1.0;
  Tensor out = apply(progs[0], raw);
  for (Eigen::Index r = 0; r < 3; ++r) {
    EXPECT_GT(out(r, 0), out(r, 1));
    EXPECT_EQ(out(r, 1), raw(r, 1));
    EXPECT_NEAR(out(r, 0), g(raw(r, 0)) + raw(r, 1), 1e-12);
  }
}

TEST(GroupMargin, ToyGridAlwaysSatisfied) {
  auto progs = compile_group_margin({{0, 1, 2}, {3, 4, 5}, {6, 7, 8}}, 0.95);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  Tensor raw(10000, 9);
  for (Eigen::Index i = 0; i < raw.size(); ++i) raw.data()[i] = u(rng);
  for (const auto& p : progs) {
    Tensor out = apply(p, raw);
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      std::vector<double> row(9);
      for (int c = 0; c < 9; ++c) row[c] = out(r, c);
      ASSERT_GT(group_mass(p, row), 0.95);
      ASSERT_TRUE(satisfied(p, row));
    }
  }
}

TEST(GroupMargin, SuperclassLayout) {
  Partition groups(20);
  for (std::size_t c = 0; c < 100; ++c) groups[c / 5].push_back(c);
  auto progs = compile_group_margin(groups, 0.95);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 10.0);
  Tensor raw(200, 100);
  for (Eigen::Index i = 0; i < raw.size(); ++i) raw.data()[i] = n(rng);
  for (const auto& p : progs) {
    Tensor out = apply(p, raw);
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      std::vector<double> row(out.row(r).begin(), out.row(r).end());
      ASSERT_TRUE(satisfied(p, row));
    }
  }
}

TEST(GroupMargin, SingleGroupIsIdentity) {
  auto progs = compile_group_margin({{0, 1, 2}}, 0.9);
  Tensor raw = Tensor::Random(4, 3);
  EXPECT_EQ(apply(progs[0], raw), raw);
}

TEST(GroupMargin, Gradient) {
  auto progs = compile_group_margin({{0, 2}, {1, 3}}, 0.8);
  Tensor raw(2, 4);
  raw << 0.3, -1.2, 2.0, 0.5, -0.4, 1.1, -2.5, 0.9;
  for (const auto& p : progs) {
    auto f = [&](grad::Tape& t, const Var& x) {
      return grad::sum(grad::log_softmax_rows(apply(p, x)) * t.scalar(-1.0));
    };
    EXPECT_TRUE(grad::finite_diff_check(f, raw).pass);
  }
}

}  // namespace
}  // namespace mplex::layer
