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

#include <algorithm>
#include <cmath>
#include <set>

#include "mplex/dnf/dnf.hpp"
#include "mplex/experiments/config.hpp"
#include "mplex/experiments/data.hpp"
#include "mplex/experiments/train.hpp"
#include "mplex/logic/parser.hpp"
#include "oracle.hpp"

namespace mplex::experiments {
namespace {

TEST(Assignments, BaseTwoByExhaustiveEnumeration) {
  std::vector<LabelTuple> want;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t u = 0; u < 2; ++u) {
          if (i + j == 2 * c + u) want.push_back({i, j, c, u});
        }
      }
    }
  }
  EXPECT_EQ(enumerate_valid_assignments(2), want);
  const std::vector<LabelTuple> listed{{0, 0, 0, 0}, {0, 1, 0, 1}, {1, 0, 0, 1}, {1, 1, 1, 0}};
  EXPECT_EQ(enumerate_valid_assignments(2), listed);
}

TEST(Assignments, CountAndIdentity) {
  for (std::size_t b : {2u, 3u, 4u, 10u}) {
    const auto all = enumerate_valid_assignments(b);
    EXPECT_EQ(all.size(), b * b);
    for (const auto& t : all) EXPECT_EQ(t[0] + t[1], t[2] * b + t[3]);
  }
  EXPECT_THROW(enumerate_valid_assignments(1), Error);
}

TEST(SixMode, SamplesSatisfyEightBoxFormula) {
  const auto config = default_config(Experiment::kSynthetic);
  const logic::Formula f = synthetic_formula(config.synthetic);
  EXPECT_EQ(dnf::to_dnf(f).terms.size(), 8u);
  std::mt19937_64 rng(3);
  const Tensor x = gen_six_mode(1000, config.synthetic, rng);
  ASSERT_EQ(x.rows(), 1000);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    ASSERT_TRUE(testing::oracle_eval(f, std::vector<double>{x(i, 0), x(i, 1)}));
  }
  EXPECT_EQ(satisfaction_rate(x, f, config.synthetic.order), 1.0);
}

TEST(SixMode, EmptyBoxesHoldNoData) {
  const auto config = default_config(Experiment::kSynthetic);
  std::mt19937_64 rng(4);
  const Tensor x = gen_six_mode(2000, config.synthetic, rng);
  const auto& order = config.synthetic.order;
  for (std::size_t b = 6; b < 8; ++b) {
    const logic::Formula box = box_formula({config.synthetic.constraint_boxes[b]}, order);
    EXPECT_EQ(satisfaction_rate(x, box, order), 0.0);
  }
}

TEST(SixMode, Deterministic) {
  const auto config = default_config(Experiment::kSynthetic);
  std::mt19937_64 a(9), b(9);
  EXPECT_EQ(gen_six_mode(50, config.synthetic, a), gen_six_mode(50, config.synthetic, b));
}

TEST(SixMode, RejectsEscapingDataBox) {
  auto config = default_config(Experiment::kSynthetic);
  config.synthetic.data_boxes[0].bounds[0].second = 5;
  std::mt19937_64 rng(1);
  EXPECT_THROW(gen_six_mode(10, config.synthetic, rng), ConfigError);
}

TEST(StructSum, GeneratorSelfCheck) {
  StructSumSettings s;
  std::mt19937_64 rng(5);
  const StructSumData data = gen_struct_sum(500, s, rng);
  EXPECT_EQ(data.size(), 500u);
  EXPECT_TRUE(SealedKey::identity_holds(data));
  // Nearest-centre decoding recovers the sealed labels of well separated
  // clusters almost perfectly.
  std::vector<LabelTuple> nearest(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t p = 0; p < 4; ++p) {
      double best = INFINITY;
      for (std::size_t c = 0; c < s.base; ++c) {
        const Eigen::Vector2d d = data.items[p].row(static_cast<Eigen::Index>(i)).transpose() - symbol_center(c, s);
        if (d.norm() < best) {
          best = d.norm();
          nearest[i][p] = c;
        }
      }
    }
  }
  EXPECT_GT(SealedKey::score(data, nearest).labels, 0.99);
  EXPECT_THROW(SealedKey::score(data, std::vector<LabelTuple>(3)), Error);
}

TEST(StructSum, Deterministic) {
  std::mt19937_64 a(2), b(2);
  const auto x = gen_struct_sum(40, {}, a);
  const auto y = gen_struct_sum(40, {}, b);
  for (std::size_t p = 0; p < 4; ++p) EXPECT_EQ(x.items[p], y.items[p]);
}

TEST(Hierarchy, GeneratorSelfCheck) {
  HierarchySettings s;
  std::mt19937_64 rng(6);
  const HierarchyData data = gen_hierarchy(900, s, rng);
  EXPECT_EQ(data.class_centers.rows(), 9);
  ASSERT_EQ(data.groups.size(), 3u);
  std::set<std::size_t> all;
  for (const auto& g : data.groups) all.insert(g.begin(), g.end());
  EXPECT_EQ(all.size(), 9u);
  for (std::size_t i = 0; i < data.cls.size(); ++i) EXPECT_EQ(data.group[i], data.cls[i] / 3);
  double within = 0.0, between = INFINITY;
  for (Eigen::Index a = 0; a < 9; ++a) {
    for (Eigen::Index b = a + 1; b < 9; ++b) {
      const double d = (data.class_centers.row(a) - data.class_centers.row(b)).norm();
      if (a / 3 == b / 3) {
        within = std::max(within, d);
      } else {
        between = std::min(between, d);
      }
    }
  }
  EXPECT_LT(within, between);
}

TEST(Satisfaction, CraftedSets) {
  const logic::VarOrder order({"x", "y"});
  const logic::Formula f = logic::parse("x > 0 & y < 1", order);
  Tensor bad(4, 2), mixed(4, 2);
  bad << -1, 0, -1, 0, -1, 0, -1, 0;
  mixed << 1, 0, -1, 0, 0.5, 0.5, 0, 0;
  EXPECT_EQ(satisfaction_rate(bad, f, order), 0.0);
  EXPECT_EQ(satisfaction_rate(mixed, f, order), 0.5);
  EXPECT_THROW(satisfaction_rate(Tensor::Zero(2, 3), f, order), Error);
}

TEST(Config, DefaultsValidateAndRoundTrip) {
  for (auto e : {Experiment::kSynthetic, Experiment::kStructSum, Experiment::kHierarchy}) {
    const ExperimentConfig c = default_config(e);
    EXPECT_NO_THROW(validate(c));
    const std::string text = config_json(c);
    EXPECT_EQ(config_json(parse_config(text)), text);
  }
}

TEST(Config, OverridesAndErrors) {
  const auto c = parse_config(R"({"experiment": "hierarchy", "n": 30, "model": "vanilla",
                                  "hierarchy": {"alpha": 0.9}})");
  EXPECT_EQ(c.n, 30u);
  EXPECT_EQ(c.hierarchy.alpha, 0.9);
  EXPECT_EQ(c.hierarchy.groups, 3u);
  EXPECT_THROW(parse_config(R"({"experiment": "hierarchy", "alhpa": 0.9})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"experiment": "hierarchy", "model": "unaware"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"experiment": "synthetic", "seeds": []})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"experiment": "synthetic", "n": 0})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"experiment": "tabular"})"), ConfigError);
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config(R"({"experiment": "synthetic",
      "synthetic": {"constraint_boxes": [[["1", "0"], ["0", "1"]]]}})"),
               ConfigError);
}

TEST(Config, NumbersBecomeTheirDecimals) {
  EXPECT_EQ(decimal_rational(0.1), Rational(1, 10));
  EXPECT_EQ(decimal_rational(-2.5), Rational(-5, 2));
  const auto c = parse_config(R"({"experiment": "synthetic",
      "synthetic": {"constraint_boxes": [[[-3, 0.1], [0, 1]]], "data_boxes": [[[-2, 0], [0.2, 0.8]]]}})");
  EXPECT_EQ(c.synthetic.constraint_boxes[0].bounds[0].second, Rational(1, 10));
}

TEST(Training, SplitIsAPartition) {
  std::mt19937_64 rng(1);
  auto [train, val] = split_indices(1000, 0.1, rng);
  EXPECT_EQ(val.size(), 100u);
  EXPECT_EQ(train.size(), 900u);
  std::set<Eigen::Index> all(train.begin(), train.end());
  all.insert(val.begin(), val.end());
  EXPECT_EQ(all.size(), 1000u);
  auto [t2, v2] = split_indices(5, 0.1, rng);
  EXPECT_EQ(v2.size(), 1u);
}

TEST(Training, SigmaWarmup) {
  ExperimentConfig c = default_config(Experiment::kSynthetic);
  c.sigma_warmup_epochs = 10;
  EXPECT_DOUBLE_EQ(training_sigma(c, 1), 1.0);
  EXPECT_NEAR(training_sigma(c, 6), std::sqrt(0.1), 1e-12);
  EXPECT_DOUBLE_EQ(training_sigma(c, 11), 0.1);
  c.sigma_warmup_epochs = 0;
  EXPECT_DOUBLE_EQ(training_sigma(c, 1), 0.1);
}

TEST(Training, ReportFormat) {
  const std::vector<ReportRow> rows{{1, "test", 12.5, 1.0, std::nullopt, std::nullopt},
                                    {2, "validation", -0.25, 0.5, 0.75, 1.0}};
  EXPECT_EQ(report_csv(rows),
            "epoch,split,neg_elbo,satisfaction,class_acc,group_acc\n"
            "1,test,12.5,1.000000,,\n"
            "2,validation,-0.25,0.500000,0.750000,1.000000\n");
}

TEST(Training, SamplesCsvRoundTrip) {
  Tensor s(3, 2);
  s << 0.1, -1e-300, 1.0 / 3.0, 2.5e10, -0.0, 7;
  std::vector<std::string> cols;
  const Tensor back = read_samples_csv(samples_csv(s, {"x", "y"}), &cols);
  EXPECT_EQ(back, s);
  EXPECT_EQ(cols, (std::vector<std::string>{"x", "y"}));
  EXPECT_THROW(read_samples_csv("x,y\n1\n"), Error);
  EXPECT_THROW(read_samples_csv("x\nabc\n"), Error);
}

ExperimentConfig tiny(Experiment e) {
  ExperimentConfig c = default_config(e);
  c.n = 120;
  c.test_n = 60;
  c.epochs = 3;
  c.sigma_warmup_epochs = 2;
  if (e == Experiment::kStructSum) {
    c.latent = 3;
    c.hidden = {8};
  }
  return c;
}

TEST(Training, SyntheticRunsAreDeterministicAndConstrained) {
  const auto c = tiny(Experiment::kSynthetic);
  const RunResult a = run_synthetic(c, 4);
  const RunResult b = run_synthetic(c, 4);
  EXPECT_EQ(report_csv(a.report), report_csv(b.report));
  EXPECT_EQ(a.checkpoint, b.checkpoint);
  ASSERT_EQ(a.report.size(), 6u);
  for (const auto& row : a.report) EXPECT_EQ(row.satisfaction.value(), 1.0);
  EXPECT_EQ(a.final_metrics.at("prior_satisfaction"), 1.0);
  EXPECT_NE(report_csv(run_synthetic(c, 5).report), report_csv(a.report));
}

TEST(Training, HierarchyRunsAreDeterministic) {
  for (const char* model : {"multiplex", "vanilla", "hierarchical"}) {
    auto c = tiny(Experiment::kHierarchy);
    c.model = model;
    const RunResult a = run_hierarchy(c, 1);
    EXPECT_EQ(report_csv(a.report), report_csv(run_hierarchy(c, 1).report)) << model;
    if (c.model != "vanilla") {
      for (const auto& row : a.report) EXPECT_EQ(row.satisfaction.value(), 1.0) << model;
    }
  }
}

TEST(Training, StructSumSelectsLowestValidationBound) {
  const auto c = tiny(Experiment::kStructSum);
  std::vector<RunResult> runs{run_structsum(c, 0), run_structsum(c, 1)};
  EXPECT_EQ(report_csv(runs[0].report), report_csv(run_structsum(c, 0).report));
  for (const auto& row : runs[0].report) EXPECT_EQ(row.satisfaction.value(), 1.0);
  const Selection sel = select_structsum(c, runs);
  const double v0 = runs[0].final_metrics.at("validation_neg_elbo");
  const double v1 = runs[1].final_metrics.at("validation_neg_elbo");
  EXPECT_EQ(sel.seed, v0 <= v1 ? 0u : 1u);
  EXPECT_GE(sel.test.labels, 0.0);
  EXPECT_LE(sel.test.labels, 1.0);
}

}  // namespace
}  // namespace mplex::experiments
