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

// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits non-zero if any selected criterion fails.
//
//   mplex_acceptance [--cli PATH] [criterion ...]
//
// Criterion 8 runs the command line tool given by --cli.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "formula_gen.hpp"
#include "mplex/dnf/dnf.hpp"
#include "mplex/experiments/config.hpp"
#include "mplex/experiments/data.hpp"
#include "mplex/experiments/train.hpp"
#include "mplex/grad/finite_diff.hpp"
#include "mplex/grad/ops.hpp"
#include "mplex/layer/group_margin.hpp"
#include "mplex/layer/primitives.hpp"
#include "mplex/layer/program.hpp"
#include "mplex/logic/parser.hpp"
#include "mplex/nets/losses.hpp"
#include "mplex/nets/models.hpp"
#include "oracle.hpp"

namespace {

using namespace mplex;
using grad::Tape;
using grad::Tensor;
using grad::Var;
namespace ex = mplex::experiments;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return v.size() > 1 ? s / static_cast<double>(v.size() - 1) : 0.0;
}

// 1. Every output of every branch satisfies the formula under exact rational
// evaluation.
Outcome output_satisfaction() {
  testing::FormulaGen gen(20260101, {.vars = 3, .max_atoms = 6});
  std::map<std::string, int> rejected;
  long satisfied = 0, inputs = 0, outputs = 0, branch_ok = 0;
  int formulas = 0;
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  while (formulas < 1000) {
    const logic::Formula f = gen.formula();
    layer::MultiplexHead head;
    try {
      head = layer::compile_formula(f, gen.order());
    } catch (const layer::NoFeasibleTerm&) {
      ++rejected["infeasible"];
      continue;
    } catch (const layer::CompileError& e) {
      switch (e.kind()) {
        case layer::CompileError::Kind::kNoInterior: ++rejected["no-interior"]; break;
        case layer::CompileError::Kind::kDependentEquality: ++rejected["dependent-equality"]; break;
        case layer::CompileError::Kind::kInexactConstant: ++rejected["inexact-constant"]; break;
        case layer::CompileError::Kind::kInfeasible: ++rejected["infeasible-term"]; break;
      }
      continue;
    }
    ++formulas;
    Tensor raw(100, static_cast<Eigen::Index>(gen.order().size()));
    for (Eigen::Index i = 0; i < raw.size(); ++i) raw.data()[i] = u(gen.rng());
    std::vector<bool> all_ok(100, true);
    for (const auto& p : head.programs) {
      const Tensor out = layer::apply(p, raw);
      for (Eigen::Index r = 0; r < out.rows(); ++r) {
        const std::vector<double> x(out.row(r).begin(), out.row(r).end());
        const bool ok = testing::oracle_eval(f, x);
        ++outputs;
        branch_ok += ok;
        if (!ok) all_ok[static_cast<std::size_t>(r)] = false;
      }
    }
    for (bool ok : all_ok) satisfied += ok;
    inputs += 100;
  }
  std::string rej;
  for (const auto& [k, v] : rejected) rej += fmt(" %s=%d", k.c_str(), v);
  return {satisfied == inputs && branch_ok == outputs,
          fmt("%ld/%ld inputs satisfied on every branch (%ld/%ld branch outputs) over %d formulas; "
              "skipped:%s",
              satisfied, inputs, branch_ok, outputs, formulas, rej.empty() ? " none" : rej.c_str())};
}

// 2. The DNF agrees with its source on random rational assignments.
Outcome dnf_equivalence() {
  testing::FormulaGen gen(20260102, {.vars = 3, .max_atoms = 6});
  long agree = 0, total = 0;
  std::size_t max_terms = 0;
  for (int i = 0; i < 500; ++i) {
    const logic::Formula f = gen.formula();
    const dnf::DnfFormula d = dnf::to_dnf(f);
    max_terms = std::max(max_terms, d.terms.size());
    for (int j = 0; j < 1000; ++j) {
      const auto a = gen.assignment();
      agree += logic::eval(f, a) == d.holds(a);
      ++total;
    }
  }
  return {agree == total, fmt("%ld/%ld assignments agree over 500 formulas (max %zu terms)", agree,
                              total, max_terms)};
}

// 3. Finite-difference checks at step 1e-5, tolerance 1e-4.
Outcome gradient_checks() {
  grad::FdOptions options;
  options.step = 1e-5;
  options.tol = 1e-4;
  std::mt19937_64 rng(20260103);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  auto random = [&](Eigen::Index r, Eigen::Index c) {
    Tensor t(r, c);
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = u(rng);
    return t;
  };
  double worst = 0.0;
  bool pass = true;
  std::vector<std::string> failed;
  auto check = [&](const std::string& name, const grad::ScalarFn& f, const Tensor& point) {
    const grad::FdReport r = grad::finite_diff_check(f, point, options);
    worst = std::max(worst, r.max_rel_error);
    if (!r.pass || r.checked == 0) {
      pass = false;
      failed.push_back(name);
    }
  };

  // (a) every step kind, including dependent and multiple bounds.
  const logic::VarOrder xy({"x", "y"});
  std::set<layer::TransformStep::Kind> kinds;
  for (const char* text : {"x > -1.5", "x <= 3", "x > 0.25 & x < 4", "x = 2 & y > x",
                           "x > -1 & x < 1 & y > x & y < 2 * x + 3", "y > x & y > -x & y < 5 - x"}) {
    const auto head = layer::compile_formula(logic::parse(text, xy), xy);
    for (const auto& p : head.programs) {
      for (const auto& s : p.steps) kinds.insert(s.kind);
      const Tensor weights = random(6, 2);
      check(text, [&](Tape& t, const Var& raw) {
        return grad::sum(grad::mul(layer::apply(p, raw), t.constant(weights)));
      }, random(6, 2));
    }
  }
  if (kinds.size() != 5) {
    pass = false;
    failed.push_back("step kind coverage");
  }

  // (b) single-sample VAE bound over [mean | mu | log_var].
  const Tensor x = random(4, 2);
  check("vae bound", [&](Tape& t, const Var& p) {
    const nets::GaussianPosterior post{grad::columns(p, 2, 3), grad::columns(p, 5, 3)};
    return grad::sum(nets::vae_elbo_term(t.constant(x), grad::columns(p, 0, 2), post, 0.5));
  }, random(4, 8));

  // (c) multiplex loss over [per-branch losses | gating logits], with and
  // without a prior over branches.
  const Tensor log_prior = (Tensor(1, 3) << std::log(0.5), std::log(0.3), std::log(0.2)).finished();
  check("multiplex loss", [&](Tape&, const Var& p) {
    return grad::sum(nets::multiplex_loss(grad::columns(p, 0, 3), nets::make_gating(grad::columns(p, 3, 3))));
  }, random(5, 6));
  check("multiplex loss with prior", [&](Tape& t, const Var& p) {
    return grad::sum(nets::multiplex_loss(grad::columns(p, 0, 3), nets::make_gating(grad::columns(p, 3, 3)),
                                          t.constant(log_prior)));
  }, random(5, 6));

  // (d) hierarchical loss over [class logits | group gating logits].
  const auto programs = layer::compile_group_margin({{0, 1, 2}, {3, 4, 5}, {6, 7, 8}}, 0.95);
  const std::vector<Eigen::Index> labels{0, 4, 8, 2, 6};
  check("hierarchical loss", [&](Tape&, const Var& p) {
    return grad::sum(nets::hierarchical_ce_loss(grad::columns(p, 0, 9), labels, programs,
                                                nets::make_gating(grad::columns(p, 9, 3))));
  }, random(5, 12));

  // End to end through every parameter of a multiplex VAE and a multiplex
  // classifier.
  auto check_params = [&](const std::string& name, const nets::ParameterStore& store, auto loss) {
    for (std::size_t i = 0; i < store.size(); ++i) {
      check(name + "/" + store.name(i), [&](Tape& t, const Var& p) {
        nets::Binding params = store.bind(t);
        params[i] = p;
        return grad::sum(loss(t, params));
      }, store.value(i));
    }
  };
  nets::VaeConfig vc;
  vc.latent = 3;
  vc.hidden = {6};
  const nets::VaeModel vae(
      layer::compile_formula(logic::parse("(x > 1 & x < 2 & y > -1 & y < 1) | (x < -1 & y > x + 0.5)", xy), xy),
      vc, 1);
  const Tensor noise = nets::normal_noise(4, 3, rng);
  check_params("vae", vae.params(), [&](Tape& t, const nets::Binding& p) {
    return vae.forward(p, t.constant(x), t.constant(noise)).objective;
  });
  nets::ClassifierConfig cc;
  cc.hidden = {6};
  cc.groups = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}};
  const nets::Classifier clf(nets::ClassifierKind::kMultiplex, cc, 2);
  const Tensor xc = random(5, 2);
  check_params("classifier", clf.params(), [&](Tape& t, const nets::Binding& p) {
    return clf.objective(p, t.constant(xc), labels);
  });

  std::string names;
  for (const auto& n : failed) names += " " + n;
  return {pass, fmt("max relative error %.3g (tol 1e-4, step 1e-5) over 5 step kinds, VAE bound, "
                    "multiplex loss, hierarchical loss and two full models%s%s",
                    worst, failed.empty() ? "" : "; failed:", names.c_str())};
}

// 4. Six-mode synthetic grid.
Outcome synthetic_grid() {
  ex::ExperimentConfig base = ex::default_config(ex::Experiment::kSynthetic);
  bool every_epoch = true, baseline_violates = true;
  std::string per_n;
  double mplex_1000 = 0.0, unaware_1000 = 0.0;
  for (std::size_t n : {100u, 250u, 500u, 1000u}) {
    std::map<std::string, std::vector<double>> elbo, sat;
    for (const char* model : {"multiplex", "unaware"}) {
      ex::ExperimentConfig c = base;
      c.n = n;
      c.model = model;
      for (std::uint64_t seed : {0u, 1u, 2u}) {
        const ex::RunResult r = ex::run_synthetic(c, seed);
        elbo[model].push_back(r.final_metrics.at("test_neg_elbo"));
        sat[model].push_back(r.final_metrics.at("test_satisfaction"));
        if (c.model == "multiplex") {
          for (const auto& row : r.report) every_epoch = every_epoch && row.satisfaction.value() == 1.0;
          every_epoch = every_epoch && r.final_metrics.at("prior_satisfaction") == 1.0;
        } else {
          baseline_violates = baseline_violates && r.final_metrics.at("test_satisfaction") < 1.0;
        }
      }
    }
    per_n += fmt(" N=%zu: %.3f vs %.3f (unaware sat %.3f);", n, mean(elbo["multiplex"]), mean(elbo["unaware"]),
                 mean(sat["unaware"]));
    if (n == 1000) {
      mplex_1000 = mean(elbo["multiplex"]);
      unaware_1000 = mean(elbo["unaware"]);
    }
  }
  per_n.pop_back();
  const bool pass = every_epoch && baseline_violates && mplex_1000 <= unaware_1000;
  return {pass, fmt("multiplex satisfaction 1 at every epoch: %s; unaware final satisfaction < 1 in every run: "
                    "%s; mean test neg-ELBO multiplex vs unaware:%s",
                    every_epoch ? "yes" : "no", baseline_violates ? "yes" : "no", per_n.c_str())};
}

// 5. Hierarchical toy.
Outcome hierarchy_toy() {
  ex::ExperimentConfig base = ex::default_config(ex::Experiment::kHierarchy);
  std::map<std::string, std::vector<double>> group_acc, class_acc;
  bool exact = true;
  for (const char* model : {"multiplex", "vanilla", "hierarchical"}) {
    ex::ExperimentConfig c = base;
    c.model = model;
    for (std::uint64_t seed : c.seeds) {
      const ex::RunResult r = ex::run_hierarchy(c, seed);
      group_acc[model].push_back(r.final_metrics.at("test_group_acc"));
      class_acc[model].push_back(r.final_metrics.at("test_class_acc"));
      if (c.model == "multiplex") {
        for (const auto& row : r.report) exact = exact && row.satisfaction.value() == 1.0;
      }
    }
  }
  // Bayes-optimal group accuracy on the same test set from the generator's
  // own class densities, as a reference for how much room there is.
  auto test_rng = ex::rng_stream(base.test_seed, 100);
  const ex::HierarchyData test = ex::gen_hierarchy(base.test_n, base.hierarchy, test_rng);
  std::size_t bayes_hits = 0;
  for (Eigen::Index i = 0; i < test.x.rows(); ++i) {
    std::vector<double> mass(test.groups.size(), 0.0);
    for (std::size_t g = 0; g < test.groups.size(); ++g) {
      for (std::size_t c : test.groups[g]) {
        const double d2 = (test.x.row(i) - test.class_centers.row(static_cast<Eigen::Index>(c))).squaredNorm();
        mass[g] += std::exp(-0.5 * d2 / (base.hierarchy.noise * base.hierarchy.noise));
      }
    }
    const auto best = std::max_element(mass.begin(), mass.end()) - mass.begin();
    bayes_hits += best == test.group[static_cast<std::size_t>(i)];
  }
  const double bayes = static_cast<double>(bayes_hits) / static_cast<double>(test.x.rows());
  const double pooled_sd = std::sqrt(0.5 * (sample_var(group_acc["multiplex"]) + sample_var(group_acc["vanilla"])));
  const double bar = mean(group_acc["vanilla"]) - pooled_sd;
  const bool pass = exact && mean(group_acc["multiplex"]) >= bar;
  return {pass, fmt("multiplex satisfaction 1 on every split and epoch: %s; group acc multiplex %.4f >= "
                    "vanilla mean - pooled sd %.4f (vanilla %.4f, Bayes-optimal %.4f, hierarchical %.4f); class acc "
                    "%.4f / %.4f / %.4f; %zu seeds",
                    exact ? "yes" : "no", mean(group_acc["multiplex"]), bar, mean(group_acc["vanilla"]), bayes,
                    mean(group_acc["hierarchical"]), mean(class_acc["multiplex"]), mean(class_acc["vanilla"]),
                    mean(class_acc["hierarchical"]), base.seeds.size())};
}

// 6. Structured-sum toy.
Outcome structsum_toy() {
  const ex::ExperimentConfig c = ex::default_config(ex::Experiment::kStructSum);
  const auto tuples = ex::enumerate_valid_assignments(c.structsum.base);
  bool identity = tuples.size() == c.structsum.base * c.structsum.base;
  for (const auto& t : tuples) identity = identity && t[0] + t[1] == t[2] * c.structsum.base + t[3];
  std::vector<ex::RunResult> runs;
  for (std::uint64_t seed : c.seeds) runs.push_back(ex::run_structsum(c, seed));
  const ex::Selection sel = ex::select_structsum(c, runs);
  const bool pass = identity && sel.test.labels >= 0.90;
  return {pass, fmt("B=%zu: %zu valid tuples, identity holds: %s; best of %zu seeds by validation neg-ELBO is "
                    "seed %llu (%.3f); held-out label accuracy %.4f >= 0.90, tuple accuracy %.4f",
                    c.structsum.base, tuples.size(), identity ? "yes" : "no", runs.size(),
                    static_cast<unsigned long long>(sel.seed), sel.validation_neg_elbo, sel.test.labels,
                    sel.test.tuples)};
}

// 7. Interval transform endpoints and monotonicity. Distances to the
// endpoints are measured on the offset form (output - a), which is the same
// composition evaluated without absorbing the tail into a or b.
Outcome interval_analytics() {
  std::mt19937_64 rng(20260107);
  std::uniform_real_distribution<double> lo(-100.0, 100.0), logw(-3.0, 3.0);
  int low_ok = 0, high_ok = 0, monotone = 0, inside = 0;
  double widest_high_ok = 0.0, narrowest_high_miss = INFINITY;
  for (int i = 0; i < 1000; ++i) {
    const double a = lo(rng);
    const double w = std::pow(10.0, logw(rng));
    const double b = a + w;
    low_ok += layer::interval_offset(-30.0, w) <= 1e-6 * w;
    const bool hi = w - layer::interval_offset(30.0, w) <= 1e-6 * w;
    high_ok += hi;
    if (hi) {
      widest_high_ok = std::max(widest_high_ok, w);
    } else {
      narrowest_high_miss = std::min(narrowest_high_miss, w);
    }
    bool up = true, in = true;
    double prev = -INFINITY;
    for (int j = 0; j <= 1000; ++j) {
      const double raw = -30.0 + 60.0 * j / 1000.0;
      const double v = layer::interval_offset(raw, w);
      up = up && v > prev;
      prev = v;
      const double direct = layer::interval_transform(raw, a, b);
      in = in && direct >= a && direct <= b;
    }
    monotone += up;
    inside += in;
  }
  const bool pass = low_ok == 1000 && high_ok == 1000 && monotone == 1000 && inside == 1000;
  return {pass, fmt("x=-30 within 1e-6*(b-a) of a: %d/1000; x=+30 within 1e-6*(b-a) of b: %d/1000 (widest "
                    "passing width %.4g, narrowest failing %.4g); strictly monotone on 1001 points: %d/1000; "
                    "inside [a, b]: %d/1000",
                    low_ok, high_ok, widest_high_ok, narrowest_high_miss, monotone, inside)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// 8. Repeated CLI runs write byte-identical report.csv files.
Outcome determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no --cli path given"};
  const auto root = std::filesystem::temp_directory_path() / fmt("mplex-acceptance-%d", static_cast<int>(::getpid()));
  std::filesystem::remove_all(root);
  int identical = 0, total = 0;
  std::string failed;
  for (const char* cmd : {"train-synthetic --epochs 3 --n 200", "train-structsum --epochs 2 --n 200",
                          "train-hierarchy --epochs 3 --n 270 --model multiplex",
                          "train-hierarchy --epochs 3 --n 270 --model vanilla"}) {
    std::string reports[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto out = root / fmt("%d-%d", total, rep);
      const std::string line = cli + " " + cmd + " --seed 3 --out " + out.string() + " > /dev/null";
      if (std::system(line.c_str()) != 0) return {false, std::string("command failed: ") + line};
      reports[rep] = slurp(out / "seed-3" / "report.csv");
    }
    ++total;
    if (!reports[0].empty() && reports[0] == reports[1]) {
      ++identical;
    } else {
      failed += fmt(" [%s]", cmd);
    }
  }
  std::filesystem::remove_all(root);
  return {identical == total, fmt("%d/%d train commands reproduced report.csv byte for byte%s", identical, total,
                                  failed.c_str())};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else {
      selected.insert(std::atoi(arg.c_str()));
    }
  }
  const std::vector<Criterion> criteria{
      {1, "output satisfaction", 120, output_satisfaction},
      {2, "dnf equivalence", 60, dnf_equivalence},
      {3, "gradient checks", 60, gradient_checks},
      {4, "synthetic grid", 900, synthetic_grid},
      {5, "hierarchical toy", 600, hierarchy_toy},
      {6, "structured-sum toy", 900, structsum_toy},
      {7, "interval analytics", 30, interval_analytics},
      {8, "determinism", 300, [&] { return determinism(cli); }},
  };
  bool all = true;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const Stopwatch watch;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double t = watch.seconds();
    const bool in_time = t < c.budget_seconds;
    const bool pass = o.pass && in_time;
    all = all && pass;
    std::printf("[%s] %d %s: %s; %.1fs (budget %.0fs)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), t,
                c.budget_seconds);
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
