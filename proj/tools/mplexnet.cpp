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

// Command line front end: formula inspection, training runs, sampling from
// checkpoints and satisfaction checks of sample files.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mplex/dnf/dnf.hpp"
#include "mplex/experiments/config.hpp"
#include "mplex/experiments/data.hpp"
#include "mplex/experiments/train.hpp"
#include "mplex/layer/program.hpp"
#include "mplex/logic/parser.hpp"
#include "mplex/nets/models.hpp"

namespace {

using namespace mplex;
namespace fs = std::filesystem;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// "@file" reads the formula from a file.
std::string formula_text(const std::string& arg) {
  return !arg.empty() && arg[0] == '@' ? read_text(arg.substr(1)) : arg;
}

logic::VarOrder order_for(const std::string& vars, const std::string& text) {
  if (!vars.empty()) return logic::VarOrder::from_csv(vars);
  // Without an explicit order, variables are taken in order of appearance.
  return logic::VarOrder(logic::scan_identifiers(text));
}

struct TrainArgs {
  std::string config;
  std::vector<std::uint64_t> seeds;
  std::size_t epochs = 0;
  std::size_t n = 0;
  std::string model;
  std::string out = "runs";
};

experiments::ExperimentConfig resolve(experiments::Experiment e, const TrainArgs& a) {
  experiments::ExperimentConfig c =
      a.config.empty() ? experiments::default_config(e) : experiments::load_config(a.config);
  if (c.experiment != e) {
    throw experiments::ConfigError("config is for the " + std::string(experiments::experiment_name(c.experiment)) +
                                   " experiment");
  }
  if (!a.seeds.empty()) c.seeds = a.seeds;
  if (a.epochs) c.epochs = a.epochs;
  if (a.n) c.n = a.n;
  if (!a.model.empty()) c.model = a.model;
  experiments::validate(c);
  return c;
}

void print_metrics(const experiments::RunResult& r) {
  std::printf("seed %llu:", static_cast<unsigned long long>(r.seed));
  for (const auto& [k, v] : r.final_metrics) std::printf(" %s=%.6g", k.c_str(), v);
  std::printf(" (%.1fs)\n", r.wall_seconds);
}

int train(experiments::Experiment e, const TrainArgs& a) {
  const auto config = resolve(e, a);
  const fs::path out(a.out);
  std::vector<experiments::RunResult> runs;
  nlohmann::json summary;
  summary["experiment"] = std::string(experiments::experiment_name(e));
  summary["model"] = config.model;
  summary["runs"] = nlohmann::json::array();
  for (auto seed : config.seeds) {
    runs.push_back(experiments::run(config, seed));
    const auto& r = runs.back();
    experiments::write_run(out / ("seed-" + std::to_string(seed)), config, r);
    print_metrics(r);
    summary["runs"].push_back({{"seed", seed}, {"final_metrics", r.final_metrics}, {"wall_seconds", r.wall_seconds}});
  }
  if (e == experiments::Experiment::kStructSum) {
    const auto sel = experiments::select_structsum(config, runs);
    std::printf("selected seed %llu (validation neg_elbo %.6g): test label accuracy %.4f, tuple accuracy %.4f\n",
                static_cast<unsigned long long>(sel.seed), sel.validation_neg_elbo, sel.test.labels, sel.test.tuples);
    summary["selection"] = {{"seed", sel.seed},
                            {"validation_neg_elbo", sel.validation_neg_elbo},
                            {"test_label_accuracy", sel.test.labels},
                            {"test_tuple_accuracy", sel.test.tuples}};
  }
  std::ofstream(out / "summary.json") << summary.dump(2) << "\n";
  return 0;
}

int show_dnf(const std::string& formula, const std::string& vars, std::size_t max_terms) {
  const std::string text = formula_text(formula);
  const auto order = order_for(vars, text);
  dnf::DnfOptions options;
  if (max_terms) options.max_terms = max_terms;
  const auto d = dnf::to_dnf(logic::parse(text, order), options);
  std::printf("%zu term%s\n", d.terms.size(), d.terms.size() == 1 ? "" : "s");
  for (const auto& t : d.terms) std::printf("  %s\n", dnf::print(t).c_str());
  return 0;
}

int compile(const std::string& formula, const std::string& vars) {
  const std::string text = formula_text(formula);
  const auto order = order_for(vars, text);
  const auto head = layer::compile_formula(logic::parse(text, order), order);
  std::printf("%zu branch%s over (", head.k(), head.k() == 1 ? "" : "es");
  for (std::size_t i = 0; i < order.size(); ++i) std::printf("%s%s", i ? ", " : "", order.names()[i].c_str());
  std::printf(")\n");
  for (std::size_t k = 0; k < head.k(); ++k) {
    std::printf("branch %zu: %s\n%s", k, dnf::print(head.programs[k].term).c_str(),
                layer::describe(head.programs[k]).c_str());
  }
  return 0;
}

int sample(const std::string& checkpoint, std::size_t n, std::uint64_t seed, const std::string& out) {
  const std::string text = read_text(checkpoint);
  if (nets::checkpoint_model(text) != "vae") throw Error("sampling needs a synthetic (VAE) checkpoint");
  const auto model = nets::VaeModel::deserialize(text);
  auto rng = experiments::rng_stream(seed, 7);
  const std::string csv = experiments::samples_csv(model.sample_prior(n, rng), model.order().names());
  if (out.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    std::ofstream(out, std::ios::binary) << csv;
  }
  return 0;
}

int check(const std::string& formula, const std::string& csv, const std::string& vars) {
  std::vector<std::string> columns;
  const auto samples = experiments::read_samples_csv(read_text(csv), &columns);
  const auto order = vars.empty() ? logic::VarOrder(columns) : logic::VarOrder::from_csv(vars);
  const auto f = logic::parse(formula_text(formula), order);
  const double rate = experiments::satisfaction_rate(samples, f, order);
  const auto ok = static_cast<long long>(std::llround(rate * static_cast<double>(samples.rows())));
  std::printf("satisfied %lld/%lld (%.6f)\n", ok, static_cast<long long>(samples.rows()), rate);
  return rate == 1.0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constraint-satisfying output layers: formula tools and experiments"};
  app.require_subcommand(1);

  std::string formula, vars, csv, checkpoint, out;
  std::size_t max_terms = 0, n = 1000;
  std::uint64_t seed = 0;

  auto* dnf_cmd = app.add_subcommand("show-dnf", "Print the disjunctive normal form of a formula");
  dnf_cmd->add_option("-f,--formula", formula, "Formula text, or @file")->required();
  dnf_cmd->add_option("--vars", vars, "Variable order, comma separated (default: order of appearance)");
  dnf_cmd->add_option("--max-terms", max_terms, "Term budget for the conversion");

  auto* compile_cmd = app.add_subcommand("compile", "Show the transform program of every feasible branch");
  compile_cmd->add_option("-f,--formula", formula, "Formula text, or @file")->required();
  compile_cmd->add_option("--vars", vars, "Variable order, comma separated (default: order of appearance)");

  TrainArgs targs;
  const auto add_train = [&](const char* name, const char* help) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("-c,--config", targs.config, "Experiment config (JSON); defaults are built in")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", targs.seeds, "Run seed(s); replaces the config's seeds");
    cmd->add_option("--epochs", targs.epochs, "Override the epoch count");
    cmd->add_option("--n", targs.n, "Override the training set size");
    cmd->add_option("--model", targs.model, "Override the model kind");
    cmd->add_option("-o,--out", targs.out, "Output directory")->capture_default_str();
    return cmd;
  };
  auto* syn_cmd = add_train("train-synthetic", "Constrained VAE on the six-mode data (or the unaware baseline)");
  auto* sum_cmd = add_train("train-structsum", "Structured-sum VAE; best run selected by validation bound");
  auto* hier_cmd = add_train("train-hierarchy", "Group-margin, vanilla or hierarchical classifier");

  auto* sample_cmd = app.add_subcommand("sample", "Draw prior samples from a VAE checkpoint");
  sample_cmd->add_option("--checkpoint", checkpoint, "checkpoint.json of a synthetic run")
      ->required()
      ->check(CLI::ExistingFile);
  sample_cmd->add_option("--n", n, "Number of samples")->capture_default_str();
  sample_cmd->add_option("--seed", seed, "Sampling seed")->capture_default_str();
  sample_cmd->add_option("-o,--out", out, "Write CSV here instead of stdout");

  auto* check_cmd = app.add_subcommand("check", "Fraction of CSV rows that satisfy a formula (exit 1 unless all)");
  check_cmd->add_option("-f,--formula", formula, "Formula text, or @file")->required();
  check_cmd->add_option("--csv", csv, "Samples with a header row of variable names")
      ->required()
      ->check(CLI::ExistingFile);
  check_cmd->add_option("--vars", vars, "Variable order (default: the CSV header)");

  std::string experiment = "synthetic";
  auto* config_cmd = app.add_subcommand("print-config", "Print the built-in config of an experiment as JSON");
  config_cmd->add_option("experiment", experiment, "synthetic, structsum or hierarchy")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (dnf_cmd->parsed()) return show_dnf(formula, vars, max_terms);
    if (compile_cmd->parsed()) return compile(formula, vars);
    if (syn_cmd->parsed()) return train(experiments::Experiment::kSynthetic, targs);
    if (sum_cmd->parsed()) return train(experiments::Experiment::kStructSum, targs);
    if (hier_cmd->parsed()) return train(experiments::Experiment::kHierarchy, targs);
    if (sample_cmd->parsed()) return sample(checkpoint, n, seed, out);
    if (check_cmd->parsed()) return check(formula, csv, vars);
    if (config_cmd->parsed()) {
      std::printf("%s\n", experiments::config_json(experiments::default_config(experiments::parse_experiment(experiment))).c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
