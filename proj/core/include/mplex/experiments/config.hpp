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

// Experiment configuration, read from JSON. Every field has a default, so a
// config file only needs to name the experiment and what it changes.

#ifndef MPLEX_EXPERIMENTS_CONFIG_HPP_
#define MPLEX_EXPERIMENTS_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mplex/logic/formula.hpp"
#include "mplex/nets/adam.hpp"
#include "mplex/nets/mlp.hpp"

namespace mplex::experiments {

using logic::Rational;

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

// Axis-aligned box, one (low, high) pair per dimension with low < high.
struct BoxRegion {
  std::vector<std::pair<Rational, Rational>> bounds;
};

struct SyntheticSettings {
  logic::VarOrder order = logic::VarOrder({"x", "y"});
  std::vector<BoxRegion> data_boxes;
  std::vector<BoxRegion> constraint_boxes;
  // Replaces the box disjunction as the constraint when set.
  std::optional<std::string> formula;
  std::size_t prior_samples = 1000;
};

struct StructSumSettings {
  std::size_t base = 4;
  // Symbol clusters sit on a circle of this radius.
  double radius = 2.0;
  double spread = 0.2;
};

struct HierarchySettings {
  std::size_t groups = 3;
  std::size_t classes_per_group = 3;
  std::size_t dim = 2;
  double alpha = 0.95;
  double group_radius = 2.5;
  double class_radius = 1.0;
  double noise = 0.7;
};

enum class Experiment { kSynthetic, kStructSum, kHierarchy };

std::string_view experiment_name(Experiment e);
Experiment parse_experiment(std::string_view name);

struct ExperimentConfig {
  Experiment experiment = Experiment::kSynthetic;
  // synthetic: multiplex | unaware; hierarchy: multiplex | vanilla |
  // hierarchical; structsum: multiplex.
  std::string model = "multiplex";
  std::size_t n = 1000;
  std::size_t test_n = 1000;
  // The test set depends only on this seed, so it is shared across runs.
  std::uint64_t test_seed = 7919;
  std::vector<std::uint64_t> seeds = {0};
  // Training data seed. Unset: each run seed draws its own training data.
  // Set: every seed trains on the same data, as restarts do.
  std::optional<std::uint64_t> data_seed;
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  double validation_fraction = 0.1;
  nets::AdamOptions adam;

  std::size_t latent = 15;
  std::vector<std::size_t> hidden = {50};
  nets::Activation activation = nets::Activation::kTanh;
  double sigma = 0.1;
  // The likelihood scale decays geometrically from sigma_warmup_start to
  // sigma over this many epochs. Reports always use sigma.
  std::size_t sigma_warmup_epochs = 0;
  double sigma_warmup_start = 1.0;
  bool learn_prior = false;

  SyntheticSettings synthetic;
  StructSumSettings structsum;
  HierarchySettings hierarchy;
};

// Defaults for one experiment, including the built-in six-mode geometry.
ExperimentConfig default_config(Experiment e);
// Unknown keys are rejected so that typos do not pass silently.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);
// Complete config as JSON, readable by parse_config.
std::string config_json(const ExperimentConfig& config);
// Throws ConfigError when the config breaks an invariant.
void validate(const ExperimentConfig& config);

// Shortest decimal that reads back as value, e.g. 0.1 -> 1/10.
Rational decimal_rational(double value);

}  // namespace mplex::experiments

#endif  // MPLEX_EXPERIMENTS_CONFIG_HPP_
