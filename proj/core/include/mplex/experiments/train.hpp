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

// Training loops, per-epoch reports and run outputs for the three
// experiments. Each run is single-threaded and fully determined by its
// config and seed.

#ifndef MPLEX_EXPERIMENTS_TRAIN_HPP_
#define MPLEX_EXPERIMENTS_TRAIN_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mplex/experiments/config.hpp"
#include "mplex/experiments/data.hpp"

namespace mplex::experiments {

// One line of report.csv. Columns that do not apply to an experiment are
// left empty. For classifiers neg_elbo holds the held-out training objective.
struct ReportRow {
  std::size_t epoch = 0;
  std::string split;
  double neg_elbo = 0.0;
  std::optional<double> satisfaction;
  std::optional<double> class_acc;
  std::optional<double> group_acc;
};

std::string report_csv(std::span<const ReportRow> rows);

struct RunResult {
  Experiment experiment = Experiment::kSynthetic;
  std::string model;
  std::uint64_t seed = 0;
  std::vector<ReportRow> report;
  std::map<std::string, double> final_metrics;
  std::string checkpoint;
  // Prior samples and posterior reconstructions of the test set; empty for
  // experiments without a generative output space.
  Tensor samples;
  Tensor reconstructions;
  std::vector<std::string> sample_columns;
  double wall_seconds = 0.0;
};

// Generator seeded from (seed, stream) so that each purpose draws from its
// own sequence.
std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t stream);

// Shuffled split of n indices into (train, validation). Validation gets
// round(fraction * n) rows, at least one when fraction > 0 and n > 1.
std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> split_indices(std::size_t n, double fraction,
                                                                                std::mt19937_64& rng);

// Likelihood scale used for training in the given (1-based) epoch.
double training_sigma(const ExperimentConfig& config, std::size_t epoch);

RunResult run_synthetic(const ExperimentConfig& config, std::uint64_t seed);
RunResult run_structsum(const ExperimentConfig& config, std::uint64_t seed);
RunResult run_hierarchy(const ExperimentConfig& config, std::uint64_t seed);
RunResult run(const ExperimentConfig& config, std::uint64_t seed);

// Picks the structured-sum run with the lowest final validation neg_elbo and
// only then scores its inferred labels against the sealed test key.
struct Selection {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double validation_neg_elbo = 0.0;
  SealedKey::Accuracy test;
};
Selection select_structsum(const ExperimentConfig& config, std::span<const RunResult> runs);

// report.csv, run.json, checkpoint.json and, where present, samples.csv and
// reconstructions.csv under dir.
void write_run(const std::filesystem::path& dir, const ExperimentConfig& config, const RunResult& result);

// One sample per row with a var_order header; values printed with %.17g.
std::string samples_csv(const Tensor& samples, const std::vector<std::string>& columns);
// Reads a header line and numeric rows.
Tensor read_samples_csv(const std::string& text, std::vector<std::string>* columns = nullptr);

}  // namespace mplex::experiments

#endif  // MPLEX_EXPERIMENTS_TRAIN_HPP_
