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

#include "mplex/experiments/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mplex/grad/ops.hpp"
#include "mplex/layer/program.hpp"
#include "mplex/nets/adam.hpp"
#include "mplex/nets/models.hpp"

namespace mplex::experiments {

namespace {

using grad::Tape;
using grad::Var;
using nets::Binding;
using Clock = std::chrono::steady_clock;

Tensor take(const Tensor& m, std::span<const Eigen::Index> rows) {
  Tensor out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

template <typename T>
std::vector<T> take(const std::vector<T>& v, std::span<const Eigen::Index> rows) {
  std::vector<T> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(v[static_cast<std::size_t>(r)]);
  return out;
}

std::uint64_t init_seed(std::uint64_t seed) { return rng_stream(seed, 3)(); }

// One pass over the shuffled training rows with the mean loss per batch.
template <typename LossFn>
void train_epoch(nets::ParameterStore& store, nets::Adam& opt, std::vector<Eigen::Index>& rows,
                 std::size_t batch_size, std::mt19937_64& rng, LossFn&& loss) {
  std::shuffle(rows.begin(), rows.end(), rng);
  for (std::size_t start = 0; start < rows.size(); start += batch_size) {
    const std::span<const Eigen::Index> batch(rows.data() + start, std::min(batch_size, rows.size() - start));
    Tape tape;
    const Binding params = store.bind(tape);
    const Var l = grad::mean(loss(tape, params, batch));
    opt.step(store, store.gradients(tape.backward(l), params));
  }
}

std::vector<Eigen::Index> all_rows(std::size_t n) {
  std::vector<Eigen::Index> out(n);
  std::iota(out.begin(), out.end(), Eigen::Index{0});
  return out;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Last report row of a split.
const ReportRow* last_row(const std::vector<ReportRow>& rows, const std::string& split) {
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (it->split == split) return &*it;
  }
  return nullptr;
}

void add_final(RunResult& r, const std::string& split) {
  if (const ReportRow* row = last_row(r.report, split)) {
    r.final_metrics[split + "_neg_elbo"] = row->neg_elbo;
    if (row->satisfaction) r.final_metrics[split + "_satisfaction"] = *row->satisfaction;
    if (row->class_acc) r.final_metrics[split + "_class_acc"] = *row->class_acc;
    if (row->group_acc) r.final_metrics[split + "_group_acc"] = *row->group_acc;
  }
}

ReportRow eval_vae(const nets::VaeModel& model, const Tensor& x, std::string split, std::size_t epoch,
                   std::mt19937_64& rng) {
  ReportRow row;
  row.epoch = epoch;
  row.split = std::move(split);
  Tape tape;
  const Binding params = model.params().bind(tape);
  const Tensor noise = nets::normal_noise(x.rows(), static_cast<Eigen::Index>(model.config().latent), rng);
  row.neg_elbo = model.forward(params, tape.constant(x), tape.constant(noise)).neg_elbo.value().mean();
  row.satisfaction = satisfaction_rate(model.reconstruct(x, rng), model.formula(), model.order());
  return row;
}

bool sum_identity(const LabelTuple& t, std::size_t base) {
  return t[0] < base && t[1] < base && t[3] < base && t[0] + t[1] == t[2] * base + t[3];
}

ReportRow eval_structsum(const nets::StructSumModel& model, const nets::ItemBatch& items, std::string split,
                         std::size_t epoch, std::mt19937_64& rng) {
  ReportRow row;
  row.epoch = epoch;
  row.split = std::move(split);
  const Eigen::Index n = items[0].rows();
  Tape tape;
  const Binding params = model.params().bind(tape);
  const Tensor noise = nets::normal_noise(4 * n, static_cast<Eigen::Index>(model.config().latent), rng);
  row.neg_elbo = model.forward(params, items, tape.constant(noise)).neg_elbo.value().mean();
  const auto inferred = model.infer(items);
  const auto ok = std::count_if(inferred.begin(), inferred.end(),
                                [&](const LabelTuple& t) { return sum_identity(t, model.config().base); });
  row.satisfaction = static_cast<double>(ok) / static_cast<double>(n);
  return row;
}

ReportRow eval_classifier(const nets::Classifier& model, const Tensor& x, const std::vector<Eigen::Index>& cls,
                          std::string split, std::size_t epoch) {
  ReportRow row;
  row.epoch = epoch;
  row.split = std::move(split);
  Tape tape;
  const Binding params = model.params().bind(tape);
  row.neg_elbo = model.objective(params, tape.constant(x), cls).value().mean();
  const auto p = model.predict(x);
  std::size_t sat = 0, class_ok = 0, group_ok = 0;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    const auto truth = static_cast<std::size_t>(cls[i]);
    sat += p.satisfied[i] ? 1 : 0;
    class_ok += p.cls[i] == truth ? 1 : 0;
    group_ok += p.group[i] == model.group_of(truth) ? 1 : 0;
  }
  const auto n = static_cast<double>(cls.size());
  row.satisfaction = static_cast<double>(sat) / n;
  row.class_acc = static_cast<double>(class_ok) / n;
  row.group_acc = static_cast<double>(group_ok) / n;
  return row;
}

std::string optional_cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace

std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> split_indices(std::size_t n, double fraction,
                                                                                std::mt19937_64& rng) {
  std::vector<Eigen::Index> rows = all_rows(n);
  std::shuffle(rows.begin(), rows.end(), rng);
  auto held = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (fraction > 0.0 && n > 1) held = std::clamp<std::size_t>(held, 1, n - 1);
  if (held >= n) held = 0;
  std::vector<Eigen::Index> validation(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(held));
  std::vector<Eigen::Index> train(rows.begin() + static_cast<std::ptrdiff_t>(held), rows.end());
  return {std::move(train), std::move(validation)};
}

double training_sigma(const ExperimentConfig& config, std::size_t epoch) {
  const std::size_t w = config.sigma_warmup_epochs;
  if (w == 0 || epoch > w) return config.sigma;
  const double progress = static_cast<double>(epoch - 1) / static_cast<double>(w);
  return config.sigma_warmup_start * std::pow(config.sigma / config.sigma_warmup_start, progress);
}

std::string report_csv(std::span<const ReportRow> rows) {
  std::string out = "epoch,split,neg_elbo,satisfaction,class_acc,group_acc\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,", r.epoch);
    out += buf;
    out += r.split;
    std::snprintf(buf, sizeof buf, ",%.9g,", r.neg_elbo);
    out += buf;
    out += optional_cell(r.satisfaction) + "," + optional_cell(r.class_acc) + "," + optional_cell(r.group_acc) + "\n";
  }
  return out;
}

RunResult run_synthetic(const ExperimentConfig& config, std::uint64_t seed) {
  validate(config);
  if (config.experiment != Experiment::kSynthetic) throw ConfigError("not a synthetic config");
  const auto t0 = Clock::now();
  const SyntheticSettings& s = config.synthetic;
  const logic::Formula formula = synthetic_formula(s);
  const std::uint64_t data_seed = config.data_seed.value_or(seed);
  auto data_rng = rng_stream(data_seed, 1);
  auto split_rng = rng_stream(data_seed, 2);
  auto test_rng = rng_stream(config.test_seed, 100);
  const Tensor data = gen_six_mode(config.n, s, data_rng);
  auto [train, validation] = split_indices(config.n, config.validation_fraction, split_rng);
  const Tensor test = gen_six_mode(config.test_n, s, test_rng);
  const Tensor val_x = take(data, validation);

  nets::VaeConfig vc;
  vc.latent = config.latent;
  vc.hidden = config.hidden;
  vc.activation = config.activation;
  vc.sigma = config.sigma;
  vc.learn_prior = config.learn_prior;
  nets::VaeModel model =
      config.model == "multiplex"
          ? nets::VaeModel(layer::compile_formula(formula, s.order), vc, init_seed(seed))
          : nets::VaeModel::unaware(formula, s.order, vc, init_seed(seed));
  nets::Adam opt(model.params(), config.adam);
  auto batch_rng = rng_stream(seed, 4);
  auto noise_rng = rng_stream(seed, 5);
  const auto latent = static_cast<Eigen::Index>(config.latent);

  RunResult result;
  result.experiment = config.experiment;
  result.model = config.model;
  result.seed = seed;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const double sigma = training_sigma(config, epoch);
    train_epoch(model.params(), opt, train, config.batch_size, batch_rng,
                [&](Tape& tape, const Binding& params, std::span<const Eigen::Index> rows) {
                  const Tensor noise = nets::normal_noise(static_cast<Eigen::Index>(rows.size()), latent, noise_rng);
                  return model.forward(params, tape.constant(take(data, rows)), tape.constant(noise), sigma).objective;
                });
    auto eval_rng = rng_stream(seed, 1000 + epoch);
    if (!validation.empty()) result.report.push_back(eval_vae(model, val_x, "validation", epoch, eval_rng));
    result.report.push_back(eval_vae(model, test, "test", epoch, eval_rng));
  }
  add_final(result, "validation");
  add_final(result, "test");

  auto sample_rng = rng_stream(seed, 7);
  auto recon_rng = rng_stream(seed, 8);
  result.samples = model.sample_prior(s.prior_samples, sample_rng);
  result.reconstructions = model.reconstruct(test, recon_rng);
  result.sample_columns = s.order.names();
  result.final_metrics["prior_satisfaction"] = satisfaction_rate(result.samples, formula, s.order);
  result.final_metrics["branches"] = static_cast<double>(model.k());
  result.final_metrics["log_k"] = model.constrained() ? std::log(static_cast<double>(model.k())) : 0.0;
  result.final_metrics["parameters"] = static_cast<double>(model.params().scalar_count());
  result.checkpoint = model.serialize(seed);
  result.wall_seconds = seconds_since(t0);
  return result;
}

RunResult run_structsum(const ExperimentConfig& config, std::uint64_t seed) {
  validate(config);
  if (config.experiment != Experiment::kStructSum) throw ConfigError("not a structsum config");
  const auto t0 = Clock::now();
  const std::uint64_t data_seed = config.data_seed.value_or(seed);
  auto data_rng = rng_stream(data_seed, 1);
  auto split_rng = rng_stream(data_seed, 2);
  auto test_rng = rng_stream(config.test_seed, 100);
  const StructSumData data = gen_struct_sum(config.n, config.structsum, data_rng);
  auto [train, validation] = split_indices(config.n, config.validation_fraction, split_rng);
  const StructSumData test = gen_struct_sum(config.test_n, config.structsum, test_rng);
  const nets::ItemBatch val_items = data.rows(validation);

  nets::StructSumConfig sc;
  sc.base = config.structsum.base;
  sc.data_dim = 2;
  sc.latent = config.latent;
  sc.hidden = config.hidden;
  sc.activation = config.activation;
  sc.sigma = config.sigma;
  nets::StructSumModel model(sc, enumerate_valid_assignments(sc.base), init_seed(seed));
  nets::Adam opt(model.params(), config.adam);
  auto batch_rng = rng_stream(seed, 4);
  auto noise_rng = rng_stream(seed, 5);
  const auto latent = static_cast<Eigen::Index>(config.latent);

  RunResult result;
  result.experiment = config.experiment;
  result.model = config.model;
  result.seed = seed;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const double sigma = training_sigma(config, epoch);
    train_epoch(model.params(), opt, train, config.batch_size, batch_rng,
                [&](Tape& tape, const Binding& params, std::span<const Eigen::Index> rows) {
                  const auto b = static_cast<Eigen::Index>(rows.size());
                  const Tensor noise = nets::normal_noise(4 * b, latent, noise_rng);
                  return model.forward(params, data.rows(rows), tape.constant(noise), sigma).objective;
                });
    auto eval_rng = rng_stream(seed, 1000 + epoch);
    if (!validation.empty()) result.report.push_back(eval_structsum(model, val_items, "validation", epoch, eval_rng));
    result.report.push_back(eval_structsum(model, test.items, "test", epoch, eval_rng));
  }
  add_final(result, "validation");
  add_final(result, "test");
  result.final_metrics["log_h"] = std::log(static_cast<double>(model.table().tuples.size()));
  result.final_metrics["parameters"] = static_cast<double>(model.params().scalar_count());
  result.checkpoint = model.serialize(seed);
  result.wall_seconds = seconds_since(t0);
  return result;
}

RunResult run_hierarchy(const ExperimentConfig& config, std::uint64_t seed) {
  validate(config);
  if (config.experiment != Experiment::kHierarchy) throw ConfigError("not a hierarchy config");
  const auto t0 = Clock::now();
  const std::uint64_t data_seed = config.data_seed.value_or(seed);
  auto data_rng = rng_stream(data_seed, 1);
  auto split_rng = rng_stream(data_seed, 2);
  auto test_rng = rng_stream(config.test_seed, 100);
  const HierarchyData data = gen_hierarchy(config.n, config.hierarchy, data_rng);
  auto [train, validation] = split_indices(config.n, config.validation_fraction, split_rng);
  const HierarchyData test = gen_hierarchy(config.test_n, config.hierarchy, test_rng);
  const Tensor val_x = take(data.x, validation);
  const std::vector<Eigen::Index> val_cls = take(data.cls, validation);

  nets::ClassifierConfig cc;
  cc.input_dim = config.hierarchy.dim;
  cc.hidden = config.hidden;
  cc.activation = config.activation;
  cc.groups = data.groups;
  cc.alpha = config.hierarchy.alpha;
  nets::Classifier model(nets::parse_classifier_kind(config.model), cc, init_seed(seed));
  nets::Adam opt(model.params(), config.adam);
  auto batch_rng = rng_stream(seed, 4);

  RunResult result;
  result.experiment = config.experiment;
  result.model = config.model;
  result.seed = seed;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    train_epoch(model.params(), opt, train, config.batch_size, batch_rng,
                [&](Tape& tape, const Binding& params, std::span<const Eigen::Index> rows) {
                  const std::vector<Eigen::Index> labels = take(data.cls, rows);
                  return model.objective(params, tape.constant(take(data.x, rows)), labels);
                });
    if (!validation.empty()) result.report.push_back(eval_classifier(model, val_x, val_cls, "validation", epoch));
    result.report.push_back(eval_classifier(model, test.x, test.cls, "test", epoch));
  }
  add_final(result, "validation");
  add_final(result, "test");
  result.final_metrics["parameters"] = static_cast<double>(model.params().scalar_count());
  result.checkpoint = model.serialize(seed);
  result.wall_seconds = seconds_since(t0);
  return result;
}

RunResult run(const ExperimentConfig& config, std::uint64_t seed) {
  switch (config.experiment) {
    case Experiment::kSynthetic: return run_synthetic(config, seed);
    case Experiment::kStructSum: return run_structsum(config, seed);
    case Experiment::kHierarchy: return run_hierarchy(config, seed);
  }
  throw ConfigError("unknown experiment");
}

Selection select_structsum(const ExperimentConfig& config, std::span<const RunResult> runs) {
  if (runs.empty()) throw Error("no runs to select from");
  Selection sel;
  bool found = false;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto it = runs[i].final_metrics.find("validation_neg_elbo");
    if (it == runs[i].final_metrics.end()) throw Error("run has no validation score; set validation_fraction > 0");
    if (!found || it->second < sel.validation_neg_elbo) {
      sel.index = i;
      sel.seed = runs[i].seed;
      sel.validation_neg_elbo = it->second;
      found = true;
    }
  }
  const nets::StructSumModel model = nets::StructSumModel::deserialize(runs[sel.index].checkpoint);
  auto test_rng = rng_stream(config.test_seed, 100);
  const StructSumData test = gen_struct_sum(config.test_n, config.structsum, test_rng);
  const auto inferred = model.infer(test.items);
  sel.test = SealedKey::score(test, inferred);
  return sel;
}

std::string samples_csv(const Tensor& samples, const std::vector<std::string>& columns) {
  if (samples.cols() != static_cast<Eigen::Index>(columns.size())) throw Error("column count mismatch");
  std::string out;
  for (std::size_t j = 0; j < columns.size(); ++j) out += (j ? "," : "") + columns[j];
  out += "\n";
  char buf[40];
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    for (Eigen::Index j = 0; j < samples.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%s%.17g", j ? "," : "", samples(i, j));
      out += buf;
    }
    out += "\n";
  }
  return out;
}

Tensor read_samples_csv(const std::string& text, std::vector<std::string>* columns) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error("CSV is empty");
  std::vector<std::string> header;
  {
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
      header.push_back(cell);
    }
  }
  std::vector<double> values;
  std::size_t rows = 0, lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream cells(line);
    std::string cell;
    std::size_t count = 0;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      while (end && (*end == ' ' || *end == '\r')) ++end;
      if (end == cell.c_str() || (end && *end != '\0')) {
        throw Error("line " + std::to_string(lineno) + ": '" + cell + "' is not a number");
      }
      values.push_back(v);
      ++count;
    }
    if (count != header.size()) {
      throw Error("line " + std::to_string(lineno) + " has " + std::to_string(count) + " fields, expected " +
                  std::to_string(header.size()));
    }
    ++rows;
  }
  Tensor out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(header.size()));
  for (std::size_t i = 0, n = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < header.size(); ++j, ++n) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[n];
    }
  }
  if (columns) *columns = std::move(header);
  return out;
}

void write_run(const std::filesystem::path& dir, const ExperimentConfig& config, const RunResult& result) {
  std::filesystem::create_directories(dir);
  write_file(dir / "report.csv", report_csv(result.report));
  write_file(dir / "checkpoint.json", result.checkpoint);
  nlohmann::json files = {"report.csv", "checkpoint.json"};
  if (result.samples.size() > 0) {
    write_file(dir / "samples.csv", samples_csv(result.samples, result.sample_columns));
    files.push_back("samples.csv");
  }
  if (result.reconstructions.size() > 0) {
    write_file(dir / "reconstructions.csv", samples_csv(result.reconstructions, result.sample_columns));
    files.push_back("reconstructions.csv");
  }
  nlohmann::json j;
  j["experiment"] = std::string(experiment_name(result.experiment));
  j["model"] = result.model;
  j["seed"] = result.seed;
  j["config"] = nlohmann::json::parse(config_json(config));
  j["final_metrics"] = result.final_metrics;
  j["wall_seconds"] = result.wall_seconds;
  j["files"] = files;
  write_file(dir / "run.json", j.dump(2) + "\n");
}

}  // namespace mplex::experiments
