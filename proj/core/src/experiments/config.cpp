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

#include "mplex/experiments/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mplex::experiments {

namespace {

using nlohmann::json;

BoxRegion box(const char* x0, const char* x1, const char* y0, const char* y1) {
  const auto q = [](const char* s) {
    const bool negative = s[0] == '-';
    Rational r = *logic::parse_decimal(negative ? s + 1 : s);
    return negative ? Rational(-r) : r;
  };
  return {{{q(x0), q(x1)}, {q(y0), q(y1)}}};
}

// Six data modes inside eight constraint boxes on [-3, 3]^2. The last two
// constraint boxes are tall and hold no data.
void six_mode_geometry(SyntheticSettings& s) {
  s.constraint_boxes = {
      box("-3", "-1.5", "1.5", "3"),     box("1.5", "3", "1.5", "3"),
      box("-3", "-1.5", "-3", "-1.5"),   box("1.5", "3", "-3", "-1.5"),
      box("-1", "1", "0.5", "1.5"),      box("-1", "1", "-1.5", "-0.5"),
      box("-2.5", "-2", "-1", "1"),      box("2", "2.5", "-1", "1"),
  };
  s.data_boxes = {
      box("-2.8", "-1.7", "1.8", "2.8"), box("1.6", "2.4", "1.6", "2.9"),
      box("-2.9", "-1.6", "-2.5", "-1.6"), box("1.7", "2.9", "-2.9", "-1.7"),
      box("-0.9", "0.9", "0.6", "1.2"),  box("-0.9", "0.9", "-1.4", "-0.6"),
  };
}

Rational json_rational(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const bool negative = !s.empty() && s[0] == '-';
    const auto r = logic::parse_decimal(negative ? std::string_view(s).substr(1) : std::string_view(s));
    if (!r) throw ConfigError("'" + s + "' is not a decimal number");
    return negative ? Rational(-*r) : *r;
  }
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_number()) return decimal_rational(j.get<double>());
  throw ConfigError("expected a number, got " + j.dump());
}

std::vector<BoxRegion> json_boxes(const json& j) {
  std::vector<BoxRegion> out;
  for (const auto& b : j) {
    BoxRegion r;
    for (const auto& range : b) {
      if (!range.is_array() || range.size() != 2) throw ConfigError("a box range must be [low, high]");
      r.bounds.emplace_back(json_rational(range[0]), json_rational(range[1]));
    }
    out.push_back(std::move(r));
  }
  return out;
}

json boxes_json(const std::vector<BoxRegion>& boxes) {
  json out = json::array();
  for (const auto& b : boxes) {
    json ranges = json::array();
    for (const auto& [lo, hi] : b.bounds) ranges.push_back({logic::to_string(lo), logic::to_string(hi)});
    out.push_back(ranges);
  }
  return out;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

Rational decimal_rational(double value) {
  if (!std::isfinite(value)) throw ConfigError("non-finite number");
  std::array<char, 400> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), std::abs(value), std::chars_format::fixed);
  const auto r = logic::parse_decimal(std::string_view(buf.data(), static_cast<std::size_t>(res.ptr - buf.data())));
  return value < 0 ? Rational(-*r) : *r;
}

std::string_view experiment_name(Experiment e) {
  switch (e) {
    case Experiment::kSynthetic: return "synthetic";
    case Experiment::kStructSum: return "structsum";
    case Experiment::kHierarchy: return "hierarchy";
  }
  return "?";
}

Experiment parse_experiment(std::string_view name) {
  for (auto e : {Experiment::kSynthetic, Experiment::kStructSum, Experiment::kHierarchy}) {
    if (experiment_name(e) == name) return e;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::kSynthetic:
      six_mode_geometry(c.synthetic);
      c.epochs = 1000;
      c.sigma_warmup_epochs = 50;
      break;
    case Experiment::kStructSum:
      c.n = 2000;
      c.latent = 50;
      c.hidden = {250, 100};
      c.epochs = 30;
      c.sigma_warmup_epochs = 10;
      c.seeds = {0, 1, 2, 3, 4};
      c.data_seed = 1;
      break;
    case Experiment::kHierarchy:
      c.n = 2700;
      c.test_n = 2000;
      c.epochs = 40;
      c.seeds = {0, 1, 2, 3, 4};
      break;
  }
  return c;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("invalid JSON: ") + ex.what());
  }
  if (!j.is_object() || !j.contains("experiment")) throw ConfigError("config must be an object naming its experiment");
  try {
    check_keys(j,
               {"experiment", "model", "n", "test_n", "test_seed", "data_seed", "seeds", "epochs", "batch_size",
                "validation_fraction", "learning_rate", "beta1", "beta2", "eps", "latent", "hidden",
                "activation", "sigma", "sigma_warmup_epochs", "sigma_warmup_start", "learn_prior", "synthetic", "structsum", "hierarchy"},
               "config");
    ExperimentConfig c = default_config(parse_experiment(j.at("experiment").get<std::string>()));
    read(j, "model", c.model);
    read(j, "n", c.n);
    read(j, "test_n", c.test_n);
    read(j, "test_seed", c.test_seed);
    read(j, "seeds", c.seeds);
    if (j.contains("data_seed")) {
      if (j.at("data_seed").is_null()) {
        c.data_seed.reset();
      } else {
        c.data_seed = j.at("data_seed").get<std::uint64_t>();
      }
    }
    read(j, "epochs", c.epochs);
    read(j, "batch_size", c.batch_size);
    read(j, "validation_fraction", c.validation_fraction);
    read(j, "learning_rate", c.adam.lr);
    read(j, "beta1", c.adam.beta1);
    read(j, "beta2", c.adam.beta2);
    read(j, "eps", c.adam.eps);
    read(j, "latent", c.latent);
    read(j, "hidden", c.hidden);
    if (j.contains("activation")) c.activation = nets::parse_activation(j.at("activation").get<std::string>());
    read(j, "sigma", c.sigma);
    read(j, "sigma_warmup_epochs", c.sigma_warmup_epochs);
    read(j, "sigma_warmup_start", c.sigma_warmup_start);
    read(j, "learn_prior", c.learn_prior);
    if (j.contains("synthetic")) {
      const json& s = j.at("synthetic");
      check_keys(s, {"var_order", "data_boxes", "constraint_boxes", "formula", "prior_samples"}, "synthetic");
      if (s.contains("var_order")) c.synthetic.order = logic::VarOrder(s.at("var_order").get<std::vector<std::string>>());
      if (s.contains("data_boxes")) c.synthetic.data_boxes = json_boxes(s.at("data_boxes"));
      if (s.contains("constraint_boxes")) c.synthetic.constraint_boxes = json_boxes(s.at("constraint_boxes"));
      if (s.contains("formula")) c.synthetic.formula = s.at("formula").get<std::string>();
      read(s, "prior_samples", c.synthetic.prior_samples);
    }
    if (j.contains("structsum")) {
      const json& s = j.at("structsum");
      check_keys(s, {"base", "radius", "spread"}, "structsum");
      read(s, "base", c.structsum.base);
      read(s, "radius", c.structsum.radius);
      read(s, "spread", c.structsum.spread);
    }
    if (j.contains("hierarchy")) {
      const json& s = j.at("hierarchy");
      check_keys(s, {"groups", "classes_per_group", "dim", "alpha", "group_radius", "class_radius", "noise"},
                 "hierarchy");
      read(s, "groups", c.hierarchy.groups);
      read(s, "classes_per_group", c.hierarchy.classes_per_group);
      read(s, "dim", c.hierarchy.dim);
      read(s, "alpha", c.hierarchy.alpha);
      read(s, "group_radius", c.hierarchy.group_radius);
      read(s, "class_radius", c.hierarchy.class_radius);
      read(s, "noise", c.hierarchy.noise);
    }
    validate(c);
    return c;
  } catch (const json::exception& ex) {
    throw ConfigError(ex.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = std::string(experiment_name(c.experiment));
  j["model"] = c.model;
  j["n"] = c.n;
  j["test_n"] = c.test_n;
  j["test_seed"] = c.test_seed;
  j["seeds"] = c.seeds;
  j["data_seed"] = c.data_seed ? json(*c.data_seed) : json(nullptr);
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["validation_fraction"] = c.validation_fraction;
  j["learning_rate"] = c.adam.lr;
  j["beta1"] = c.adam.beta1;
  j["beta2"] = c.adam.beta2;
  j["eps"] = c.adam.eps;
  j["latent"] = c.latent;
  j["hidden"] = c.hidden;
  j["activation"] = std::string(nets::activation_name(c.activation));
  j["sigma"] = c.sigma;
  j["sigma_warmup_epochs"] = c.sigma_warmup_epochs;
  j["sigma_warmup_start"] = c.sigma_warmup_start;
  j["learn_prior"] = c.learn_prior;
  switch (c.experiment) {
    case Experiment::kSynthetic: {
      json s;
      s["var_order"] = c.synthetic.order.names();
      s["data_boxes"] = boxes_json(c.synthetic.data_boxes);
      s["constraint_boxes"] = boxes_json(c.synthetic.constraint_boxes);
      if (c.synthetic.formula) s["formula"] = *c.synthetic.formula;
      s["prior_samples"] = c.synthetic.prior_samples;
      j["synthetic"] = s;
      break;
    }
    case Experiment::kStructSum:
      j["structsum"] = {{"base", c.structsum.base}, {"radius", c.structsum.radius}, {"spread", c.structsum.spread}};
      break;
    case Experiment::kHierarchy: {
      const auto& h = c.hierarchy;
      j["hierarchy"] = {{"groups", h.groups},           {"classes_per_group", h.classes_per_group},
                        {"dim", h.dim},                 {"alpha", h.alpha},
                        {"group_radius", h.group_radius}, {"class_radius", h.class_radius},
                        {"noise", h.noise}};
      break;
    }
  }
  return j.dump(2);
}

void validate(const ExperimentConfig& c) {
  if (c.n < 1) throw ConfigError("n must be at least 1");
  if (c.test_n < 1) throw ConfigError("test_n must be at least 1");
  if (c.seeds.empty()) throw ConfigError("seeds must not be empty");
  if (c.batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (!(c.validation_fraction >= 0.0 && c.validation_fraction < 1.0)) {
    throw ConfigError("validation_fraction must lie in [0, 1)");
  }
  if (!(c.adam.lr > 0.0)) throw ConfigError("learning_rate must be positive");
  if (c.latent < 1) throw ConfigError("latent must be at least 1");
  if (!(c.sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (!(c.sigma_warmup_start > 0.0)) throw ConfigError("sigma_warmup_start must be positive");
  for (auto h : c.hidden) {
    if (h < 1) throw ConfigError("hidden sizes must be positive");
  }
  const auto need_model = [&](std::initializer_list<const char*> ok) {
    for (const char* m : ok) {
      if (c.model == m) return;
    }
    throw ConfigError("model '" + c.model + "' is not available for the " +
                      std::string(experiment_name(c.experiment)) + " experiment");
  };
  switch (c.experiment) {
    case Experiment::kSynthetic: {
      need_model({"multiplex", "unaware"});
      const std::size_t d = c.synthetic.order.size();
      if (d == 0) throw ConfigError("var_order must not be empty");
      if (c.synthetic.data_boxes.empty()) throw ConfigError("data_boxes must not be empty");
      if (!c.synthetic.formula && c.synthetic.constraint_boxes.empty()) {
        throw ConfigError("either constraint_boxes or formula is required");
      }
      for (const auto* list : {&c.synthetic.data_boxes, &c.synthetic.constraint_boxes}) {
        for (const auto& b : *list) {
          if (b.bounds.size() != d) throw ConfigError("box dimension differs from var_order");
          for (const auto& [lo, hi] : b.bounds) {
            if (!(lo < hi)) throw ConfigError("box ranges need low < high");
          }
        }
      }
      break;
    }
    case Experiment::kStructSum:
      need_model({"multiplex"});
      if (c.structsum.base < 2) throw ConfigError("base must be at least 2");
      if (!(c.structsum.spread > 0.0)) throw ConfigError("spread must be positive");
      break;
    case Experiment::kHierarchy: {
      need_model({"multiplex", "vanilla", "hierarchical"});
      const auto& h = c.hierarchy;
      if (h.groups * h.classes_per_group < 2) throw ConfigError("need at least two classes");
      if (h.groups < 1 || h.classes_per_group < 1) throw ConfigError("groups and classes_per_group must be positive");
      if (h.dim < 2) throw ConfigError("hierarchy features need at least two dimensions");
      if (!(h.alpha > 0.0 && h.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
      if (!(h.noise > 0.0)) throw ConfigError("noise must be positive");
      break;
    }
  }
}

}  // namespace mplex::experiments
