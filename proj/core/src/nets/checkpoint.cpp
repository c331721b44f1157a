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

// JSON checkpoints. Doubles are written in shortest round-trip form, so a
// reloaded model reproduces the forward pass bit for bit.

#include <nlohmann/json.hpp>

#include "mplex/logic/parser.hpp"
#include "mplex/nets/models.hpp"

namespace mplex::nets {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "mplexnet-checkpoint";
constexpr int kVersion = 1;

json store_to_json(const ParameterStore& store) {
  json out = json::array();
  for (std::size_t i = 0; i < store.size(); ++i) {
    const Tensor& v = store.value(i);
    std::vector<double> data(static_cast<std::size_t>(v.size()));
    // Row-major so the text reads like the matrix.
    for (Eigen::Index r = 0, n = 0; r < v.rows(); ++r) {
      for (Eigen::Index c = 0; c < v.cols(); ++c, ++n) data[static_cast<std::size_t>(n)] = v(r, c);
    }
    out.push_back({{"name", store.name(i)}, {"rows", v.rows()}, {"cols", v.cols()}, {"data", data}});
  }
  return out;
}

void store_from_json(const json& j, ParameterStore& store) {
  for (const auto& p : j) {
    const auto rows = p.at("rows").get<Eigen::Index>();
    const auto cols = p.at("cols").get<Eigen::Index>();
    const auto data = p.at("data").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || static_cast<std::size_t>(rows * cols) != data.size()) {
      throw Error("checkpoint parameter '" + p.at("name").get<std::string>() + "' has inconsistent size");
    }
    Tensor v(rows, cols);
    for (Eigen::Index r = 0, n = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c, ++n) v(r, c) = data[static_cast<std::size_t>(n)];
    }
    store.add(p.at("name").get<std::string>(), std::move(v));
  }
}

json header(const char* model, std::uint64_t seed) {
  return {{"format", kFormat}, {"version", kVersion}, {"model", model}, {"seed", seed}};
}

json parse_checked(const std::string& text, const char* model) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || j.value("format", "") != kFormat) throw Error("not a checkpoint file");
  if (j.value("version", 0) != kVersion) throw Error("unsupported checkpoint version");
  if (j.value("model", "") != model) {
    throw Error("checkpoint holds a '" + j.value("model", "") + "' model, expected '" + model + "'");
  }
  return j;
}

template <typename Fn>
auto guarded(Fn fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(std::string("malformed checkpoint: ") + e.what());
  }
}

}  // namespace

std::string checkpoint_model(const std::string& text) {
  return guarded([&] {
    const json j = json::parse(text);
    if (!j.is_object() || j.value("format", "") != kFormat) throw Error("not a checkpoint file");
    return j.at("model").get<std::string>();
  });
}

std::string VaeModel::serialize(std::uint64_t seed) const {
  json j = header("vae", seed);
  j["constrained"] = constrained();
  j["formula"] = logic::print(formula_);
  j["var_order"] = order_.names();
  j["latent"] = config_.latent;
  j["hidden"] = config_.hidden;
  j["activation"] = std::string(activation_name(config_.activation));
  j["sigma"] = config_.sigma;
  j["learn_prior"] = config_.learn_prior;
  j["params"] = store_to_json(params_);
  return j.dump(1);
}

VaeModel VaeModel::deserialize(const std::string& text) {
  return guarded([&] {
    const json j = parse_checked(text, "vae");
    VaeModel m;
    m.order_ = logic::VarOrder(j.at("var_order").get<std::vector<std::string>>());
    m.formula_ = logic::parse(j.at("formula").get<std::string>(), m.order_);
    m.config_.latent = j.at("latent").get<std::size_t>();
    m.config_.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    m.config_.activation = parse_activation(j.at("activation").get<std::string>());
    m.config_.sigma = j.at("sigma").get<double>();
    m.config_.learn_prior = j.at("learn_prior").get<bool>();
    if (j.at("constrained").get<bool>()) m.head_ = layer::compile_formula(m.formula_, m.order_);
    store_from_json(j.at("params"), m.params_);
    m.attach();
    return m;
  });
}

std::string StructSumModel::serialize(std::uint64_t seed) const {
  json j = header("structsum", seed);
  j["base"] = config_.base;
  j["data_dim"] = config_.data_dim;
  j["latent"] = config_.latent;
  j["hidden"] = config_.hidden;
  j["activation"] = std::string(activation_name(config_.activation));
  j["sigma"] = config_.sigma;
  j["tuples"] = table_.tuples;
  j["params"] = store_to_json(params_);
  return j.dump(1);
}

StructSumModel StructSumModel::deserialize(const std::string& text) {
  return guarded([&] {
    const json j = parse_checked(text, "structsum");
    StructSumModel m;
    m.config_.base = j.at("base").get<std::size_t>();
    m.config_.data_dim = j.at("data_dim").get<std::size_t>();
    m.config_.latent = j.at("latent").get<std::size_t>();
    m.config_.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    m.config_.activation = parse_activation(j.at("activation").get<std::string>());
    m.config_.sigma = j.at("sigma").get<double>();
    m.table_ = make_tuple_table(j.at("tuples").get<std::vector<LabelTuple>>(), m.config_.base);
    store_from_json(j.at("params"), m.params_);
    const auto& c = m.config_;
    std::vector<std::size_t> enc{c.data_dim}, dec{c.latent + c.base};
    enc.insert(enc.end(), c.hidden.begin(), c.hidden.end());
    enc.push_back(2 * c.latent + c.base);
    dec.insert(dec.end(), c.hidden.rbegin(), c.hidden.rend());
    dec.push_back(c.data_dim);
    m.encoder_ = Mlp::attach(m.params_, "encoder", enc, c.activation);
    m.decoder_ = Mlp::attach(m.params_, "decoder", dec, c.activation);
    return m;
  });
}

std::string Classifier::serialize(std::uint64_t seed) const {
  json j = header("classifier", seed);
  j["kind"] = std::string(classifier_kind_name(kind_));
  j["input_dim"] = config_.input_dim;
  j["hidden"] = config_.hidden;
  j["activation"] = std::string(activation_name(config_.activation));
  j["groups"] = config_.groups;
  j["alpha"] = config_.alpha;
  j["params"] = store_to_json(params_);
  return j.dump(1);
}

Classifier Classifier::deserialize(const std::string& text) {
  return guarded([&] {
    const json j = parse_checked(text, "classifier");
    Classifier m;
    m.kind_ = parse_classifier_kind(j.at("kind").get<std::string>());
    m.config_.input_dim = j.at("input_dim").get<std::size_t>();
    m.config_.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    m.config_.activation = parse_activation(j.at("activation").get<std::string>());
    m.config_.groups = j.at("groups").get<layer::Partition>();
    m.config_.alpha = j.at("alpha").get<double>();
    m.init_groups();
    store_from_json(j.at("params"), m.params_);
    std::vector<std::size_t> sizes{m.config_.input_dim};
    sizes.insert(sizes.end(), m.config_.hidden.begin(), m.config_.hidden.end());
    sizes.push_back(m.classes() + (m.kind_ == ClassifierKind::kVanilla ? 0 : m.config_.groups.size()));
    m.net_ = Mlp::attach(m.params_, "net", sizes, m.config_.activation);
    return m;
  });
}

}  // namespace mplex::nets
