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

// The three model families: a constrained (or constraint-unaware) Gaussian
// VAE, the structured-sum VAE over label tuples, and classifiers with and
// without group-margin heads.

#ifndef MPLEX_NETS_MODELS_HPP_
#define MPLEX_NETS_MODELS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mplex/layer/group_margin.hpp"
#include "mplex/layer/program.hpp"
#include "mplex/nets/losses.hpp"
#include "mplex/nets/mlp.hpp"
#include "mplex/nets/parameters.hpp"

namespace mplex::nets {

// Standard-normal matrix drawn row by row from rng.
Tensor normal_noise(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);

struct VaeConfig {
  std::size_t latent = 15;
  std::vector<std::size_t> hidden = {50};
  Activation activation = Activation::kTanh;
  double sigma = 0.1;
  // Trainable logits over branches instead of the uniform prior.
  bool learn_prior = false;
};

class VaeModel {
 public:
  // Constrained model: the decoder output passes through every branch.
  VaeModel(layer::MultiplexHead head, VaeConfig config, std::uint64_t seed);
  // Baseline that ignores the constraints. The formula is kept only so that
  // samples can be checked against it.
  static VaeModel unaware(logic::Formula formula, logic::VarOrder order, VaeConfig config,
                          std::uint64_t seed);

  struct Output {
    Var objective;  // batch x 1 training loss, sum_k pi_k (L_k + log pi_k)
    Var neg_elbo;   // batch x 1 negative lower bound including the prior over k
    std::optional<GatingDistribution> gating;
    Var raw;  // decoder output before any branch transform
    std::vector<Var> branches;
  };

  // x: batch x dim, noise: batch x latent. sigma replaces the configured
  // likelihood scale, e.g. during a warm-up schedule.
  Output forward(const Binding& params, const Var& x, const Var& noise,
                 std::optional<double> sigma = std::nullopt) const;

  // Posterior reconstructions: z ~ q(z|x), k ~ q(k|x).
  Tensor reconstruct(const Tensor& x, std::mt19937_64& rng) const;
  // z ~ N(0, I), k from the prior.
  Tensor sample_prior(std::size_t count, std::mt19937_64& rng) const;

  bool constrained() const { return head_.has_value(); }
  std::size_t k() const { return head_ ? head_->k() : 1; }
  std::size_t dim() const { return order_.size(); }
  // log p(k) of the prior, 1 x K.
  Tensor log_prior() const;

  const VaeConfig& config() const { return config_; }
  const logic::Formula& formula() const { return formula_; }
  const logic::VarOrder& order() const { return order_; }
  const ParameterStore& params() const { return params_; }
  ParameterStore& params() { return params_; }

  std::string serialize(std::uint64_t seed) const;
  static VaeModel deserialize(const std::string& text);

 private:
  VaeModel() = default;
  void build(std::uint64_t seed);
  void attach();
  Var log_prior_var(const Binding& params) const;
  GaussianPosterior posterior(const Var& enc) const;

  VaeConfig config_;
  std::optional<layer::MultiplexHead> head_;
  logic::Formula formula_ = logic::Formula::truth();
  logic::VarOrder order_;
  ParameterStore params_;
  Mlp encoder_;
  Mlp decoder_;
  std::optional<std::size_t> prior_;
};

struct StructSumConfig {
  std::size_t base = 4;
  std::size_t data_dim = 2;
  std::size_t latent = 50;
  std::vector<std::size_t> hidden = {250, 100};
  Activation activation = Activation::kTanh;
  double sigma = 0.1;
};

// Items of a batch of structured examples: position p holds batch x data_dim.
using ItemBatch = std::array<Tensor, 4>;

class StructSumModel {
 public:
  StructSumModel(StructSumConfig config, std::vector<LabelTuple> tuples, std::uint64_t seed);

  struct Output {
    Var objective;  // batch x 1, sum_h pi_h (sum_p V(x_p, y_p) + log pi_h)
    Var neg_elbo;   // batch x 1, objective + log H
    Var log_pi;     // batch x H
  };

  // noise: (4 * batch) x latent, rows ordered by position then example.
  Output forward(const Binding& params, const ItemBatch& items, const Var& noise,
                 std::optional<double> sigma = std::nullopt) const;
  // Most probable tuple under q(h | x) for every example.
  std::vector<LabelTuple> infer(const ItemBatch& items) const;

  const StructSumConfig& config() const { return config_; }
  const TupleTable& table() const { return table_; }
  const ParameterStore& params() const { return params_; }
  ParameterStore& params() { return params_; }

  std::string serialize(std::uint64_t seed) const;
  static StructSumModel deserialize(const std::string& text);

 private:
  StructSumModel() = default;

  StructSumConfig config_;
  TupleTable table_;
  ParameterStore params_;
  Mlp encoder_;
  Mlp decoder_;
};

enum class ClassifierKind { kVanilla, kMultiplex, kHierarchical };

std::string_view classifier_kind_name(ClassifierKind kind);
ClassifierKind parse_classifier_kind(std::string_view name);

struct ClassifierConfig {
  std::size_t input_dim = 2;
  std::vector<std::size_t> hidden = {50};
  Activation activation = Activation::kTanh;
  layer::Partition groups;
  double alpha = 0.95;
};

class Classifier {
 public:
  Classifier(ClassifierKind kind, ClassifierConfig config, std::uint64_t seed);

  // Per-sample training loss, batch x 1.
  Var objective(const Binding& params, const Var& x, std::span<const Eigen::Index> labels) const;

  struct Prediction {
    std::vector<std::size_t> cls;
    std::vector<std::size_t> group;
    // Whether the predicted group holds more than alpha of the output mass.
    std::vector<bool> satisfied;
  };
  Prediction predict(const Tensor& x) const;

  std::size_t classes() const { return group_of_.size(); }
  std::size_t group_of(std::size_t cls) const { return group_of_.at(cls); }
  ClassifierKind kind() const { return kind_; }
  const ClassifierConfig& config() const { return config_; }
  const ParameterStore& params() const { return params_; }
  ParameterStore& params() { return params_; }

  std::string serialize(std::uint64_t seed) const;
  static Classifier deserialize(const std::string& text);

 private:
  Classifier() = default;
  void init_groups();

  ClassifierKind kind_ = ClassifierKind::kVanilla;
  ClassifierConfig config_;
  std::vector<layer::GroupMarginProgram> programs_;
  std::vector<std::size_t> group_of_;
  ParameterStore params_;
  Mlp net_;
};

// The "model" field of a serialized checkpoint.
std::string checkpoint_model(const std::string& text);

}  // namespace mplex::nets

#endif  // MPLEX_NETS_MODELS_HPP_
