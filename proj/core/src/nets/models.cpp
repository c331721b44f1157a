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

#include "mplex/nets/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "mplex/grad/ops.hpp"

namespace mplex::nets {

namespace {

std::vector<std::size_t> layer_sizes(std::size_t in, const std::vector<std::size_t>& hidden,
                                     std::size_t out, bool reversed) {
  std::vector<std::size_t> sizes{in};
  if (reversed) {
    sizes.insert(sizes.end(), hidden.rbegin(), hidden.rend());
  } else {
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  }
  sizes.push_back(out);
  return sizes;
}

Eigen::Index row_argmax(const Tensor& m, Eigen::Index row) {
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < m.cols(); ++c) {
    if (m(row, c) > m(row, best)) best = c;
  }
  return best;
}

// Draws one index per row from the categorical distribution exp(log_probs).
std::vector<std::size_t> sample_rows(const Tensor& log_probs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::size_t> out(static_cast<std::size_t>(log_probs.rows()));
  for (Eigen::Index i = 0; i < log_probs.rows(); ++i) {
    const double r = u(rng);
    double acc = 0.0;
    Eigen::Index pick = log_probs.cols() - 1;
    for (Eigen::Index c = 0; c < log_probs.cols(); ++c) {
      acc += std::exp(log_probs(i, c));
      if (r < acc) {
        pick = c;
        break;
      }
    }
    out[static_cast<std::size_t>(i)] = static_cast<std::size_t>(pick);
  }
  return out;
}

Tensor select_rows(const std::vector<Var>& branches, const std::vector<std::size_t>& k) {
  Tensor out(branches.front().rows(), branches.front().cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    out.row(i) = branches[k[static_cast<std::size_t>(i)]].value().row(i);
  }
  return out;
}

}  // namespace

Tensor normal_noise(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = n(rng);
  }
  return out;
}

// ---- VaeModel

VaeModel::VaeModel(layer::MultiplexHead head, VaeConfig config, std::uint64_t seed)
    : config_(std::move(config)), formula_(head.formula), order_(head.order) {
  if (head.k() == 0) throw Error("multiplex head has no branches");
  head_ = std::move(head);
  build(seed);
}

VaeModel VaeModel::unaware(logic::Formula formula, logic::VarOrder order, VaeConfig config,
                           std::uint64_t seed) {
  VaeModel m;
  m.config_ = std::move(config);
  m.formula_ = std::move(formula);
  m.order_ = std::move(order);
  m.build(seed);
  return m;
}

void VaeModel::build(std::uint64_t seed) {
  if (config_.latent == 0) throw Error("latent size must be positive");
  if (!(config_.sigma > 0.0)) throw Error("decoder sigma must be positive");
  std::mt19937_64 rng(seed);
  const std::size_t gate = constrained() ? k() : 0;
  encoder_ = Mlp(params_, "encoder", layer_sizes(dim(), config_.hidden, 2 * config_.latent + gate, false),
                 config_.activation, rng);
  decoder_ = Mlp(params_, "decoder", layer_sizes(config_.latent, config_.hidden, dim(), true),
                 config_.activation, rng);
  if (constrained() && config_.learn_prior) {
    prior_ = params_.add("prior.logits", Tensor::Zero(1, static_cast<Eigen::Index>(k())));
  }
}

void VaeModel::attach() {
  const std::size_t gate = constrained() ? k() : 0;
  encoder_ = Mlp::attach(params_, "encoder",
                         layer_sizes(dim(), config_.hidden, 2 * config_.latent + gate, false),
                         config_.activation);
  decoder_ = Mlp::attach(params_, "decoder", layer_sizes(config_.latent, config_.hidden, dim(), true),
                         config_.activation);
  if (constrained() && config_.learn_prior) prior_ = params_.find("prior.logits");
}

GaussianPosterior VaeModel::posterior(const Var& enc) const {
  const auto l = static_cast<Eigen::Index>(config_.latent);
  return {grad::columns(enc, 0, l), grad::columns(enc, l, l)};
}

Var VaeModel::log_prior_var(const Binding& params) const {
  if (prior_) return grad::log_softmax_rows(params[*prior_]);
  Tape* tape = params.front().tape();
  return tape->constant(log_prior());
}

Tensor VaeModel::log_prior() const {
  const auto kk = static_cast<Eigen::Index>(k());
  if (prior_) {
    Tape tape;
    return grad::log_softmax_rows(tape.constant(params_.value(*prior_))).value();
  }
  return Tensor::Constant(1, kk, -std::log(static_cast<double>(kk)));
}

VaeModel::Output VaeModel::forward(const Binding& params, const Var& x, const Var& noise,
                                   std::optional<double> sigma) const {
  const double s = sigma.value_or(config_.sigma);
  if (x.cols() != static_cast<Eigen::Index>(dim())) throw grad::ShapeError("input width differs from the variable count");
  const Var enc = encoder_.forward(params, x);
  const GaussianPosterior post = posterior(enc);
  const Var z = reparameterize(post, noise);
  const Var kl = kl_standard_normal(post);
  Output out;
  out.raw = decoder_.forward(params, z);
  if (!constrained()) {
    out.branches = {out.raw};
    out.objective = gaussian_nll(x, out.raw, s) + kl;
    out.neg_elbo = out.objective;
    return out;
  }
  out.branches = head_->apply_all(out.raw);
  std::vector<Var> nll;
  nll.reserve(out.branches.size());
  for (const auto& b : out.branches) nll.push_back(gaussian_nll(x, b, s));
  const Var per_term = grad::hstack(nll);
  out.gating = make_gating(grad::columns(enc, 2 * static_cast<Eigen::Index>(config_.latent),
                                         static_cast<Eigen::Index>(k())));
  // KL over z is shared by every branch and the gating weights sum to one,
  // so it sits outside the mixture.
  if (prior_) {
    out.objective = kl + multiplex_loss(per_term, *out.gating, log_prior_var(params));
    out.neg_elbo = out.objective;
  } else {
    out.objective = kl + multiplex_loss(per_term, *out.gating);
    out.neg_elbo = out.objective + std::log(static_cast<double>(k()));
  }
  return out;
}

Tensor VaeModel::reconstruct(const Tensor& x, std::mt19937_64& rng) const {
  Tape tape;
  const Binding params = params_.bind(tape);
  const Tensor noise = normal_noise(x.rows(), static_cast<Eigen::Index>(config_.latent), rng);
  const Output out = forward(params, tape.constant(x), tape.constant(noise));
  if (!constrained()) return out.raw.value();
  return select_rows(out.branches, sample_rows(out.gating->log_probs.value(), rng));
}

Tensor VaeModel::sample_prior(std::size_t count, std::mt19937_64& rng) const {
  Tape tape;
  const Binding params = params_.bind(tape);
  const auto n = static_cast<Eigen::Index>(count);
  const Var z = tape.constant(normal_noise(n, static_cast<Eigen::Index>(config_.latent), rng));
  const Var raw = decoder_.forward(params, z);
  if (!constrained()) return raw.value();
  const std::vector<Var> branches = head_->apply_all(raw);
  const Tensor lp = log_prior().replicate(n, 1);
  return select_rows(branches, sample_rows(lp, rng));
}

// ---- StructSumModel

StructSumModel::StructSumModel(StructSumConfig config, std::vector<LabelTuple> tuples,
                               std::uint64_t seed)
    : config_(std::move(config)), table_(make_tuple_table(std::move(tuples), config_.base)) {
  if (config_.latent == 0 || config_.data_dim == 0) throw Error("latent and data sizes must be positive");
  if (!(config_.sigma > 0.0)) throw Error("decoder sigma must be positive");
  std::mt19937_64 rng(seed);
  encoder_ = Mlp(params_, "encoder",
                 layer_sizes(config_.data_dim, config_.hidden, 2 * config_.latent + config_.base, false),
                 config_.activation, rng);
  decoder_ = Mlp(params_, "decoder",
                 layer_sizes(config_.latent + config_.base, config_.hidden, config_.data_dim, true),
                 config_.activation, rng);
}

StructSumModel::Output StructSumModel::forward(const Binding& params, const ItemBatch& items,
                                               const Var& noise, std::optional<double> sigma) const {
  const Eigen::Index b = items[0].rows();
  const auto d = static_cast<Eigen::Index>(config_.data_dim);
  const auto l = static_cast<Eigen::Index>(config_.latent);
  const auto nb = static_cast<Eigen::Index>(config_.base);
  for (const auto& it : items) {
    if (it.rows() != b || it.cols() != d) throw grad::ShapeError("item batch has the wrong shape");
  }
  if (noise.rows() != 4 * b || noise.cols() != l) throw grad::ShapeError("noise must be (4 * batch) x latent");
  Tape* tape = noise.tape();

  Tensor stacked(4 * b, d);
  for (Eigen::Index p = 0; p < 4; ++p) stacked.middleRows(p * b, b) = items[static_cast<std::size_t>(p)];
  const Var x = tape->constant(stacked);
  const Var enc = encoder_.forward(params, x);
  const GaussianPosterior post{grad::columns(enc, 0, l), grad::columns(enc, l, l)};
  const Var class_logits = grad::columns(enc, 2 * l, nb);
  const Var z = reparameterize(post, noise);
  const Var kl = kl_standard_normal(post);

  // Decode every item under every class in one pass: block c holds y = c.
  std::vector<Var> inputs, targets, kls;
  for (Eigen::Index c = 0; c < nb; ++c) {
    Tensor onehot = Tensor::Zero(4 * b, nb);
    onehot.col(c).setOnes();
    const Var parts[] = {z, tape->constant(std::move(onehot))};
    inputs.push_back(grad::hstack(parts));
    targets.push_back(x);
    kls.push_back(kl);
  }
  const Var means = decoder_.forward(params, grad::vstack(inputs));
  const Var total = gaussian_nll(grad::vstack(targets), means, sigma.value_or(config_.sigma)) + grad::vstack(kls);

  std::array<Var, 4> v, logits;
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(b));
  for (Eigen::Index p = 0; p < 4; ++p) {
    std::vector<Var> cols;
    for (Eigen::Index c = 0; c < nb; ++c) {
      for (Eigen::Index i = 0; i < b; ++i) rows[static_cast<std::size_t>(i)] = c * 4 * b + p * b + i;
      cols.push_back(grad::gather_rows(total, rows));
    }
    v[static_cast<std::size_t>(p)] = grad::hstack(cols);
    for (Eigen::Index i = 0; i < b; ++i) rows[static_cast<std::size_t>(i)] = p * b + i;
    logits[static_cast<std::size_t>(p)] = grad::gather_rows(class_logits, rows);
  }
  const StructuredSumTerms terms = structured_sum_loss(v, logits, table_);
  Output out;
  out.objective = terms.loss;
  out.neg_elbo = terms.loss + std::log(static_cast<double>(table_.tuples.size()));
  out.log_pi = terms.log_pi;
  return out;
}

std::vector<LabelTuple> StructSumModel::infer(const ItemBatch& items) const {
  const Eigen::Index b = items[0].rows();
  const auto l = static_cast<Eigen::Index>(config_.latent);
  Tape tape;
  const Binding params = params_.bind(tape);
  Tensor scores = Tensor::Zero(b, static_cast<Eigen::Index>(table_.tuples.size()));
  for (std::size_t p = 0; p < 4; ++p) {
    const Var enc = encoder_.forward(params, tape.constant(items[p]));
    const Tensor logits = enc.value().middleCols(2 * l, static_cast<Eigen::Index>(config_.base));
    scores += logits * table_.incidence[p];
  }
  std::vector<LabelTuple> out;
  out.reserve(static_cast<std::size_t>(b));
  for (Eigen::Index i = 0; i < b; ++i) {
    out.push_back(table_.tuples[static_cast<std::size_t>(row_argmax(scores, i))]);
  }
  return out;
}

// ---- Classifier

std::string_view classifier_kind_name(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kVanilla: return "vanilla";
    case ClassifierKind::kMultiplex: return "multiplex";
    case ClassifierKind::kHierarchical: return "hierarchical";
  }
  return "?";
}

ClassifierKind parse_classifier_kind(std::string_view name) {
  for (auto k : {ClassifierKind::kVanilla, ClassifierKind::kMultiplex, ClassifierKind::kHierarchical}) {
    if (classifier_kind_name(k) == name) return k;
  }
  throw Error("unknown classifier kind '" + std::string(name) + "'");
}

Classifier::Classifier(ClassifierKind kind, ClassifierConfig config, std::uint64_t seed)
    : kind_(kind), config_(std::move(config)) {
  init_groups();
  std::mt19937_64 rng(seed);
  const std::size_t extra = kind_ == ClassifierKind::kVanilla ? 0 : config_.groups.size();
  net_ = Mlp(params_, "net", layer_sizes(config_.input_dim, config_.hidden, classes() + extra, false),
             config_.activation, rng);
}

void Classifier::init_groups() {
  programs_ = layer::compile_group_margin(config_.groups, config_.alpha);
  group_of_.assign(programs_.front().classes, 0);
  for (std::size_t g = 0; g < config_.groups.size(); ++g) {
    for (auto c : config_.groups[g]) group_of_[c] = g;
  }
}

Var Classifier::objective(const Binding& params, const Var& x,
                          std::span<const Eigen::Index> labels) const {
  const Var out = net_.forward(params, x);
  const auto nc = static_cast<Eigen::Index>(classes());
  const auto ng = static_cast<Eigen::Index>(config_.groups.size());
  const Var logits = grad::columns(out, 0, nc);
  switch (kind_) {
    case ClassifierKind::kVanilla:
      return cross_entropy(logits, labels);
    case ClassifierKind::kMultiplex:
      return hierarchical_ce_loss(logits, labels, programs_, make_gating(grad::columns(out, nc, ng)));
    case ClassifierKind::kHierarchical: {
      // Group first, then the class among the true group's members.
      std::vector<Eigen::Index> groups(labels.size());
      Tensor mask = Tensor::Constant(x.rows(), nc, -1e9);
      for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::size_t g = group_of(static_cast<std::size_t>(labels[i]));
        groups[i] = static_cast<Eigen::Index>(g);
        for (auto c : config_.groups[g]) mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = 0.0;
      }
      const Var masked = logits + x.tape()->constant(std::move(mask));
      return cross_entropy(grad::columns(out, nc, ng), groups) + cross_entropy(masked, labels);
    }
  }
  throw Error("unreachable classifier kind");
}

Classifier::Prediction Classifier::predict(const Tensor& x) const {
  Tape tape;
  const Binding params = params_.bind(tape);
  const Tensor out = net_.forward(params, tape.constant(x)).value();
  const auto nc = static_cast<Eigen::Index>(classes());
  const auto ng = static_cast<Eigen::Index>(config_.groups.size());
  const Tensor raw = out.leftCols(nc);
  Tensor logits = raw;
  if (kind_ == ClassifierKind::kMultiplex) {
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Tensor gate = out.block(i, nc, 1, ng);
      const auto k = static_cast<std::size_t>(row_argmax(gate, 0));
      logits.row(i) = layer::apply(programs_[k], Tensor(raw.row(i)));
    }
  } else if (kind_ == ClassifierKind::kHierarchical) {
    const double ninf = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Tensor gate = out.block(i, nc, 1, ng);
      const auto g = static_cast<std::size_t>(row_argmax(gate, 0));
      for (Eigen::Index c = 0; c < nc; ++c) {
        if (group_of(static_cast<std::size_t>(c)) != g) logits(i, c) = ninf;
      }
    }
  }
  Prediction p;
  std::vector<double> row(static_cast<std::size_t>(nc));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const auto cls = static_cast<std::size_t>(row_argmax(logits, i));
    p.cls.push_back(cls);
    p.group.push_back(group_of(cls));
    for (Eigen::Index c = 0; c < nc; ++c) row[static_cast<std::size_t>(c)] = logits(i, c);
    bool ok = false;
    for (const auto& prog : programs_) ok = ok || layer::satisfied(prog, row);
    p.satisfied.push_back(ok);
  }
  return p;
}

}  // namespace mplex::nets
