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

#include "mplex/nets/losses.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mplex/grad/ops.hpp"

namespace mplex::nets {

using grad::ShapeError;

namespace {

void same_shape(const Var& a, const Var& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ShapeError(what);
}

}  // namespace

Var reparameterize(const GaussianPosterior& post, const Var& noise) {
  same_shape(post.mu, post.log_var, "reparameterize: mu and log_var differ");
  same_shape(post.mu, noise, "reparameterize: noise does not match the latent size");
  return post.mu + grad::exp(grad::scale(post.log_var, 0.5)) * noise;
}

Var gaussian_nll(const Var& x, const Var& mean, double sigma) {
  if (!(sigma > 0.0)) throw Error("likelihood scale must be positive");
  same_shape(x, mean, "gaussian_nll: data and mean differ");
  const double d = static_cast<double>(x.cols());
  const double log_norm = 0.5 * d * std::log(2.0 * std::numbers::pi * sigma * sigma);
  Var sq = grad::sum_rows(grad::square(x - mean));
  return grad::shift(grad::scale(sq, 0.5 / (sigma * sigma)), log_norm);
}

Var kl_standard_normal(const GaussianPosterior& post) {
  same_shape(post.mu, post.log_var, "kl: mu and log_var differ");
  Var inner = grad::shift(post.log_var - grad::square(post.mu) - grad::exp(post.log_var), 1.0);
  return grad::scale(grad::sum_rows(inner), -0.5);
}

Var vae_elbo_term(const Var& x, const Var& mean, const GaussianPosterior& post, double sigma) {
  return gaussian_nll(x, mean, sigma) + kl_standard_normal(post);
}

GatingDistribution make_gating(const Var& logits) {
  return {logits, grad::log_softmax_rows(logits)};
}

Var multiplex_loss(const Var& per_term, const GatingDistribution& gating) {
  same_shape(per_term, gating.log_probs, "multiplex_loss: K mismatch");
  Var pi = grad::exp(gating.log_probs);
  return grad::sum_rows(pi * (per_term + gating.log_probs));
}

Var multiplex_loss(const Var& per_term, const GatingDistribution& gating, const Var& log_prior) {
  if (log_prior.rows() != 1 || log_prior.cols() != per_term.cols()) {
    throw ShapeError("multiplex_loss: prior must be 1 x K");
  }
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(per_term.rows()), 0);
  Var prior = grad::gather_rows(log_prior, rows);
  return multiplex_loss(per_term - prior, gating);
}

TupleTable make_tuple_table(std::vector<LabelTuple> tuples, std::size_t classes) {
  if (tuples.empty()) throw Error("empty assignment table");
  TupleTable t;
  t.classes = classes;
  const auto h = static_cast<Eigen::Index>(tuples.size());
  for (auto& m : t.incidence) m = Tensor::Zero(static_cast<Eigen::Index>(classes), h);
  for (Eigen::Index j = 0; j < h; ++j) {
    for (std::size_t p = 0; p < 4; ++p) {
      const std::size_t c = tuples[static_cast<std::size_t>(j)][p];
      if (c >= classes) throw Error("assignment label out of range");
      t.incidence[p](static_cast<Eigen::Index>(c), j) = 1.0;
    }
  }
  t.tuples = std::move(tuples);
  return t;
}

StructuredSumTerms structured_sum_loss(const std::array<Var, 4>& v,
                                       const std::array<Var, 4>& logits,
                                       const TupleTable& table) {
  if (table.tuples.empty()) throw Error("empty assignment table");
  grad::Tape& tape = *v[0].tape();
  Var tuple_v, tuple_logits;
  for (std::size_t p = 0; p < 4; ++p) {
    if (static_cast<std::size_t>(v[p].cols()) != table.classes ||
        static_cast<std::size_t>(logits[p].cols()) != table.classes) {
      throw ShapeError("structured_sum_loss: class count mismatch");
    }
    Var inc = tape.constant(table.incidence[p]);
    Var tv = grad::matmul(v[p], inc);
    Var tl = grad::matmul(logits[p], inc);
    tuple_v = p == 0 ? tv : tuple_v + tv;
    tuple_logits = p == 0 ? tl : tuple_logits + tl;
  }
  GatingDistribution gating = make_gating(tuple_logits);
  return {multiplex_loss(tuple_v, gating), gating.log_probs};
}

Var cross_entropy(const Var& logits, std::span<const Eigen::Index> labels) {
  for (auto l : labels) {
    if (l < 0 || l >= logits.cols()) {
      throw Error("label " + std::to_string(l) + " out of range");
    }
  }
  return -grad::pick(grad::log_softmax_rows(logits), labels);
}

Var hierarchical_ce_loss(const Var& raw_logits, std::span<const Eigen::Index> labels,
                         const std::vector<layer::GroupMarginProgram>& programs,
                         const GatingDistribution& gating) {
  if (gating.k() != programs.size()) throw ShapeError("gating size differs from group count");
  std::vector<Var> per_group;
  per_group.reserve(programs.size());
  for (const auto& p : programs) {
    per_group.push_back(cross_entropy(layer::apply(p, raw_logits), labels));
  }
  return multiplex_loss(grad::hstack(per_group), gating);
}

}  // namespace mplex::nets
