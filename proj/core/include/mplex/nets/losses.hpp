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

// Losses. Everything per-sample returns a batch x 1 column; callers take the
// mean for the optimiser.

#ifndef MPLEX_NETS_LOSSES_HPP_
#define MPLEX_NETS_LOSSES_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "mplex/grad/tape.hpp"
#include "mplex/layer/group_margin.hpp"

namespace mplex::nets {

using grad::Tensor;
using grad::Var;

struct GaussianPosterior {
  Var mu;       // batch x latent
  Var log_var;  // batch x latent
};

// mu + exp(0.5 * log_var) * noise.
Var reparameterize(const GaussianPosterior& post, const Var& noise);

// -log N(x; mean, sigma^2 I).
Var gaussian_nll(const Var& x, const Var& mean, double sigma);
// KL(q || N(0, I)) = -0.5 * sum(1 + log_var - mu^2 - exp(log_var)).
Var kl_standard_normal(const GaussianPosterior& post);
// Negative lower bound of one sample: gaussian_nll + kl_standard_normal.
Var vae_elbo_term(const Var& x, const Var& mean, const GaussianPosterior& post, double sigma);

struct GatingDistribution {
  Var logits;     // batch x K
  Var log_probs;  // log_softmax(logits)

  std::size_t k() const { return static_cast<std::size_t>(logits.cols()); }
};

GatingDistribution make_gating(const Var& logits);

// sum_k pi_k * (L_k + log pi_k) for per_term: batch x K.
Var multiplex_loss(const Var& per_term, const GatingDistribution& gating);
// sum_k pi_k * (L_k + log pi_k - log p(k)) with log_prior 1 x K.
Var multiplex_loss(const Var& per_term, const GatingDistribution& gating, const Var& log_prior);

// Labels of one structured example: two addends, carry and units digit.
using LabelTuple = std::array<std::size_t, 4>;

// Valid tuples with one B x H incidence matrix per position.
struct TupleTable {
  std::vector<LabelTuple> tuples;
  std::size_t classes = 0;
  std::array<Tensor, 4> incidence;
};

TupleTable make_tuple_table(std::vector<LabelTuple> tuples, std::size_t classes);

struct StructuredSumTerms {
  Var loss;    // batch x 1
  Var log_pi;  // batch x H, the tuple posterior
};

// v[p](i, c) is V(x_p, y = c) for item p of example i and logits[p] the
// per-item class scores. Tuple logits are the sum of the positions' scores.
StructuredSumTerms structured_sum_loss(const std::array<Var, 4>& v,
                                       const std::array<Var, 4>& logits,
                                       const TupleTable& table);

// -log softmax(logits)[label].
Var cross_entropy(const Var& logits, std::span<const Eigen::Index> labels);

// sum_k pi_k * (CE(y_k, label) + log pi_k), y_k the group-k constrained logits.
Var hierarchical_ce_loss(const Var& raw_logits, std::span<const Eigen::Index> labels,
                         const std::vector<layer::GroupMarginProgram>& programs,
                         const GatingDistribution& gating);

}  // namespace mplex::nets

#endif  // MPLEX_NETS_LOSSES_HPP_
