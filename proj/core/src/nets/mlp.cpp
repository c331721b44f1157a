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

#include "mplex/nets/mlp.hpp"

#include <cmath>

#include "mplex/grad/ops.hpp"

namespace mplex::nets {

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "softplus") return Activation::kSoftplus;
  throw Error("unknown activation '" + std::string(name) + "'");
}

std::string_view activation_name(Activation a) {
  return a == Activation::kTanh ? "tanh" : "softplus";
}

Mlp::Mlp(ParameterStore& store, const std::string& name, std::vector<std::size_t> sizes,
         Activation activation, std::mt19937_64& rng)
    : sizes_(std::move(sizes)), activation_(activation) {
  if (sizes_.size() < 2) throw Error("an MLP needs at least input and output sizes");
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(sizes_[l]);
    const auto out = static_cast<Eigen::Index>(sizes_[l + 1]);
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> u(-limit, limit);
    Tensor w(out, in);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
    weights_.push_back(store.add(name + ".w" + std::to_string(l), std::move(w)));
    biases_.push_back(store.add(name + ".b" + std::to_string(l), Tensor::Zero(1, out)));
  }
}

Mlp Mlp::attach(const ParameterStore& store, const std::string& name,
                std::vector<std::size_t> sizes, Activation activation) {
  Mlp m;
  m.sizes_ = std::move(sizes);
  m.activation_ = activation;
  for (std::size_t l = 0; l + 1 < m.sizes_.size(); ++l) {
    const std::size_t w = store.find(name + ".w" + std::to_string(l));
    const std::size_t b = store.find(name + ".b" + std::to_string(l));
    if (store.value(w).rows() != static_cast<Eigen::Index>(m.sizes_[l + 1]) ||
        store.value(w).cols() != static_cast<Eigen::Index>(m.sizes_[l])) {
      throw Error("parameter '" + store.name(w) + "' does not match the layer sizes");
    }
    m.weights_.push_back(w);
    m.biases_.push_back(b);
  }
  return m;
}

Var Mlp::forward(const Binding& params, const Var& x) const {
  Var h = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    h = grad::affine(params[weights_[l]], params[biases_[l]], h);
    if (l + 1 < weights_.size()) {
      h = activation_ == Activation::kTanh ? grad::tanh(h) : grad::softplus(h);
    }
  }
  return h;
}

}  // namespace mplex::nets
