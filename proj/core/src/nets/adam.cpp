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

#include "mplex/nets/adam.hpp"

#include <cmath>

namespace mplex::nets {

Adam::Adam(const ParameterStore& store, AdamOptions options) : options_(options) {
  for (std::size_t i = 0; i < store.size(); ++i) {
    m_.push_back(Tensor::Zero(store.value(i).rows(), store.value(i).cols()));
    v_.push_back(Tensor::Zero(store.value(i).rows(), store.value(i).cols()));
  }
}

void Adam::step(ParameterStore& store, const std::vector<Tensor>& grads) {
  if (grads.size() != m_.size()) throw Error("gradient count does not match the parameters");
  ++t_;
  const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < grads.size(); ++i) {
    m_[i] = options_.beta1 * m_[i] + (1.0 - options_.beta1) * grads[i];
    v_[i] = options_.beta2 * v_[i] + (1.0 - options_.beta2) * grads[i].array().square().matrix();
    const Tensor m_hat = m_[i] / c1;
    const Tensor v_hat = v_[i] / c2;
    store.value(i).array() -=
        options_.lr * m_hat.array() / (v_hat.array().sqrt() + options_.eps);
  }
}

}  // namespace mplex::nets
