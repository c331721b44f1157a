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

#ifndef MPLEX_NETS_MLP_HPP_
#define MPLEX_NETS_MLP_HPP_

#include <cstddef>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mplex/nets/parameters.hpp"

namespace mplex::nets {

enum class Activation { kTanh, kSoftplus };

Activation parse_activation(std::string_view name);
std::string_view activation_name(Activation a);

// Fully connected network; the last layer is linear.
class Mlp {
 public:
  Mlp() = default;
  // Glorot-uniform weights, zero biases.
  Mlp(ParameterStore& store, const std::string& name, std::vector<std::size_t> sizes,
      Activation activation, std::mt19937_64& rng);
  // Re-attaches to parameters already present in the store (after loading).
  static Mlp attach(const ParameterStore& store, const std::string& name,
                    std::vector<std::size_t> sizes, Activation activation);

  // x: batch x sizes.front() -> batch x sizes.back().
  Var forward(const Binding& params, const Var& x) const;

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  Activation activation() const { return activation_; }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> weights_;
  std::vector<std::size_t> biases_;
  Activation activation_ = Activation::kTanh;
};

}  // namespace mplex::nets

#endif  // MPLEX_NETS_MLP_HPP_
