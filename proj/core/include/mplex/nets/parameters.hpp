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

#ifndef MPLEX_NETS_PARAMETERS_HPP_
#define MPLEX_NETS_PARAMETERS_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "mplex/grad/tape.hpp"

namespace mplex::nets {

using grad::Tape;
using grad::Tensor;
using grad::Var;

// Parameters bound as leaves on one tape, indexed like the store.
using Binding = std::vector<Var>;

// Named trainable tensors. Models keep indices into a store.
class ParameterStore {
 public:
  std::size_t add(std::string name, Tensor init);

  std::size_t size() const { return values_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const Tensor& value(std::size_t i) const { return values_.at(i); }
  Tensor& value(std::size_t i) { return values_.at(i); }
  // Index of the parameter with this name; throws when absent.
  std::size_t find(const std::string& name) const;
  std::size_t scalar_count() const;

  Binding bind(Tape& tape) const;
  // Gradient of each parameter, zero where unreached.
  std::vector<Tensor> gradients(const grad::Gradients& g, const Binding& binding) const;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> values_;
};

}  // namespace mplex::nets

#endif  // MPLEX_NETS_PARAMETERS_HPP_
