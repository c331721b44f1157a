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

#include "mplex/nets/parameters.hpp"

namespace mplex::nets {

std::size_t ParameterStore::add(std::string name, Tensor init) {
  for (const auto& n : names_) {
    if (n == name) throw Error("duplicate parameter name '" + name + "'");
  }
  names_.push_back(std::move(name));
  values_.push_back(std::move(init));
  return values_.size() - 1;
}

std::size_t ParameterStore::find(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  throw Error("no parameter named '" + name + "'");
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += static_cast<std::size_t>(v.size());
  return n;
}

Binding ParameterStore::bind(Tape& tape) const {
  Binding out;
  out.reserve(values_.size());
  for (const auto& v : values_) out.push_back(tape.leaf(v));
  return out;
}

std::vector<Tensor> ParameterStore::gradients(const grad::Gradients& g,
                                              const Binding& binding) const {
  std::vector<Tensor> out;
  out.reserve(binding.size());
  for (const auto& v : binding) out.push_back(g.wrt(v));
  return out;
}

}  // namespace mplex::nets
