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

#ifndef MPLEX_NETS_ADAM_HPP_
#define MPLEX_NETS_ADAM_HPP_

#include <cstdint>
#include <vector>

#include "mplex/nets/parameters.hpp"

namespace mplex::nets {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(const ParameterStore& store, AdamOptions options = {});
  void step(ParameterStore& store, const std::vector<Tensor>& grads);
  std::int64_t steps() const { return t_; }

 private:
  AdamOptions options_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::int64_t t_ = 0;
};

}  // namespace mplex::nets

#endif  // MPLEX_NETS_ADAM_HPP_
