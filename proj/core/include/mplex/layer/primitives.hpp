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

// Scalar building blocks of the bound transforms. g is always softplus.

#ifndef MPLEX_LAYER_PRIMITIVES_HPP_
#define MPLEX_LAYER_PRIMITIVES_HPP_

#include <string>

#include "mplex/error.hpp"

namespace mplex::layer {

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain error: " + what) {}
};

double softplus(double v);

// log(exp(b - a) - 1). Throws DomainError unless b > a.
double softplus_offset(double a, double b);

// b - g(-g(raw) + k(a, b)): strictly inside (a, b), increasing in raw.
double interval_transform(double raw, double a, double b);

// interval_transform(raw, a, a + width) - a, evaluated without forming a or
// b, so it stays resolvable when |a| dwarfs the width.
double interval_offset(double raw, double width);

}  // namespace mplex::layer

#endif  // MPLEX_LAYER_PRIMITIVES_HPP_
