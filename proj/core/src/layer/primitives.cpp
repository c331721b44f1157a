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

#include "mplex/layer/primitives.hpp"

#include <cmath>

#include "mplex/grad/ops.hpp"

namespace mplex::layer {

double softplus(double v) { return grad::softplus(v); }

double softplus_offset(double a, double b) {
  const double width = b - a;
  if (!(width > 0.0)) {
    throw DomainError("softplus_offset needs b > a (got a=" + std::to_string(a) +
                      ", b=" + std::to_string(b) + ")");
  }
  return grad::softplus_inverse(width);
}

double interval_transform(double raw, double a, double b) {
  const double k = softplus_offset(a, b);
  return b - softplus(k - softplus(raw));
}

double interval_offset(double raw, double width) {
  if (!(width > 0.0)) throw DomainError("interval width must be positive");
  const double s = softplus(raw);
  // width - g(k - s) == s - log1p(expm1(s) * exp(-width)); the right-hand
  // side keeps full relative precision when s is tiny next to width.
  if (s <= width) return s - std::log1p(std::expm1(s) * std::exp(-width));
  return width - softplus(grad::softplus_inverse(width) - s);
}

}  // namespace mplex::layer
