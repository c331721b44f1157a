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

#ifndef MPLEX_GRAD_FINITE_DIFF_HPP_
#define MPLEX_GRAD_FINITE_DIFF_HPP_

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "mplex/grad/tape.hpp"

namespace mplex::grad {

// Builds a scalar output from the input leaf on the given tape.
using ScalarFn = std::function<Var(Tape&, const Var&)>;

struct FdOptions {
  double step = 1e-5;
  double tol = 1e-4;
  // Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor).
  double floor = 1e-4;
  // One-sided slopes disagreeing by more than this (relative) mark a kink.
  double kink_tol = 1e-2;
};

struct FdReport {
  bool pass = true;
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  // Coordinates (row-major flat index) skipped as non-differentiable points.
  std::vector<std::size_t> skipped;

  std::string summary() const;
};

FdReport finite_diff_check(const ScalarFn& f, const Tensor& point, const FdOptions& options = {});

}  // namespace mplex::grad

#endif  // MPLEX_GRAD_FINITE_DIFF_HPP_
