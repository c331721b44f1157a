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

// Differentiable operations. Elementwise binary ops accept equal shapes or a
// 1x1 operand broadcast against the other; nothing else is broadcast.

#ifndef MPLEX_GRAD_OPS_HPP_
#define MPLEX_GRAD_OPS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "mplex/grad/tape.hpp"

namespace mplex::grad {

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var div(const Var& a, const Var& b);
Var neg(const Var& a);

Var exp(const Var& a);
Var log(const Var& a);
Var sqrt(const Var& a);
Var square(const Var& a);
Var tanh(const Var& a);
Var sigmoid(const Var& a);
// log(1 + exp(a)), overflow safe.
Var softplus(const Var& a);
// log(exp(w) - 1) for w > 0, the softplus inverse.
Var softplus_inverse(const Var& w);

// Elementwise max/min. On ties the gradient goes to the first argument.
Var maximum(const Var& a, const Var& b);
Var minimum(const Var& a, const Var& b);

// a * c and a + c for a plain constant c.
Var scale(const Var& a, double c);
Var shift(const Var& a, double c);

// Reductions.
Var sum(const Var& a);             // -> 1x1
Var mean(const Var& a);            // -> 1x1
Var sum_rows(const Var& a);        // n x k -> n x 1
Var logsumexp(const Var& a);       // all elements -> 1x1, max-shifted
Var logsumexp_rows(const Var& a);  // n x k -> n x 1, max-shifted
Var log_softmax_rows(const Var& a);

// Linear algebra.
Var matmul(const Var& a, const Var& b);
// W (m x n) times column x (n x 1).
Var matvec(const Var& w, const Var& x);
// Batched affine map: x (batch x in), w (out x in), b (1 x out) -> x w^T + b.
Var affine(const Var& w, const Var& b, const Var& x);

// Structural.
Var columns(const Var& a, Eigen::Index start, Eigen::Index count);
Var hstack(std::span<const Var> parts);
Var vstack(std::span<const Var> parts);
Var gather_rows(const Var& a, std::span<const Eigen::Index> rows);
// out(i, 0) = a(i, index[i]).
Var pick(const Var& a, std::span<const Eigen::Index> index);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return mul(a, b); }
inline Var operator/(const Var& a, const Var& b) { return div(a, b); }
inline Var operator-(const Var& a) { return neg(a); }
inline Var operator+(const Var& a, double c) { return shift(a, c); }
inline Var operator+(double c, const Var& a) { return shift(a, c); }
inline Var operator-(const Var& a, double c) { return shift(a, -c); }
inline Var operator-(double c, const Var& a) { return shift(neg(a), c); }
inline Var operator*(const Var& a, double c) { return scale(a, c); }
inline Var operator*(double c, const Var& a) { return scale(a, c); }

// Scalar helpers shared with the non-differentiable code paths.
double softplus(double v);
double softplus_inverse(double w);
double sigmoid(double v);

}  // namespace mplex::grad

#endif  // MPLEX_GRAD_OPS_HPP_
