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

#ifndef MPLEX_LOGIC_RATIONAL_HPP_
#define MPLEX_LOGIC_RATIONAL_HPP_

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace mplex::logic {

// Exact rational number. Always kept canonical (reduced, positive denominator).
using Rational = mpq_class;

// Parses "12", "3.5", "0.125" exactly. Returns nullopt on malformed input.
std::optional<Rational> parse_decimal(std::string_view text);

// Exact conversion; every finite double is a dyadic rational.
Rational from_double(double value);

// Round-to-nearest (ties to even) lowering used when coefficients leave the
// exact world.
double to_nearest_double(const Rational& value);

// Smallest double d with d > value (strict) or d >= value (non-strict).
double double_above(const Rational& value, bool strict);
// Largest double d with d < value (strict) or d <= value (non-strict).
double double_below(const Rational& value, bool strict);

// True when the value has a finite decimal expansion (denominator 2^a 5^b).
bool has_finite_decimal(const Rational& value);

// Exact decimal rendering of the absolute value when has_finite_decimal(),
// otherwise "p/q". No sign is emitted for negative values.
std::string magnitude_string(const Rational& value);

// Signed rendering, e.g. "-3.5" or "1/3".
std::string to_string(const Rational& value);

}  // namespace mplex::logic

#endif  // MPLEX_LOGIC_RATIONAL_HPP_
