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

// Second evaluator over boost::multiprecision rationals, sharing nothing with
// the library's GMP-based evaluation beyond the formula tree itself.

#ifndef MPLEX_TESTS_SUPPORT_ORACLE_HPP_
#define MPLEX_TESTS_SUPPORT_ORACLE_HPP_

#include <boost/multiprecision/cpp_int.hpp>

#include <vector>

#include "mplex/logic/formula.hpp"

namespace mplex::testing {

using BigRational = boost::multiprecision::cpp_rational;

BigRational to_big(const logic::Rational& q);
BigRational to_big(double d);

bool oracle_eval(const logic::Formula& f, const std::vector<BigRational>& x);
bool oracle_eval(const logic::Formula& f, const std::vector<logic::Rational>& x);
// Evaluates at a point given in doubles, converted exactly.
bool oracle_eval(const logic::Formula& f, const std::vector<double>& x);

}  // namespace mplex::testing

#endif  // MPLEX_TESTS_SUPPORT_ORACLE_HPP_
