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

#include "oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace mplex::testing {

BigRational to_big(const logic::Rational& q) {
  using boost::multiprecision::cpp_int;
  return BigRational(cpp_int(q.get_num().get_str()), cpp_int(q.get_den().get_str()));
}

BigRational to_big(double d) {
  using boost::multiprecision::cpp_int;
  if (!std::isfinite(d)) throw std::invalid_argument("non-finite value");
  int exp = 0;
  const double mant = std::frexp(d, &exp);
  // mant * 2^53 is an integer for every finite double.
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  BigRational r = BigRational(cpp_int(scaled));
  if (exp >= 0) {
    r *= BigRational(cpp_int(1) << exp);
  } else {
    r /= BigRational(cpp_int(1) << -exp);
  }
  return r;
}

namespace {

bool compare(const BigRational& v, logic::Cmp cmp) {
  switch (cmp) {
    case logic::Cmp::kGt: return v > 0;
    case logic::Cmp::kGe: return v >= 0;
    case logic::Cmp::kLt: return v < 0;
    case logic::Cmp::kLe: return v <= 0;
    case logic::Cmp::kEq: return v == 0;
  }
  return false;
}

}  // namespace

bool oracle_eval(const logic::Formula& f, const std::vector<BigRational>& x) {
  using K = logic::Formula::Kind;
  switch (f.kind()) {
    case K::kTrue: return true;
    case K::kFalse: return false;
    case K::kAtom: {
      const auto& a = f.as_atom();
      BigRational v = to_big(a.lhs.constant());
      for (const auto& [var, c] : a.lhs.coeffs()) v += to_big(c) * x.at(var.index);
      return compare(v, a.cmp);
    }
    case K::kNot: return !oracle_eval(f.children().front(), x);
    case K::kAnd:
      for (const auto& c : f.children()) {
        if (!oracle_eval(c, x)) return false;
      }
      return true;
    case K::kOr:
      for (const auto& c : f.children()) {
        if (oracle_eval(c, x)) return true;
      }
      return false;
  }
  return false;
}

bool oracle_eval(const logic::Formula& f, const std::vector<logic::Rational>& x) {
  std::vector<BigRational> big;
  for (const auto& q : x) big.push_back(to_big(q));
  return oracle_eval(f, big);
}

bool oracle_eval(const logic::Formula& f, const std::vector<double>& x) {
  std::vector<BigRational> big;
  for (double d : x) big.push_back(to_big(d));
  return oracle_eval(f, big);
}

}  // namespace mplex::testing
