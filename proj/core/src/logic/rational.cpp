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

#include "mplex/logic/rational.hpp"

#include <cctype>
#include <cmath>
#include <limits>

namespace mplex::logic {

std::optional<Rational> parse_decimal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::string digits;
  std::size_t fraction_digits = 0;
  bool seen_point = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_point) return std::nullopt;
      seen_point = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    digits.push_back(c);
    if (seen_point) ++fraction_digits;
  }
  if (digits.empty()) return std::nullopt;
  if (seen_point && fraction_digits == 0) return std::nullopt;

  mpz_class numerator(digits, 10);
  mpz_class denominator;
  mpz_ui_pow_ui(denominator.get_mpz_t(), 10, fraction_digits);
  Rational result(numerator, denominator);
  result.canonicalize();
  return result;
}

Rational from_double(double value) {
  // mpq_set_d is exact for finite inputs.
  Rational result;
  mpq_set_d(result.get_mpq_t(), value);
  return result;
}

double double_above(const Rational& value, bool strict) {
  // get_d truncates toward zero, so walk up at most a couple of ulps.
  double d = value.get_d();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  while (true) {
    const int cmp = ::cmp(from_double(d), value);
    if (cmp > 0 || (!strict && cmp == 0)) break;
    d = std::nextafter(d, kInf);
  }
  // Walk back down while the previous double still qualifies.
  while (true) {
    const double prev = std::nextafter(d, -kInf);
    const int cmp = ::cmp(from_double(prev), value);
    if (cmp > 0 || (!strict && cmp == 0)) {
      d = prev;
    } else {
      break;
    }
  }
  return d;
}

double double_below(const Rational& value, bool strict) {
  return -double_above(-value, strict);
}

double to_nearest_double(const Rational& value) {
  const double lo = double_below(value, false);
  const double hi = double_above(value, false);
  if (lo == hi) return lo;
  const Rational dlo = value - from_double(lo);
  const Rational dhi = from_double(hi) - value;
  const int c = ::cmp(dlo, dhi);
  if (c < 0) return lo;
  if (c > 0) return hi;
  // Tie: pick the even mantissa.
  int exp = 0;
  const double m = std::frexp(lo, &exp) * std::ldexp(1.0, 53);
  return std::fmod(m, 2.0) == 0.0 ? lo : hi;
}

bool has_finite_decimal(const Rational& value) {
  mpz_class den = value.get_den();
  for (unsigned long p : {2UL, 5UL}) {
    while (mpz_divisible_ui_p(den.get_mpz_t(), p)) {
      mpz_divexact_ui(den.get_mpz_t(), den.get_mpz_t(), p);
    }
  }
  return den == 1;
}

std::string magnitude_string(const Rational& value) {
  const Rational mag = abs(value);
  if (!has_finite_decimal(mag)) {
    return mag.get_num().get_str() + "/" + mag.get_den().get_str();
  }
  // Scale by 10^k until integral.
  mpz_class num = mag.get_num();
  const mpz_class den = mag.get_den();
  std::size_t places = 0;
  mpz_class scale = 1;
  while (mpz_divisible_p(mpz_class(num * scale).get_mpz_t(), den.get_mpz_t()) == 0) {
    scale *= 10;
    ++places;
  }
  const mpz_class scaled = num * scale / den;
  std::string digits = scaled.get_str();
  if (places == 0) return digits;
  if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
  digits.insert(digits.size() - places, ".");
  return digits;
}

std::string to_string(const Rational& value) {
  return (sgn(value) < 0 ? "-" : "") + magnitude_string(value);
}

}  // namespace mplex::logic
