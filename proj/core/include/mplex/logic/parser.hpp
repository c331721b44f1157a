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

// Recursive-descent parser for the ASCII formula grammar:
//
//   formula := or
//   or      := and ("|" and)*
//   and     := unary ("&" unary)*
//   unary   := "!" unary | "(" formula ")" | "true" | "false" | atom
//   atom    := linexpr cmp linexpr
//   cmp     := ">=" | "<=" | ">" | "<" | "="
//   linexpr := ["-"] term (("+" | "-") term)*
//   term    := number | number "*" ident | ident
//   number  := digits ["." digits]
//   ident   := [A-Za-z_][A-Za-z0-9_]*
//
// Atoms are canonicalised to (lhs - rhs) cmp 0. Atoms whose variables cancel
// fold to true/false. Lines starting with '#' are comments.

#ifndef MPLEX_LOGIC_PARSER_HPP_
#define MPLEX_LOGIC_PARSER_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mplex/error.hpp"
#include "mplex/logic/formula.hpp"

namespace mplex::logic {

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnknownIdentifierError : public ParseError {
 public:
  UnknownIdentifierError(const std::string& name, std::size_t line, std::size_t column);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

Formula parse(std::string_view text, const VarOrder& order);

// Identifiers in order of first appearance; used when no explicit order is
// given on the command line.
std::vector<std::string> scan_identifiers(std::string_view text);

}  // namespace mplex::logic

#endif  // MPLEX_LOGIC_PARSER_HPP_
