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

#include "mplex/logic/parser.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace mplex::logic {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

UnknownIdentifierError::UnknownIdentifierError(const std::string& name, std::size_t line,
                                               std::size_t column)
    : ParseError("unknown identifier '" + name + "'", line, column), name_(name) {}

namespace {

enum class Tok {
  kNumber, kIdent, kTrue, kFalse,
  kPlus, kMinus, kStar, kNot, kAnd, kOr, kLParen, kRParen,
  kGt, kGe, kLt, kLe, kEq,
  kEnd,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    const std::size_t tl = line, tc = col;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.')) {
        ++j;
      }
      out.push_back({Tok::kNumber, std::string(text.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && is_ident_char(text[j])) ++j;
      std::string word(text.substr(i, j - i));
      Tok kind = Tok::kIdent;
      if (word == "true") kind = Tok::kTrue;
      if (word == "false") kind = Tok::kFalse;
      out.push_back({kind, std::move(word), tl, tc});
      advance(j - i);
      continue;
    }
    auto two = text.substr(i, 2);
    if (two == ">=" || two == "<=") {
      out.push_back({two == ">=" ? Tok::kGe : Tok::kLe, std::string(two), tl, tc});
      advance(2);
      continue;
    }
    Tok kind;
    switch (c) {
      case '+': kind = Tok::kPlus; break;
      case '-': kind = Tok::kMinus; break;
      case '*': kind = Tok::kStar; break;
      case '!': kind = Tok::kNot; break;
      case '&': kind = Tok::kAnd; break;
      case '|': kind = Tok::kOr; break;
      case '(': kind = Tok::kLParen; break;
      case ')': kind = Tok::kRParen; break;
      case '>': kind = Tok::kGt; break;
      case '<': kind = Tok::kLt; break;
      case '=': kind = Tok::kEq; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
    }
    out.push_back({kind, std::string(1, c), tl, tc});
    advance(1);
  }
  out.push_back({Tok::kEnd, "", line, col});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> tokens, const VarOrder& order)
      : tokens_(std::move(tokens)), order_(order) {}

  Formula parse_all() {
    Formula f = parse_or();
    if (peek().kind != Tok::kEnd) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, peek().line, peek().column);
  }

  Formula parse_or() {
    std::vector<Formula> parts{parse_and()};
    while (accept(Tok::kOr)) parts.push_back(parse_and());
    return Formula::disjunction(std::move(parts));
  }

  Formula parse_and() {
    std::vector<Formula> parts{parse_unary()};
    while (accept(Tok::kAnd)) parts.push_back(parse_unary());
    return Formula::conjunction(std::move(parts));
  }

  Formula parse_unary() {
    if (accept(Tok::kNot)) return Formula::negation(parse_unary());
    if (accept(Tok::kLParen)) {
      Formula inner = parse_or();
      if (!accept(Tok::kRParen)) fail("expected ')'");
      return inner;
    }
    if (accept(Tok::kTrue)) return Formula::truth();
    if (accept(Tok::kFalse)) return Formula::falsity();
    return parse_atom();
  }

  Formula parse_atom() {
    LinExpr lhs = parse_linexpr();
    std::optional<Cmp> cmp;
    switch (peek().kind) {
      case Tok::kGt: cmp = Cmp::kGt; break;
      case Tok::kGe: cmp = Cmp::kGe; break;
      case Tok::kLt: cmp = Cmp::kLt; break;
      case Tok::kLe: cmp = Cmp::kLe; break;
      case Tok::kEq: cmp = Cmp::kEq; break;
      default: fail("expected comparison operator");
    }
    take();
    LinExpr rhs = parse_linexpr();
    return Formula::atom(lhs - rhs, *cmp);
  }

  LinExpr parse_linexpr() {
    LinExpr expr;
    Rational sign = 1;
    if (accept(Tok::kMinus)) sign = -1;
    parse_term(expr, sign);
    while (true) {
      if (accept(Tok::kPlus)) {
        parse_term(expr, 1);
      } else if (accept(Tok::kMinus)) {
        parse_term(expr, -1);
      } else {
        break;
      }
    }
    return expr;
  }

  void parse_term(LinExpr& expr, const Rational& sign) {
    if (peek().kind == Tok::kNumber) {
      const Token& tok = take();
      auto value = parse_decimal(tok.text);
      if (!value) throw ParseError("malformed number '" + tok.text + "'", tok.line, tok.column);
      if (accept(Tok::kStar)) {
        expr.add_term(ident(), sign * *value);
      } else {
        expr.add_constant(sign * *value);
      }
      return;
    }
    if (peek().kind == Tok::kIdent) {
      expr.add_term(ident(), sign);
      return;
    }
    fail("expected number or identifier");
  }

  VarId ident() {
    if (peek().kind != Tok::kIdent) fail("expected identifier");
    const Token& tok = take();
    auto v = order_.find(tok.text);
    if (!v) throw UnknownIdentifierError(tok.text, tok.line, tok.column);
    return *v;
  }

  std::vector<Token> tokens_;
  const VarOrder& order_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse(std::string_view text, const VarOrder& order) {
  return Parser(tokenize(text), order).parse_all();
}

std::vector<std::string> scan_identifiers(std::string_view text) {
  std::vector<std::string> names;
  for (const auto& tok : tokenize(text)) {
    if (tok.kind != Tok::kIdent) continue;
    if (std::find(names.begin(), names.end(), tok.text) == names.end()) {
      names.push_back(tok.text);
    }
  }
  return names;
}

}  // namespace mplex::logic
