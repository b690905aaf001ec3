// Copyright 2026 The CondSafe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CONDSAFE_SEXPR_H_
#define CONDSAFE_SEXPR_H_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace condsafe {

// An SMT-LIB s-expression: an atom (symbol, numeral, keyword or string
// literal, kept verbatim) or a parenthesized list.
class SExpr {
 public:
  SExpr() : value_(std::vector<SExpr>{}) {}
  static SExpr atom(std::string text) { return SExpr(std::move(text)); }
  static SExpr list(std::vector<SExpr> items) { return SExpr(std::move(items)); }

  bool is_atom() const { return std::holds_alternative<std::string>(value_); }
  bool is_list() const { return !is_atom(); }
  const std::string& atom() const { return std::get<std::string>(value_); }
  const std::vector<SExpr>& list() const {
    return std::get<std::vector<SExpr>>(value_);
  }
  bool is_atom(std::string_view text) const {
    return is_atom() && atom() == text;
  }

  std::string to_string() const;

  bool operator==(const SExpr&) const = default;

 private:
  explicit SExpr(std::string text) : value_(std::move(text)) {}
  explicit SExpr(std::vector<SExpr> items) : value_(std::move(items)) {}

  std::variant<std::string, std::vector<SExpr>> value_;
};

// Parses one s-expression from the front of `text`, skipping leading
// whitespace and `;` comments. Returns the expression and the number of
// bytes consumed, or nullopt if `text` ends before the expression is
// complete. An atom touching the end of `text` counts as incomplete.
// Throws ProtocolError on malformed input (e.g. a stray ')').
std::optional<std::pair<SExpr, size_t>> parse_prefix(std::string_view text);

// Parses every s-expression in `text`. Throws ProtocolError.
std::vector<SExpr> parse_sexprs(std::string_view text);

// Accumulates bytes from a stream and yields complete s-expressions.
class SExprReader {
 public:
  void feed(std::string_view bytes) { buffer_.append(bytes); }
  std::optional<SExpr> next();
  void clear() { buffer_.clear(); }

 private:
  std::string buffer_;
};

}  // namespace condsafe

#endif  // CONDSAFE_SEXPR_H_
