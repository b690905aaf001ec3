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

#include "condsafe/sexpr.h"

#include <cctype>

#include "condsafe/errors.h"

namespace condsafe {

std::string SExpr::to_string() const {
  if (is_atom()) return atom();
  std::string out = "(";
  const auto& items = list();
  for (size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ' ';
    out += items[i].to_string();
  }
  out += ')';
  return out;
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)); }

size_t skip_blank(std::string_view text, size_t pos) {
  while (pos < text.size()) {
    if (is_space(text[pos])) {
      ++pos;
    } else if (text[pos] == ';') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  return pos;
}

// Returns the end offset of the atom starting at `pos`, or npos if the atom
// runs to the end of the buffer.
size_t scan_atom(std::string_view text, size_t pos) {
  if (text[pos] == '"') {
    size_t i = pos + 1;
    while (i < text.size()) {
      if (text[i] == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          i += 2;  // escaped quote
          continue;
        }
        if (i + 1 == text.size()) return std::string_view::npos;
        return i + 1;
      }
      ++i;
    }
    return std::string_view::npos;
  }
  if (text[pos] == '|') {
    size_t close = text.find('|', pos + 1);
    if (close == std::string_view::npos || close + 1 == text.size()) {
      return std::string_view::npos;
    }
    return close + 1;
  }
  size_t i = pos;
  while (i < text.size() && !is_space(text[i]) && text[i] != '(' &&
         text[i] != ')' && text[i] != ';') {
    ++i;
  }
  return i == text.size() ? std::string_view::npos : i;
}

}  // namespace

std::optional<std::pair<SExpr, size_t>> parse_prefix(std::string_view text) {
  std::vector<std::vector<SExpr>> stack;
  size_t pos = skip_blank(text, 0);
  while (pos < text.size()) {
    char c = text[pos];
    if (c == '(') {
      stack.emplace_back();
      ++pos;
    } else if (c == ')') {
      if (stack.empty()) throw ProtocolError("unbalanced ')' in solver output");
      SExpr done = SExpr::list(std::move(stack.back()));
      stack.pop_back();
      ++pos;
      if (stack.empty()) return std::make_pair(std::move(done), pos);
      stack.back().push_back(std::move(done));
    } else {
      size_t end = scan_atom(text, pos);
      if (end == std::string_view::npos) return std::nullopt;
      SExpr a = SExpr::atom(std::string(text.substr(pos, end - pos)));
      pos = end;
      if (stack.empty()) return std::make_pair(std::move(a), pos);
      stack.back().push_back(std::move(a));
    }
    pos = skip_blank(text, pos);
  }
  return std::nullopt;
}

std::vector<SExpr> parse_sexprs(std::string_view text) {
  std::string padded(text);
  padded.push_back('\n');
  std::vector<SExpr> out;
  std::string_view rest = padded;
  while (true) {
    size_t start = skip_blank(rest, 0);
    if (start == rest.size()) break;
    auto parsed = parse_prefix(rest);
    if (!parsed) throw ProtocolError("incomplete s-expression");
    out.push_back(std::move(parsed->first));
    rest.remove_prefix(parsed->second);
  }
  return out;
}

std::optional<SExpr> SExprReader::next() {
  auto parsed = parse_prefix(buffer_);
  if (!parsed) return std::nullopt;
  buffer_.erase(0, parsed->second);
  return std::move(parsed->first);
}

}  // namespace condsafe
