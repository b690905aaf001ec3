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

#include "condsafe/smt_term.h"

#include <algorithm>
#include <sstream>

#include "condsafe/errors.h"

namespace condsafe::smt {

std::string sort_name(Sort s) {
  switch (s) {
    case Sort::kBool: return "Bool";
    case Sort::kInt: return "Int";
    case Sort::kReal: return "Real";
  }
  return "?";
}

Term::Term() : Term(bool_const(false)) {}

Term Term::make(Kind kind, Sort sort, std::vector<Term> args, Integer value,
                std::string name) {
  return Term(std::make_shared<const Node>(
      Node{kind, sort, std::move(value), std::move(name), std::move(args)}));
}

bool Term::operator==(const Term& other) const {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  return a.kind == b.kind && a.sort == b.sort && a.value == b.value &&
         a.name == b.name && a.args == b.args;
}

namespace {

const char* op_name(Kind k) {
  switch (k) {
    case Kind::kAdd: return "+";
    case Kind::kSub: return "-";
    case Kind::kNeg: return "-";
    case Kind::kMul: return "*";
    case Kind::kLe: return "<=";
    case Kind::kGe: return ">=";
    case Kind::kEq: return "=";
    case Kind::kNot: return "not";
    case Kind::kAnd: return "and";
    case Kind::kOr: return "or";
    case Kind::kIte: return "ite";
    default: return "?";
  }
}

SExpr numeral_sexpr(const Integer& v, Sort sort) {
  Integer mag = v < 0 ? Integer(-v) : v;
  std::string text = mag.str();
  if (sort == Sort::kReal) text += ".0";
  if (v < 0) return SExpr::list({SExpr::atom("-"), SExpr::atom(text)});
  return SExpr::atom(text);
}

bool is_numeral_atom(const std::string& s) {
  if (s.empty()) return false;
  size_t dot = s.find('.');
  for (size_t i = 0; i < s.size(); ++i) {
    if (i == dot) continue;
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return dot != 0 && dot != s.size() - 1;
}

// Parses "12" or "12.0"; decimals with non-zero fractions are rejected.
std::pair<Integer, Sort> parse_numeral(const std::string& s) {
  size_t dot = s.find('.');
  if (dot == std::string::npos) return {Integer(s), Sort::kInt};
  std::string frac = s.substr(dot + 1);
  if (frac.find_first_not_of('0') != std::string::npos) {
    throw ProtocolError("non-integral decimal '" + s + "'");
  }
  return {Integer(s.substr(0, dot)), Sort::kReal};
}

}  // namespace

SExpr Term::to_sexpr() const {
  switch (kind()) {
    case Kind::kBoolConst:
      return SExpr::atom(bool_value() ? "true" : "false");
    case Kind::kNumeral:
      return numeral_sexpr(value(), sort());
    case Kind::kSymbol:
      return SExpr::atom(name());
    default: {
      std::vector<SExpr> items = {SExpr::atom(op_name(kind()))};
      for (const auto& a : args()) items.push_back(a.to_sexpr());
      return SExpr::list(std::move(items));
    }
  }
}

Term bool_const(bool b) {
  return Term::make(Kind::kBoolConst, Sort::kBool, {}, b ? 1 : 0);
}
Term int_const(const Integer& v) { return numeral(v, Sort::kInt); }
Term real_const(const Integer& v) { return numeral(v, Sort::kReal); }
Term numeral(const Integer& v, Sort sort) {
  return Term::make(Kind::kNumeral, sort, {}, v);
}
Term symbol(std::string name, Sort sort) {
  return Term::make(Kind::kSymbol, sort, {}, 0, std::move(name));
}

namespace {

bool is_num(const Term& t, const Integer& v) {
  return t.kind() == Kind::kNumeral && t.value() == v;
}

}  // namespace

Term add(std::vector<Term> terms, Sort sort) {
  std::erase_if(terms, [](const Term& t) { return is_num(t, 0); });
  if (terms.empty()) return numeral(0, sort);
  if (terms.size() == 1) return terms.front();
  Sort s = terms.front().sort();
  return Term::make(Kind::kAdd, s, std::move(terms));
}

Term sub(const Term& a, const Term& b) {
  if (is_num(b, 0)) return a;
  return Term::make(Kind::kSub, a.sort(), {a, b});
}

Term neg(const Term& a) {
  if (a.kind() == Kind::kNumeral) return numeral(-a.value(), a.sort());
  if (a.kind() == Kind::kNeg) return a.args().front();
  return Term::make(Kind::kNeg, a.sort(), {a});
}

Term mul(std::vector<Term> terms) {
  if (terms.empty()) return int_const(1);
  Sort s = terms.front().sort();
  for (const auto& t : terms) {
    if (is_num(t, 0)) return numeral(0, s);
  }
  std::erase_if(terms, [](const Term& t) { return is_num(t, 1); });
  if (terms.empty()) return numeral(1, s);
  if (terms.size() == 1) return terms.front();
  return Term::make(Kind::kMul, s, std::move(terms));
}

namespace {

Term compare(Kind kind, const Term& a, const Term& b) {
  if (a.kind() == Kind::kNumeral && b.kind() == Kind::kNumeral) {
    switch (kind) {
      case Kind::kLe: return bool_const(a.value() <= b.value());
      case Kind::kGe: return bool_const(a.value() >= b.value());
      default: return bool_const(a.value() == b.value());
    }
  }
  return Term::make(kind, Sort::kBool, {a, b});
}

}  // namespace

Term le(const Term& a, const Term& b) { return compare(Kind::kLe, a, b); }
Term ge(const Term& a, const Term& b) { return compare(Kind::kGe, a, b); }
Term eq(const Term& a, const Term& b) {
  if (a.sort() == Sort::kBool) return Term::make(Kind::kEq, Sort::kBool, {a, b});
  return compare(Kind::kEq, a, b);
}

Term not_(const Term& a) {
  if (a.kind() == Kind::kBoolConst) return bool_const(!a.bool_value());
  if (a.kind() == Kind::kNot) return a.args().front();
  return Term::make(Kind::kNot, Sort::kBool, {a});
}

Term and_(std::vector<Term> terms) {
  std::vector<Term> kept;
  for (auto& t : terms) {
    if (t.kind() == Kind::kBoolConst) {
      if (!t.bool_value()) return bool_const(false);
      continue;
    }
    kept.push_back(std::move(t));
  }
  if (kept.empty()) return bool_const(true);
  if (kept.size() == 1) return kept.front();
  return Term::make(Kind::kAnd, Sort::kBool, std::move(kept));
}

Term or_(std::vector<Term> terms) {
  std::vector<Term> kept;
  for (auto& t : terms) {
    if (t.kind() == Kind::kBoolConst) {
      if (t.bool_value()) return bool_const(true);
      continue;
    }
    kept.push_back(std::move(t));
  }
  if (kept.empty()) return bool_const(false);
  if (kept.size() == 1) return kept.front();
  return Term::make(Kind::kOr, Sort::kBool, std::move(kept));
}

Term implies(const Term& a, const Term& b) { return or_({not_(a), b}); }

Term ite(const Term& c, const Term& a, const Term& b) {
  if (c.kind() == Kind::kBoolConst) return c.bool_value() ? a : b;
  return Term::make(Kind::kIte, a.sort(), {c, a, b});
}

// --- parsing ------------------------------------------------------------------

Term term_from_sexpr(const SExpr& e, const SortEnv& env) {
  if (e.is_atom()) {
    const std::string& a = e.atom();
    if (a == "true") return bool_const(true);
    if (a == "false") return bool_const(false);
    if (is_numeral_atom(a)) {
      auto [v, sort] = parse_numeral(a);
      return numeral(v, sort);
    }
    auto it = env.find(a);
    if (it == env.end()) throw ProtocolError("undeclared symbol '" + a + "'");
    return symbol(a, it->second);
  }
  const auto& items = e.list();
  if (items.empty() || !items.front().is_atom()) {
    throw ProtocolError("malformed term " + e.to_string());
  }
  const std::string& op = items.front().atom();
  std::vector<Term> args;
  if (op == "-" && items.size() == 2 && items[1].is_atom() &&
      is_numeral_atom(items[1].atom())) {
    auto [v, sort] = parse_numeral(items[1].atom());
    return numeral(-v, sort);
  }
  for (size_t i = 1; i < items.size(); ++i) {
    args.push_back(term_from_sexpr(items[i], env));
  }
  auto need = [&](size_t lo, size_t hi) {
    if (args.size() < lo || args.size() > hi) {
      throw ProtocolError("wrong arity in " + e.to_string());
    }
  };
  const size_t kMany = static_cast<size_t>(-1);
  if (op == "+") {
    need(2, kMany);
    Sort s = args.front().sort();
    return Term::make(Kind::kAdd, s, std::move(args));
  }
  if (op == "-") {
    need(1, kMany);
    Sort s = args.front().sort();
    if (args.size() == 1) return Term::make(Kind::kNeg, s, std::move(args));
    return Term::make(Kind::kSub, s, std::move(args));
  }
  if (op == "*") {
    need(2, kMany);
    Sort s = args.front().sort();
    return Term::make(Kind::kMul, s, std::move(args));
  }
  if (op == "<=") {
    need(2, 2);
    return Term::make(Kind::kLe, Sort::kBool, std::move(args));
  }
  if (op == ">=") {
    need(2, 2);
    return Term::make(Kind::kGe, Sort::kBool, std::move(args));
  }
  if (op == "=") {
    need(2, 2);
    return Term::make(Kind::kEq, Sort::kBool, std::move(args));
  }
  if (op == "not") {
    need(1, 1);
    return Term::make(Kind::kNot, Sort::kBool, std::move(args));
  }
  if (op == "and") {
    need(2, kMany);
    return Term::make(Kind::kAnd, Sort::kBool, std::move(args));
  }
  if (op == "or") {
    need(2, kMany);
    return Term::make(Kind::kOr, Sort::kBool, std::move(args));
  }
  if (op == "ite") {
    need(3, 3);
    Sort s = args[1].sort();
    return Term::make(Kind::kIte, s, std::move(args));
  }
  throw ProtocolError("unsupported operator '" + op + "'");
}

bool Script::operator==(const Script& other) const {
  return logic == other.logic && declarations == other.declarations &&
         assertions == other.assertions;
}

std::string to_smtlib(const Script& script) {
  std::ostringstream os;
  os << "(set-logic " << script.logic << ")\n";
  for (const auto& d : script.declarations) {
    os << "(declare-fun " << d.name << " () " << sort_name(d.sort) << ")\n";
  }
  for (const auto& a : script.assertions) {
    os << "(assert " << a.to_string() << ")\n";
  }
  os << "(check-sat)\n";
  return os.str();
}

namespace {

Sort parse_sort(const SExpr& e) {
  if (e.is_atom("Int")) return Sort::kInt;
  if (e.is_atom("Bool")) return Sort::kBool;
  if (e.is_atom("Real")) return Sort::kReal;
  throw ProtocolError("unsupported sort " + e.to_string());
}

}  // namespace

Script parse_script(std::string_view text) {
  Script script;
  SortEnv env;
  for (const auto& cmd : parse_sexprs(text)) {
    if (!cmd.is_list() || cmd.list().empty() || !cmd.list()[0].is_atom()) {
      throw ProtocolError("malformed command " + cmd.to_string());
    }
    const auto& items = cmd.list();
    const std::string& head = items[0].atom();
    if (head == "set-logic" && items.size() == 2) {
      script.logic = items[1].atom();
    } else if (head == "declare-fun" && items.size() == 4 &&
               items[2].is_list() && items[2].list().empty()) {
      Declaration d{items[1].atom(), parse_sort(items[3])};
      env[d.name] = d.sort;
      script.declarations.push_back(d);
    } else if (head == "declare-const" && items.size() == 3) {
      Declaration d{items[1].atom(), parse_sort(items[2])};
      env[d.name] = d.sort;
      script.declarations.push_back(d);
    } else if (head == "assert" && items.size() == 2) {
      script.assertions.push_back(term_from_sexpr(items[1], env));
    } else if (head == "check-sat" || head == "get-model" ||
               head == "set-option" || head == "exit") {
      continue;
    } else {
      throw ProtocolError("unsupported command " + cmd.to_string());
    }
  }
  return script;
}

// --- models -------------------------------------------------------------------

const Integer& Model::int_value(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end() || !std::holds_alternative<Integer>(it->second)) {
    throw ModelIncomplete("model has no integer value for '" + name + "'");
  }
  return std::get<Integer>(it->second);
}

bool Model::bool_value(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end() || !std::holds_alternative<bool>(it->second)) {
    throw ModelIncomplete("model has no boolean value for '" + name + "'");
  }
  return std::get<bool>(it->second);
}

Model parse_model(const SExpr& response) {
  if (!response.is_list()) {
    throw ProtocolError("expected a model, got " + response.to_string());
  }
  const auto* items = &response.list();
  std::vector<SExpr> body(items->begin(), items->end());
  if (!body.empty() && body.front().is_atom("model")) body.erase(body.begin());
  if (!body.empty() && body.front().is_atom("error")) {
    throw ProtocolError("solver error: " + response.to_string());
  }
  Model model;
  for (const auto& def : body) {
    if (!def.is_list() || def.list().size() != 5 ||
        !def.list()[0].is_atom("define-fun")) {
      throw ProtocolError("unexpected model entry " + def.to_string());
    }
    const auto& d = def.list();
    if (!d[2].is_list() || !d[2].list().empty()) continue;  // functions
    std::string name = d[1].atom();
    if (d[3].is_atom("Bool")) {
      if (d[4].is_atom("true")) {
        model.set(name, true);
      } else if (d[4].is_atom("false")) {
        model.set(name, false);
      } else {
        throw ProtocolError("bad boolean value " + d[4].to_string());
      }
    } else if (d[3].is_atom("Int")) {
      Term v = term_from_sexpr(d[4], {});
      if (v.kind() != Kind::kNumeral) {
        throw ProtocolError("bad integer value " + d[4].to_string());
      }
      model.set(name, v.value());
    }
  }
  return model;
}

Value evaluate(const Term& t, const Model& model) {
  auto as_int = [&](const Term& x) {
    Value v = evaluate(x, model);
    return std::get<Integer>(v);
  };
  auto as_bool = [&](const Term& x) {
    Value v = evaluate(x, model);
    return std::get<bool>(v);
  };
  switch (t.kind()) {
    case Kind::kBoolConst: return t.bool_value();
    case Kind::kNumeral: return t.value();
    case Kind::kSymbol:
      if (t.sort() == Sort::kBool) return model.bool_value(t.name());
      return model.int_value(t.name());
    case Kind::kAdd: {
      Integer s = 0;
      for (const auto& a : t.args()) s += as_int(a);
      return s;
    }
    case Kind::kSub: {
      Integer s = as_int(t.args()[0]);
      for (size_t i = 1; i < t.args().size(); ++i) s -= as_int(t.args()[i]);
      return s;
    }
    case Kind::kNeg: return Integer(-as_int(t.args()[0]));
    case Kind::kMul: {
      Integer p = 1;
      for (const auto& a : t.args()) p *= as_int(a);
      return p;
    }
    case Kind::kLe: return as_int(t.args()[0]) <= as_int(t.args()[1]);
    case Kind::kGe: return as_int(t.args()[0]) >= as_int(t.args()[1]);
    case Kind::kEq:
      if (t.args()[0].sort() == Sort::kBool) {
        return as_bool(t.args()[0]) == as_bool(t.args()[1]);
      }
      return as_int(t.args()[0]) == as_int(t.args()[1]);
    case Kind::kNot: return !as_bool(t.args()[0]);
    case Kind::kAnd:
      return std::all_of(t.args().begin(), t.args().end(), as_bool);
    case Kind::kOr:
      return std::any_of(t.args().begin(), t.args().end(), as_bool);
    case Kind::kIte:
      return as_bool(t.args()[0]) ? evaluate(t.args()[1], model)
                                  : evaluate(t.args()[2], model);
  }
  return false;
}

}  // namespace condsafe::smt
