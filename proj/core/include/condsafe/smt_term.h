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

#ifndef CONDSAFE_SMT_TERM_H_
#define CONDSAFE_SMT_TERM_H_

#include <map>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "condsafe/program.h"
#include "condsafe/sexpr.h"

namespace condsafe::smt {

enum class Sort { kBool, kInt, kReal };

std::string sort_name(Sort s);

enum class Kind {
  kBoolConst,
  kNumeral,
  kSymbol,
  kAdd,
  kSub,
  kNeg,
  kMul,
  kLe,
  kGe,
  kEq,
  kNot,
  kAnd,
  kOr,
  kIte,
};

// Immutable term of the QF_NIA/QF_LRA fragment we emit:
// + - * <= >= = not or and ite, numerals, booleans and constants.
class Term {
 public:
  Term();  // false

  Kind kind() const { return node_->kind; }
  Sort sort() const { return node_->sort; }
  const Integer& value() const { return node_->value; }
  bool bool_value() const { return node_->value != 0; }
  const std::string& name() const { return node_->name; }
  const std::vector<Term>& args() const { return node_->args; }

  SExpr to_sexpr() const;
  std::string to_string() const { return to_sexpr().to_string(); }

  bool operator==(const Term& other) const;

  // Builds a node without simplification. Prefer the helpers below.
  static Term make(Kind kind, Sort sort, std::vector<Term> args,
                   Integer value = 0, std::string name = {});

 private:
  struct Node {
    Kind kind;
    Sort sort;
    Integer value;
    std::string name;
    std::vector<Term> args;
  };
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

Term bool_const(bool b);
Term int_const(const Integer& v);
Term real_const(const Integer& v);
Term numeral(const Integer& v, Sort sort);
Term symbol(std::string name, Sort sort);

// n-ary helpers fold away neutral elements; add({}) is 0, and_({}) is
// true, or_({}) is false.
Term add(std::vector<Term> terms, Sort sort = Sort::kInt);
Term sub(const Term& a, const Term& b);
Term neg(const Term& a);
Term mul(std::vector<Term> terms);
Term le(const Term& a, const Term& b);
Term ge(const Term& a, const Term& b);
Term eq(const Term& a, const Term& b);
Term not_(const Term& a);
Term and_(std::vector<Term> terms);
Term or_(std::vector<Term> terms);
Term implies(const Term& a, const Term& b);
Term ite(const Term& c, const Term& a, const Term& b);

struct Declaration {
  std::string name;
  Sort sort = Sort::kInt;

  bool operator==(const Declaration&) const = default;
};

using SortEnv = std::map<std::string, Sort>;

// Inverse of Term::to_sexpr. Symbols must be declared in `env`. Throws
// ProtocolError.
Term term_from_sexpr(const SExpr& e, const SortEnv& env);

// A self-contained query: declarations and assertions.
struct Script {
  std::string logic = "QF_NIA";
  std::vector<Declaration> declarations;
  std::vector<Term> assertions;

  bool operator==(const Script& other) const;
};

// Renders set-logic, declare-fun and assert commands followed by
// (check-sat).
std::string to_smtlib(const Script& script);
// Reads back the commands emitted by to_smtlib. Throws ProtocolError.
Script parse_script(std::string_view text);

using Value = std::variant<Integer, bool>;

class Model {
 public:
  Model() = default;
  void set(const std::string& name, Value v) { values_[name] = std::move(v); }
  bool contains(const std::string& name) const {
    return values_.count(name) > 0;
  }
  // Throws ModelIncomplete.
  const Integer& int_value(const std::string& name) const;
  bool bool_value(const std::string& name) const;
  const std::map<std::string, Value>& values() const { return values_; }

 private:
  std::map<std::string, Value> values_;
};

// Parses a get-model response: either (model (define-fun ...) ...) or
// ((define-fun ...) ...). Only Int and Bool constants are kept.
Model parse_model(const SExpr& response);

// Evaluates a ground term under `model` (Int/Bool only). Throws
// ModelIncomplete for unassigned symbols.
Value evaluate(const Term& t, const Model& model);

}  // namespace condsafe::smt

#endif  // CONDSAFE_SMT_TERM_H_
