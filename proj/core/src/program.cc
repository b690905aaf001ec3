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

#include "condsafe/program.h"

#include <algorithm>
#include <set>
#include <sstream>

#include "condsafe/errors.h"

namespace condsafe {

Integer floor_div(const Integer& value, const Integer& divisor) {
  Integer q = value / divisor;  // truncates toward zero
  if (value % divisor != 0 && value < 0) --q;
  return q;
}

Integer ceil_div(const Integer& value, const Integer& divisor) {
  Integer q = value / divisor;
  if (value % divisor != 0 && value > 0) ++q;
  return q;
}

// --- LinearExpr -------------------------------------------------------------

LinearExpr LinearExpr::variable(const Var& v, Integer coeff) {
  LinearExpr e;
  e.add_term(v, coeff);
  return e;
}

void LinearExpr::add_term(const Var& v, const Integer& coeff) {
  if (coeff == 0) return;
  auto [it, inserted] = coeffs_.try_emplace(v, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) coeffs_.erase(it);
  }
}

LinearExpr LinearExpr::operator+(const LinearExpr& other) const {
  LinearExpr r = *this;
  for (const auto& [v, c] : other.coeffs_) r.add_term(v, c);
  r.constant_ += other.constant_;
  return r;
}

LinearExpr LinearExpr::operator-(const LinearExpr& other) const {
  return *this + other * Integer(-1);
}

LinearExpr LinearExpr::operator*(const Integer& factor) const {
  LinearExpr r;
  if (factor == 0) return r;
  for (const auto& [v, c] : coeffs_) r.coeffs_.emplace(v, c * factor);
  r.constant_ = constant_ * factor;
  return r;
}

// --- LinearConstraint -------------------------------------------------------

LinearConstraint::LinearConstraint(std::map<Var, Integer> coeffs,
                                   Integer constant)
    : coeffs_(std::move(coeffs)), constant_(std::move(constant)) {
  canonicalize();
}

LinearConstraint::LinearConstraint(const LinearExpr& expr)
    : coeffs_(expr.coeffs()), constant_(expr.constant()) {
  canonicalize();
}

void LinearConstraint::canonicalize() {
  std::erase_if(coeffs_, [](const auto& entry) { return entry.second == 0; });
  if (coeffs_.empty()) {
    constant_ = constant_ <= 0 ? 0 : 1;
    return;
  }
  Integer g = 0;
  for (const auto& [v, c] : coeffs_) {
    g = boost::multiprecision::gcd(g, boost::multiprecision::abs(c));
  }
  if (g > 1) {
    for (auto& [v, c] : coeffs_) c /= g;
    constant_ = ceil_div(constant_, g);
  }
}

Integer LinearConstraint::coeff(const Var& v) const {
  auto it = coeffs_.find(v);
  return it == coeffs_.end() ? Integer(0) : it->second;
}

bool LinearConstraint::mentions_primed() const {
  return std::any_of(coeffs_.begin(), coeffs_.end(),
                     [](const auto& e) { return e.first.primed; });
}

bool LinearConstraint::mentions_unprimed() const {
  return std::any_of(coeffs_.begin(), coeffs_.end(),
                     [](const auto& e) { return !e.first.primed; });
}

LinearConstraint LinearConstraint::primed() const {
  std::map<Var, Integer> out;
  for (const auto& [v, c] : coeffs_) out[v.as_primed()] += c;
  return LinearConstraint(std::move(out), constant_);
}

LinearConstraint LinearConstraint::unprimed() const {
  std::map<Var, Integer> out;
  for (const auto& [v, c] : coeffs_) out[v.as_unprimed()] += c;
  return LinearConstraint(std::move(out), constant_);
}

LinearConstraint LinearConstraint::negated() const {
  std::map<Var, Integer> out;
  for (const auto& [v, c] : coeffs_) out.emplace(v, -c);
  return LinearConstraint(std::move(out), -constant_ + 1);
}

namespace {

void append_side(std::ostringstream& os, const std::vector<std::string>& terms) {
  if (terms.empty()) {
    os << "0";
    return;
  }
  for (size_t i = 0; i < terms.size(); ++i) {
    if (i > 0) os << " + ";
    os << terms[i];
  }
}

std::string term_string(const Var& v, const Integer& magnitude) {
  if (magnitude == 1) return v.to_string();
  return magnitude.str() + "*" + v.to_string();
}

}  // namespace

std::string LinearConstraint::to_string() const {
  if (is_trivially_true()) return "0 <= 0";
  if (is_trivially_false()) return "1 <= 0";
  std::vector<std::string> left, right;
  for (const auto& [v, c] : coeffs_) {
    if (c > 0) {
      left.push_back(term_string(v, c));
    } else {
      right.push_back(term_string(v, -c));
    }
  }
  if (constant_ > 0) left.push_back(constant_.str());
  if (constant_ < 0) right.push_back(Integer(-constant_).str());

  std::ostringstream os;
  bool left_has_vars = std::any_of(coeffs_.begin(), coeffs_.end(),
                                   [](const auto& e) { return e.second > 0; });
  if (!left_has_vars) {
    append_side(os, right);
    os << " >= ";
    append_side(os, left);
  } else {
    append_side(os, left);
    os << " <= ";
    append_side(os, right);
  }
  return os.str();
}

std::string LinearConstraint::key() const {
  std::ostringstream os;
  for (const auto& [v, c] : coeffs_) os << v.to_string() << ':' << c << ',';
  os << '#' << constant_;
  return os.str();
}

std::string to_string(const Conjunction& conj) {
  if (conj.empty()) return "true";
  std::string out;
  for (size_t i = 0; i < conj.size(); ++i) {
    if (i > 0) out += " && ";
    out += conj[i].to_string();
  }
  return out;
}

// --- Clause -----------------------------------------------------------------

Clause Clause::canonical() const {
  std::set<LinearConstraint> lits;
  for (const auto& l : literals) {
    if (l.is_trivially_true()) return Clause{{LinearConstraint::make_true()}};
    if (!l.is_trivially_false()) lits.insert(l);
  }
  if (lits.empty()) return Clause{{LinearConstraint::make_false()}};
  return Clause{{lits.begin(), lits.end()}};
}

bool Clause::mentions_primed() const {
  return std::any_of(literals.begin(), literals.end(),
                     [](const auto& l) { return l.mentions_primed(); });
}

Clause Clause::primed() const {
  Clause out;
  for (const auto& l : literals) out.literals.push_back(l.primed());
  return out;
}

std::string Clause::to_string() const {
  std::string out;
  for (size_t i = 0; i < literals.size(); ++i) {
    if (i > 0) out += " || ";
    out += literals[i].to_string();
  }
  return out;
}

std::string Clause::key() const {
  Clause c = canonical();
  std::string out;
  for (const auto& l : c.literals) out += l.key() + ";";
  return out;
}

// --- Valuation / evaluation ---------------------------------------------------

const Integer& Valuation::get(const Var& v) const {
  auto it = values_.find(v);
  if (it == values_.end()) {
    throw IncompleteValuation("no value for variable " + v.to_string());
  }
  return it->second;
}

bool evaluate(const LinearConstraint& c, const Valuation& v) {
  Integer sum = c.constant();
  for (const auto& [var, coeff] : c.coeffs()) sum += coeff * v.get(var);
  return sum <= 0;
}

bool evaluate(std::span<const LinearConstraint> conj, const Valuation& v) {
  return std::all_of(conj.begin(), conj.end(),
                     [&](const auto& c) { return evaluate(c, v); });
}

bool evaluate(const Clause& clause, const Valuation& v) {
  return std::any_of(clause.literals.begin(), clause.literals.end(),
                     [&](const auto& c) { return evaluate(c, v); });
}

namespace {

Integer value_of(const LinearExpr& e, const Valuation& v) {
  Integer sum = e.constant();
  for (const auto& [var, coeff] : e.coeffs()) sum += coeff * v.get(var);
  return sum;
}

}  // namespace

bool evaluate(const RawRelation& raw, const Valuation& v) {
  Integer l = value_of(raw.lhs, v);
  Integer r = value_of(raw.rhs, v);
  switch (raw.op) {
    case RelOp::kLe: return l <= r;
    case RelOp::kLt: return l < r;
    case RelOp::kGe: return l >= r;
    case RelOp::kGt: return l > r;
    case RelOp::kEq: return l == r;
    case RelOp::kNe: return l != r;
  }
  return false;
}

std::vector<LinearConstraint> normalize_constraint(const RawRelation& raw) {
  const LinearExpr diff = raw.lhs - raw.rhs;  // lhs - rhs
  switch (raw.op) {
    case RelOp::kLe:
      return {LinearConstraint(diff)};
    case RelOp::kLt:
      return {LinearConstraint(diff + LinearExpr(1))};
    case RelOp::kGe:
      return {LinearConstraint(diff * Integer(-1))};
    case RelOp::kGt:
      return {LinearConstraint(diff * Integer(-1) + LinearExpr(1))};
    case RelOp::kEq:
      return {LinearConstraint(diff), LinearConstraint(diff * Integer(-1))};
    case RelOp::kNe:
      throw DisequalityNotAllowedHere(
          "'!=' is only allowed in assertions; split the transition instead");
  }
  return {};
}

std::vector<Clause> normalize_assertion_literal(const RawRelation& raw) {
  if (raw.op == RelOp::kNe) {
    RawRelation lt{raw.lhs, RelOp::kLt, raw.rhs};
    RawRelation gt{raw.lhs, RelOp::kGt, raw.rhs};
    Clause c;
    c.literals.push_back(normalize_constraint(lt).front());
    c.literals.push_back(normalize_constraint(gt).front());
    return {c};
  }
  std::vector<Clause> out;
  for (auto& c : normalize_constraint(raw)) out.push_back(Clause{{c}});
  return out;
}

Clause negate_conjunction(std::span<const LinearConstraint> conj) {
  if (conj.empty()) {
    throw EmptyConjunction("cannot negate an empty conjunction");
  }
  Clause out;
  for (const auto& c : conj) out.literals.push_back(c.negated());
  return out;
}

// --- Transition / Program -----------------------------------------------------

std::string Transition::to_string() const {
  return id + ": " + src + " -> " + dst + " { " + condsafe::to_string(relation) +
         " }";
}

bool Program::has_location(const Location& l) const {
  return std::find(locations.begin(), locations.end(), l) != locations.end();
}

const Transition* Program::find_transition(const std::string& id) const {
  for (const auto& t : transitions) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

Transition* Program::find_transition(const std::string& id) {
  for (auto& t : transitions) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

int Program::location_index(const Location& l) const {
  auto it = std::find(locations.begin(), locations.end(), l);
  return it == locations.end() ? -1
                               : static_cast<int>(it - locations.begin());
}

std::vector<Var> Program::unprimed_vars() const {
  std::vector<Var> out;
  for (const auto& v : vars) out.push_back(Var{v, false});
  return out;
}

std::vector<Var> Program::all_vars() const {
  std::vector<Var> out;
  for (const auto& v : vars) out.push_back(Var{v, false});
  for (const auto& v : vars) out.push_back(Var{v, true});
  return out;
}

void Program::validate() const {
  if (!has_location(init)) throw Error("init location '" + init + "' unknown");
  std::set<std::string> ids;
  std::set<std::string> declared(vars.begin(), vars.end());
  for (const auto& t : transitions) {
    if (!ids.insert(t.id).second) {
      throw Error("duplicate transition id '" + t.id + "'");
    }
    if (!has_location(t.src) || !has_location(t.dst)) {
      throw Error("transition '" + t.id + "' uses an unknown location");
    }
    for (const auto& c : t.relation) {
      for (const auto& [v, coeff] : c.coeffs()) {
        if (!declared.count(v.name)) {
          throw Error("transition '" + t.id + "' uses undeclared variable '" +
                      v.name + "'");
        }
      }
    }
  }
}

}  // namespace condsafe
