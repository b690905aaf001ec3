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

#ifndef CONDSAFE_PROGRAM_H_
#define CONDSAFE_PROGRAM_H_

#include <compare>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace condsafe {

using Integer = boost::multiprecision::cpp_int;
using Location = std::string;

// Rounds toward negative / positive infinity. `divisor` must be positive.
Integer floor_div(const Integer& value, const Integer& divisor);
Integer ceil_div(const Integer& value, const Integer& divisor);

// A program variable v, or its post-state copy v'.
struct Var {
  std::string name;
  bool primed = false;

  auto operator<=>(const Var&) const = default;
  bool operator==(const Var&) const = default;

  Var as_primed() const { return Var{name, true}; }
  Var as_unprimed() const { return Var{name, false}; }
  std::string to_string() const { return primed ? name + "'" : name; }
};

// Integer linear expression sum(coeff * var) + constant. Zero coefficients
// are never stored.
class LinearExpr {
 public:
  LinearExpr() = default;
  explicit LinearExpr(Integer constant) : constant_(std::move(constant)) {}
  static LinearExpr variable(const Var& v, Integer coeff = 1);

  const std::map<Var, Integer>& coeffs() const { return coeffs_; }
  const Integer& constant() const { return constant_; }
  void add_term(const Var& v, const Integer& coeff);
  void add_constant(const Integer& c) { constant_ += c; }

  LinearExpr operator+(const LinearExpr& other) const;
  LinearExpr operator-(const LinearExpr& other) const;
  LinearExpr operator*(const Integer& factor) const;

  bool operator==(const LinearExpr&) const = default;

 private:
  std::map<Var, Integer> coeffs_;
  Integer constant_ = 0;
};

enum class RelOp { kLe, kLt, kGe, kGt, kEq, kNe };

// A relation between two linear expressions as it appears in source text.
struct RawRelation {
  LinearExpr lhs;
  RelOp op = RelOp::kLe;
  LinearExpr rhs;
};

// Canonical integer inequality sum(coeff * var) + constant <= 0.
//
// Construction normalizes: zero coefficients are dropped, the coefficients
// are divided by their gcd (tightening the constant over the integers), and a
// variable-free constraint collapses to `0 <= 0` (true) or `1 <= 0` (false).
class LinearConstraint {
 public:
  LinearConstraint() = default;
  LinearConstraint(std::map<Var, Integer> coeffs, Integer constant);
  // e <= 0
  explicit LinearConstraint(const LinearExpr& expr);

  static LinearConstraint make_true() { return LinearConstraint(); }
  static LinearConstraint make_false() { return LinearConstraint({}, 1); }

  const std::map<Var, Integer>& coeffs() const { return coeffs_; }
  const Integer& constant() const { return constant_; }
  Integer coeff(const Var& v) const;

  bool is_constant() const { return coeffs_.empty(); }
  bool is_trivially_true() const { return coeffs_.empty() && constant_ <= 0; }
  bool is_trivially_false() const { return coeffs_.empty() && constant_ > 0; }
  bool mentions_primed() const;
  bool mentions_unprimed() const;

  // Renames every unprimed variable v to v'. Primed variables are kept.
  LinearConstraint primed() const;
  // Renames every primed variable v' to v.
  LinearConstraint unprimed() const;
  // The integer complement: not(e <= 0) is -e + 1 <= 0.
  LinearConstraint negated() const;

  // Human-readable form with non-negative coefficients on both sides, e.g.
  // "x + 1 <= y". The output re-parses to the same constraint.
  std::string to_string() const;
  // Stable textual key of the canonical form.
  std::string key() const;

  bool operator<(const LinearConstraint& o) const {
    if (coeffs_ != o.coeffs_) return coeffs_ < o.coeffs_;
    return constant_ < o.constant_;
  }
  bool operator==(const LinearConstraint&) const = default;

 private:
  void canonicalize();

  std::map<Var, Integer> coeffs_;
  Integer constant_ = 0;
};

using Conjunction = std::vector<LinearConstraint>;

// Disjunction of literals.
struct Clause {
  std::vector<LinearConstraint> literals;

  // Sorted, de-duplicated literals; a trivially true literal collapses the
  // clause to {true}, trivially false literals are dropped (unless the
  // clause would become empty).
  Clause canonical() const;
  bool mentions_primed() const;
  Clause primed() const;
  std::string to_string() const;
  std::string key() const;

  bool operator==(const Clause&) const = default;
};

class Valuation {
 public:
  Valuation() = default;
  explicit Valuation(std::map<Var, Integer> values)
      : values_(std::move(values)) {}

  void set(const Var& v, Integer value) { values_[v] = std::move(value); }
  bool contains(const Var& v) const { return values_.count(v) > 0; }
  // Throws IncompleteValuation.
  const Integer& get(const Var& v) const;
  const std::map<Var, Integer>& values() const { return values_; }

 private:
  std::map<Var, Integer> values_;
};

struct Transition {
  std::string id;
  Location src;
  Location dst;
  Conjunction relation;
  // Id of the program transition this one was derived from by narrowing.
  std::string origin;
  // Literals conjoined by successive narrowing rounds, oldest first. Empty
  // for transitions taken unchanged from the program.
  std::vector<LinearConstraint> narrowing;

  bool is_narrowed() const { return !narrowing.empty(); }
  std::string to_string() const;
};

struct Program {
  std::vector<std::string> vars;
  std::vector<Location> locations;
  Location init;
  std::vector<Transition> transitions;

  bool has_location(const Location& l) const;
  const Transition* find_transition(const std::string& id) const;
  Transition* find_transition(const std::string& id);
  int location_index(const Location& l) const;
  std::vector<Var> unprimed_vars() const;
  std::vector<Var> all_vars() const;
  // Throws Error on dangling locations, duplicate ids or unknown variables.
  void validate() const;
};

// Requirement that `formula` holds right after every execution of the
// transition named `transition`.
struct Assertion {
  std::string id;
  std::string transition;
  Clause formula;
};

// Normalizes a source relation into canonical inequalities. Strict
// inequalities are tightened, equalities split. Throws
// DisequalityNotAllowedHere for `!=`.
std::vector<LinearConstraint> normalize_constraint(const RawRelation& raw);

// Normalizes a relation that may be a disequality: the result is a CNF
// (list of clauses). `x != y` becomes the single clause x < y || x > y;
// `x = y` becomes two unit clauses.
std::vector<Clause> normalize_assertion_literal(const RawRelation& raw);

// Truth of sum(coeff * var) + constant <= 0. Throws IncompleteValuation.
bool evaluate(const LinearConstraint& c, const Valuation& v);
bool evaluate(std::span<const LinearConstraint> conj, const Valuation& v);
bool evaluate(const Clause& clause, const Valuation& v);

// Direct evaluation of a source relation, independent of normalization.
bool evaluate(const RawRelation& raw, const Valuation& v);

// not(c1 and ... and cn) as the clause (not c1) or ... or (not cn).
// Throws EmptyConjunction.
Clause negate_conjunction(std::span<const LinearConstraint> conj);

std::string to_string(const Conjunction& conj);

}  // namespace condsafe

#endif  // CONDSAFE_PROGRAM_H_
