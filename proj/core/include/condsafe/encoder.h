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

#ifndef CONDSAFE_ENCODER_H_
#define CONDSAFE_ENCODER_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "condsafe/cfg.h"
#include "condsafe/maxsmt.h"
#include "condsafe/program.h"
#include "condsafe/smt_term.h"

namespace condsafe {

// Integer linear expression over template parameters (SMT constants).
struct ParamExpr {
  std::map<std::string, Integer> coeffs;
  Integer constant = 0;

  static ParamExpr of(Integer c);
  static ParamExpr param(const std::string& name);
  bool is_zero() const { return coeffs.empty() && constant == 0; }
  smt::Term to_term() const;
  Integer evaluate(const smt::Model& model) const;
  bool operator==(const ParamExpr&) const = default;
};

// sum(coeff(v) * v) + constant <= 0 where every coefficient may be
// parametric.
struct ParamRow {
  std::map<Var, ParamExpr> coeffs;
  ParamExpr constant;

  static ParamRow from(const LinearConstraint& c);
  ParamRow primed() const;
  const ParamExpr* coeff(const Var& v) const;
  // Throws ModelIncomplete.
  LinearConstraint instantiate(const smt::Model& model) const;
};

// k parametric conjuncts attached to one location.
struct Template {
  Location location;
  std::vector<ParamRow> rows;
  std::vector<std::string> params;
  // Constant-term parameter of each row.
  std::vector<std::string> constants;
};
using TemplateMap = std::map<Location, Template>;

// Variable coefficients of templates lie in [-coeff, coeff] and
// multipliers in [0, lambda]. Template constants are bounded only when
// `constant` is set.
struct EncoderBounds {
  Integer coeff = 10;
  Integer lambda = 20;
  std::optional<Integer> constant;
};

// Fresh SMT names.
class NamePool {
 public:
  std::string fresh(const std::string& prefix) {
    return prefix + std::to_string(next_++);
  }

 private:
  int next_ = 0;
};

// Existentially quantified multipliers plus the constraints over them.
struct FarkasSystem {
  std::vector<smt::Declaration> multipliers;
  std::vector<smt::Term> constraints;
  smt::Term formula() const { return smt::and_(constraints); }
};

// Nonnegative integer multipliers proving antecedent => consequent: column
// sums match the consequent coefficients and the combined constant is at
// least the consequent's. Throws EncoderError if a row mentions a variable
// outside `columns`.
FarkasSystem farkas_implication(std::span<const ParamRow> antecedent,
                                const ParamRow& consequent,
                                std::span<const Var> columns, NamePool& pool,
                                const EncoderBounds& bounds = {});

// Multipliers deriving 0 < 0 from the antecedent.
FarkasSystem farkas_infeasibility(std::span<const ParamRow> antecedent,
                                  std::span<const Var> columns, NamePool& pool,
                                  const EncoderBounds& bounds = {});

// k conjuncts i + sum(i_v * v) <= 0 for each location of `c`.
TemplateMap build_templates(const Component& c, int k,
                            std::span<const std::string> vars);

struct FkInput {
  const Component* component = nullptr;
  std::vector<Transition> entries;
  Transition exit;
  Clause phi;
  int k = 1;
  std::vector<std::string> vars;
  EncoderBounds bounds;
  // Regions already covered by earlier invariants. When non-empty, some
  // location must admit a witness point outside all of its regions.
  std::map<Location, std::vector<Conjunction>> covered;
};

struct FkEncoding {
  MaxSmtProblem problem;
  TemplateMap templates;
  int consecution_systems = 0;
  int safety_systems = 0;
  int initiation_disjunctions = 0;
  // (entry index, conjunct index) of each soft clause, parallel to
  // problem.soft. Disabling adds one trailing soft clause with entry -1.
  std::vector<std::pair<int, int>> soft_origin;
  // Disabling variant only: selector names.
  std::string safety_selector;
  std::vector<std::string> disable_selectors;  // parallel to transitions
  // Per-literal Safety selectors when the clause has several literals.
  std::vector<std::string> safety_literal_selectors;
};

// Initiation, Consecution and Safety for the component, asserted exit
// transition and clause.
FkEncoding build_fk(const FkInput& in);
// Safety may be traded for making some component transition infeasible.
FkEncoding build_fk_with_disabling(const FkInput& in);

// Tie-breaks preferring, among optimal models, the earliest Safety literal
// of the canonical clause, then the smallest template constants, then the
// smallest variable coefficients.
std::vector<TieBreak> default_tie_breaks(const FkEncoding& enc);

using InvariantMap = std::map<Location, Conjunction>;

// Concrete conjunctions at every templated location, with trivially true
// conjuncts dropped. Throws ModelIncomplete.
InvariantMap instantiate(const TemplateMap& templates, const smt::Model& model);

}  // namespace condsafe

#endif  // CONDSAFE_ENCODER_H_
