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

#include "condsafe/encoder.h"

#include <algorithm>
#include <set>

#include "condsafe/errors.h"

namespace condsafe {

using smt::Sort;
using smt::Term;

// --- ParamExpr / ParamRow -------------------------------------------------------

ParamExpr ParamExpr::of(Integer c) {
  ParamExpr e;
  e.constant = std::move(c);
  return e;
}

ParamExpr ParamExpr::param(const std::string& name) {
  ParamExpr e;
  e.coeffs[name] = 1;
  return e;
}

Term ParamExpr::to_term() const {
  std::vector<Term> terms;
  for (const auto& [name, c] : coeffs) {
    terms.push_back(smt::mul({smt::int_const(c), smt::symbol(name, Sort::kInt)}));
  }
  terms.push_back(smt::int_const(constant));
  return smt::add(std::move(terms));
}

Integer ParamExpr::evaluate(const smt::Model& model) const {
  Integer sum = constant;
  for (const auto& [name, c] : coeffs) sum += c * model.int_value(name);
  return sum;
}

ParamRow ParamRow::from(const LinearConstraint& c) {
  ParamRow row;
  for (const auto& [v, coeff] : c.coeffs()) row.coeffs[v] = ParamExpr::of(coeff);
  row.constant = ParamExpr::of(c.constant());
  return row;
}

ParamRow ParamRow::primed() const {
  ParamRow row;
  row.constant = constant;
  for (const auto& [v, e] : coeffs) {
    if (v.primed) throw EncoderError("priming an already primed row");
    row.coeffs[v.as_primed()] = e;
  }
  return row;
}

const ParamExpr* ParamRow::coeff(const Var& v) const {
  auto it = coeffs.find(v);
  return it == coeffs.end() ? nullptr : &it->second;
}

LinearConstraint ParamRow::instantiate(const smt::Model& model) const {
  std::map<Var, Integer> out;
  for (const auto& [v, e] : coeffs) out[v] = e.evaluate(model);
  return LinearConstraint(std::move(out), constant.evaluate(model));
}

// --- Farkas -----------------------------------------------------------------------

namespace {

// lambda * e, expanded into a sum of monomials.
Term scaled(const Term& lambda, const ParamExpr& e) {
  std::vector<Term> terms;
  for (const auto& [name, c] : e.coeffs) {
    terms.push_back(smt::mul(
        {smt::int_const(c), lambda, smt::symbol(name, Sort::kInt)}));
  }
  if (e.constant != 0) {
    terms.push_back(smt::mul({smt::int_const(e.constant), lambda}));
  }
  return smt::add(std::move(terms));
}

void check_columns(std::span<const ParamRow> rows, std::span<const Var> columns) {
  std::set<Var> allowed(columns.begin(), columns.end());
  for (const auto& r : rows) {
    for (const auto& [v, e] : r.coeffs) {
      if (!allowed.count(v)) {
        throw EncoderError("variable " + v.to_string() +
                           " is not a Farkas column");
      }
    }
  }
}

std::vector<Term> declare_multipliers(size_t n, NamePool& pool,
                                      const EncoderBounds& bounds,
                                      FarkasSystem& sys) {
  std::vector<Term> lambdas;
  for (size_t i = 0; i < n; ++i) {
    Term l = smt::symbol(pool.fresh("lam_"), Sort::kInt);
    sys.multipliers.push_back({l.name(), Sort::kInt});
    sys.constraints.push_back(smt::ge(l, smt::int_const(0)));
    sys.constraints.push_back(smt::le(l, smt::int_const(bounds.lambda)));
    lambdas.push_back(l);
  }
  return lambdas;
}

Term combination(std::span<const ParamRow> rows, const std::vector<Term>& lambdas,
                 const Var* column) {
  std::vector<Term> terms;
  for (size_t r = 0; r < rows.size(); ++r) {
    const ParamExpr* e = column ? rows[r].coeff(*column) : &rows[r].constant;
    if (e && !e->is_zero()) terms.push_back(scaled(lambdas[r], *e));
  }
  return smt::add(std::move(terms));
}

}  // namespace

FarkasSystem farkas_implication(std::span<const ParamRow> antecedent,
                                const ParamRow& consequent,
                                std::span<const Var> columns, NamePool& pool,
                                const EncoderBounds& bounds) {
  check_columns(antecedent, columns);
  check_columns(std::span<const ParamRow>(&consequent, 1), columns);
  FarkasSystem sys;
  auto lambdas = declare_multipliers(antecedent.size(), pool, bounds, sys);
  for (const auto& v : columns) {
    const ParamExpr* target = consequent.coeff(v);
    Term rhs = target ? target->to_term() : smt::int_const(0);
    sys.constraints.push_back(smt::eq(combination(antecedent, lambdas, &v), rhs));
  }
  sys.constraints.push_back(smt::ge(combination(antecedent, lambdas, nullptr),
                                    consequent.constant.to_term()));
  return sys;
}

FarkasSystem farkas_infeasibility(std::span<const ParamRow> antecedent,
                                  std::span<const Var> columns, NamePool& pool,
                                  const EncoderBounds& bounds) {
  check_columns(antecedent, columns);
  FarkasSystem sys;
  auto lambdas = declare_multipliers(antecedent.size(), pool, bounds, sys);
  for (const auto& v : columns) {
    sys.constraints.push_back(
        smt::eq(combination(antecedent, lambdas, &v), smt::int_const(0)));
  }
  sys.constraints.push_back(smt::ge(combination(antecedent, lambdas, nullptr),
                                    smt::int_const(1)));
  return sys;
}

// --- templates ------------------------------------------------------------------

TemplateMap build_templates(const Component& c, int k,
                            std::span<const std::string> vars) {
  TemplateMap out;
  for (size_t li = 0; li < c.locations.size(); ++li) {
    Template t;
    t.location = c.locations[li];
    for (int j = 0; j < k; ++j) {
      std::string base = "i_L" + std::to_string(li) + "_" + std::to_string(j);
      ParamRow row;
      row.constant = ParamExpr::param(base);
      t.params.push_back(base);
      t.constants.push_back(base);
      for (size_t vi = 0; vi < vars.size(); ++vi) {
        std::string name = base + "_v" + std::to_string(vi);
        row.coeffs[Var{vars[vi], false}] = ParamExpr::param(name);
        t.params.push_back(name);
      }
      t.rows.push_back(std::move(row));
    }
    out.emplace(t.location, std::move(t));
  }
  return out;
}

namespace {

std::vector<ParamRow> rows_of(const Conjunction& conj) {
  std::vector<ParamRow> out;
  for (const auto& c : conj) {
    if (!c.is_trivially_true()) out.push_back(ParamRow::from(c));
  }
  return out;
}

std::vector<Var> columns_of(std::span<const std::string> vars) {
  std::vector<Var> out;
  for (const auto& v : vars) out.push_back(Var{v, false});
  for (const auto& v : vars) out.push_back(Var{v, true});
  return out;
}

class FkBuilder {
 public:
  explicit FkBuilder(const FkInput& in)
      : in_(in), columns_(columns_of(in.vars)) {
    if (!in.component) throw EncoderError("F_k needs a component");
    if (in.k < 1) throw EncoderError("F_k needs k >= 1");
    if (in.phi.mentions_primed()) {
      throw EncoderError("assertion formula mentions primed variables");
    }
    enc_.templates = build_templates(*in.component, in.k, in.vars);
  }

  void declare_templates() {
    for (const auto& [loc, t] : enc_.templates) {
      for (const auto& p : t.params) {
        Term s = smt::symbol(p, Sort::kInt);
        enc_.problem.declarations.push_back({p, Sort::kInt});
        bool is_constant = std::find(t.constants.begin(), t.constants.end(),
                                     p) != t.constants.end();
        if (is_constant && !in_.bounds.constant) continue;
        const Integer& b = is_constant ? *in_.bounds.constant : in_.bounds.coeff;
        enc_.problem.hard.push_back(smt::ge(s, smt::int_const(-b)));
        enc_.problem.hard.push_back(smt::le(s, smt::int_const(b)));
      }
      // A conjunct with all variable coefficients zero must be 0 <= 0.
      for (const auto& row : t.rows) {
        std::vector<Term> nonzero;
        for (const auto& [v, e] : row.coeffs) {
          nonzero.push_back(smt::not_(smt::eq(e.to_term(), smt::int_const(0))));
        }
        nonzero.push_back(smt::le(row.constant.to_term(), smt::int_const(0)));
        enc_.problem.hard.push_back(smt::or_(std::move(nonzero)));
      }
      // Some integer point satisfies every conjunct at this location.
      std::map<Var, Term> witness;
      for (size_t vi = 0; vi < in_.vars.size(); ++vi) {
        Term w = smt::symbol(
            "w_L" + std::to_string(location_index(loc)) + "_v" +
                std::to_string(vi),
            Sort::kInt);
        enc_.problem.declarations.push_back({w.name(), Sort::kInt});
        witness.emplace(Var{in_.vars[vi], false}, w);
      }
      witnesses_[loc] = witness;
      for (const auto& row : t.rows) {
        std::vector<Term> terms;
        for (const auto& [v, e] : row.coeffs) {
          for (const auto& [name, c] : e.coeffs) {
            terms.push_back(smt::mul({smt::int_const(c),
                                      smt::symbol(name, Sort::kInt),
                                      witness.at(v)}));
          }
        }
        terms.push_back(row.constant.to_term());
        enc_.problem.hard.push_back(
            smt::le(smt::add(std::move(terms)), smt::int_const(0)));
      }
    }
  }

  // sum(c * w) + c0 <= 0 at the witness point.
  Term at_witness(const LinearConstraint& c, const Location& loc) const {
    std::vector<Term> terms;
    for (const auto& [v, coeff] : c.coeffs()) {
      auto it = witnesses_.at(loc).find(v.as_unprimed());
      if (it == witnesses_.at(loc).end()) {
        throw EncoderError("covered region mentions unknown variable " +
                           v.to_string());
      }
      terms.push_back(smt::mul({smt::int_const(coeff), it->second}));
    }
    terms.push_back(smt::int_const(c.constant()));
    return smt::le(smt::add(std::move(terms)), smt::int_const(0));
  }

  void novelty() {
    if (in_.covered.empty()) return;
    std::vector<Term> somewhere;
    for (const auto& [loc, t] : enc_.templates) {
      auto it = in_.covered.find(loc);
      if (it == in_.covered.end() || it->second.empty()) return;
      std::vector<Term> outside_all;
      for (const auto& region : it->second) {
        std::vector<Term> outside;
        for (const auto& c : region) {
          outside.push_back(smt::not_(at_witness(c, loc)));
        }
        outside_all.push_back(smt::or_(std::move(outside)));
      }
      somewhere.push_back(smt::and_(std::move(outside_all)));
    }
    enc_.problem.hard.push_back(smt::or_(std::move(somewhere)));
  }

  size_t location_index(const Location& l) const {
    const auto& locs = in_.component->locations;
    return static_cast<size_t>(std::find(locs.begin(), locs.end(), l) -
                               locs.begin());
  }

  const Template& at(const Location& l) const {
    auto it = enc_.templates.find(l);
    if (it == enc_.templates.end()) {
      throw EncoderError("no template at location " + l);
    }
    return it->second;
  }

  Term absorb(FarkasSystem sys) {
    for (auto& d : sys.multipliers) enc_.problem.declarations.push_back(d);
    return sys.formula();
  }

  void consecution() {
    for (const auto& t : in_.component->transitions) {
      std::vector<ParamRow> ante = at(t.src).rows;
      for (auto& r : rows_of(t.relation)) ante.push_back(std::move(r));
      for (const auto& goal : at(t.dst).rows) {
        enc_.problem.hard.push_back(
            absorb(farkas_implication(ante, goal.primed(), columns_, pool_,
                                      in_.bounds)));
      }
      ++enc_.consecution_systems;
    }
  }

  void initiation() {
    for (size_t e = 0; e < in_.entries.size(); ++e) {
      const Transition& t = in_.entries[e];
      std::vector<ParamRow> ante = rows_of(t.relation);
      const Template& target = at(t.dst);
      for (int j = 0; j < in_.k; ++j) {
        Term p = smt::symbol(
            "p_" + std::to_string(e) + "_" + std::to_string(j), Sort::kBool);
        enc_.problem.declarations.push_back({p.name(), Sort::kBool});
        Term init = absorb(farkas_implication(
            ante, target.rows[static_cast<size_t>(j)].primed(), columns_,
            pool_, in_.bounds));
        enc_.problem.hard.push_back(smt::or_({init, smt::not_(p)}));
        enc_.problem.soft.push_back({p, 1});
        enc_.soft_origin.emplace_back(static_cast<int>(e), j);
        ++enc_.initiation_disjunctions;
      }
    }
  }

  Term safety() {
    Clause phi = in_.phi.canonical();
    if (phi.literals.size() == 1 && phi.literals[0].is_trivially_true()) {
      return smt::bool_const(true);
    }
    std::vector<ParamRow> ante = at(in_.exit.src).rows;
    for (auto& r : rows_of(in_.exit.relation)) ante.push_back(std::move(r));
    std::vector<Term> systems;
    for (const auto& lit : phi.literals) {
      systems.push_back(absorb(farkas_implication(
          ante, ParamRow::from(lit.primed()), columns_, pool_, in_.bounds)));
      ++enc_.safety_systems;
    }
    if (systems.size() == 1) return systems.front();
    std::vector<Term> parts, any;
    for (size_t i = 0; i < systems.size(); ++i) {
      Term s = smt::symbol("s_" + std::to_string(i), Sort::kBool);
      enc_.problem.declarations.push_back({s.name(), Sort::kBool});
      enc_.safety_literal_selectors.push_back(s.name());
      any.push_back(s);
      parts.push_back(smt::implies(s, systems[i]));
    }
    parts.push_back(smt::or_(std::move(any)));
    return smt::and_(std::move(parts));
  }

  void disabling(Term safety_formula) {
    Term s = smt::symbol("s_safe", Sort::kBool);
    enc_.safety_selector = s.name();
    enc_.problem.declarations.push_back({s.name(), Sort::kBool});
    enc_.problem.hard.push_back(smt::implies(s, safety_formula));
    std::vector<Term> any = {s};
    const auto& ts = in_.component->transitions;
    for (size_t i = 0; i < ts.size(); ++i) {
      Term d = smt::symbol("d_" + std::to_string(i), Sort::kBool);
      enc_.disable_selectors.push_back(d.name());
      enc_.problem.declarations.push_back({d.name(), Sort::kBool});
      std::vector<ParamRow> ante = at(ts[i].src).rows;
      for (auto& r : rows_of(ts[i].relation)) ante.push_back(std::move(r));
      enc_.problem.hard.push_back(smt::implies(
          d, absorb(farkas_infeasibility(ante, columns_, pool_, in_.bounds))));
      any.push_back(d);
    }
    enc_.problem.hard.push_back(smt::or_(std::move(any)));
    int64_t omega_s =
        static_cast<int64_t>(in_.k) * static_cast<int64_t>(in_.entries.size()) +
        1;
    enc_.problem.soft.push_back({s, omega_s});
    enc_.soft_origin.emplace_back(-1, -1);
  }

  FkEncoding build(bool with_disabling) {
    declare_templates();
    novelty();
    consecution();
    initiation();
    Term s = safety();
    if (with_disabling && !in_.component->transitions.empty()) {
      disabling(s);
    } else {
      enc_.problem.hard.push_back(s);
    }
    return std::move(enc_);
  }

 private:
  const FkInput& in_;
  std::vector<Var> columns_;
  NamePool pool_;
  FkEncoding enc_;
  std::map<Location, std::map<Var, Term>> witnesses_;
};

}  // namespace

FkEncoding build_fk(const FkInput& in) { return FkBuilder(in).build(false); }

FkEncoding build_fk_with_disabling(const FkInput& in) {
  return FkBuilder(in).build(true);
}

namespace {

// Alternatives |p| <= M for M = 0, 1, 2, 4, ... below the current maximum.
TieBreak magnitude_tie_break(std::vector<std::string> params) {
  return [params = std::move(params)](const smt::Model& best) {
    Integer current = 0;
    for (const auto& p : params) {
      Integer v = boost::multiprecision::abs(best.int_value(p));
      if (v > current) current = v;
    }
    std::vector<Term> alts;
    for (Integer m = 0; m < current; m = m == 0 ? Integer(1) : Integer(m * 2)) {
      std::vector<Term> bounds;
      for (const auto& p : params) {
        Term s = smt::symbol(p, Sort::kInt);
        bounds.push_back(smt::ge(s, smt::int_const(-m)));
        bounds.push_back(smt::le(s, smt::int_const(m)));
      }
      alts.push_back(smt::and_(std::move(bounds)));
    }
    return alts;
  };
}

}  // namespace

std::vector<TieBreak> default_tie_breaks(const FkEncoding& enc) {
  std::vector<TieBreak> out;
  if (!enc.safety_literal_selectors.empty()) {
    out.push_back([sel = enc.safety_literal_selectors](const smt::Model&) {
      std::vector<Term> alts;
      for (const auto& s : sel) alts.push_back(smt::symbol(s, Sort::kBool));
      return alts;
    });
  }
  std::vector<std::string> constants, coeffs;
  for (const auto& [loc, t] : enc.templates) {
    for (const auto& p : t.params) {
      bool is_constant =
          std::find(t.constants.begin(), t.constants.end(), p) !=
          t.constants.end();
      (is_constant ? constants : coeffs).push_back(p);
    }
  }
  out.push_back(magnitude_tie_break(std::move(constants)));
  out.push_back(magnitude_tie_break(std::move(coeffs)));
  return out;
}

InvariantMap instantiate(const TemplateMap& templates, const smt::Model& model) {
  InvariantMap out;
  for (const auto& [loc, t] : templates) {
    Conjunction conj;
    for (const auto& row : t.rows) {
      LinearConstraint c = row.instantiate(model);
      if (c.is_trivially_true()) continue;
      if (std::find(conj.begin(), conj.end(), c) == conj.end()) conj.push_back(c);
    }
    out.emplace(loc, std::move(conj));
  }
  return out;
}

}  // namespace condsafe
