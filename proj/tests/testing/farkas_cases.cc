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

#include "farkas_cases.h"

#include <boost/multiprecision/cpp_int.hpp>
#include <algorithm>
#include <array>
#include <set>

namespace condsafe::testing {

namespace {

using Rational = boost::multiprecision::cpp_rational;

const Var kX{"x", false}, kY{"y", false}, kXp{"x", true}, kYp{"y", true};

int uniform(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

Rational value(const std::map<Var, Integer>& coeffs, const Integer& constant,
               const std::map<Var, Rational>& point) {
  Rational s(constant);
  for (const auto& [v, k] : coeffs) s += Rational(k) * point.at(v);
  return s;
}

// Antecedent over (x, y) with the updates substituted, as rows
// a*x + b*y + c <= 0, intersected with the sampling box.
std::vector<std::array<Rational, 3>> planar_rows(const FarkasCase& c) {
  std::vector<std::array<Rational, 3>> rows;
  for (const auto& lc : c.antecedent) {
    std::array<Rational, 3> row{0, 0, Rational(lc.constant())};
    for (const auto& [v, k] : lc.coeffs()) {
      LinearExpr e = c.updates.count(v) ? c.updates.at(v) : LinearExpr::variable(v);
      row[2] += Rational(k) * Rational(e.constant());
      for (const auto& [u, m] : e.coeffs()) {
        row[u == kX ? 0 : 1] += Rational(k) * Rational(m);
      }
    }
    rows.push_back(row);
  }
  for (int s : {-1, 1}) {
    rows.push_back({Rational(s), 0, Rational(-40)});
    rows.push_back({0, Rational(s), Rational(-40)});
  }
  return rows;
}

// Vertices of the feasible polygon. Empty iff the antecedent has no
// rational point in the box.
std::vector<std::pair<Rational, Rational>> vertices(const FarkasCase& c) {
  auto rows = planar_rows(c);
  std::vector<std::pair<Rational, Rational>> out;
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = i + 1; j < rows.size(); ++j) {
      const auto& r = rows[i];
      const auto& s = rows[j];
      Rational det = r[0] * s[1] - r[1] * s[0];
      if (det == 0) continue;
      Rational x = (-r[2] * s[1] + s[2] * r[1]) / det;
      Rational y = (-r[0] * s[2] + s[0] * r[2]) / det;
      bool feasible = true;
      for (const auto& t : rows) feasible = feasible && t[0] * x + t[1] * y + t[2] <= 0;
      if (feasible && std::find(out.begin(), out.end(), std::pair{x, y}) == out.end()) {
        out.emplace_back(x, y);
      }
    }
  }
  return out;
}

}  // namespace

std::optional<FarkasCase> sample_farkas_case(std::mt19937_64& rng,
                                             SolverHandle& solver) {
  using namespace smt;
  FarkasCase out;
  out.updates[kXp] = LinearExpr::variable(kX, uniform(rng, -1, 1)) +
                     LinearExpr::variable(kY, uniform(rng, -1, 1)) +
                     LinearExpr(Integer(uniform(rng, -3, 3)));
  out.updates[kYp] = LinearExpr::variable(kX, uniform(rng, -1, 1)) +
                     LinearExpr::variable(kY, uniform(rng, -1, 1)) +
                     LinearExpr(Integer(uniform(rng, -3, 3)));
  Conjunction tau;
  for (const auto& [v, rhs] : out.updates) {
    LinearExpr lhs = LinearExpr::variable(v);
    tau.emplace_back(lhs - rhs);
    tau.emplace_back(rhs - lhs);
  }
  for (int g = uniform(rng, 0, 2); g > 0; --g) {
    tau.emplace_back(std::map<Var, Integer>{{kX, uniform(rng, -3, 3)},
                                            {kY, uniform(rng, -3, 3)}},
                     Integer(uniform(rng, -3, 3)));
  }

  ParamRow tmpl;
  tmpl.coeffs[kX] = ParamExpr::param("a");
  tmpl.coeffs[kY] = ParamExpr::param("b");
  tmpl.constant = ParamExpr::param("c");
  std::vector<ParamRow> ante = {tmpl};
  for (const auto& c : tau) ante.push_back(ParamRow::from(c));
  const std::vector<Var> columns = {kX, kXp, kY, kYp};
  NamePool pool;
  FarkasSystem sys = farkas_implication(ante, tmpl.primed(), columns, pool);

  std::vector<Declaration> decls = sys.multipliers;
  std::vector<Term> hard = sys.constraints;
  for (const char* p : {"a", "b", "c"}) {
    decls.push_back({p, Sort::kInt});
    Term t = symbol(p, Sort::kInt);
    hard.push_back(le(int_const(-5), t));
    hard.push_back(le(t, int_const(5)));
  }
  Term a = symbol("a", Sort::kInt), b = symbol("b", Sort::kInt);
  hard.push_back(or_({not_(eq(a, int_const(0))), not_(eq(b, int_const(0)))}));
  // Vary the model across calls.
  hard.push_back(ge(add({mul({int_const(uniform(rng, -2, 2)), a}),
                         mul({int_const(uniform(rng, -2, 2)), b})}),
                    int_const(uniform(rng, -3, 1))));
  CheckResult r = check(solver, decls, hard);
  if (r.status != CheckStatus::kSat) return std::nullopt;

  LinearConstraint t = tmpl.instantiate(*r.model);
  out.antecedent = {t};
  out.antecedent.insert(out.antecedent.end(), tau.begin(), tau.end());
  out.consequent = t.primed();
  if (vertices(out).empty()) return std::nullopt;
  return out;
}

SampleOutcome sample_rational(const FarkasCase& c, std::mt19937_64& rng,
                              int wanted, int max_draws) {
  const auto corners = vertices(c);
  SampleOutcome out;
  auto test = [&](const Rational& x, const Rational& y) {
    std::map<Var, Rational> point{{kX, x}, {kY, y}};
    for (const auto& [v, e] : c.updates) {
      point[v] = value(e.coeffs(), e.constant(), point);
    }
    for (const auto& lc : c.antecedent) {
      if (value(lc.coeffs(), lc.constant(), point) > 0) return;
    }
    ++out.inside;
    if (value(c.consequent.coeffs(), c.consequent.constant(), point) > 0) {
      out.violated = true;
    }
  };
  for (int i = 0; i < max_draws && out.inside < wanted && !out.violated; ++i) {
    if (i % 2 == 0 || corners.empty()) {
      test(Rational(uniform(rng, -40, 40), uniform(rng, 1, 4)),
           Rational(uniform(rng, -40, 40), uniform(rng, 1, 4)));
      continue;
    }
    // Random convex combination of the polygon's vertices.
    Rational x = 0, y = 0, total = 0;
    for (const auto& [vx, vy] : corners) {
      Rational w = uniform(rng, 0, 8);
      x += w * vx;
      y += w * vy;
      total += w;
    }
    if (total == 0) {
      const auto& v = corners[uniform(rng, 0, static_cast<int>(corners.size()) - 1)];
      test(v.first, v.second);
    } else {
      test(x / total, y / total);
    }
  }
  return out;
}

}  // namespace condsafe::testing
