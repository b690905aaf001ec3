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

#include "condsafe/oracle.h"

#include <deque>
#include <map>
#include <random>
#include <sstream>
#include <unordered_set>

#include "condsafe/errors.h"

namespace condsafe {

using smt::Sort;
using smt::Term;

std::string Trace::to_string(std::span<const std::string> vars) const {
  std::ostringstream out;
  for (size_t i = 0; i < states.size(); ++i) {
    if (i > 0) out << "  --" << transitions[i - 1] << "-->\n";
    const auto& [loc, val] = states[i];
    out << "  " << loc << " {";
    bool first = true;
    for (const auto& v : vars) {
      Var var{v, false};
      if (!val.contains(var)) continue;
      out << (first ? " " : ", ") << v << " = " << val.get(var);
      first = false;
    }
    out << " }\n";
  }
  return out.str();
}

namespace {

bool is_equality_half(const LinearConstraint& c, const Conjunction& rel) {
  std::map<Var, Integer> neg;
  for (const auto& [v, k] : c.coeffs()) neg.emplace(v, -k);
  LinearConstraint other(neg, -c.constant());
  return std::find(rel.begin(), rel.end(), other) != rel.end();
}

Integer eval_expr(const LinearExpr& e, const Valuation& v) {
  Integer out = e.constant();
  for (const auto& [var, k] : e.coeffs()) out += k * v.get(var);
  return out;
}

// 0, -1, 1, -2, 2, ... so that the first counterexample found has small
// values.
std::vector<Integer> domain(const Integer& bound) {
  std::vector<Integer> out = {0};
  for (Integer i = 1; i <= bound; ++i) {
    out.push_back(-i);
    out.push_back(i);
  }
  return out;
}

// All post-valuations of `t` from `pre` (unprimed only) with havocked
// values taken from `choices`.
template <typename F>
void for_each_successor(const Transition& t, const UpdatePlan& plan,
                        const Valuation& pre, const std::vector<Integer>& choices,
                        std::size_t& budget, F&& emit) {
  std::vector<size_t> idx(plan.havoc.size(), 0);
  while (true) {
    if (budget == 0) throw BudgetExceeded("explicit BMC state budget exhausted");
    --budget;
    Valuation both = pre;
    for (size_t i = 0; i < plan.havoc.size(); ++i) {
      both.set(Var{plan.havoc[i], true}, choices[idx[i]]);
    }
    for (const auto& a : plan.assigned) {
      both.set(Var{a.var, true}, eval_expr(a.rhs, both));
    }
    if (evaluate(t.relation, both)) emit(both);
    size_t i = 0;
    while (i < idx.size() && ++idx[i] == choices.size()) idx[i++] = 0;
    if (i == idx.size()) break;
  }
}

Valuation post_state(const Valuation& both, std::span<const std::string> vars) {
  Valuation out;
  for (const auto& v : vars) out.set(Var{v, false}, both.get(Var{v, true}));
  return out;
}

std::string state_key(const Location& l, const Valuation& v) {
  std::string out = l + "|";
  for (const auto& [var, val] : v.values()) out += val.str() + ",";
  return out;
}

}  // namespace

UpdatePlan plan_updates(const Transition& t, std::span<const std::string> vars) {
  UpdatePlan plan;
  std::set<std::string> done;
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& c : t.relation) {
      if (!is_equality_half(c, t.relation)) continue;
      // Solve for the single undetermined primed variable with a unit
      // coefficient, if there is exactly one.
      const Var* target = nullptr;
      int open = 0;
      for (const auto& [v, k] : c.coeffs()) {
        if (!v.primed || done.count(v.name)) continue;
        ++open;
        if (k == 1 || k == -1) target = &v;
      }
      if (open != 1 || !target) continue;
      Integer k = c.coeff(*target);
      LinearExpr rhs(-c.constant() * k);
      for (const auto& [v, kv] : c.coeffs()) {
        if (v == *target) continue;
        rhs.add_term(v, -kv * k);
      }
      plan.assigned.push_back({target->name, rhs});
      done.insert(target->name);
      progress = true;
    }
  }
  for (const auto& v : vars) {
    if (!done.count(v)) plan.havoc.push_back(v);
  }
  return plan;
}

BmcOutcome bmc_explicit(const Program& p, const Assertion& a,
                        const BmcOptions& options) {
  if (options.depth < 1) throw Error("BMC depth must be at least 1");
  const Transition* target = p.find_transition(a.transition);
  if (!target) throw Error("unknown assertion transition " + a.transition);
  const std::vector<Integer> choices = domain(options.value_bound);
  std::map<std::string, UpdatePlan> plans;
  for (const auto& t : p.transitions) plans.emplace(t.id, plan_updates(t, p.vars));
  const Clause phi = a.formula.primed();

  struct Node {
    Location loc;
    Valuation val;
    int parent = -1;
    std::string via;
    int steps = 0;
  };
  std::vector<Node> nodes;
  std::deque<int> queue;
  std::unordered_set<std::string> seen;
  std::size_t budget = options.state_budget;

  // Initial states: every valuation over the value domain.
  {
    UpdatePlan all;
    all.havoc = p.vars;
    Transition none;
    for_each_successor(none, all, Valuation(), choices, budget,
                       [&](const Valuation& both) {
                         Valuation v = post_state(both, p.vars);
                         seen.insert(state_key(p.init, v));
                         nodes.push_back({p.init, v, -1, "", 0});
                         queue.push_back(static_cast<int>(nodes.size() - 1));
                       });
  }

  auto trace_of = [&](int leaf, const Valuation& final_state) {
    Trace tr;
    std::vector<int> chain;
    for (int i = leaf; i >= 0; i = nodes[i].parent) chain.push_back(i);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      tr.states.emplace_back(nodes[*it].loc, nodes[*it].val);
      if (nodes[*it].parent >= 0) tr.transitions.push_back(nodes[*it].via);
    }
    tr.states.emplace_back(target->dst, final_state);
    tr.transitions.push_back(target->id);
    return tr;
  };

  while (!queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    const Node node = nodes[cur];
    if (node.loc == target->src) {
      std::optional<Valuation> bad;
      for_each_successor(*target, plans.at(target->id), node.val, choices,
                         budget, [&](const Valuation& both) {
                           if (!bad && !evaluate(phi, both)) {
                             bad = post_state(both, p.vars);
                           }
                         });
      if (bad) {
        BmcOutcome out;
        out.counterexample = trace_of(cur, *bad);
        out.depth = node.steps + 1;
        return out;
      }
    }
    if (node.steps + 1 >= options.depth) continue;
    for (const auto& t : p.transitions) {
      if (t.src != node.loc) continue;
      for_each_successor(t, plans.at(t.id), node.val, choices, budget,
                         [&](const Valuation& both) {
                           Valuation v = post_state(both, p.vars);
                           if (!seen.insert(state_key(t.dst, v)).second) return;
                           nodes.push_back({t.dst, v, cur, t.id, node.steps + 1});
                           queue.push_back(static_cast<int>(nodes.size() - 1));
                         });
    }
  }
  BmcOutcome out;
  out.depth = options.depth;
  return out;
}

namespace {

Term at_step(const std::string& v, int s) {
  return smt::symbol(v + "!" + std::to_string(s), Sort::kInt);
}

Term step_constraint(const LinearConstraint& c, int s) {
  std::vector<Term> terms;
  for (const auto& [v, k] : c.coeffs()) {
    terms.push_back(smt::mul({smt::int_const(k), at_step(v.name, s + v.primed)}));
  }
  terms.push_back(smt::int_const(c.constant()));
  return smt::le(smt::add(std::move(terms)), smt::int_const(0));
}

Term in_range(const Term& x, const Integer& b) {
  return smt::and_({smt::le(smt::int_const(-b), x), smt::le(x, smt::int_const(b))});
}

}  // namespace

BmcOutcome bmc_symbolic(const Program& p, const Assertion& a,
                        SolverHandle& solver, const BmcOptions& options) {
  if (options.depth < 1) throw Error("BMC depth must be at least 1");
  const Transition* target = p.find_transition(a.transition);
  if (!target) throw Error("unknown assertion transition " + a.transition);
  std::map<Location, int> index;
  for (const auto& l : p.locations) index.emplace(l, static_cast<int>(index.size()));
  auto loc = [](int s) {
    return smt::symbol("loc!" + std::to_string(s), Sort::kInt);
  };
  auto at = [&](int s, const Location& l) {
    return smt::eq(loc(s), smt::int_const(Integer(index.at(l))));
  };
  auto step = [&](const Transition& t, int s) {
    std::vector<Term> conj = {at(s, t.src), at(s + 1, t.dst)};
    for (const auto& c : t.relation) conj.push_back(step_constraint(c, s));
    for (const auto& v : plan_updates(t, p.vars).havoc) {
      conj.push_back(in_range(at_step(v, s + 1), options.value_bound));
    }
    return smt::and_(std::move(conj));
  };
  auto declare_step = [&](int s) {
    for (const auto& v : p.vars) solver.declare({at_step(v, s).name(), Sort::kInt});
    solver.declare({loc(s).name(), Sort::kInt});
  };

  solver.push();
  declare_step(0);
  solver.add(at(0, p.init));
  for (const auto& v : p.vars) solver.add(in_range(at_step(v, 0), options.value_bound));
  BmcOutcome out;
  out.depth = options.depth;
  for (int d = 1; d <= options.depth; ++d) {
    int s = d - 1;  // the asserted transition is step s
    if (s > 0) {
      declare_step(s);
      std::vector<Term> moves;
      for (const auto& t : p.transitions) moves.push_back(step(t, s - 1));
      solver.add(smt::or_(std::move(moves)));
    }
    solver.push();
    declare_step(s + 1);
    solver.add(step(*target, s));
    std::vector<Term> bad;
    for (const auto& l : a.formula.literals) {
      bad.push_back(smt::not_(step_constraint(l.primed(), s)));
    }
    solver.add(smt::and_(std::move(bad)));
    CheckResult r = solver.check_sat();
    solver.pop();
    if (r.status == CheckStatus::kUnknown) {
      solver.pop();
      throw BackendError("solver returned unknown during symbolic BMC");
    }
    if (r.status != CheckStatus::kSat) continue;
    Trace tr;
    for (int i = 0; i <= d; ++i) {
      Valuation v;
      for (const auto& name : p.vars) {
        v.set(Var{name, false}, r.model->int_value(at_step(name, i).name()));
      }
      Location l = target->dst;
      if (i < d) {
        const Integer& li = r.model->int_value(loc(i).name());
        for (const auto& [name, k] : index) {
          if (Integer(k) == li) l = name;
        }
      }
      tr.states.emplace_back(l, v);
    }
    // Recover the transition taken at each prefix step.
    for (int i = 0; i + 1 < d; ++i) {
      Valuation both = tr.states[i].second;
      for (const auto& name : p.vars) {
        both.set(Var{name, true}, tr.states[i + 1].second.get(Var{name, false}));
      }
      std::string via;
      for (const auto& t : p.transitions) {
        if (t.src != tr.states[i].first || t.dst != tr.states[i + 1].first) continue;
        if (!evaluate(t.relation, both)) continue;
        UpdatePlan plan = plan_updates(t, p.vars);
        bool bounded = true;
        for (const auto& h : plan.havoc) {
          const Integer& x = both.get(Var{h, true});
          if (x < -options.value_bound || x > options.value_bound) bounded = false;
        }
        if (bounded) {
          via = t.id;
          break;
        }
      }
      tr.transitions.push_back(via);
    }
    tr.transitions.push_back(target->id);
    solver.pop();
    out.counterexample = std::move(tr);
    out.depth = d;
    return out;
  }
  solver.pop();
  return out;
}

BmcOutcome bmc(const Program& p, const Assertion& a, int depth,
               const Integer& value_bound) {
  BmcOptions o;
  o.depth = depth;
  o.value_bound = value_bound;
  return bmc_explicit(p, a, o);
}

std::optional<Trace> simulate(const Program& p, const Assertion& a, int depth,
                              const Integer& value_bound, int walks,
                              std::uint64_t seed) {
  const Transition* target = p.find_transition(a.transition);
  if (!target) throw Error("unknown assertion transition " + a.transition);
  std::mt19937_64 rng(seed);
  const long long b = value_bound.convert_to<long long>();
  std::uniform_int_distribution<long long> dist(-b, b);
  std::map<std::string, UpdatePlan> plans;
  for (const auto& t : p.transitions) plans.emplace(t.id, plan_updates(t, p.vars));
  const Clause phi = a.formula.primed();
  for (int w = 0; w < walks; ++w) {
    Trace tr;
    Valuation cur;
    for (const auto& v : p.vars) cur.set(Var{v, false}, Integer(dist(rng)));
    Location loc = p.init;
    tr.states.emplace_back(loc, cur);
    for (int step = 0; step < depth; ++step) {
      std::vector<std::pair<const Transition*, Valuation>> moves;
      for (const auto& t : p.transitions) {
        if (t.src != loc) continue;
        // A few havoc draws per transition keep guarded moves reachable.
        for (int tries = 0; tries < 4; ++tries) {
          Valuation both = cur;
          for (const auto& h : plans.at(t.id).havoc) {
            both.set(Var{h, true}, Integer(dist(rng)));
          }
          for (const auto& asg : plans.at(t.id).assigned) {
            both.set(Var{asg.var, true}, eval_expr(asg.rhs, both));
          }
          if (evaluate(t.relation, both)) {
            moves.emplace_back(&t, both);
            break;
          }
        }
      }
      if (moves.empty()) break;
      std::uniform_int_distribution<size_t> pick(0, moves.size() - 1);
      const auto& [t, both] = moves[pick(rng)];
      Valuation next = post_state(both, p.vars);
      tr.transitions.push_back(t->id);
      tr.states.emplace_back(t->dst, next);
      if (t->id == target->id && !evaluate(phi, both)) return tr;
      cur = next;
      loc = t->dst;
    }
  }
  return std::nullopt;
}

namespace {

Term pre_post(const Var& v) {
  return smt::symbol(v.name + (v.primed ? "@post" : "@pre"), Sort::kInt);
}

Term oracle_constraint(const LinearConstraint& c) {
  std::vector<Term> terms;
  for (const auto& [v, k] : c.coeffs()) {
    terms.push_back(smt::mul({smt::int_const(k), pre_post(v)}));
  }
  terms.push_back(smt::int_const(c.constant()));
  return smt::le(smt::add(std::move(terms)), smt::int_const(0));
}

struct Implication {
  Conjunction antecedent;
  const Transition* transition;
  Clause consequent;  // over primed variables
};

// nullopt on unknown.
std::optional<bool> valid(SolverHandle& solver, std::span<const std::string> vars,
                          const Implication& imp) {
  std::vector<smt::Declaration> decls;
  for (const auto& v : vars) {
    decls.push_back({pre_post(Var{v, false}).name(), Sort::kInt});
    decls.push_back({pre_post(Var{v, true}).name(), Sort::kInt});
  }
  std::vector<Term> hard;
  for (const auto& c : imp.antecedent) hard.push_back(oracle_constraint(c));
  for (const auto& l : imp.consequent.literals) {
    hard.push_back(smt::not_(oracle_constraint(l)));
  }
  CheckStatus s = check(solver, decls, hard).status;
  if (s == CheckStatus::kUnknown) return std::nullopt;
  return s == CheckStatus::kUnsat;
}

// Moves one unprimed variable of `c` so that the left-hand side of c
// becomes -slack, rounded toward satisfying c.
void tighten(const LinearConstraint& c, int slack, Valuation& both,
             std::mt19937_64& rng) {
  std::vector<std::pair<Var, Integer>> unprimed;
  for (const auto& [v, k] : c.coeffs()) {
    if (!v.primed) unprimed.emplace_back(v, k);
  }
  const auto& [v, k] = unprimed[rng() % unprimed.size()];
  Integer rest = c.constant() + slack;
  for (const auto& [u, ku] : c.coeffs()) {
    if (u != v && !u.primed) rest += ku * both.get(u);
  }
  // k * v + rest <= 0 tightly: v = floor(-rest / k) for k > 0 and
  // v = ceil(rest / -k) for k < 0.
  Integer target = k > 0 ? floor_div(-rest, k) : ceil_div(rest, -k);
  both.set(v, target);
}

bool sampled_counterexample(std::span<const std::string> vars,
                            const Implication& imp,
                            const InvariantCheckOptions& options,
                            std::mt19937_64& rng) {
  const long long b = options.sample_bound.convert_to<long long>();
  std::uniform_int_distribution<long long> dist(-b, b);
  UpdatePlan plan = plan_updates(*imp.transition, vars);
  std::vector<const LinearConstraint*> pre;
  for (const auto& c : imp.antecedent) {
    if (c.mentions_unprimed()) pre.push_back(&c);
  }
  std::uniform_int_distribution<int> slack(0, 2);
  for (int i = 0; i < options.samples; ++i) {
    Valuation both;
    for (const auto& v : vars) both.set(Var{v, false}, Integer(dist(rng)));
    // Every other sample sits on or near the boundary of one pre-state
    // constraint, where consecution failures live.
    if (i % 2 == 1 && !pre.empty()) {
      tighten(*pre[rng() % pre.size()], slack(rng), both, rng);
    }
    for (const auto& h : plan.havoc) both.set(Var{h, true}, Integer(dist(rng)));
    for (const auto& a : plan.assigned) {
      both.set(Var{a.var, true}, eval_expr(a.rhs, both));
    }
    if (!evaluate(imp.antecedent, both)) continue;
    if (!evaluate(imp.consequent, both)) return true;
  }
  return false;
}

}  // namespace

bool check_conditional_invariant(const Program& p, const Component& c,
                                 std::span<const Transition> /*entries*/,
                                 const Transition& exit, const Clause& phi,
                                 const InvariantMap& q, SolverHandle* solver,
                                 const InvariantCheckOptions& options) {
  auto q_at = [&](const Location& l) {
    auto it = q.find(l);
    return it == q.end() ? Conjunction{} : it->second;
  };
  std::vector<Implication> goals;
  for (const auto& t : c.transitions) {
    Conjunction ante = q_at(t.src);
    ante.insert(ante.end(), t.relation.begin(), t.relation.end());
    for (const auto& lit : q_at(t.dst)) {
      goals.push_back({ante, &t, Clause{{lit.primed()}}});
    }
  }
  {
    Conjunction ante = q_at(exit.src);
    ante.insert(ante.end(), exit.relation.begin(), exit.relation.end());
    goals.push_back({ante, &exit, phi.primed()});
  }
  std::mt19937_64 rng(options.seed);
  for (const auto& g : goals) {
    if (solver && valid(*solver, p.vars, g) == false) return false;
    if (sampled_counterexample(p.vars, g, options, rng)) return false;
  }
  return true;
}

}  // namespace condsafe
