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

#include "condsafe/engine.h"

#include <algorithm>
#include <atomic>
#include <future>
#include <set>
#include <sstream>

#include "condsafe/errors.h"

namespace condsafe {

using smt::Sort;
using smt::Term;

namespace {

using Clock = std::chrono::steady_clock;

Term var_term(const Var& v) {
  return smt::symbol(v.name + (v.primed ? "@1" : "@0"), Sort::kInt);
}

Term constraint_term(const LinearConstraint& c) {
  std::vector<Term> terms;
  for (const auto& [v, coeff] : c.coeffs()) {
    terms.push_back(smt::mul({smt::int_const(coeff), var_term(v)}));
  }
  terms.push_back(smt::int_const(c.constant()));
  return smt::le(smt::add(std::move(terms)), smt::int_const(0));
}

std::vector<smt::Declaration> var_declarations(
    std::span<const std::string> vars) {
  std::vector<smt::Declaration> out;
  for (const auto& v : vars) {
    out.push_back({var_term(Var{v, false}).name(), Sort::kInt});
    out.push_back({var_term(Var{v, true}).name(), Sort::kInt});
  }
  return out;
}

std::optional<bool> status_as_bool(CheckStatus s, bool sat_value) {
  if (s == CheckStatus::kUnknown) return std::nullopt;
  return (s == CheckStatus::kSat) == sat_value;
}

}  // namespace

std::optional<bool> is_valid(SolverHandle& solver,
                             std::span<const std::string> vars,
                             std::span<const LinearConstraint> antecedent,
                             const Clause& consequent) {
  std::vector<Term> hard;
  for (const auto& c : antecedent) hard.push_back(constraint_term(c));
  for (const auto& l : consequent.literals) {
    hard.push_back(smt::not_(constraint_term(l)));
  }
  auto decls = var_declarations(vars);
  return status_as_bool(check(solver, decls, hard).status, false);
}

std::optional<bool> is_satisfiable(SolverHandle& solver,
                                   std::span<const std::string> vars,
                                   std::span<const LinearConstraint> conj) {
  std::vector<Term> hard;
  for (const auto& c : conj) hard.push_back(constraint_term(c));
  auto decls = var_declarations(vars);
  return status_as_bool(check(solver, decls, hard).status, true);
}

namespace {

Term step_var(const std::string& name, int step) {
  return smt::symbol(name + "!" + std::to_string(step), Sort::kInt);
}

Term step_constraint(const LinearConstraint& c, int step) {
  std::vector<Term> terms;
  for (const auto& [v, coeff] : c.coeffs()) {
    terms.push_back(
        smt::mul({smt::int_const(coeff), step_var(v.name, step + v.primed)}));
  }
  terms.push_back(smt::int_const(c.constant()));
  return smt::le(smt::add(std::move(terms)), smt::int_const(0));
}

Term step_relation(const Transition& t, int step) {
  std::vector<Term> conj;
  for (const auto& c : t.relation) conj.push_back(step_constraint(c, step));
  return smt::and_(std::move(conj));
}

}  // namespace

std::optional<bool> refutable(SolverHandle& solver, const Program& p,
                              const Transition& exit, const Clause& phi,
                              int max_steps) {
  std::map<Location, int> index;
  for (const auto& l : p.locations) index.emplace(l, static_cast<int>(index.size()));
  auto at = [&](int step, const Location& l) {
    return smt::eq(smt::symbol("loc!" + std::to_string(step), Sort::kInt),
                   smt::int_const(Integer(index.at(l))));
  };
  bool unknown = false;
  solver.push();
  for (const auto& v : p.vars) solver.declare({step_var(v, 0).name(), Sort::kInt});
  solver.declare({"loc!0", Sort::kInt});
  solver.add(at(0, p.init));
  for (int prefix = 0; prefix < max_steps; ++prefix) {
    if (prefix > 0) {
      int s = prefix - 1;
      for (const auto& v : p.vars) {
        solver.declare({step_var(v, prefix).name(), Sort::kInt});
      }
      solver.declare({"loc!" + std::to_string(prefix), Sort::kInt});
      std::vector<Term> moves;
      for (const auto& t : p.transitions) {
        moves.push_back(
            smt::and_({at(s, t.src), at(prefix, t.dst), step_relation(t, s)}));
      }
      solver.add(smt::or_(std::move(moves)));
    }
    std::vector<Term> goal = {at(prefix, exit.src), step_relation(exit, prefix)};
    for (const auto& l : phi.literals) {
      goal.push_back(smt::not_(step_constraint(l.primed(), prefix)));
    }
    solver.push();
    for (const auto& v : p.vars) {
      solver.declare({step_var(v, prefix + 1).name(), Sort::kInt});
    }
    CheckStatus st = solver.check_sat(goal).status;
    solver.pop();
    if (st == CheckStatus::kSat) {
      solver.pop();
      return true;
    }
    if (st == CheckStatus::kUnknown) unknown = true;
  }
  solver.pop();
  if (unknown) return std::nullopt;
  return false;
}

// --- CondSafe ---------------------------------------------------------------------

namespace {

struct Attempt {
  MaxSmtResult result;
  FkEncoding encoding;
};

Attempt attempt(const CondSafeInput& in, const EngineOptions& options, int k,
                const EncoderBounds& bounds, const CancelToken& cancel) {
  FkInput fk;
  fk.component = in.component;
  fk.entries = in.entries;
  fk.exit = in.exit;
  fk.phi = in.phi;
  fk.k = k;
  fk.vars = in.vars;
  fk.bounds = bounds;
  fk.covered = in.covered;
  Attempt a;
  a.encoding = options.disabling ? build_fk_with_disabling(fk) : build_fk(fk);
  SolverHandle solver(
      SolverConfig{options.solver_command, options.query_timeout, cancel});
  auto tie_breaks = default_tie_breaks(a.encoding);
  a.result = maximize(a.encoding.problem, solver, tie_breaks);
  return a;
}

const Conjunction& q_at(const InvariantMap& q, const Location& l) {
  static const Conjunction kEmpty;
  auto it = q.find(l);
  return it == q.end() ? kEmpty : it->second;
}

// Re-checks Consecution and Safety (or the chosen disabling) by validity
// queries. Unknown answers are tolerated.
void post_check(const CondSafeInput& in, const ConditionalInvariant& inv,
                const EngineOptions& options) {
  SolverHandle solver(SolverConfig{options.solver_command,
                                   options.query_timeout, nullptr});
  auto fail = [&](const std::string& what) {
    throw InternalSoundnessError("synthesized invariant fails " + what +
                                 " at k=" + std::to_string(inv.k));
  };
  for (const auto& t : in.component->transitions) {
    Conjunction ante = q_at(inv.q, t.src);
    ante.insert(ante.end(), t.relation.begin(), t.relation.end());
    if (inv.disabled && *inv.disabled == t.id) {
      if (is_satisfiable(solver, in.vars, ante) == true) {
        fail("disabling of " + t.id);
      }
      continue;
    }
    for (const auto& goal : q_at(inv.q, t.dst)) {
      if (is_valid(solver, in.vars, ante, Clause{{goal.primed()}}) == false) {
        fail("consecution for " + t.id);
      }
    }
  }
  if (inv.disabled) return;
  Conjunction ante = q_at(inv.q, in.exit.src);
  ante.insert(ante.end(), in.exit.relation.begin(), in.exit.relation.end());
  if (is_valid(solver, in.vars, ante, in.phi.primed()) == false) {
    fail("safety for " + in.exit.id);
  }
}

ConditionalInvariant to_invariant(const Attempt& a, int k) {
  ConditionalInvariant inv;
  inv.k = k;
  inv.q = instantiate(a.encoding.templates, *a.result.model);
  if (!a.encoding.safety_selector.empty() &&
      !a.result.model->bool_value(a.encoding.safety_selector)) {
    for (size_t i = 0; i < a.encoding.disable_selectors.size(); ++i) {
      if (a.result.model->bool_value(a.encoding.disable_selectors[i])) {
        inv.disabled = std::to_string(i);  // index, resolved by the caller
        break;
      }
    }
  }
  return inv;
}

}  // namespace

CondSafeResult cond_safe(const CondSafeInput& in, const EngineOptions& options,
                         const CancelToken& cancel) {
  if (!in.component) throw EncoderError("cond_safe needs a component");
  CondSafeResult out;
  EncoderBounds bounds = options.bounds;

  auto finish = [&](const Attempt& a, int k) {
    out.sat_seconds += a.result.sat_seconds;
    out.unsat_seconds += a.result.unsat_seconds;
    if (a.result.status == MaxSmtStatus::kUnknown) {
      out.diagnostic = "solver unknown at k=" + std::to_string(k);
    }
    if (a.result.status != MaxSmtStatus::kOptimal) return false;
    ConditionalInvariant inv = to_invariant(a, k);
    if (inv.disabled) {
      size_t idx = std::stoul(*inv.disabled);
      inv.disabled = in.component->transitions.at(idx).id;
    }
    post_check(in, inv, options);
    out.invariant = std::move(inv);
    return true;
  };

  for (int pass = 0; pass < 2; ++pass) {
    bool all_unsat = true;
    try {
      if (options.parallel > 1 && options.max_conjuncts > 1) {
        std::vector<CancelToken> tokens;
        std::vector<std::future<Attempt>> futures;
        for (int k = 1; k <= options.max_conjuncts; ++k) {
          tokens.push_back(std::make_shared<std::atomic<bool>>(false));
          futures.push_back(std::async(std::launch::async, attempt,
                                       std::cref(in), std::cref(options), k,
                                       bounds, tokens.back()));
        }
        bool done = false;
        std::exception_ptr error;
        for (int k = 1; k <= options.max_conjuncts; ++k) {
          size_t i = static_cast<size_t>(k - 1);
          if (done) {
            tokens[i]->store(true);
            continue;
          }
          if (cancel && cancel->load()) tokens[i]->store(true);
          try {
            Attempt a = futures[i].get();
            if (a.result.status != MaxSmtStatus::kHardUnsat) all_unsat = false;
            if (finish(a, k)) {
              done = true;
              for (size_t j = i + 1; j < tokens.size(); ++j) tokens[j]->store(true);
            }
          } catch (...) {
            if (!error) error = std::current_exception();
            done = true;
            for (size_t j = i + 1; j < tokens.size(); ++j) tokens[j]->store(true);
          }
        }
        for (auto& f : futures) {
          if (f.valid()) f.wait();
        }
        if (error) std::rethrow_exception(error);
        if (done) return out;
      } else {
        for (int k = 1; k <= options.max_conjuncts; ++k) {
          if (cancel && cancel->load()) {
            out.diagnostic = "cancelled";
            return out;
          }
          Attempt a = attempt(in, options, k, bounds, cancel);
          if (a.result.status != MaxSmtStatus::kHardUnsat) all_unsat = false;
          if (finish(a, k)) return out;
        }
      }
    } catch (const BackendError& e) {
      out.diagnostic = std::string("backend error: ") + e.what();
      out.backend_error = true;
      return out;
    } catch (const ProtocolError& e) {
      out.diagnostic = std::string("protocol error: ") + e.what();
      out.backend_error = true;
      return out;
    }
    if (!all_unsat) break;
    bounds.coeff *= 10;
    bounds.lambda *= 10;
    if (bounds.constant) *bounds.constant *= 10;
  }
  return out;
}

// --- narrowing and strengthening ----------------------------------------------------

namespace {

std::string variant_id(const std::string& id, size_t i, size_t n) {
  std::string out = id + "'";
  if (n > 1) out += "." + std::to_string(i + 1);
  return out;
}

void add_unique(std::vector<LinearConstraint>& v, const LinearConstraint& c) {
  if (std::find(v.begin(), v.end(), c) == v.end()) v.push_back(c);
}

Transition with_literal(const Transition& t, const LinearConstraint& lit,
                        const std::string& id) {
  Transition out = t;
  out.id = id;
  if (out.origin.empty()) out.origin = t.id;
  add_unique(out.relation, lit);
  add_unique(out.narrowing, lit);
  return out;
}

}  // namespace

std::vector<Transition> narrow_entries(
    std::span<const Transition> entries, const InvariantMap& q,
    const std::map<std::pair<std::string, std::string>, bool>& safe) {
  std::vector<Transition> out;
  for (const auto& t : entries) {
    Conjunction failed;
    for (const auto& lit : q_at(q, t.dst)) {
      auto it = safe.find({t.id, lit.key()});
      if (it == safe.end() || !it->second) failed.push_back(lit.primed());
    }
    if (failed.empty()) continue;
    Clause d = negate_conjunction(failed);
    for (size_t i = 0; i < d.literals.size(); ++i) {
      out.push_back(with_literal(t, d.literals[i],
                                 variant_id(t.id, i, d.literals.size())));
    }
  }
  return out;
}

Component narrow_component(const Component& c, const InvariantMap& q) {
  Component out = c;
  out.transitions.clear();
  for (const auto& t : c.transitions) {
    const Conjunction& pre = q_at(q, t.src);
    const Conjunction& post = q_at(q, t.dst);
    if (pre.empty() || post.empty()) continue;
    Clause not_pre = negate_conjunction(pre);
    Conjunction post_primed;
    for (const auto& l : post) post_primed.push_back(l.primed());
    Clause not_post = negate_conjunction(post_primed);
    size_t n = not_pre.literals.size() * not_post.literals.size();
    size_t i = 0;
    for (const auto& a : not_pre.literals) {
      for (const auto& b : not_post.literals) {
        Transition v = with_literal(t, a, variant_id(t.id, i++, n));
        add_unique(v.relation, b);
        add_unique(v.narrowing, b);
        out.transitions.push_back(std::move(v));
      }
    }
  }
  return out;
}

Program strengthen(const Program& p, const Transition& proven,
                   const Clause& phi) {
  Clause c = phi.canonical();
  if (c.literals.size() == 1 && c.literals[0].is_trivially_true()) return p;
  if (c.literals.size() != 1) return p;  // only conjunctive facts are kept
  const LinearConstraint lit = c.literals[0].primed();
  Program out = p;
  if (!proven.is_narrowed()) {
    Transition* t = out.find_transition(proven.id);
    if (!t) return p;
    if (std::find(t->relation.begin(), t->relation.end(), lit) ==
        t->relation.end()) {
      t->relation.push_back(lit);
    }
    return out;
  }
  const std::string origin = proven.origin.empty() ? proven.id : proven.origin;
  auto it = std::find_if(out.transitions.begin(), out.transitions.end(),
                         [&](const Transition& t) { return t.id == origin; });
  if (it == out.transitions.end()) return p;
  Transition base = *it;
  std::vector<Transition> replacement;
  const auto& ds = proven.narrowing;
  for (size_t i = 0; i < ds.size(); ++i) {
    Transition v = base;
    v.id = base.id + "+" + std::to_string(i + 1);
    v.origin = base.id;
    v.relation.push_back(ds[i].negated());
    replacement.push_back(std::move(v));
  }
  Transition v = base;
  v.id = base.id + "+" + std::to_string(ds.size() + 1);
  v.origin = base.id;
  v.relation.push_back(lit);
  replacement.push_back(std::move(v));
  it = out.transitions.erase(it);
  out.transitions.insert(it, replacement.begin(), replacement.end());
  return out;
}

// --- misc -------------------------------------------------------------------------

std::string to_string(Result r) { return r == Result::kSafe ? "Safe" : "Maybe"; }

std::string to_string(TraceEvent::Kind k) {
  switch (k) {
    case TraceEvent::Kind::kCall: return "call";
    case TraceEvent::Kind::kValid: return "valid";
    case TraceEvent::Kind::kInitial: return "initial";
    case TraceEvent::Kind::kCondSafe: return "condsafe";
    case TraceEvent::Kind::kNoInvariant: return "no-invariant";
    case TraceEvent::Kind::kNarrow: return "narrow";
    case TraceEvent::Kind::kMemoHit: return "memo-hit";
    case TraceEvent::Kind::kSafe: return "safe";
    case TraceEvent::Kind::kMaybe: return "maybe";
    case TraceEvent::Kind::kDisable: return "disable";
  }
  return "?";
}

void ProofStats::merge(const ProofStats& o) {
  calls += o.calls;
  max_depth = std::max(max_depth, o.max_depth);
  narrowings += o.narrowings;
  memo_hits += o.memo_hits;
  cond_safe_calls += o.cond_safe_calls;
  solver_sat_s += o.solver_sat_s;
  solver_unsat_s += o.solver_unsat_s;
}

std::string MemoTable::key(
    std::span<const Transition> component, std::span<const Transition> entries,
    const Transition& exit, const Clause& phi,
    const std::map<Location, std::vector<Conjunction>>& covered) {
  auto transition_key = [](const Transition& t) {
    std::set<std::string> parts;
    for (const auto& c : t.relation) parts.insert(c.key());
    std::string s = t.src + ">" + t.dst + "{";
    for (const auto& p : parts) s += p + ";";
    return s + "}";
  };
  std::set<std::string> comp, ent;
  for (const auto& t : component) comp.insert(transition_key(t));
  for (const auto& t : entries) ent.insert(transition_key(t));
  std::string out = "C[";
  for (const auto& s : comp) out += s + "|";
  out += "]E[";
  for (const auto& s : ent) out += s + "|";
  out += "]X[" + exit.id + ":" + transition_key(exit) + "]P[" + phi.key() + "]";
  for (const auto& [loc, regions] : covered) {
    std::set<std::string> rs;
    for (const auto& r : regions) {
      std::set<std::string> cs;
      for (const auto& c : r) cs.insert(c.key());
      std::string one;
      for (const auto& c : cs) one += c + "&";
      rs.insert(one);
    }
    out += "Q[" + loc + ":";
    for (const auto& r : rs) out += r + "|";
    out += "]";
  }
  return out;
}

bool MemoTable::lookup(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  return table_.count(key) > 0;
}

void MemoTable::insert(const std::string& key) {
  std::lock_guard<std::mutex> lock(mu_);
  table_.emplace(key, true);
}

size_t MemoTable::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return table_.size();
}

Program root_program(const Program& p) {
  bool has_incoming = std::any_of(
      p.transitions.begin(), p.transitions.end(),
      [&](const Transition& t) { return t.dst == p.init; });
  if (!has_incoming) return p;
  Program out = p;
  std::string start = "__start";
  while (out.has_location(start)) start += "_";
  std::string id = "__init";
  while (out.find_transition(id)) id += "_";
  out.locations.insert(out.locations.begin(), start);
  Transition t;
  t.id = id;
  t.src = start;
  t.dst = p.init;
  out.transitions.insert(out.transitions.begin(), t);
  out.init = start;
  return out;
}

// --- CheckSafe ----------------------------------------------------------------------

namespace {

// Bounded pool of extra worker threads.
class Slots {
 public:
  explicit Slots(int n) : free_(n) {}
  bool try_acquire() {
    int cur = free_.load();
    while (cur > 0) {
      if (free_.compare_exchange_weak(cur, cur - 1)) return true;
    }
    return false;
  }
  void release() { free_.fetch_add(1); }

 private:
  std::atomic<int> free_;
};

struct Shared {
  const EngineOptions* options = nullptr;
  MemoTable memo;
  Clock::time_point deadline;
  std::unique_ptr<Slots> slots;
};

void merge_program(Program& into, const Program& from) {
  for (const auto& t : from.transitions) {
    Transition* mine = into.find_transition(t.id);
    if (!mine) continue;
    for (const auto& c : t.relation) {
      if (std::find(mine->relation.begin(), mine->relation.end(), c) ==
          mine->relation.end()) {
        mine->relation.push_back(c);
      }
    }
  }
}

using CoverMap = std::map<Location, std::vector<Conjunction>>;

class Session {
 public:
  Session(Program program, Shared* shared)
      : program_(std::move(program)), shared_(shared) {
    dag_ = decompose(program_);
  }

  Verdict check_safe(const Component& c, std::vector<Transition> entries,
                     const Transition& exit, const Clause& phi_in, int depth,
                     int narrow_round, const CoverMap& covered = {});

  Program program_;
  ProofStats stats_;
  std::vector<TraceEvent> trace_;

 private:
  const EngineOptions& options() const { return *shared_->options; }

  SolverHandle& solver() {
    if (!solver_) {
      solver_ = std::make_unique<SolverHandle>(SolverConfig{
          options().solver_command, query_timeout(), nullptr});
    }
    return *solver_;
  }

  std::chrono::milliseconds query_timeout() const {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        shared_->deadline - Clock::now());
    return std::max(std::chrono::milliseconds(100),
                    std::min(options().query_timeout, left));
  }

  bool live(const Transition& t) {
    std::string key;
    for (const auto& c : t.relation) key += c.key() + ";";
    auto it = live_cache_.find(key);
    if (it != live_cache_.end()) return it->second;
    double s0 = solver().sat_seconds(), u0 = solver().unsat_seconds();
    bool live = is_satisfiable(solver(), program_.vars, t.relation) != false;
    account(s0, u0);
    live_cache_[key] = live;
    return live;
  }

  bool refuted(const Transition& exit, const Clause& phi) {
    std::string key = phi.key() + "@";
    for (const auto& c : exit.relation) key += c.key() + ";";
    key += exit.src;
    auto it = refuted_cache_.find(key);
    if (it != refuted_cache_.end()) return it->second;
    double s0 = solver().sat_seconds(), u0 = solver().unsat_seconds();
    bool found = false;
    try {
      found = refutable(solver(), program_, exit, phi,
                        options().refute_steps) == true;
    } catch (const BackendError&) {
    }
    account(s0, u0);
    refuted_cache_[key] = found;
    return found;
  }

  void account(double s0, double u0) {
    stats_.solver_sat_s += solver().sat_seconds() - s0;
    stats_.solver_unsat_s += solver().unsat_seconds() - u0;
  }

  // Component of `l` in the current (possibly strengthened) program.
  Component component_of(const Location& l) {
    Component c = dag_.component_of(l);
    for (auto& t : c.transitions) {
      const Transition* cur = program_.find_transition(t.id);
      if (cur) t = *cur;
    }
    return c;
  }

  void event(TraceEvent e) { trace_.push_back(std::move(e)); }

  TraceEvent make_event(TraceEvent::Kind kind, int depth, const Transition& exit,
                        const Clause& phi) {
    TraceEvent e;
    e.kind = kind;
    e.depth = depth;
    e.transition = exit.id;
    e.formula = phi;
    return e;
  }

  Verdict maybe(const std::string& key, Verdict v, int depth,
                const Transition& exit, const Clause& phi) {
    if (options().memo && !key.empty()) shared_->memo.insert(key);
    v.result = Result::kMaybe;
    TraceEvent e = make_event(TraceEvent::Kind::kMaybe, depth, exit, phi);
    e.note = v.diagnostic;
    event(std::move(e));
    return v;
  }

  struct Job {
    Transition entry;
    LinearConstraint literal;
  };
  Verdict run_job(const Job& job, int depth);

  Shared* shared_;
  ComponentDag dag_;
  std::unique_ptr<SolverHandle> solver_;
  std::map<std::string, bool> live_cache_;
  std::map<std::string, bool> refuted_cache_;
};

Verdict Session::run_job(const Job& job, int depth) {
  Component pc = component_of(job.entry.src);
  std::vector<Transition> pe = entries(pc, program_);
  return check_safe(pc, pe, job.entry, Clause{{job.literal}}, depth + 1, 0);
}

Verdict Session::check_safe(const Component& c_in,
                            std::vector<Transition> entries_in,
                            const Transition& exit, const Clause& phi_in,
                            int depth, int narrow_round,
                            const CoverMap& covered) {
  ++stats_.calls;
  stats_.max_depth = std::max(stats_.max_depth, depth);
  const Clause phi = phi_in.canonical();
  event(make_event(TraceEvent::Kind::kCall, depth, exit, phi));
  Verdict verdict;

  if (Clock::now() >= shared_->deadline) {
    verdict.diagnostic = "global timeout";
    return maybe("", verdict, depth, exit, phi);
  }
  if (depth > options().depth_cap) {
    verdict.diagnostic = "recursion depth cap reached";
    return maybe("", verdict, depth, exit, phi);
  }

  // Exit relation already implies phi.
  {
    double s0 = solver().sat_seconds(), u0 = solver().unsat_seconds();
    std::optional<bool> valid;
    try {
      valid = is_valid(solver(), program_.vars, exit.relation, phi.primed());
    } catch (const BackendError& e) {
      verdict.diagnostic = std::string("backend error: ") + e.what();
      verdict.backend_error = true;
      return maybe("", verdict, depth, exit, phi);
    }
    account(s0, u0);
    if (valid == true) {
      event(make_event(TraceEvent::Kind::kValid, depth, exit, phi));
      verdict.result = Result::kSafe;
      return verdict;
    }
  }
  // Exit leaves the initial location: nothing left to assume.
  if (exit.src == program_.init) {
    event(make_event(TraceEvent::Kind::kInitial, depth, exit, phi));
    return maybe("", verdict, depth, exit, phi);
  }

  if (options().refute_steps > 0 && refuted(exit, phi)) {
    verdict.diagnostic = "violated by an execution of at most " +
                         std::to_string(options().refute_steps) + " steps";
    return maybe("", verdict, depth, exit, phi);
  }

  Component c = c_in;
  std::erase_if(c.transitions, [&](const Transition& t) { return !live(t); });
  std::vector<Transition> ents;
  for (auto& t : entries_in) {
    if (live(t)) ents.push_back(std::move(t));
  }

  const std::string key = MemoTable::key(c.transitions, ents, exit, phi, covered);
  if (options().memo && shared_->memo.lookup(key)) {
    ++stats_.memo_hits;
    event(make_event(TraceEvent::Kind::kMemoHit, depth, exit, phi));
    verdict.diagnostic = "memoized";
    verdict.result = Result::kMaybe;
    return verdict;
  }

  if (narrow_round == 0 && !c.contains(program_.init)) {
    std::vector<std::string> ids;
    for (const auto& t : entries(dag_.component_of(exit.src), program_)) {
      ids.push_back(t.id);
    }
    const Transition* orig = program_.find_transition(exit.id);
    if (orig && !dominates(ids, *orig, program_)) {
      throw InternalSoundnessError("entries of the component of " + exit.src +
                                   " do not dominate " + exit.id);
    }
  }

  CondSafeInput in;
  in.component = &c;
  in.entries = ents;
  in.exit = exit;
  in.phi = phi;
  in.vars = program_.vars;
  in.covered = covered;
  EngineOptions opts = options();
  opts.query_timeout = query_timeout();
  ++stats_.cond_safe_calls;
  CondSafeResult cs = cond_safe(in, opts);
  stats_.solver_sat_s += cs.sat_seconds;
  stats_.solver_unsat_s += cs.unsat_seconds;
  if (!cs.invariant) {
    TraceEvent e = make_event(TraceEvent::Kind::kNoInvariant, depth, exit, phi);
    e.note = cs.diagnostic;
    event(std::move(e));
    verdict.diagnostic = cs.diagnostic.empty() ? "no conditional invariant"
                                               : cs.diagnostic;
    verdict.backend_error = cs.backend_error;
    return maybe(key, verdict, depth, exit, phi);
  }
  const ConditionalInvariant& inv = *cs.invariant;
  {
    TraceEvent e = make_event(TraceEvent::Kind::kCondSafe, depth, exit, phi);
    e.invariant = inv.q;
    if (inv.disabled) e.note = "disables " + *inv.disabled;
    event(std::move(e));
  }

  // Propagate each literal of Q at an entry target backwards.
  std::vector<Job> jobs;
  for (const auto& t : ents) {
    for (const auto& lit : q_at(inv.q, t.dst)) jobs.push_back({t, lit});
  }
  std::vector<Verdict> results(jobs.size());
  std::vector<std::future<std::pair<Verdict, std::unique_ptr<Session>>>>
      pending(jobs.size());
  for (size_t i = 0; i < jobs.size(); ++i) {
    if (shared_->slots && shared_->slots->try_acquire()) {
      pending[i] = std::async(std::launch::async, [this, &jobs, i, depth]() {
        auto worker = std::make_unique<Session>(program_, shared_);
        Verdict v;
        try {
          v = worker->run_job(jobs[i], depth);
        } catch (...) {
          shared_->slots->release();
          throw;
        }
        shared_->slots->release();
        return std::make_pair(std::move(v), std::move(worker));
      });
      continue;
    }
    results[i] = run_job(jobs[i], depth);
    if (results[i].result == Result::kSafe && options().strengthen &&
        !jobs[i].entry.is_narrowed()) {
      program_ = strengthen(program_, jobs[i].entry, Clause{{jobs[i].literal}});
    }
  }
  for (size_t i = 0; i < jobs.size(); ++i) {
    if (!pending[i].valid()) continue;
    auto [v, worker] = pending[i].get();
    stats_.merge(worker->stats_);
    for (auto& e : worker->trace_) trace_.push_back(std::move(e));
    if (v.result == Result::kSafe && options().strengthen &&
        !jobs[i].entry.is_narrowed()) {
      worker->program_ = strengthen(worker->program_, jobs[i].entry,
                                    Clause{{jobs[i].literal}});
    }
    merge_program(program_, worker->program_);
    results[i] = std::move(v);
  }

  std::map<std::pair<std::string, std::string>, bool> safe;
  bool all_safe = true;
  for (size_t i = 0; i < jobs.size(); ++i) {
    bool ok = results[i].result == Result::kSafe;
    safe[{jobs[i].entry.id, jobs[i].literal.key()}] = ok;
    all_safe = all_safe && ok;
    if (results[i].backend_error) verdict.backend_error = true;
  }

  ProofStep step{exit.id, phi, inv.q, depth};
  if (inv.disabled) {
    if (!all_safe) {
      verdict.diagnostic = "preconditions of disabling invariant not proven";
      return maybe(key, verdict, depth, exit, phi);
    }
    Component reduced = c;
    std::erase_if(reduced.transitions,
                  [&](const Transition& t) { return t.id == *inv.disabled; });
    TraceEvent e = make_event(TraceEvent::Kind::kDisable, depth, exit, phi);
    e.note = *inv.disabled;
    event(std::move(e));
    Verdict sub = check_safe(reduced, ents, exit, phi, depth + 1, narrow_round,
                             covered);
    if (sub.result != Result::kSafe) return maybe(key, sub, depth, exit, phi);
    verdict.result = Result::kSafe;
    verdict.chain.push_back(step);
    for (auto& r : results) {
      for (auto& s : r.chain) verdict.chain.push_back(std::move(s));
    }
    for (auto& s : sub.chain) verdict.chain.push_back(std::move(s));
    event(make_event(TraceEvent::Kind::kSafe, depth, exit, phi));
    return verdict;
  }

  if (all_safe) {
    verdict.result = Result::kSafe;
    verdict.chain.push_back(step);
    for (auto& r : results) {
      for (auto& s : r.chain) verdict.chain.push_back(std::move(s));
    }
    event(make_event(TraceEvent::Kind::kSafe, depth, exit, phi));
    return verdict;
  }

  // Narrow by the failed literals and retry.
  if (narrow_round >= options().narrow_cap) {
    verdict.diagnostic = "narrowing cap reached";
    return maybe(key, verdict, depth, exit, phi);
  }
  std::vector<Transition> narrowed_entries = narrow_entries(ents, inv.q, safe);
  Component narrowed = narrow_component(c, inv.q);
  ++stats_.narrowings;
  {
    TraceEvent e = make_event(TraceEvent::Kind::kNarrow, depth, exit, phi);
    e.invariant = inv.q;
    for (const auto& [k, ok] : safe) {
      if (ok) continue;
      for (const auto& j : jobs) {
        if (j.entry.id == k.first && j.literal.key() == k.second) {
          e.failed.emplace_back(k.first, j.literal.to_string());
        }
      }
    }
    e.entries_before = ents;
    e.entries_after = narrowed_entries;
    e.component_before = c.transitions;
    e.component_after = narrowed.transitions;
    e.program = program_;
    e.exit = exit;
    event(std::move(e));
  }
  CoverMap next_covered = covered;
  for (const auto& [loc, conj] : inv.q) next_covered[loc].push_back(conj);
  Verdict sub = check_safe(narrowed, narrowed_entries, exit, phi, depth + 1,
                           narrow_round + 1, next_covered);
  if (sub.result != Result::kSafe) {
    for (const auto& r : results) {
      if (r.backend_error) sub.backend_error = true;
    }
    return maybe(key, sub, depth, exit, phi);
  }
  verdict.result = Result::kSafe;
  verdict.chain.push_back(step);
  for (auto& r : results) {
    for (auto& s : r.chain) verdict.chain.push_back(std::move(s));
  }
  for (auto& s : sub.chain) verdict.chain.push_back(std::move(s));
  event(make_event(TraceEvent::Kind::kSafe, depth, exit, phi));
  return verdict;
}

}  // namespace

Verifier::Verifier(Program program, EngineOptions options)
    : program_(root_program(program)), options_(std::move(options)) {
  program_.validate();
  if (options_.solver_command.empty()) {
    options_.solver_command = resolve_solver_command();
  }
}

AssertionOutcome Verifier::verify(const Assertion& assertion) {
  auto start = Clock::now();
  Shared shared;
  shared.options = &options_;
  shared.deadline = start + options_.global_timeout;
  if (options_.parallel > 1) {
    shared.slots = std::make_unique<Slots>(options_.parallel - 1);
  }
  const Transition* exit = program_.find_transition(assertion.transition);
  if (!exit) {
    throw Error("assertion '" + assertion.id + "' targets unknown transition '" +
                assertion.transition + "'");
  }
  if (assertion.formula.mentions_primed()) {
    throw Error("assertion '" + assertion.id + "' mentions primed variables");
  }
  Session session(program_, &shared);
  ComponentDag dag = decompose(program_);
  Component c = dag.component_of(exit->src);
  std::vector<Transition> ents = entries(c, program_);

  AssertionOutcome out;
  out.verdict = session.check_safe(c, ents, *exit, assertion.formula, 0, 0);
  if (out.verdict.result == Result::kMaybe && out.verdict.diagnostic.empty() &&
      Clock::now() >= shared.deadline) {
    out.verdict.diagnostic = "global timeout";
  }
  out.stats = session.stats_;
  out.trace = std::move(session.trace_);
  out.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

}  // namespace condsafe
