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

#ifndef CONDSAFE_ENGINE_H_
#define CONDSAFE_ENGINE_H_

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "condsafe/cfg.h"
#include "condsafe/encoder.h"
#include "condsafe/program.h"
#include "condsafe/solver.h"

namespace condsafe {

struct EngineOptions {
  int max_conjuncts = 3;
  EncoderBounds bounds;
  int narrow_cap = 16;
  int depth_cap = 32;
  // Bounded search for a concrete violation before synthesis; 0 disables.
  int refute_steps = 6;
  bool strengthen = true;
  bool memo = true;
  bool disabling = false;
  int parallel = 1;
  std::chrono::milliseconds query_timeout{5000};
  std::chrono::milliseconds global_timeout{200000};
  // Empty: resolve_solver_command().
  std::vector<std::string> solver_command;
};

struct ConditionalInvariant {
  InvariantMap q;
  int k = 0;
  // Set when the disabling variant chose to make this transition
  // infeasible instead of establishing Safety.
  std::optional<std::string> disabled;
};

struct CondSafeResult {
  std::optional<ConditionalInvariant> invariant;
  // Non-empty when the search ended for a reason other than a clean
  // "no invariant up to max_conjuncts" (backend failure, timeouts).
  std::string diagnostic;
  bool backend_error = false;
  double sat_seconds = 0;
  double unsat_seconds = 0;
};

struct CondSafeInput {
  const Component* component = nullptr;
  std::vector<Transition> entries;
  Transition exit;
  Clause phi;
  std::vector<std::string> vars;
  // Invariants of earlier narrowing rounds for the same assertion.
  std::map<Location, std::vector<Conjunction>> covered;
};

// Invariant synthesis: tries k = 1..max_conjuncts, then once more with ten times
// the bounds if every k was unsat. Every returned invariant has been
// re-validated with validity queries; a failed re-validation throws
// InternalSoundnessError.
CondSafeResult cond_safe(const CondSafeInput& in, const EngineOptions& options,
                         const CancelToken& cancel = nullptr);

// Validity of `antecedent => clause` over V and V' (x and x').
// nullopt when the solver answers unknown.
std::optional<bool> is_valid(SolverHandle& solver,
                             std::span<const std::string> vars,
                             std::span<const LinearConstraint> antecedent,
                             const Clause& consequent);
// Integer satisfiability of a conjunction; nullopt on unknown.
std::optional<bool> is_satisfiable(SolverHandle& solver,
                                   std::span<const std::string> vars,
                                   std::span<const LinearConstraint> conj);

// Whether some execution from the initial location of `p` reaches
// exit.src within max_steps - 1 transitions and then takes `exit` into a
// state violating phi. nullopt when some query was unknown.
std::optional<bool> refutable(SolverHandle& solver, const Program& p,
                              const Transition& exit, const Clause& phi,
                              int max_steps);

// Each entry t is replaced by one copy per literal of the negated
// conjunction of its failed (Maybe) literals, primed. Entries without
// failed literals are dropped.
std::vector<Transition> narrow_entries(
    std::span<const Transition> entries, const InvariantMap& q,
    const std::map<std::pair<std::string, std::string>, bool>& safe);

// Replaces every internal l -> l' by the product of not Q(l) and
// not Q(l')'. A location with Q = true removes its transitions.
Component narrow_component(const Component& c, const InvariantMap& q);

// Conjoins phi' to transition `id`. For a narrowed transition with added
// literals D1..Dm the original is split into the m + 1 transitions
// tau and not Di (i = 1..m) and tau and phi'.
Program strengthen(const Program& p, const Transition& proven,
                   const Clause& phi);

enum class Result { kSafe, kMaybe };
std::string to_string(Result r);

struct ProofStep {
  std::string transition;
  Clause formula;
  InvariantMap invariant;
  int depth = 0;
};

struct Verdict {
  Result result = Result::kMaybe;
  // Conditional invariants used in a Safe proof, outermost first.
  std::vector<ProofStep> chain;
  std::string diagnostic;
  bool backend_error = false;
};

struct ProofStats {
  int calls = 0;
  int max_depth = 0;
  int narrowings = 0;
  int memo_hits = 0;
  int cond_safe_calls = 0;
  double solver_sat_s = 0;
  double solver_unsat_s = 0;

  void merge(const ProofStats& other);
};

struct TraceEvent {
  enum class Kind { kCall, kValid, kInitial, kCondSafe, kNoInvariant, kNarrow,
                    kMemoHit, kSafe, kMaybe, kDisable };
  Kind kind = Kind::kCall;
  int depth = 0;
  std::string transition;
  Clause formula;
  InvariantMap invariant;
  // kNarrow only.
  std::vector<std::pair<std::string, std::string>> failed;  // (entry, lit)
  std::vector<Transition> entries_before, entries_after;
  std::vector<Transition> component_before, component_after;
  Program program;
  Transition exit;
  std::string note;
};

std::string to_string(TraceEvent::Kind k);

// Concurrent-safe table of failed (Maybe) subgoals.
class MemoTable {
 public:
  static std::string key(
      std::span<const Transition> component,
      std::span<const Transition> entries, const Transition& exit,
      const Clause& phi,
      const std::map<Location, std::vector<Conjunction>>& covered = {});
  bool lookup(const std::string& key) const;
  void insert(const std::string& key);
  size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, bool> table_;
};

struct AssertionOutcome {
  Verdict verdict;
  ProofStats stats;
  std::vector<TraceEvent> trace;
  double seconds = 0;
};

// Drives CheckSafe for the assertions of one program. The program is
// rooted first: if the initial location has incoming transitions a fresh
// start location with a havoc transition into it is added.
class Verifier {
 public:
  Verifier(Program program, EngineOptions options);

  AssertionOutcome verify(const Assertion& assertion);

  const Program& program() const { return program_; }
  const EngineOptions& options() const { return options_; }

 private:
  Program program_;
  EngineOptions options_;
};

// Adds `__start` and the havoc transition `__init` when needed.
Program root_program(const Program& p);

}  // namespace condsafe

#endif  // CONDSAFE_ENGINE_H_
