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

#ifndef CONDSAFE_ORACLE_H_
#define CONDSAFE_ORACLE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "condsafe/cfg.h"
#include "condsafe/encoder.h"
#include "condsafe/program.h"
#include "condsafe/solver.h"

namespace condsafe {

// A concrete execution. states[0] is at the initial location; states[i]
// for i > 0 was reached by taking transitions[i - 1].
struct Trace {
  std::vector<std::pair<Location, Valuation>> states;
  std::vector<std::string> transitions;

  std::string to_string(std::span<const std::string> vars) const;
};

struct BmcOutcome {
  // Set on CounterexampleFound; the trace ends with the assertion's
  // transition and a post-state violating the formula.
  std::optional<Trace> counterexample;
  // Bound that was exhausted when no counterexample exists.
  int depth = 0;

  bool found() const { return counterexample.has_value(); }
};

struct BmcOptions {
  // Maximum number of transitions, the asserted one included.
  int depth = 8;
  // Initial and havoc values range over [-value_bound, value_bound].
  Integer value_bound = 3;
  // Explicit mode only: maximum number of visited states.
  std::size_t state_budget = 2'000'000;
};

// Concrete successor computation used by explicit enumeration: primed
// variables fixed by an equality `v' = e` with a unit coefficient are
// computed, all others are havocked over the value bound.
struct UpdatePlan {
  struct Assign {
    std::string var;
    LinearExpr rhs;  // over unprimed and earlier assigned primed variables
  };
  std::vector<Assign> assigned;
  std::vector<std::string> havoc;
};
UpdatePlan plan_updates(const Transition& t, std::span<const std::string> vars);

// Breadth-first enumeration of all traces. Throws BudgetExceeded.
BmcOutcome bmc_explicit(const Program& p, const Assertion& a,
                        const BmcOptions& options = {});
// Symbolic unrolling with one solver query per depth and the same value
// domain as bmc_explicit.
BmcOutcome bmc_symbolic(const Program& p, const Assertion& a,
                        SolverHandle& solver, const BmcOptions& options = {});
// Explicit enumeration.
BmcOutcome bmc(const Program& p, const Assertion& a, int depth,
               const Integer& value_bound);

// Random executions of at most `depth` transitions with initial and havoc
// values drawn from [-value_bound, value_bound]. Returns the first one that
// takes the asserted transition into a violating state.
std::optional<Trace> simulate(const Program& p, const Assertion& a, int depth,
                              const Integer& value_bound, int walks,
                              std::uint64_t seed);

struct InvariantCheckOptions {
  int samples = 1000;
  std::uint64_t seed = 0x5eed;
  // Sampled values range over [-sample_bound, sample_bound].
  Integer sample_bound = 64;
};

// Consecution for every transition of `c` and Safety for `exit`, each
// checked by a validity query (when `solver` is non-null) and by random
// samples. Unknown solver answers defer to the samples.
bool check_conditional_invariant(const Program& p, const Component& c,
                                 std::span<const Transition> entries,
                                 const Transition& exit, const Clause& phi,
                                 const InvariantMap& q, SolverHandle* solver,
                                 const InvariantCheckOptions& options = {});

}  // namespace condsafe

#endif  // CONDSAFE_ORACLE_H_
