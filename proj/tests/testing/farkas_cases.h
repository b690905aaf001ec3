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

#ifndef CONDSAFE_TESTS_TESTING_FARKAS_CASES_H_
#define CONDSAFE_TESTS_TESTING_FARKAS_CASES_H_

#include <map>
#include <optional>
#include <random>

#include "condsafe/encoder.h"
#include "condsafe/solver.h"

namespace condsafe::testing {

// A concrete implication obtained from a model of a Farkas system.
struct FarkasCase {
  Conjunction antecedent;
  LinearConstraint consequent;
  // Primed variables fixed by the antecedent's updates, used to draw
  // points that satisfy the antecedent with positive probability.
  std::map<Var, LinearExpr> updates;
};

// Consecution-shaped instance over x, y: template T(x, y) conjoined with a
// random guarded affine update must imply T(x', y'). The template
// parameters and multipliers come from a solver model of the Farkas
// system; nullopt when the system is unsat or unknown, or when the
// instantiated antecedent has no rational point in [-40, 40]^2.
std::optional<FarkasCase> sample_farkas_case(std::mt19937_64& rng,
                                             SolverHandle& solver);

struct SampleOutcome {
  int inside = 0;
  // A point satisfying the antecedent but not the consequent.
  bool violated = false;
};

// Alternates uniform rational points of [-40, 40]^2 (denominators 1..4)
// with random convex combinations of the antecedent polygon's vertices,
// computes the updated variables, and checks the consequent at every
// point satisfying the antecedent. Stops once `wanted`
// such points were seen or after `max_draws` draws.
SampleOutcome sample_rational(const FarkasCase& c, std::mt19937_64& rng,
                              int wanted, int max_draws);

}  // namespace condsafe::testing

#endif  // CONDSAFE_TESTS_TESTING_FARKAS_CASES_H_
