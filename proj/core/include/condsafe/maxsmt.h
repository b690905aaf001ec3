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

#ifndef CONDSAFE_MAXSMT_H_
#define CONDSAFE_MAXSMT_H_

#include <cstdint>
#include <functional>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include "condsafe/smt_term.h"
#include "condsafe/solver.h"

namespace condsafe {

struct SoftClause {
  smt::Term literal;
  int64_t weight = 1;
};

// Weighted partial Max-SMT instance.
struct MaxSmtProblem {
  std::vector<smt::Declaration> declarations;
  std::vector<smt::Term> hard;
  std::vector<SoftClause> soft;
};

enum class MaxSmtStatus { kOptimal, kHardUnsat, kUnknown };

std::string to_string(MaxSmtStatus s);

struct MaxSmtResult {
  MaxSmtStatus status = MaxSmtStatus::kUnknown;
  std::optional<smt::Model> model;
  // satisfied[i] tells whether soft[i] holds in `model`.
  std::vector<bool> satisfied;
  int64_t weight = 0;
  // Some bound above `weight` was answered unknown.
  bool possibly_suboptimal = false;
  int queries = 0;
  double sat_seconds = 0;
  double unsat_seconds = 0;
};

// Given the best model so far, alternatives tried in order once the optimal
// weight is known; the first satisfiable one is kept for later levels.
using TieBreak = std::function<std::vector<smt::Term>(const smt::Model&)>;

// Descending linear search over the achievable soft-weight sums. Each step
// asserts hard /\ sum(w_i * b_i) >= W, where b_i is a 0/1 integer tied to
// soft literal i, and stops at the first sat answer. An unknown answer is
// treated as unsat for that W and flags the result. `tie_breaks` then pick
// among the optimal models lexicographically.
MaxSmtResult maximize(const MaxSmtProblem& problem, SolverHandle& handle,
                      std::span<const TieBreak> tie_breaks = {});

// Sorted (descending) distinct sums of subsets of `weights`.
std::vector<int64_t> achievable_weights(const std::vector<int64_t>& weights);

}  // namespace condsafe

#endif  // CONDSAFE_MAXSMT_H_
