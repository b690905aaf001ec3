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

#include "equivalence.h"

namespace condsafe::testing {

namespace {

// Every relation of `from` lies inside the union of `into`: f and
// not(g_1) and ... and not(g_m) is unsat, expanded into one query per
// choice of a negated literal from each g_j.
bool covered_by(SolverHandle& solver, std::span<const std::string> vars,
                std::span<const Conjunction> from,
                std::span<const Conjunction> into) {
  for (const auto& f : from) {
    std::vector<Clause> negs;
    for (const auto& g : into) {
      if (g.empty()) return true;  // `into` contains true
      negs.push_back(negate_conjunction(g));
    }
    std::vector<size_t> pick(negs.size(), 0);
    while (true) {
      Conjunction q = f;
      for (size_t i = 0; i < negs.size(); ++i) q.push_back(negs[i].literals[pick[i]]);
      if (is_satisfiable(solver, vars, q) != false) return false;
      size_t i = 0;
      while (i < pick.size() && ++pick[i] == negs[i].literals.size()) pick[i++] = 0;
      if (i == pick.size()) break;
    }
  }
  return true;
}

}  // namespace

bool same_relation(SolverHandle& solver, std::span<const std::string> vars,
                   std::span<const Conjunction> a,
                   std::span<const Conjunction> b) {
  return covered_by(solver, vars, a, b) && covered_by(solver, vars, b, a);
}

}  // namespace condsafe::testing
