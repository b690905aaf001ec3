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

#include "condsafe/maxsmt.h"

#include <algorithm>
#include <set>

#include "condsafe/errors.h"

namespace condsafe {

std::string to_string(MaxSmtStatus s) {
  switch (s) {
    case MaxSmtStatus::kOptimal: return "optimal";
    case MaxSmtStatus::kHardUnsat: return "hard-unsat";
    case MaxSmtStatus::kUnknown: return "unknown";
  }
  return "?";
}

std::vector<int64_t> achievable_weights(const std::vector<int64_t>& weights) {
  std::set<int64_t> sums = {0};
  for (int64_t w : weights) {
    std::set<int64_t> next = sums;
    for (int64_t s : sums) next.insert(s + w);
    sums = std::move(next);
  }
  return {sums.rbegin(), sums.rend()};
}

MaxSmtResult maximize(const MaxSmtProblem& problem, SolverHandle& handle,
                      std::span<const TieBreak> tie_breaks) {
  MaxSmtResult result;
  const double sat0 = handle.sat_seconds();
  const double unsat0 = handle.unsat_seconds();
  const int queries0 = handle.queries();

  handle.push();
  std::vector<smt::Term> indicators;
  std::vector<int64_t> weights;
  try {
    for (const auto& d : problem.declarations) handle.declare(d);
    for (const auto& h : problem.hard) handle.add(h);
    for (size_t i = 0; i < problem.soft.size(); ++i) {
      smt::Term b = smt::symbol("b_" + std::to_string(i), smt::Sort::kInt);
      handle.declare({b.name(), smt::Sort::kInt});
      handle.add(smt::eq(b, smt::ite(problem.soft[i].literal, smt::int_const(1),
                                     smt::int_const(0))));
      indicators.push_back(
          smt::mul({smt::int_const(problem.soft[i].weight), b}));
      weights.push_back(problem.soft[i].weight);
    }

    for (int64_t bound : achievable_weights(weights)) {
      std::vector<smt::Term> assumptions;
      if (bound > 0) {
        assumptions.push_back(
            smt::ge(smt::add(indicators), smt::int_const(bound)));
      }
      CheckResult r = handle.check_sat(assumptions);
      if (r.status == CheckStatus::kSat) {
        result.status = MaxSmtStatus::kOptimal;
        for (const auto& a : assumptions) handle.add(a);
        for (const auto& tb : tie_breaks) {
          for (const auto& alt : tb(*r.model)) {
            std::vector<smt::Term> one = {alt};
            CheckResult refined = handle.check_sat(one);
            if (refined.status != CheckStatus::kSat) continue;
            handle.add(alt);
            r = std::move(refined);
            break;
          }
          if (handle.cancelled()) break;
        }
        for (const auto& s : problem.soft) {
          bool holds = std::get<bool>(smt::evaluate(s.literal, *r.model));
          result.satisfied.push_back(holds);
          if (holds) result.weight += s.weight;
        }
        result.model = std::move(r.model);
        break;
      }
      if (r.status == CheckStatus::kUnknown) {
        if (bound == 0) {
          result.status = MaxSmtStatus::kUnknown;
          break;
        }
        result.possibly_suboptimal = true;
        if (handle.cancelled()) break;
        continue;
      }
      if (bound == 0) result.status = MaxSmtStatus::kHardUnsat;
    }
  } catch (...) {
    handle.pop();
    throw;
  }
  handle.pop();
  result.queries = handle.queries() - queries0;
  result.sat_seconds = handle.sat_seconds() - sat0;
  result.unsat_seconds = handle.unsat_seconds() - unsat0;
  return result;
}

}  // namespace condsafe
