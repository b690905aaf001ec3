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

#ifndef CONDSAFE_REPORT_H_
#define CONDSAFE_REPORT_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "condsafe/engine.h"
#include "condsafe/oracle.h"

namespace condsafe {

struct AssertionReport {
  std::string id;
  std::string transition;
  Clause formula;
  Result result = Result::kMaybe;
  std::vector<ProofStep> chain;
  ProofStats stats;
  std::string diagnostic;
  bool backend_error = false;
  double seconds = 0;
  // Filled by an optional BMC cross-check.
  std::optional<Trace> counterexample;
  std::optional<int> bmc_depth;

  // Conjuncts per location over the whole proof chain, outermost first,
  // without duplicates.
  std::map<Location, std::vector<std::string>> invariants() const;
};

struct Report {
  std::vector<std::string> vars;
  std::vector<AssertionReport> assertions;
  double total_s = 0;
};

AssertionReport make_assertion_report(const Assertion& a,
                                      const AssertionOutcome& outcome);

enum class ReportFormat { kHuman, kJson };

std::string emit_report(const Report& report, ReportFormat format);

}  // namespace condsafe

#endif  // CONDSAFE_REPORT_H_
