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

#ifndef CONDSAFE_TESTS_TESTING_SUPPORT_H_
#define CONDSAFE_TESTS_TESTING_SUPPORT_H_

#include <chrono>
#include <string>

#include "condsafe/frontend.h"
#include "condsafe/solver.h"

namespace condsafe::testing {

std::string corpus_path(const std::string& name);
Instance load_corpus(const std::string& name);
Instance load_text(const std::string& source);

SolverConfig solver_config(
    std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));

// Parses "x - y + 1 <= 0"-style relations in the program syntax, primes
// allowed. Throws ParseError.
std::vector<LinearConstraint> constraints(const std::string& relation);
LinearConstraint constraint(const std::string& relation);
Clause clause(const std::string& formula);

}  // namespace condsafe::testing

#endif  // CONDSAFE_TESTS_TESTING_SUPPORT_H_
