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

#ifndef CONDSAFE_FRONTEND_H_
#define CONDSAFE_FRONTEND_H_

#include <string>
#include <string_view>
#include <vector>

#include "condsafe/program.h"

namespace condsafe {

// An `assert NAME: clause;` statement after normalization into CNF. The
// target is either a transition id or a location.
struct AssertionSpec {
  enum class Target { kTransition, kLocation };
  Target target_kind = Target::kTransition;
  std::string target;
  std::vector<Clause> clauses;
  int line = 0;
};

struct ParsedProgram {
  Program program;
  std::vector<AssertionSpec> assertions;
};

// Parses the `.its` transition-system format:
//
//   var x y;
//   init l0;
//   t1: l0 -> l1 { x' = 0, y' >= x };
//   assert t1: x <= y || y < 0;
//
// `#` starts a line comment. Throws ParseError (with position) on syntax
// errors, undeclared variables, duplicate ids and non-linear terms, and
// DisequalityNotAllowedHere for `!=` inside a transition.
ParsedProgram parse_program(std::string_view text);
ParsedProgram parse_program_file(const std::string& path);

// Prints `program` (without assertions) in the `.its` format.
std::string print_program(const Program& program);

struct DesugaredAssertion {
  Program program;
  Assertion assertion;
};

// Adds a fresh location l* and a transition l -> l* whose relation keeps
// every variable unchanged; the returned assertion targets that transition.
// Throws UnknownLocation.
DesugaredAssertion desugar_location_assertion(const Program& program,
                                              const Location& location,
                                              const Clause& formula);

// Turns every AssertionSpec into one Assertion per CNF clause, desugaring
// location targets. Assertion ids are "<target>" for single-clause
// statements and "<target>#<n>" otherwise.
struct Instance {
  Program program;
  std::vector<Assertion> assertions;
};
Instance elaborate(const ParsedProgram& parsed);

}  // namespace condsafe

#endif  // CONDSAFE_FRONTEND_H_
