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

#include "support.h"

#include <regex>
#include <set>
#include <stdexcept>

namespace condsafe::testing {

std::string corpus_path(const std::string& name) {
  return std::string(CONDSAFE_CORPUS_DIR) + "/" + name;
}

Instance load_corpus(const std::string& name) {
  return elaborate(parse_program_file(corpus_path(name)));
}

Instance load_text(const std::string& source) {
  return elaborate(parse_program(source));
}

SolverConfig solver_config(std::chrono::milliseconds timeout) {
  return SolverConfig{resolve_solver_command(), timeout, nullptr};
}

namespace {

std::string declare_identifiers(const std::string& text) {
  static const std::regex ident("[A-Za-z_][A-Za-z0-9_]*");
  std::set<std::string> names;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), ident);
       it != std::sregex_iterator(); ++it) {
    names.insert(it->str());
  }
  std::string out = "var";
  for (const auto& n : names) out += " " + n;
  return out + ";\ninit l__;\n";
}

}  // namespace

std::vector<LinearConstraint> constraints(const std::string& relation) {
  ParsedProgram p = parse_program(declare_identifiers(relation) +
                                  "t__: l__ -> l__ { " + relation + " };\n");
  return p.program.transitions.at(0).relation;
}

LinearConstraint constraint(const std::string& relation) {
  auto cs = constraints(relation);
  if (cs.size() != 1) throw std::invalid_argument("not a single inequality");
  return cs[0];
}

Clause clause(const std::string& formula) {
  ParsedProgram p = parse_program(declare_identifiers(formula) +
                                  "t__: l__ -> l__ { 0 <= 0 };\nassert t__: " +
                                  formula + ";\n");
  const auto& clauses = p.assertions.at(0).clauses;
  if (clauses.size() != 1) throw std::invalid_argument("not a single clause");
  return clauses[0];
}

}  // namespace condsafe::testing
