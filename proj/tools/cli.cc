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

#include "condsafe/cli.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>

#include "CLI11.hpp"
#include "condsafe/cfg.h"
#include "condsafe/engine.h"
#include "condsafe/errors.h"
#include "condsafe/frontend.h"
#include "condsafe/oracle.h"
#include "condsafe/report.h"

namespace condsafe::cli {

namespace {

struct VerifyFlags {
  std::string file;
  std::vector<std::string> asserts;
  std::string solver;
  int timeout_ms = 5000;
  int global_timeout_s = 200;
  int max_conjuncts = 3;
  long long coeff_bound = 10;
  int narrow_cap = 16;
  bool no_strengthen = false;
  bool no_memo = false;
  bool enable_disabling = false;
  int parallel = 1;
  bool bmc_check = false;
  int bmc_depth = 8;
  long long bmc_bound = 3;
  bool dump_dag = false;
  std::string json;
  std::uint64_t seed = 0x5eed;
};

bool selected(const Assertion& a, const std::vector<std::string>& names) {
  if (names.empty()) return true;
  return std::any_of(names.begin(), names.end(), [&](const std::string& n) {
    return a.id == n || a.id.starts_with(n + "#");
  });
}

// BMC cross-check; falls back to symbolic unrolling when enumeration
// exceeds its budget, then tries random executions.
void cross_check(const Program& p, const Assertion& a, const VerifyFlags& f,
                 const EngineOptions& engine, AssertionReport& r) {
  BmcOptions o;
  o.depth = f.bmc_depth;
  o.value_bound = f.bmc_bound;
  BmcOutcome outcome;
  try {
    outcome = bmc_explicit(p, a, o);
  } catch (const BudgetExceeded&) {
    SolverHandle solver(
        SolverConfig{engine.solver_command, engine.query_timeout, nullptr});
    outcome = bmc_symbolic(p, a, solver, o);
  }
  if (outcome.found()) {
    r.counterexample = outcome.counterexample;
    return;
  }
  if (auto walk = simulate(p, a, f.bmc_depth, Integer(f.bmc_bound), 1000, f.seed)) {
    r.counterexample = walk;
    return;
  }
  r.bmc_depth = outcome.depth;
}

int verify(const VerifyFlags& f, std::ostream& out, std::ostream& err) {
  Instance inst;
  try {
    inst = elaborate(parse_program_file(f.file));
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  std::vector<Assertion> chosen;
  for (const auto& a : inst.assertions) {
    if (selected(a, f.asserts)) chosen.push_back(a);
  }
  for (const auto& n : f.asserts) {
    bool hit = std::any_of(inst.assertions.begin(), inst.assertions.end(),
                           [&](const Assertion& a) {
                             return a.id == n || a.id.starts_with(n + "#");
                           });
    if (!hit) {
      err << "error: no assertion named '" << n << "'\n";
      return kUsageError;
    }
  }
  if (f.dump_dag) out << to_dot(decompose(inst.program));

  EngineOptions opts;
  opts.max_conjuncts = f.max_conjuncts;
  opts.bounds.coeff = f.coeff_bound;
  opts.narrow_cap = f.narrow_cap;
  opts.strengthen = !f.no_strengthen;
  opts.memo = !f.no_memo;
  opts.disabling = f.enable_disabling;
  opts.parallel = f.parallel;
  opts.query_timeout = std::chrono::milliseconds(f.timeout_ms);
  opts.global_timeout = std::chrono::seconds(f.global_timeout_s);

  auto start = std::chrono::steady_clock::now();
  Report report;
  report.vars = inst.program.vars;
  bool backend_failure = false;
  bool unsound = false;
  try {
    opts.solver_command = resolve_solver_command(f.solver);
    Verifier verifier(inst.program, opts);
    for (const auto& a : chosen) {
      AssertionOutcome outcome = verifier.verify(a);
      AssertionReport r = make_assertion_report(a, outcome);
      if (f.bmc_check) {
        cross_check(inst.program, a, f, verifier.options(), r);
        if (r.result == Result::kSafe && r.counterexample) {
          err << "error: assertion " << a.id
              << " proved Safe but a counterexample exists\n";
          unsound = true;
        }
      }
      backend_failure = backend_failure || r.backend_error;
      report.assertions.push_back(std::move(r));
    }
  } catch (const BackendError& e) {
    err << "error: " << e.what() << "\n";
    return kBackendError;
  } catch (const ProtocolError& e) {
    err << "error: " << e.what() << "\n";
    return kBackendError;
  } catch (const InternalSoundnessError& e) {
    err << "internal error: " << e.what() << "\n";
    return kBackendError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  report.total_s = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();

  out << emit_report(report, ReportFormat::kHuman);
  if (!f.json.empty()) {
    std::ofstream js(f.json);
    if (!js) {
      err << "error: cannot write " << f.json << "\n";
      return kUsageError;
    }
    js << emit_report(report, ReportFormat::kJson);
    if (!js) {
      err << "error: cannot write " << f.json << "\n";
      return kUsageError;
    }
  }
  if (unsound || backend_failure) return kBackendError;
  bool all_safe = std::all_of(
      report.assertions.begin(), report.assertions.end(),
      [](const AssertionReport& r) { return r.result == Result::kSafe; });
  return all_safe ? kAllSafe : kSomeMaybe;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Conditional-invariant safety verifier for integer programs",
               "condsafe"};
  app.require_subcommand(1);
  VerifyFlags f;
  CLI::App* v = app.add_subcommand("verify", "Prove the assertions of FILE");
  v->add_option("file", f.file, "Program in .its format")->required();
  v->add_option("--assert", f.asserts, "Assertion to check (repeatable)")
      ->take_last()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  v->add_option("--solver", f.solver, "SMT solver command");
  v->add_option("--timeout-ms", f.timeout_ms, "Per-query timeout")
      ->check(CLI::PositiveNumber);
  v->add_option("--global-timeout-s", f.global_timeout_s,
                "Time budget per assertion")
      ->check(CLI::PositiveNumber);
  v->add_option("--max-conjuncts", f.max_conjuncts, "Largest template size")
      ->check(CLI::PositiveNumber);
  v->add_option("--coeff-bound", f.coeff_bound, "Template coefficient bound")
      ->check(CLI::PositiveNumber);
  v->add_option("--narrow-cap", f.narrow_cap, "Narrowing rounds per subgoal")
      ->check(CLI::NonNegativeNumber);
  v->add_flag("--no-strengthen", f.no_strengthen, "Disable strengthening");
  v->add_flag("--no-memo", f.no_memo, "Disable memoization");
  v->add_flag("--enable-disabling", f.enable_disabling,
              "Allow invariants that disable a transition");
  v->add_option("--parallel", f.parallel, "Worker count")
      ->check(CLI::PositiveNumber);
  v->add_flag("--bmc-check", f.bmc_check, "Cross-check with bounded model checking");
  v->add_option("--bmc-depth", f.bmc_depth, "BMC depth")->check(CLI::PositiveNumber);
  v->add_option("--bmc-bound", f.bmc_bound, "BMC value bound")
      ->check(CLI::NonNegativeNumber);
  v->add_flag("--dump-dag", f.dump_dag, "Print the component DAG (Graphviz)");
  v->add_option("--json", f.json, "Write a JSON report to PATH");
  v->add_option("--seed", f.seed, "Seed for randomized cross-checks");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kAllSafe;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kAllSafe;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsageError;
  }
  return verify(f, out, err);
}

}  // namespace condsafe::cli
