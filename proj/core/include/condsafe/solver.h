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

#ifndef CONDSAFE_SOLVER_H_
#define CONDSAFE_SOLVER_H_

#include <atomic>
#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "condsafe/sexpr.h"
#include "condsafe/smt_term.h"

namespace condsafe {

using CancelToken = std::shared_ptr<std::atomic<bool>>;

struct SolverConfig {
  // argv of the solver process; it must read SMT-LIB2 from stdin.
  std::vector<std::string> command;
  // Per check-sat budget.
  std::chrono::milliseconds timeout{5000};
  // When set and raised, a pending check returns Unknown promptly.
  CancelToken cancel;
};

// Resolves the solver argv from, in order: `flag` (split on whitespace),
// the CONDSAFE_SOLVER environment variable, `z3` on PATH. A bare z3
// binary gets `-in -smt2` appended. Throws BackendError if nothing is
// found.
std::vector<std::string> resolve_solver_command(const std::string& flag = {});

enum class CheckStatus { kSat, kUnsat, kUnknown };

std::string to_string(CheckStatus s);

struct CheckResult {
  CheckStatus status = CheckStatus::kUnknown;
  // Total over every declared constant when status is kSat.
  std::optional<smt::Model> model;
  double seconds = 0;
};

// Incremental SMT-LIB2 session with an external solver process. The
// process is started lazily and restarted (replaying the live scopes)
// after a timeout or cancellation. Not thread-safe.
class SolverHandle {
 public:
  explicit SolverHandle(SolverConfig config);
  ~SolverHandle();
  SolverHandle(const SolverHandle&) = delete;
  SolverHandle& operator=(const SolverHandle&) = delete;

  void declare(const smt::Declaration& d);
  void add(const smt::Term& assertion);
  void push();
  // Throws ProtocolError when there is no scope to pop.
  void pop();

  // Checks the current assertions conjoined with `assumptions`. Throws
  // BackendError if the process dies and ProtocolError on garbage.
  CheckResult check_sat(std::span<const smt::Term> assumptions = {});

  double sat_seconds() const { return sat_seconds_; }
  double unsat_seconds() const { return unsat_seconds_; }
  int queries() const { return queries_; }
  bool cancelled() const { return config_.cancel && config_.cancel->load(); }

 private:
  struct Scope {
    std::vector<std::string> commands;
    std::vector<smt::Declaration> declarations;
  };

  void ensure_started();
  void kill_process();
  void send(const std::string& command, bool record = true);
  // Reads one response; nullopt on deadline or cancellation.
  std::optional<SExpr> read_response(
      std::chrono::steady_clock::time_point deadline);

  SolverConfig config_;
  std::vector<Scope> scopes_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  SExprReader reader_;
  double sat_seconds_ = 0;
  double unsat_seconds_ = 0;
  int queries_ = 0;
};

// One-shot convenience: declares, asserts `hard` in a fresh scope, checks
// under `assumptions` and pops.
CheckResult check(SolverHandle& handle,
                  std::span<const smt::Declaration> declarations,
                  std::span<const smt::Term> hard,
                  std::span<const smt::Term> assumptions = {});

}  // namespace condsafe

#endif  // CONDSAFE_SOLVER_H_
