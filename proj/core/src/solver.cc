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

#include "condsafe/solver.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "condsafe/errors.h"

namespace condsafe {

namespace {

constexpr std::chrono::milliseconds kGrace{2000};
constexpr int kPollSliceMs = 50;

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

bool is_z3(const std::string& program) {
  return std::filesystem::path(program).filename().string().starts_with("z3");
}

std::optional<std::string> find_on_path(const std::string& name) {
  const char* path = std::getenv("PATH");
  if (!path) return std::nullopt;
  std::istringstream in(path);
  for (std::string dir; std::getline(in, dir, ':');) {
    if (dir.empty()) continue;
    std::filesystem::path candidate = std::filesystem::path(dir) / name;
    if (::access(candidate.c_str(), X_OK) == 0) return candidate.string();
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::string> resolve_solver_command(const std::string& flag) {
  std::vector<std::string> argv = split_words(flag);
  if (argv.empty()) {
    if (const char* env = std::getenv("CONDSAFE_SOLVER")) {
      argv = split_words(env);
    }
  }
  if (argv.empty()) {
    auto z3 = find_on_path("z3");
    if (!z3) {
      throw BackendError(
          "no SMT solver found: pass --solver, set CONDSAFE_SOLVER, or put "
          "z3 on PATH");
    }
    argv.push_back(*z3);
  }
  if (argv.size() == 1 && is_z3(argv[0])) {
    argv.push_back("-in");
    argv.push_back("-smt2");
  }
  return argv;
}

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::kSat: return "sat";
    case CheckStatus::kUnsat: return "unsat";
    case CheckStatus::kUnknown: return "unknown";
  }
  return "?";
}

SolverHandle::SolverHandle(SolverConfig config) : config_(std::move(config)) {
  if (config_.command.empty()) config_.command = resolve_solver_command();
  scopes_.emplace_back();
}

SolverHandle::~SolverHandle() { kill_process(); }

void SolverHandle::ensure_started() {
  if (pid_ > 0) return;
  ::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2], out_pipe[2];
  if (::pipe(in_pipe) != 0) throw BackendError("pipe() failed");
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw BackendError("pipe() failed");
  }
  std::vector<char*> argv;
  for (auto& a : config_.command) argv.push_back(a.data());
  argv.push_back(nullptr);

  pid_t pid = ::fork();
  if (pid < 0) throw BackendError("fork() failed");
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    int devnull = ::open("/dev/null", O_WRONLY);
    if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execvp(argv[0], argv.data());
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::fcntl(in_pipe[1], F_SETFD, FD_CLOEXEC);
  ::fcntl(out_pipe[0], F_SETFD, FD_CLOEXEC);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  reader_.clear();

  send("(set-option :produce-models true)", false);
  send("(set-logic QF_NIA)", false);
  if (is_z3(config_.command[0])) {
    send("(set-option :timeout " + std::to_string(config_.timeout.count()) +
             ")",
         false);
  }
  for (size_t i = 0; i < scopes_.size(); ++i) {
    if (i > 0) send("(push 1)", false);
    for (const auto& c : scopes_[i].commands) send(c, false);
  }
}

void SolverHandle::kill_process() {
  if (pid_ <= 0) return;
  ::close(to_child_);
  ::close(from_child_);
  ::kill(pid_, SIGKILL);
  int status = 0;
  ::waitpid(pid_, &status, 0);
  pid_ = -1;
  to_child_ = from_child_ = -1;
  reader_.clear();
}

void SolverHandle::send(const std::string& command, bool record) {
  if (record) scopes_.back().commands.push_back(command);
  if (pid_ <= 0) {
    if (!record) return;
    ensure_started();
    return;  // replay already sent it
  }
  std::string line = command + "\n";
  const char* p = line.data();
  size_t left = line.size();
  while (left > 0) {
    ssize_t n = ::write(to_child_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      kill_process();
      throw BackendError("solver process closed its input");
    }
    p += n;
    left -= static_cast<size_t>(n);
  }
}

void SolverHandle::declare(const smt::Declaration& d) {
  scopes_.back().declarations.push_back(d);
  send("(declare-fun " + d.name + " () " + smt::sort_name(d.sort) + ")");
}

void SolverHandle::add(const smt::Term& assertion) {
  send("(assert " + assertion.to_string() + ")");
}

void SolverHandle::push() {
  if (pid_ > 0) send("(push 1)", false);
  scopes_.emplace_back();
}

void SolverHandle::pop() {
  if (scopes_.size() <= 1) throw ProtocolError("pop without matching push");
  scopes_.pop_back();
  if (pid_ > 0) send("(pop 1)", false);
}

std::optional<SExpr> SolverHandle::read_response(
    std::chrono::steady_clock::time_point deadline) {
  char buf[4096];
  while (true) {
    if (auto e = reader_.next()) {
      if (e->is_atom("success") || e->is_atom("unsupported")) continue;
      if (e->is_list() && !e->list().empty() && e->list()[0].is_atom("error")) {
        throw ProtocolError("solver error: " + e->to_string());
      }
      return e;
    }
    if (cancelled()) return std::nullopt;
    auto now = std::chrono::steady_clock::now();
    if (now >= deadline) return std::nullopt;
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                    deadline - now)
                    .count();
    pollfd pfd{from_child_, POLLIN, 0};
    int r = ::poll(&pfd, 1,
                   static_cast<int>(std::min<long long>(left, kPollSliceMs)));
    if (r < 0) {
      if (errno == EINTR) continue;
      throw BackendError("poll() failed");
    }
    if (r == 0) continue;
    ssize_t n = ::read(from_child_, buf, sizeof buf);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      kill_process();
      throw BackendError("solver process terminated unexpectedly");
    }
    reader_.feed(std::string_view(buf, static_cast<size_t>(n)));
  }
}

CheckResult SolverHandle::check_sat(std::span<const smt::Term> assumptions) {
  CheckResult result;
  if (cancelled()) return result;
  ensure_started();
  bool scoped = !assumptions.empty();
  if (scoped) {
    push();
    for (const auto& a : assumptions) add(a);
  }
  auto start = std::chrono::steady_clock::now();
  auto deadline = start + config_.timeout + kGrace;
  ++queries_;
  auto finish = [&](CheckResult r) {
    r.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    if (r.status == CheckStatus::kSat) {
      sat_seconds_ += r.seconds;
    } else {
      unsat_seconds_ += r.seconds;
    }
    if (scoped) pop();
    return r;
  };

  send("(check-sat)", false);
  std::optional<SExpr> answer = read_response(deadline);
  if (!answer) {
    kill_process();  // restarted lazily with the live scopes
    return finish(result);
  }
  if (answer->is_atom("unsat")) {
    result.status = CheckStatus::kUnsat;
  } else if (answer->is_atom("unknown") || answer->is_atom("timeout")) {
    result.status = CheckStatus::kUnknown;
  } else if (answer->is_atom("sat")) {
    send("(get-model)", false);
    std::optional<SExpr> model_text = read_response(deadline + kGrace);
    if (!model_text) {
      kill_process();
      return finish(result);
    }
    smt::Model model = smt::parse_model(*model_text);
    for (const auto& scope : scopes_) {
      for (const auto& d : scope.declarations) {
        if (model.contains(d.name)) continue;
        if (d.sort == smt::Sort::kBool) {
          model.set(d.name, false);
        } else {
          model.set(d.name, Integer(0));
        }
      }
    }
    result.status = CheckStatus::kSat;
    result.model = std::move(model);
  } else {
    throw ProtocolError("unexpected check-sat answer " + answer->to_string());
  }
  return finish(std::move(result));
}

CheckResult check(SolverHandle& handle,
                  std::span<const smt::Declaration> declarations,
                  std::span<const smt::Term> hard,
                  std::span<const smt::Term> assumptions) {
  handle.push();
  CheckResult r;
  try {
    for (const auto& d : declarations) handle.declare(d);
    for (const auto& h : hard) handle.add(h);
    r = handle.check_sat(assumptions);
  } catch (...) {
    handle.pop();
    throw;
  }
  handle.pop();
  return r;
}

}  // namespace condsafe
