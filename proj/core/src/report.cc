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

#include "condsafe/report.h"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace condsafe {

namespace {

using nlohmann::json;

json integer_json(const Integer& v) {
  if (v >= std::numeric_limits<long long>::min() &&
      v <= std::numeric_limits<long long>::max()) {
    return v.convert_to<long long>();
  }
  return v.str();
}

json trace_json(const Trace& t, const std::vector<std::string>& vars) {
  json states = json::array();
  for (const auto& [loc, val] : t.states) {
    json values = json::object();
    for (const auto& v : vars) {
      Var var{v, false};
      if (val.contains(var)) values[v] = integer_json(val.get(var));
    }
    states.push_back({{"location", loc}, {"values", values}});
  }
  return {{"states", states}, {"transitions", t.transitions}};
}

std::string seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

std::string emit_json(const Report& r) {
  json as = json::array();
  for (const auto& a : r.assertions) {
    json inv = json::object();
    for (const auto& [loc, conj] : a.invariants()) inv[loc] = conj;
    json entry = {
        {"id", a.id},
        {"result", to_string(a.result)},
        {"invariants", inv},
        {"stats",
         {{"calls", a.stats.calls},
          {"depth", a.stats.max_depth},
          {"narrowings", a.stats.narrowings},
          {"solver_sat_s", a.stats.solver_sat_s},
          {"solver_unsat_s", a.stats.solver_unsat_s}}}};
    if (a.counterexample) {
      entry["counterexample"] = trace_json(*a.counterexample, r.vars);
    }
    as.push_back(std::move(entry));
  }
  json doc = {{"assertions", as}, {"total_s", r.total_s}};
  return doc.dump(2) + "\n";
}

std::string emit_human(const Report& r) {
  std::ostringstream out;
  for (const auto& a : r.assertions) {
    out << "assertion " << a.id << " (" << a.transition << ": "
        << a.formula.to_string() << "): " << to_string(a.result) << "\n";
    if (!a.diagnostic.empty()) out << "  reason: " << a.diagnostic << "\n";
    if (!a.chain.empty()) out << "  proof:\n";
    for (const auto& step : a.chain) {
      out << "    " << std::string(2 * step.depth, ' ') << step.transition
          << " [" << step.formula.to_string() << "]:";
      bool any = false;
      for (const auto& [loc, conj] : step.invariant) {
        if (conj.empty()) continue;
        out << (any ? "; " : " ") << loc << ": " << to_string(conj);
        any = true;
      }
      if (!any) out << " (valid)";
      out << "\n";
    }
    out << "  stats: calls=" << a.stats.calls << " depth=" << a.stats.max_depth
        << " narrowings=" << a.stats.narrowings
        << " memo_hits=" << a.stats.memo_hits
        << " sat_s=" << seconds(a.stats.solver_sat_s)
        << " unsat_s=" << seconds(a.stats.solver_unsat_s)
        << " wall_s=" << seconds(a.seconds) << "\n";
    if (a.counterexample) {
      out << "  counterexample:\n" << a.counterexample->to_string(r.vars);
    } else if (a.bmc_depth) {
      out << "  bmc: no violation up to depth " << *a.bmc_depth << "\n";
    }
  }
  out << "total: " << seconds(r.total_s) << " s\n";
  return out.str();
}

}  // namespace

std::map<Location, std::vector<std::string>> AssertionReport::invariants()
    const {
  std::map<Location, std::vector<std::string>> out;
  for (const auto& step : chain) {
    for (const auto& [loc, conj] : step.invariant) {
      auto& v = out[loc];
      for (const auto& c : conj) {
        std::string s = c.to_string();
        if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
      }
    }
  }
  std::erase_if(out, [](const auto& kv) { return kv.second.empty(); });
  return out;
}

AssertionReport make_assertion_report(const Assertion& a,
                                      const AssertionOutcome& outcome) {
  AssertionReport r;
  r.id = a.id;
  r.transition = a.transition;
  r.formula = a.formula;
  r.result = outcome.verdict.result;
  r.chain = outcome.verdict.chain;
  r.stats = outcome.stats;
  r.diagnostic = outcome.verdict.diagnostic;
  r.backend_error = outcome.verdict.backend_error;
  r.seconds = outcome.seconds;
  return r;
}

std::string emit_report(const Report& report, ReportFormat format) {
  return format == ReportFormat::kJson ? emit_json(report) : emit_human(report);
}

}  // namespace condsafe
