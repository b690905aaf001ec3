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

#include <gtest/gtest.h>

#include "condsafe/engine.h"
#include "condsafe/report.h"
#include "json.hpp"
#include "support.h"

namespace condsafe {
namespace {

using nlohmann::json;

Report run(const Instance& inst) {
  EngineOptions o;
  o.solver_command = resolve_solver_command();
  Verifier v(inst.program, o);
  Report r;
  r.vars = inst.program.vars;
  for (const auto& a : inst.assertions) {
    r.assertions.push_back(make_assertion_report(a, v.verify(a)));
  }
  return r;
}

TEST(Report, TwoLoopsJson) {
  json j = json::parse(emit_report(run(testing::load_corpus("two_loops.its")),
                                   ReportFormat::kJson));
  ASSERT_EQ(j["assertions"].size(), 1u);
  const json& a = j["assertions"][0];
  EXPECT_EQ(a["id"], "t5");
  EXPECT_EQ(a["result"], "Safe");
  EXPECT_GE(a["stats"]["narrowings"].get<int>(), 1);
  EXPECT_TRUE(a["invariants"].contains("l2"));
  EXPECT_TRUE(j["total_s"].is_number());
}

TEST(Report, ValidAtFirstCheck) {
  Instance inst = testing::load_text(
      "var x; init l0; t0: l0 -> l1 { x' = 3 }; t1: l1 -> l2 { x >= 2, x' = x };"
      "assert t1: x >= 1;");
  json j = json::parse(emit_report(run(inst), ReportFormat::kJson));
  EXPECT_EQ(j["assertions"][0]["stats"]["calls"], 1);
  EXPECT_EQ(j["assertions"][0]["stats"]["depth"], 0);
  EXPECT_TRUE(j["assertions"][0]["invariants"].empty());
}

TEST(Report, ConjunctiveAssertionGivesTwoEntries) {
  Instance inst = testing::load_text(
      "var x y; init l0; t0: l0 -> l1 { x' = 1, y' = 1 };"
      "t1: l1 -> l2 { x' = x, y' = y }; assert t1: x = y;");
  json j = json::parse(emit_report(run(inst), ReportFormat::kJson));
  ASSERT_EQ(j["assertions"].size(), 2u);
  EXPECT_EQ(j["assertions"][0]["id"], "t1#1");
  EXPECT_EQ(j["assertions"][1]["id"], "t1#2");
}

TEST(Report, HumanFormat) {
  std::string text = emit_report(run(testing::load_corpus("two_loops.its")),
                                  ReportFormat::kHuman);
  EXPECT_NE(text.find("Safe"), std::string::npos);
  EXPECT_NE(text.find("narrowings=1"), std::string::npos);
  EXPECT_NE(text.find("total:"), std::string::npos);
}

TEST(Report, CounterexampleSerialized) {
  Instance inst = testing::load_corpus("two_loops_unguarded.its");
  Report r = run(inst);
  Trace t;
  Valuation v;
  v.set(Var{"x", false}, -1);
  v.set(Var{"y", false}, -1);
  t.states = {{"l0", v}, {"l1", v}};
  t.transitions = {"t1"};
  r.assertions[0].counterexample = t;
  json j = json::parse(emit_report(r, ReportFormat::kJson));
  const json& ce = j["assertions"][0]["counterexample"];
  EXPECT_EQ(ce["transitions"], json::array({"t1"}));
  EXPECT_EQ(ce["states"][0]["values"]["x"], -1);
  EXPECT_NE(emit_report(r, ReportFormat::kHuman).find("t1"), std::string::npos);
}

TEST(Report, InvariantsUnionWithoutDuplicates) {
  AssertionReport r;
  ProofStep a{"t5", {}, {{"l2", {testing::constraint("x < y")}}}, 0};
  ProofStep b{"t3", {}, {{"l2", {testing::constraint("x < y")}},
                         {"l1", {testing::constraint("x < y")}}}, 1};
  r.chain = {a, b};
  auto inv = r.invariants();
  EXPECT_EQ(inv.at("l2").size(), 1u);
  EXPECT_EQ(inv.at("l1").size(), 1u);
}

}  // namespace
}  // namespace condsafe
