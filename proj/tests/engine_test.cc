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

#include <algorithm>

#include "condsafe/cfg.h"
#include "condsafe/engine.h"
#include "condsafe/oracle.h"
#include "equivalence.h"
#include "support.h"

namespace condsafe {
namespace {

using testing::clause;
using testing::constraint;
using testing::constraints;

EngineOptions options() {
  EngineOptions o;
  o.solver_command = resolve_solver_command();
  return o;
}

std::vector<Conjunction> relations(const std::vector<Transition>& ts,
                                   const std::string& origin) {
  std::vector<Conjunction> out;
  for (const auto& t : ts) {
    if (t.origin == origin || t.id == origin) out.push_back(t.relation);
  }
  return out;
}

const TraceEvent* find_event(const AssertionOutcome& o, TraceEvent::Kind kind,
                             const std::string& transition) {
  for (const auto& e : o.trace) {
    if (e.kind == kind && e.transition == transition) return &e;
  }
  return nullptr;
}

class TwoLoops : public ::testing::Test {
 protected:
  TwoLoops() : inst_(testing::load_corpus("two_loops.its")), dag_(decompose(inst_.program)) {}
  const Transition& t(const std::string& id) { return *inst_.program.find_transition(id); }
  CondSafeInput input(const std::string& loc, const std::string& exit,
                      const Clause& phi) {
    CondSafeInput in;
    component_ = dag_.component_of(loc);
    in.component = &component_;
    in.entries = entries(component_, inst_.program);
    in.exit = t(exit);
    in.phi = phi;
    in.vars = inst_.program.vars;
    return in;
  }
  Instance inst_;
  ComponentDag dag_;
  Component component_;
};

TEST_F(TwoLoops, CondSafeSecondLoopPicksOneOrientation) {
  CondSafeResult r = cond_safe(input("l2", "t5", inst_.assertions[0].formula), options());
  ASSERT_TRUE(r.invariant.has_value()) << r.diagnostic;
  const Conjunction& q = r.invariant->q.at("l2");
  ASSERT_EQ(q.size(), 1u);
  EXPECT_TRUE(q[0] == constraint("x < y") || q[0] == constraint("y < x"))
      << q[0].to_string();
}

// The documented template space admits a two-conjunct invariant for
// (t3, y < x) on the first loop, so the engine finds one; the subgoal still
// fails overall because it is violated by a concrete execution.
TEST_F(TwoLoops, FirstLoopSubgoalHasInvariantButIsMaybe) {
  CondSafeResult r = cond_safe(input("l1", "t3", clause("y < x")), options());
  ASSERT_TRUE(r.invariant.has_value());
  Verifier v(inst_.program, options());
  AssertionOutcome o = v.verify(Assertion{"sub", "t3", clause("y < x")});
  EXPECT_EQ(o.verdict.result, Result::kMaybe);
  BmcOptions b;
  b.depth = 3;
  b.value_bound = 2;
  EXPECT_TRUE(bmc_explicit(inst_.program, Assertion{"sub", "t3", clause("y < x")}, b)
                  .found());
}

TEST_F(TwoLoops, SafeWithNarrowingTrace) {
  Verifier v(inst_.program, options());
  AssertionOutcome o = v.verify(inst_.assertions[0]);
  ASSERT_EQ(o.verdict.result, Result::kSafe) << o.verdict.diagnostic;
  EXPECT_GE(o.stats.narrowings, 1);
  const TraceEvent* failed = find_event(o, TraceEvent::Kind::kMaybe, "t3");
  ASSERT_NE(failed, nullptr);
  EXPECT_TRUE(failed->formula == clause("y < x") || failed->formula == clause("x < y"));
  const TraceEvent* initial = find_event(o, TraceEvent::Kind::kValid, "t1");
  ASSERT_NE(initial, nullptr);
  EXPECT_EQ(initial->formula, clause("x < y"));
  // Chain ends at the initial transition.
  ASSERT_FALSE(o.verdict.chain.empty());
  EXPECT_EQ(o.verdict.chain.front().transition, "t5");
}

TEST_F(TwoLoops, ParallelModeAgrees) {
  EngineOptions o = options();
  o.parallel = 2;
  Verifier v(inst_.program, o);
  EXPECT_EQ(v.verify(inst_.assertions[0]).verdict.result, Result::kSafe);
}

TEST_F(TwoLoops, NarrowEntriesNegatesFailedLiteral) {
  InvariantMap q{{"l2", {constraint("y < x")}}};
  std::map<std::pair<std::string, std::string>, bool> safe{
      {{"t3", constraint("y < x").key()}, false}};
  std::vector<Transition> es = {t("t3")};
  auto out = narrow_entries(es, q, safe);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].origin, "t3");
  SolverHandle h(testing::solver_config());
  std::vector<Conjunction> expect = {constraints("x < 0, x' = x, y' = y, x' <= y'")};
  EXPECT_TRUE(testing::same_relation(h, inst_.program.vars, relations(out, "t3"), expect));
}

TEST_F(TwoLoops, NarrowEntriesTwoFailedLiterals) {
  InvariantMap q{{"l2", {constraint("y < x"), constraint("x <= 5")}}};
  std::map<std::pair<std::string, std::string>, bool> safe{
      {{"t3", constraint("y < x").key()}, false},
      {{"t3", constraint("x <= 5").key()}, false}};
  std::vector<Transition> es = {t("t3")};
  EXPECT_EQ(narrow_entries(es, q, safe).size(), 2u);
}

TEST_F(TwoLoops, NarrowEntriesKeepsContradiction) {
  InvariantMap q{{"l2", {constraint("x < 0")}}};
  std::map<std::pair<std::string, std::string>, bool> safe{
      {{"t3", constraint("x < 0").key()}, false}};
  std::vector<Transition> es = {t("t3")};
  auto out = narrow_entries(es, q, safe);
  ASSERT_EQ(out.size(), 1u);
  SolverHandle h(testing::solver_config());
  EXPECT_EQ(is_satisfiable(h, inst_.program.vars, out[0].relation), false);
}

TEST_F(TwoLoops, NarrowComponent) {
  InvariantMap q{{"l2", {constraint("y < x")}}};
  Component c = narrow_component(dag_.component_of("l2"), q);
  SolverHandle h(testing::solver_config());
  std::vector<Conjunction> expect = {
      constraints("x' = x + 1, y' = y + 1, x <= y, x' <= y'")};
  EXPECT_TRUE(testing::same_relation(h, inst_.program.vars, relations(c.transitions, "t4"),
                                     expect));
}

TEST_F(TwoLoops, NarrowComponentTrueRemovesTransitions) {
  InvariantMap q{{"l2", {}}};
  EXPECT_TRUE(narrow_component(dag_.component_of("l2"), q).transitions.empty());
}

TEST_F(TwoLoops, NarrowComponentDistributes) {
  InvariantMap q{{"l2", {constraint("y < x"), constraint("x <= 5")}}};
  Component c = narrow_component(dag_.component_of("l2"), q);
  EXPECT_GE(c.transitions.size(), 1u);
  EXPECT_LE(c.transitions.size(), 4u);
}

TEST_F(TwoLoops, StrengthenUnnarrowed) {
  Program p = strengthen(inst_.program, t("t1"), clause("x < y"));
  const Transition* t1 = p.find_transition("t1");
  ASSERT_NE(t1, nullptr);
  EXPECT_NE(std::find(t1->relation.begin(), t1->relation.end(), constraint("x' < y'")),
            t1->relation.end());
  SolverHandle h(testing::solver_config());
  std::vector<Conjunction> before = {t("t1").relation}, after = {t1->relation};
  EXPECT_TRUE(testing::same_relation(h, inst_.program.vars, before, after));
}

TEST_F(TwoLoops, StrengthenNarrowedSplits) {
  Transition narrowed = t("t3");
  narrowed.id = "t3~1";
  narrowed.origin = "t3";
  narrowed.narrowing = {constraint("x' <= y'")};
  narrowed.relation.push_back(constraint("x' <= y'"));
  Program p = strengthen(inst_.program, narrowed, clause("x < y"));
  int copies = 0;
  for (const auto& tr : p.transitions) {
    if (tr.origin == "t3") ++copies;
  }
  EXPECT_EQ(copies, 2);
  // The replacements cover t3 and not(x' <= y'), and t3 and x' < y'.
  SolverHandle h(testing::solver_config());
  Conjunction outside = t("t3").relation, proven = t("t3").relation;
  outside.push_back(constraint("x' > y'"));
  proven.push_back(constraint("x' < y'"));
  std::vector<Conjunction> expect = {outside, proven};
  EXPECT_TRUE(testing::same_relation(h, inst_.program.vars, expect,
                                     relations(p.transitions, "t3")));
}

TEST_F(TwoLoops, StrengthenTrueIsIdentity) {
  Program p = strengthen(inst_.program, t("t1"), Clause{{LinearConstraint::make_true()}});
  EXPECT_EQ(p.find_transition("t1")->relation, t("t1").relation);
  EXPECT_EQ(p.transitions.size(), inst_.program.transitions.size());
}

TEST(Engine, UnguardedVariantIsMaybe) {
  Instance inst = testing::load_corpus("two_loops_unguarded.its");
  Verifier v(inst.program, options());
  AssertionOutcome o = v.verify(inst.assertions[0]);
  EXPECT_EQ(o.verdict.result, Result::kMaybe);
  BmcOptions b;
  b.depth = 6;
  b.value_bound = 2;
  EXPECT_TRUE(bmc_explicit(inst.program, inst.assertions[0], b).found());
}

TEST(Engine, ExitAlreadyImpliesFormula) {
  Instance inst = testing::load_text(
      "var x; init l0; t0: l0 -> l1 { x' = 3 }; t1: l1 -> l2 { x >= 2, x' = x };"
      "assert t1: x >= 1;");
  Verifier v(inst.program, options());
  AssertionOutcome o = v.verify(inst.assertions[0]);
  EXPECT_EQ(o.verdict.result, Result::kSafe);
  EXPECT_EQ(o.stats.calls, 1);
  EXPECT_EQ(o.stats.max_depth, 0);
}

TEST(Engine, CountingLoopInvariantWithinExpectedRange) {
  Instance inst = testing::load_corpus("counting_loop.its");
  ComponentDag dag = decompose(inst.program);
  Component loop = dag.component_of("l1");
  CondSafeInput in;
  in.component = &loop;
  in.entries = entries(loop, inst.program);
  in.exit = *inst.program.find_transition("t2");
  in.phi = inst.assertions[0].formula;
  in.vars = inst.program.vars;
  CondSafeResult r = cond_safe(in, options());
  ASSERT_TRUE(r.invariant.has_value());
  SolverHandle h(testing::solver_config());
  bool some_m = false;
  for (int m = 0; m <= 5 && !some_m; ++m) {
    LinearConstraint target({{Var{"x", false}, -1}, {Var{"i", false}, -m}}, 0);
    some_m = is_valid(h, inst.program.vars, r.invariant->q.at("l1"), Clause{{target}}) == true;
  }
  EXPECT_TRUE(some_m);
}

TEST(Engine, DepthCapGivesMaybe) {
  Instance inst = testing::load_corpus("two_loops.its");
  EngineOptions o = options();
  o.depth_cap = 0;
  Verifier v(inst.program, o);
  AssertionOutcome out = v.verify(inst.assertions[0]);
  EXPECT_EQ(out.verdict.result, Result::kMaybe);
}

TEST(Engine, RefutationCanBeDisabled) {
  Instance inst = testing::load_text(
      "var x; init l0; t0: l0 -> l1 { x' = x }; t1: l1 -> l1 { x' = x + 1 };"
      "t2: l1 -> l2 { x' = x }; assert t2: x >= 0;");
  EngineOptions o = options();
  Verifier with(inst.program, o);
  AssertionOutcome a = with.verify(inst.assertions[0]);
  EXPECT_EQ(a.verdict.result, Result::kMaybe);
  EXPECT_NE(a.verdict.diagnostic.find("violated"), std::string::npos);
  o.refute_steps = 0;
  Verifier without(inst.program, o);
  EXPECT_EQ(without.verify(inst.assertions[0]).verdict.result, Result::kMaybe);
}

TEST(Engine, ValidityHelpers) {
  SolverHandle h(testing::solver_config());
  std::vector<std::string> vars = {"x"};
  EXPECT_EQ(is_valid(h, vars, constraints("x >= 2"), clause("x >= 1")), true);
  EXPECT_EQ(is_valid(h, vars, constraints("x >= 0"), clause("x >= 1")), false);
  EXPECT_EQ(is_satisfiable(h, vars, constraints("x >= 1, x <= 0")), false);
}

TEST(Engine, RootingAddsStart) {
  Program p = testing::load_text("var x; init l0; t: l0 -> l0 { x' = x + 1 };").program;
  Program r = root_program(p);
  EXPECT_NE(r.init, p.init);
  EXPECT_EQ(r.transitions.size(), p.transitions.size() + 1);
  Program q = testing::load_corpus("two_loops.its").program;
  EXPECT_EQ(root_program(q).init, q.init);
}

TEST(Memo, KeysAreCanonical) {
  Instance inst = testing::load_corpus("two_loops.its");
  const Transition& t3 = *inst.program.find_transition("t3");
  const Transition& t5 = *inst.program.find_transition("t5");
  Clause a{{constraint("x < y"), constraint("y < x")}};
  Clause b{{constraint("y < x"), constraint("x < y")}};
  std::vector<Transition> none;
  EXPECT_EQ(MemoTable::key(none, none, t5, a.canonical()),
            MemoTable::key(none, none, t5, b.canonical()));
  EXPECT_NE(MemoTable::key(none, none, t5, a.canonical()),
            MemoTable::key(none, none, t3, a.canonical()));
  MemoTable m;
  std::string k = MemoTable::key(none, none, t5, a.canonical());
  EXPECT_FALSE(m.lookup(k));
  m.insert(k);
  EXPECT_TRUE(m.lookup(k));
  EXPECT_FALSE(m.lookup(MemoTable::key(none, none, t3, a.canonical())));
}

}  // namespace
}  // namespace condsafe
