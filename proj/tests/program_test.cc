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

#include <random>

#include "condsafe/errors.h"
#include "condsafe/program.h"
#include "support.h"

namespace condsafe {
namespace {

using testing::constraint;

const Var kX{"x", false};
const Var kY{"y", false};
const Var kI{"i", false};
const Var kXp{"x", true};

LinearExpr var(const Var& v, int c = 1) { return LinearExpr::variable(v, c); }
LinearExpr num(int c) { return LinearExpr(Integer(c)); }

TEST(NormalizeConstraint, StrictIsTightened) {
  auto out = normalize_constraint(RawRelation{var(kX), RelOp::kLt, var(kY)});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], LinearConstraint({{kX, 1}, {kY, -1}}, 1));
}

TEST(NormalizeConstraint, EqualityIsSplit) {
  auto out = normalize_constraint(
      RawRelation{var(kXp), RelOp::kEq, var(kX) + num(5)});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], LinearConstraint({{kXp, 1}, {kX, -1}}, -5));
  EXPECT_EQ(out[1], LinearConstraint({{kXp, -1}, {kX, 1}}, 5));
}

TEST(NormalizeConstraint, GreaterThanFlips) {
  auto out = normalize_constraint(RawRelation{var(kI), RelOp::kGt, num(0)});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], LinearConstraint({{kI, -1}}, 1));
}

TEST(NormalizeConstraint, DisequalityRejected) {
  EXPECT_THROW(normalize_constraint(RawRelation{var(kX), RelOp::kNe, var(kY)}),
               DisequalityNotAllowedHere);
}

TEST(NormalizeConstraint, GcdTightensConstant) {
  // 2x <= 3 over the integers is x <= 1.
  auto out = normalize_constraint(RawRelation{var(kX, 2), RelOp::kLe, num(3)});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], LinearConstraint({{kX, 1}}, -1));
}

TEST(NormalizeConstraint, SolutionPreservingOnRandomRelations) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coeff(-4, 4), val(-6, 6), op(0, 4);
  const RelOp ops[] = {RelOp::kLe, RelOp::kLt, RelOp::kGe, RelOp::kGt,
                       RelOp::kEq};
  for (int round = 0; round < 300; ++round) {
    RawRelation raw{var(kX, coeff(rng)) + var(kY, coeff(rng)) + num(coeff(rng)),
                    ops[op(rng)], var(kXp, coeff(rng)) + num(coeff(rng))};
    auto out = normalize_constraint(raw);
    for (int s = 0; s < 20; ++s) {
      Valuation v;
      v.set(kX, val(rng));
      v.set(kY, val(rng));
      v.set(kXp, val(rng));
      EXPECT_EQ(evaluate(raw, v), evaluate(out, v));
    }
  }
}

TEST(Evaluate, BoundaryOfLoopInvariant) {
  // x + 5i >= 0
  LinearConstraint c({{kX, -1}, {kI, -5}}, 0);
  EXPECT_TRUE(evaluate(c, Valuation({{kX, -10}, {kI, 2}})));
  EXPECT_FALSE(evaluate(c, Valuation({{kX, -11}, {kI, 2}})));
}

TEST(Evaluate, ConstantConstraintIsTrue) {
  EXPECT_TRUE(evaluate(LinearConstraint::make_true(), Valuation()));
  EXPECT_FALSE(evaluate(LinearConstraint::make_false(), Valuation()));
}

TEST(Evaluate, MissingVariableThrows) {
  EXPECT_THROW(evaluate(LinearConstraint({{kX, 1}}, 0), Valuation({{kY, 0}})),
               IncompleteValuation);
}

TEST(NegateConjunction, SingleLiteral) {
  Conjunction conj = {LinearConstraint({{kX, 1}, {kY, -1}}, 0)};
  Clause c = negate_conjunction(conj);
  ASSERT_EQ(c.literals.size(), 1u);
  EXPECT_EQ(c.literals[0], LinearConstraint({{kY, 1}, {kX, -1}}, 1));
}

TEST(NegateConjunction, DeMorgan) {
  const Var j{"j", false};
  Conjunction conj = {LinearConstraint({{j, 1}}, 0),
                      LinearConstraint({{j, -1}}, 0)};
  Clause c = negate_conjunction(conj);
  ASSERT_EQ(c.literals.size(), 2u);
  EXPECT_EQ(c.literals[0], LinearConstraint({{j, -1}}, 1));
  EXPECT_EQ(c.literals[1], LinearConstraint({{j, 1}}, 1));
}

TEST(NegateConjunction, EmptyThrows) {
  EXPECT_THROW(negate_conjunction(Conjunction{}), EmptyConjunction);
}

TEST(NegateConjunction, NarrowedLoopRelation) {
  // t4 of the two-loop program narrowed by not(y < x), read on the pre-state.
  Conjunction t4 = testing::constraints("x' = x + 1, y' = y + 1");
  Clause neg = negate_conjunction(std::vector{constraint("y < x")});
  ASSERT_EQ(neg.literals.size(), 1u);
  EXPECT_EQ(neg.literals[0], constraint("x - y <= 0"));
  Conjunction narrowed = t4;
  narrowed.push_back(neg.literals[0]);
  EXPECT_EQ(narrowed, testing::constraints("x' = x + 1, y' = y + 1, x <= y"));
}

TEST(NegateConjunction, Complementary) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coeff(-3, 3), val(-5, 5), len(1, 3);
  for (int round = 0; round < 200; ++round) {
    Conjunction conj;
    for (int n = len(rng); n > 0; --n) {
      conj.emplace_back(std::map<Var, Integer>{{kX, coeff(rng)}, {kY, coeff(rng)}},
                        coeff(rng));
    }
    Clause neg = negate_conjunction(conj);
    for (int s = 0; s < 20; ++s) {
      Valuation v({{kX, val(rng)}, {kY, val(rng)}});
      EXPECT_NE(evaluate(conj, v), evaluate(neg, v));
    }
  }
}

TEST(LinearConstraint, ToStringReparses) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coeff(-7, 7);
  for (int round = 0; round < 100; ++round) {
    LinearConstraint c({{kX, coeff(rng)}, {kY, coeff(rng)}, {kXp, coeff(rng)}},
                       coeff(rng));
    if (c.is_constant()) continue;
    EXPECT_EQ(constraint(c.to_string()), c) << c.to_string();
  }
}

TEST(Clause, CanonicalSortsAndDeduplicates) {
  LinearConstraint a({{kX, 1}}, 0), b({{kY, 1}}, 0);
  Clause c1{{b, a, b}}, c2{{a, b}};
  EXPECT_EQ(c1.canonical(), c2.canonical());
  EXPECT_EQ(c1.canonical().literals.size(), 2u);
}

TEST(Clause, TrueLiteralCollapses) {
  Clause c{{LinearConstraint({{kX, 1}}, 0), LinearConstraint::make_true()}};
  Clause canon = c.canonical();
  ASSERT_EQ(canon.literals.size(), 1u);
  EXPECT_TRUE(canon.literals[0].is_trivially_true());
}

}  // namespace
}  // namespace condsafe
