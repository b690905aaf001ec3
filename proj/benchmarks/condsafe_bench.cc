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

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <string>

#include "condsafe/cfg.h"
#include "condsafe/encoder.h"
#include "condsafe/engine.h"
#include "condsafe/frontend.h"
#include "condsafe/oracle.h"

namespace condsafe {
namespace {

std::string path(const std::string& name) {
  return std::string(CONDSAFE_CORPUS_DIR) + "/" + name;
}

std::string read(const std::string& name) {
  std::ifstream in(path(name));
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Instance load(const std::string& name) {
  return elaborate(parse_program_file(path(name)));
}

// A chain of n self-loops l0 -> l1 -> ... with one counter.
Program chain(int n) {
  Program p;
  p.vars = {"x"};
  p.init = "l0";
  const Var x{"x", false}, xp{"x", true};
  for (int i = 0; i <= n; ++i) p.locations.push_back("l" + std::to_string(i));
  for (int i = 0; i < n; ++i) {
    std::string l = "l" + std::to_string(i);
    Transition loop{"a" + std::to_string(i), l, l, {}, {}, {}};
    loop.relation = {LinearConstraint({{x, 1}}, 0),
                     LinearConstraint({{xp, 1}, {x, -1}}, -1),
                     LinearConstraint({{xp, -1}, {x, 1}}, 1)};
    Transition step{"b" + std::to_string(i), l, "l" + std::to_string(i + 1), {}, {}, {}};
    step.relation = {LinearConstraint({{xp, 1}, {x, -1}}, 0),
                     LinearConstraint({{xp, -1}, {x, 1}}, 0)};
    p.transitions.push_back(loop);
    p.transitions.push_back(step);
  }
  return p;
}

void BM_Parse(benchmark::State& state) {
  std::string text = read("sequential_loops.its");
  for (auto _ : state) benchmark::DoNotOptimize(elaborate(parse_program(text)));
}
BENCHMARK(BM_Parse);

void BM_Decompose(benchmark::State& state) {
  Program p = chain(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(decompose(p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Decompose)->RangeMultiplier(4)->Range(4, 1024)->Complexity();

void BM_BmcExplicit(benchmark::State& state) {
  Instance inst = load("two_loops.its");
  BmcOptions o;
  o.depth = static_cast<int>(state.range(0));
  o.value_bound = 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bmc_explicit(inst.program, inst.assertions[0], o));
  }
}
BENCHMARK(BM_BmcExplicit)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

void BM_BuildFk(benchmark::State& state) {
  Instance inst = load("count_to_fifty.its");
  Component loop = decompose(inst.program).component_of("l1");
  FkInput in;
  in.component = &loop;
  in.exit = *inst.program.find_transition("t2");
  in.phi = inst.assertions[0].formula;
  in.k = static_cast<int>(state.range(0));
  in.vars = inst.program.vars;
  for (auto _ : state) benchmark::DoNotOptimize(build_fk(in));
}
BENCHMARK(BM_BuildFk)->DenseRange(1, 3);

void BM_Verify(benchmark::State& state, const char* name) {
  Instance inst = load(name);
  EngineOptions o;
  o.solver_command = resolve_solver_command();
  for (auto _ : state) {
    Verifier v(inst.program, o);
    benchmark::DoNotOptimize(v.verify(inst.assertions[0]));
  }
}
BENCHMARK_CAPTURE(BM_Verify, counting_loop, "counting_loop.its")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Verify, count_to_fifty, "count_to_fifty.its")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Verify, two_loops, "two_loops.its")->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace condsafe

BENCHMARK_MAIN();
