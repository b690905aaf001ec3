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

#ifndef CONDSAFE_CFG_H_
#define CONDSAFE_CFG_H_

#include <span>
#include <string>
#include <vector>

#include "condsafe/program.h"

namespace condsafe {

// A strongly connected component of the control-flow multigraph together
// with its internal transitions. Trivial components (one location, no
// self-loop) have no transitions.
struct Component {
  int id = -1;
  std::vector<Location> locations;
  std::vector<Transition> transitions;

  bool contains(const Location& l) const;
  bool contains_transition(const std::string& id) const;
  bool trivial() const { return transitions.empty(); }
};

struct DagEdge {
  int from = -1;
  int to = -1;
  std::string transition;
};

class ComponentDag {
 public:
  ComponentDag() = default;
  ComponentDag(std::vector<Component> components, std::vector<DagEdge> edges);

  const std::vector<Component>& components() const { return components_; }
  const std::vector<DagEdge>& edges() const { return edges_; }
  // Throws UnknownLocation.
  const Component& component_of(const Location& l) const;
  // Component ids in topological order; empty if the graph had a cycle.
  std::vector<int> topological_order() const;

 private:
  std::vector<Component> components_;
  std::vector<DagEdge> edges_;
};

// Tarjan SCC decomposition. Components are numbered by the first appearance
// of any of their locations in `p.locations`.
ComponentDag decompose(const Program& p);

// Transitions of `p` not internal to `c` whose target lies in `c`, in
// program order.
std::vector<Transition> entries(const Component& c, const Program& p);

bool is_exit(const Transition& t, const Component& c);

// True iff every path from the initial location that uses `t` passes
// through some transition of `dominators` first, i.e. src(t) is unreachable
// from the initial location once `dominators` are removed.
bool dominates(std::span<const std::string> dominators, const Transition& t,
               const Program& p);

// Graphviz rendering of the component DAG.
std::string to_dot(const ComponentDag& dag);

}  // namespace condsafe

#endif  // CONDSAFE_CFG_H_
