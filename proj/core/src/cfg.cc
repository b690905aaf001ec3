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

#include "condsafe/cfg.h"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "condsafe/errors.h"

namespace condsafe {

bool Component::contains(const Location& l) const {
  return std::find(locations.begin(), locations.end(), l) != locations.end();
}

bool Component::contains_transition(const std::string& id) const {
  return std::any_of(transitions.begin(), transitions.end(),
                     [&](const Transition& t) { return t.id == id; });
}

ComponentDag::ComponentDag(std::vector<Component> components,
                           std::vector<DagEdge> edges)
    : components_(std::move(components)), edges_(std::move(edges)) {}

const Component& ComponentDag::component_of(const Location& l) const {
  for (const auto& c : components_) {
    if (c.contains(l)) return c;
  }
  throw UnknownLocation("location '" + l + "' is in no component");
}

std::vector<int> ComponentDag::topological_order() const {
  const int n = static_cast<int>(components_.size());
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<int>> succ(n);
  for (const auto& e : edges_) {
    succ[e.from].push_back(e.to);
    ++indegree[e.to];
  }
  std::deque<int> ready;
  for (int i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  std::vector<int> order;
  while (!ready.empty()) {
    int c = ready.front();
    ready.pop_front();
    order.push_back(c);
    for (int s : succ[c]) {
      if (--indegree[s] == 0) ready.push_back(s);
    }
  }
  if (static_cast<int>(order.size()) != n) return {};
  return order;
}

namespace {

struct Tarjan {
  const std::vector<std::vector<int>>& graph;
  std::vector<int> index, lowlink;
  std::vector<bool> on_stack;
  std::vector<int> stack;
  std::vector<std::vector<int>> sccs;
  int counter = 0;

  explicit Tarjan(const std::vector<std::vector<int>>& g)
      : graph(g),
        index(g.size(), -1),
        lowlink(g.size(), -1),
        on_stack(g.size(), false) {}

  void visit(int v) {
    index[v] = lowlink[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : graph[v]) {
      if (index[w] == -1) {
        visit(w);
        lowlink[v] = std::min(lowlink[v], lowlink[w]);
      } else if (on_stack[w]) {
        lowlink[v] = std::min(lowlink[v], index[w]);
      }
    }
    if (lowlink[v] == index[v]) {
      std::vector<int> scc;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        scc.push_back(w);
      } while (w != v);
      sccs.push_back(std::move(scc));
    }
  }
};

}  // namespace

ComponentDag decompose(const Program& p) {
  const int n = static_cast<int>(p.locations.size());
  std::vector<std::vector<int>> graph(n);
  for (const auto& t : p.transitions) {
    graph[p.location_index(t.src)].push_back(p.location_index(t.dst));
  }
  Tarjan tarjan(graph);
  for (int v = 0; v < n; ++v) {
    if (tarjan.index[v] == -1) tarjan.visit(v);
  }

  // Renumber by first appearance of a member location.
  auto& sccs = tarjan.sccs;
  for (auto& scc : sccs) std::sort(scc.begin(), scc.end());
  std::sort(sccs.begin(), sccs.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  std::vector<int> comp_of(n, -1);
  std::vector<Component> components;
  for (size_t i = 0; i < sccs.size(); ++i) {
    Component c;
    c.id = static_cast<int>(i);
    for (int v : sccs[i]) {
      comp_of[v] = c.id;
      c.locations.push_back(p.locations[v]);
    }
    components.push_back(std::move(c));
  }
  std::vector<DagEdge> edges;
  for (const auto& t : p.transitions) {
    int a = comp_of[p.location_index(t.src)];
    int b = comp_of[p.location_index(t.dst)];
    if (a == b) {
      components[a].transitions.push_back(t);
    } else {
      edges.push_back(DagEdge{a, b, t.id});
    }
  }
  return ComponentDag(std::move(components), std::move(edges));
}

std::vector<Transition> entries(const Component& c, const Program& p) {
  std::vector<Transition> out;
  for (const auto& t : p.transitions) {
    if (!c.contains_transition(t.id) && c.contains(t.dst) &&
        !c.contains(t.src)) {
      out.push_back(t);
    }
  }
  return out;
}

bool is_exit(const Transition& t, const Component& c) {
  return !c.contains_transition(t.id) && c.contains(t.src);
}

bool dominates(std::span<const std::string> dominators, const Transition& t,
               const Program& p) {
  std::set<std::string> removed(dominators.begin(), dominators.end());
  if (removed.count(t.id)) return true;
  std::set<Location> seen = {p.init};
  std::deque<Location> work = {p.init};
  while (!work.empty()) {
    Location l = work.front();
    work.pop_front();
    for (const auto& e : p.transitions) {
      if (e.src != l || removed.count(e.id)) continue;
      if (seen.insert(e.dst).second) work.push_back(e.dst);
    }
  }
  return !seen.count(t.src);
}

std::string to_dot(const ComponentDag& dag) {
  std::ostringstream os;
  os << "digraph components {\n";
  for (const auto& c : dag.components()) {
    os << "  c" << c.id << " [label=\"";
    for (size_t i = 0; i < c.locations.size(); ++i) {
      if (i > 0) os << ", ";
      os << c.locations[i];
    }
    if (!c.transitions.empty()) {
      os << "\\n{";
      for (size_t i = 0; i < c.transitions.size(); ++i) {
        if (i > 0) os << ", ";
        os << c.transitions[i].id;
      }
      os << "}";
    }
    os << "\"" << (c.trivial() ? "" : ", shape=box") << "];\n";
  }
  for (const auto& e : dag.edges()) {
    os << "  c" << e.from << " -> c" << e.to << " [label=\"" << e.transition
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace condsafe
