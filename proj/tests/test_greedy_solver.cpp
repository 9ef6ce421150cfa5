// Copyright 2026 The coalflow Authors
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


#include <doctest.h>

#include "coalflow/flow_solver.hpp"
#include "coalflow/graph_ops.hpp"
#include "coalflow/greedy_solver.hpp"
#include "support/test_support.hpp"

using namespace coalflow;
namespace t = coalflow::testing;

TEST_CASE("single path: greedy matches the offline optimum") {
  const Mission m = t::chain_mission();
  const FlowSolution g = solve_greedy(m.graph, m.reward, m.fleet, m.makespan, 1);
  const FlowSolution o = solve_offline(m.graph, m.reward, m.fleet, m.makespan, {});
  CHECK(g.objective == doctest::Approx(o.objective).epsilon(1e-6));
  CHECK(g.objective == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("myopic choice at the fork costs more than 30 percent") {
  const Mission m = t::myopia_mission();
  const FlowSolution g = solve_greedy(m.graph, m.reward, m.fleet, m.makespan, 1);
  const FlowSolution o = solve_offline(m.graph, m.reward, m.fleet, m.makespan, {});
  CHECK(g.flow.at({0, 1}) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(g.objective < 0.7 * o.objective);
  CHECK(o.objective == doctest::Approx(5.2).epsilon(1e-6));
}

TEST_CASE("nothing left after pruning") {
  const Mission m = t::chain_mission();
  const FlowSolution g = solve_greedy(m.graph, m.reward, m.fleet, 0.0, 3);
  CHECK(g.objective == 0.0);
  CHECK(g.flow.empty());
}

TEST_CASE("greedy is deterministic per seed and conserves flow") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Mission m = t::random_small_mission(seed + 500, 10, 5);
    const FlowSolution a = solve_greedy(m.graph, m.reward, m.fleet, m.makespan, seed);
    const FlowSolution b = solve_greedy(m.graph, m.reward, m.fleet, m.makespan, seed);
    CHECK(a.flow == b.flow);
    const PruneResult p = prune_graph(m.graph, m.reward, m.makespan);
    CHECK(flow_violations(p.graph, a.flow).empty());
    std::map<NodeId, double> in, out;
    for (const auto& [e, f] : a.flow) {
      in[e.head] += f;
      out[e.tail] += f;
    }
    for (NodeId v : p.graph.node_ids()) {
      if (p.graph.successors(v).empty()) continue;
      const double have = v == kSourceId ? p.graph.node(v).supply : in[v];
      CHECK(out[v] == doctest::Approx(have).epsilon(1e-9));
    }
  }
}
