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

#include <algorithm>

#include "coalflow/errors.hpp"
#include "coalflow/graph_ops.hpp"
#include "support/test_support.hpp"

using namespace coalflow;
using coalflow::testing::chain_mission;
using coalflow::testing::diamond_graph;

TEST_CASE("topological orders") {
  const Mission m = chain_mission();
  CHECK(topo_order(m.graph) == std::vector<NodeId>{0, 1, 2});
  CHECK(topo_order(diamond_graph()) == std::vector<NodeId>{0, 1, 2, 3});
}

TEST_CASE("ties go to the smallest ready id") {
  TaskGraph g;
  g.add_task(5, 1.0);
  g.add_task(3, 1.0);
  g.add_task(4, 1.0);
  g.add_edge({0, 5});
  g.add_edge({0, 4});
  g.add_edge({5, 3});
  CHECK(topo_order(g) == std::vector<NodeId>{0, 4, 5, 3});
}

TEST_CASE("cycles are rejected") {
  TaskGraph g;
  g.add_task(1, 1.0);
  g.add_task(2, 1.0);
  g.add_edge({0, 1});
  g.add_edge({1, 2});
  g.add_edge({2, 1});
  CHECK_THROWS_AS(topo_order(g), InputError);
}

TEST_CASE("makespan labels are longest paths") {
  const Mission m = chain_mission();
  const auto w = label_makespan(m.graph).worst_finish;
  CHECK(w.at(0) == 0.0);
  CHECK(w.at(1) == doctest::Approx(5.0));
  CHECK(w.at(2) == doctest::Approx(12.0));

  TaskGraph single;
  single.add_task(1, 7.0);
  single.add_edge({0, 1});
  CHECK(label_makespan(single).worst_finish.at(1) == doctest::Approx(7.0));

  CHECK(label_makespan(diamond_graph(5.0, 9.0, 1.0)).worst_finish.at(3) ==
        doctest::Approx(10.0));
}

TEST_CASE("pruning the chain at makespan 10 removes the second task") {
  const Mission m = chain_mission();
  const PruneResult p = prune_graph(m.graph, m.reward, 10.0);
  CHECK(p.graph.node_ids() == std::vector<NodeId>{0, 1});
  CHECK(p.removed == std::vector<NodeId>{2});
  CHECK_FALSE(p.reward.nodes.contains(2));
  CHECK_FALSE(p.reward.influence.contains({1, 2}));
}

TEST_CASE("generous and zero makespans") {
  const Mission m = chain_mission();
  CHECK(prune_graph(m.graph, m.reward, 5.0 + 5.0 + 2.0).removed.empty());
  const PruneResult p = prune_graph(m.graph, m.reward, 0.0);
  CHECK(p.graph.task_ids().empty());
  CHECK(p.removed == std::vector<NodeId>{1, 2});
}

TEST_CASE("removal cascades to descendants") {
  // 3 can be reached cheaply through 2, but its worst path runs through 1.
  TaskGraph g;
  g.add_task(1, 20.0);
  g.add_task(2, 1.0);
  g.add_task(3, 1.0);
  g.add_edge({0, 1});
  g.add_edge({0, 2});
  g.add_edge({1, 3});
  g.add_edge({2, 3});
  RewardModel rm;
  for (NodeId j : {1, 2, 3}) rm.nodes[j] = NodeReward{};
  rm.influence[{1, 3}] = Linear{};
  rm.influence[{2, 3}] = Linear{};
  const PruneResult p = prune_graph(g, rm, 10.0);
  CHECK(p.removed == std::vector<NodeId>{1, 3});
  CHECK(validate_graph(p.graph).empty());
}

TEST_CASE("travel counts toward the label") {
  TaskGraph h;
  h.add_task(1, 1.0);
  h.add_task(2, 1.0);
  h.add_edge({0, 1});
  h.add_edge({1, 2});
  h.set_travel_time(0, 1, 50.0);
  RewardModel rh;
  rh.nodes[1] = NodeReward{};
  rh.nodes[2] = NodeReward{};
  rh.influence[{1, 2}] = Linear{};
  CHECK(prune_graph(h, rh, 10.0).removed == std::vector<NodeId>{1, 2});
  CHECK(prune_graph(h, rh, 52.0).removed.empty());
}

TEST_CASE("tasks fed by an in-progress source survive pruning") {
  TaskGraph g;
  g.add_node({7, 0.0, "", NodeKind::kInProgressSource, 0.5});
  g.add_task(1, 30.0);
  g.add_edge({7, 1});
  RewardModel rm;
  rm.nodes[1] = NodeReward{};
  const PruneResult p = prune_graph(g, rm, 5.0);
  CHECK(p.graph.has_node(1));
  CHECK(p.removed.empty());
}

TEST_CASE("restrict_model drops foreign entries") {
  const Mission m = chain_mission();
  TaskGraph g = m.graph;
  g.remove_node(2);
  const RewardModel r = restrict_model(m.reward, g);
  CHECK(r.nodes.size() == 1);
  CHECK(r.influence.empty());
}
