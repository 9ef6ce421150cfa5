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


#pragma once

#include <map>
#include <vector>

#include "coalflow/mission.hpp"

namespace coalflow {

// Kahn's algorithm; among ready nodes the smallest id goes first.
// Throws InputError if the graph has a cycle.
std::vector<NodeId> topo_order(const TaskGraph& g);

struct MakespanLabels {
  // Longest-path finish time into each node, durations and travel included.
  std::map<NodeId, double> worst_finish;
};

MakespanLabels label_makespan(const TaskGraph& g);

struct PruneResult {
  TaskGraph graph;
  RewardModel reward;
  std::vector<NodeId> removed;  // ascending
};

// Slack used when comparing labels against the makespan.
inline constexpr double kMakespanSlack = 1e-9;

// Removes every task whose worst-case finish exceeds the makespan, repeating
// until nothing changes. Tasks fed by an in-progress source are executing and
// are never removed. Parentless survivors are re-attached to node 0.
PruneResult prune_graph(const TaskGraph& g, const RewardModel& rm,
                        double makespan);

// Drops reward entries for nodes and edges that are not in g.
RewardModel restrict_model(const RewardModel& rm, const TaskGraph& g);

}  // namespace coalflow
