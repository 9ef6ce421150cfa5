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


#include "coalflow/graph_ops.hpp"

#include <algorithm>
#include <queue>

#include "coalflow/errors.hpp"

namespace coalflow {

std::vector<NodeId> topo_order(const TaskGraph& g) {
  std::map<NodeId, std::size_t> indeg;
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId id : g.node_ids()) {
    indeg[id] = g.predecessors(id).size();
    if (indeg[id] == 0) ready.push(id);
  }
  std::vector<NodeId> order;
  order.reserve(g.num_nodes());
  while (!ready.empty()) {
    NodeId v = ready.top();
    ready.pop();
    order.push_back(v);
    for (NodeId s : g.successors(v)) {
      if (--indeg[s] == 0) ready.push(s);
    }
  }
  if (order.size() != g.num_nodes()) {
    throw InputError("task graph contains a directed cycle");
  }
  return order;
}

MakespanLabels label_makespan(const TaskGraph& g) {
  MakespanLabels labels;
  for (NodeId v : topo_order(g)) {
    const TaskNode& n = g.node(v);
    if (g.is_source(v)) {
      labels.worst_finish[v] = 0.0;
      continue;
    }
    double start = 0.0;
    for (NodeId p : g.predecessors(v)) {
      start = std::max(start, labels.worst_finish[p] + g.travel_time(p, v));
    }
    labels.worst_finish[v] = start + n.duration;
  }
  return labels;
}

RewardModel restrict_model(const RewardModel& rm, const TaskGraph& g) {
  RewardModel out;
  for (const auto& [id, nr] : rm.nodes) {
    if (g.has_node(id) && !g.is_source(id)) out.nodes.emplace(id, nr);
  }
  for (const auto& [e, f] : rm.influence) {
    if (g.has_edge(e)) out.influence.emplace(e, f);
  }
  return out;
}

namespace {

// A task is pinned when a coalition is already executing it.
bool pinned(const TaskGraph& g, NodeId id) {
  for (NodeId p : g.predecessors(id)) {
    if (g.node(p).kind == NodeKind::kInProgressSource) return true;
  }
  return false;
}

}  // namespace

PruneResult prune_graph(const TaskGraph& g, const RewardModel& rm,
                        double makespan) {
  PruneResult res{g, {}, {}};
  TaskGraph& work = res.graph;
  for (;;) {
    const MakespanLabels labels = label_makespan(work);
    std::vector<NodeId> drop;
    for (NodeId id : work.task_ids()) {
      if (labels.worst_finish.at(id) > makespan + kMakespanSlack &&
          !pinned(work, id)) {
        drop.push_back(id);
      }
    }
    if (drop.empty()) break;
    for (NodeId id : drop) {
      work.remove_node(id);
      res.removed.push_back(id);
    }
    for (NodeId id : work.task_ids()) {
      if (work.predecessors(id).empty()) {
        work.add_edge({kSourceId, id});
      }
    }
  }
  std::sort(res.removed.begin(), res.removed.end());
  res.reward = restrict_model(rm, work);
  return res;
}

}  // namespace coalflow
