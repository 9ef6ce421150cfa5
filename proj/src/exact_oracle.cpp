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


#include "coalflow/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "coalflow/errors.hpp"
#include "coalflow/graph_ops.hpp"
#include "flow_model.hpp"

namespace coalflow {

namespace {

void guard(const TaskGraph& g, const Fleet& fleet, int max_tasks,
           int max_robots, const char* what) {
  if (static_cast<int>(g.num_tasks()) > max_tasks ||
      fleet.size > max_robots) {
    throw GuardError(std::string(what) + " is limited to " +
                     std::to_string(max_tasks) + " tasks and " +
                     std::to_string(max_robots) + " robots (got " +
                     std::to_string(g.num_tasks()) + " tasks, " +
                     std::to_string(fleet.size) + " robots)");
  }
}

}  // namespace

OracleResult enumerate_integer_flows(const TaskGraph& g, const RewardModel& rm,
                                     const Fleet& fleet, double makespan) {
  const PruneResult pr = prune_graph(g, rm, makespan);
  guard(pr.graph, fleet, kFlowOracleMaxTasks, kFlowOracleMaxRobots,
        "integer-flow enumeration");
  OracleResult res;
  res.exhaustive = true;
  if (pr.graph.num_tasks() == 0) {
    res.nodes_explored = 1;
    return res;
  }
  const detail::FlowModel model(pr.graph, pr.reward);
  const int n = fleet.size;
  std::vector<int> robots(model.num_edges(), 0);
  std::vector<int> caps(model.num_edges());
  for (std::size_t e = 0; e < caps.size(); ++e) {
    caps[e] = std::min(
        n, static_cast<int>(model.edge(e).capacity * n + 1e-9));
  }
  std::vector<int> held(model.num_nodes(), 0);
  std::vector<double> frac(model.num_edges(), 0.0);
  std::vector<int> best(model.num_edges(), 0);
  double best_val = -std::numeric_limits<double>::infinity();

  // Split `avail` robots at node i over out edges k.., then move to i+1.
  std::function<void(std::size_t)> at_node;
  std::function<void(std::size_t, int, int, bool)> split;
  at_node = [&](std::size_t i) {
    if (i == model.num_nodes()) {
      ++res.nodes_explored;
      for (std::size_t e = 0; e < frac.size(); ++e) {
        frac[e] = static_cast<double>(robots[e]) / n;
      }
      const double v = model.objective(frac);
      if (v > best_val) {
        best_val = v;
        best = robots;
      }
      return;
    }
    const auto& node = model.node(i);
    int avail = held[i];
    if (TaskGraph::is_source_kind(node.kind)) {
      avail = static_cast<int>(std::lround(node.supply * n));
    }
    split(i, node.first_edge, avail,
          node.kind == NodeKind::kInProgressSource);
  };
  split = [&](std::size_t i, int e, int left, bool exact) {
    const auto& node = model.node(i);
    if (e == node.first_edge + node.out_degree) {
      if (exact && left != 0) return;
      at_node(i + 1);
      return;
    }
    const int head = model.edge(e).head;
    for (int x = 0; x <= std::min(left, caps[e]); ++x) {
      robots[e] = x;
      held[head] += x;
      split(i, e + 1, left - x, exact);
      held[head] -= x;
    }
    robots[e] = 0;
  };
  at_node(0);

  res.best_objective = std::max(best_val, 0.0);
  for (NodeId id : pr.graph.task_ids()) res.best_allocation.coalition_size[id] = 0;
  for (std::size_t e = 0; e < best.size(); ++e) {
    const Edge edge = model.edge(e).edge;
    res.best_allocation.robots_on_edge[edge] = best[e];
    if (!pr.graph.is_source(edge.head)) {
      res.best_allocation.coalition_size[edge.head] += best[e];
    }
  }
  res.best_schedule =
      extract_schedule(pr.graph, res.best_allocation, fleet);
  return res;
}

OracleResult enumerate_schedules(const TaskGraph& g, const RewardModel& rm,
                                 const Fleet& fleet, double makespan) {
  const PruneResult pr = prune_graph(g, rm, makespan);
  guard(pr.graph, fleet, kScheduleOracleMaxTasks, kScheduleOracleMaxRobots,
        "schedule enumeration");
  OracleResult res;
  res.exhaustive = true;
  const TaskGraph& pg = pr.graph;
  const std::vector<NodeId> tasks = pg.task_ids();
  const int k = static_cast<int>(tasks.size());
  const int n = fleet.size;

  // All ordered subsets of tasks, shortest first.
  std::vector<std::vector<int>> seqs{{}};
  for (std::size_t frontier = 0; frontier < seqs.size(); ++frontier) {
    if (static_cast<int>(seqs[frontier].size()) == k) continue;
    for (int t = 0; t < k; ++t) {
      const auto& s = seqs[frontier];
      if (std::find(s.begin(), s.end(), t) != s.end()) continue;
      auto next = s;
      next.push_back(t);
      seqs.push_back(std::move(next));
    }
  }

  const CompiledRewards compiled(pg, pr.reward);
  std::vector<int> flat(k);
  for (int t = 0; t < k; ++t) flat[t] = compiled.index_of(tasks[t]);
  std::vector<std::vector<int>> pred(k);
  for (int t = 0; t < k; ++t) {
    for (NodeId p : pg.predecessors(tasks[t])) {
      auto it = std::find(tasks.begin(), tasks.end(), p);
      if (it != tasks.end()) pred[t].push_back(int(it - tasks.begin()));
    }
  }

  std::vector<double> coalition(compiled.size(), 0.0);
  std::vector<double> rewards(compiled.size(), 0.0);
  std::vector<int> pick(n, 0);
  double best_val = -std::numeric_limits<double>::infinity();
  std::vector<int> best_pick;
  Schedule best_sched;

  auto evaluate = [&]() {
    ++res.nodes_explored;
    std::vector<int> count(k, 0);
    for (int r = 0; r < n; ++r) {
      for (int t : seqs[pick[r]]) ++count[t];
    }
    // Earliest-start timing; a dependency cycle means the orders deadlock.
    std::vector<double> start(k, 0.0);
    std::vector<double> finish(k, 0.0);
    std::vector<bool> done(k, false);
    int remaining = 0;
    for (int t = 0; t < k; ++t) remaining += count[t] > 0 ? 1 : 0;
    while (remaining > 0) {
      bool progress = false;
      for (int t = 0; t < k; ++t) {
        if (count[t] == 0 || done[t]) continue;
        bool ready = true;
        double s = 0.0;
        for (int p : pred[t]) {
          if (count[p] == 0) continue;
          if (!done[p]) {
            ready = false;
            break;
          }
          s = std::max(s, finish[p]);
        }
        for (int r = 0; r < n && ready; ++r) {
          const auto& seq = seqs[pick[r]];
          auto it = std::find(seq.begin(), seq.end(), t);
          if (it == seq.end()) continue;
          if (it == seq.begin()) {
            s = std::max(s, pg.travel_time(kSourceId, tasks[t]));
          } else {
            const int prev = *(it - 1);
            if (!done[prev]) {
              ready = false;
              break;
            }
            s = std::max(s, finish[prev] +
                                pg.travel_time(tasks[prev], tasks[t]));
          }
        }
        if (!ready) continue;
        start[t] = s;
        finish[t] = s + pg.node(tasks[t]).duration;
        if (finish[t] > makespan + kMakespanSlack) return;
        done[t] = true;
        --remaining;
        progress = true;
      }
      if (!progress) return;
    }
    std::fill(coalition.begin(), coalition.end(), 0.0);
    for (int t = 0; t < k; ++t) {
      coalition[flat[t]] = static_cast<double>(count[t]) / n;
    }
    const double v = compiled.evaluate(coalition, rewards);
    if (v > best_val) {
      best_val = v;
      best_pick = pick;
      best_sched = Schedule{};
      best_sched.robot_tasks.assign(n, {});
      for (int r = 0; r < n; ++r) {
        for (int t : seqs[pick[r]]) {
          best_sched.robot_tasks[r].push_back(tasks[t]);
        }
      }
      for (int t = 0; t < k; ++t) {
        if (count[t] == 0) continue;
        best_sched.start[tasks[t]] = start[t];
        best_sched.finish[tasks[t]] = finish[t];
      }
    }
  };

  // Robots are interchangeable: enumerate non-decreasing index tuples.
  std::function<void(int, int)> choose = [&](int r, int from) {
    if (r == n) {
      evaluate();
      return;
    }
    for (int s = from; s < static_cast<int>(seqs.size()); ++s) {
      pick[r] = s;
      choose(r + 1, s);
    }
  };
  choose(0, 0);

  res.best_objective = std::max(best_val, 0.0);
  res.best_schedule = best_sched;
  for (NodeId id : tasks) res.best_allocation.coalition_size[id] = 0;
  for (const auto& seq : best_sched.robot_tasks) {
    for (NodeId t : seq) ++res.best_allocation.coalition_size[t];
  }
  return res;
}

}  // namespace coalflow
