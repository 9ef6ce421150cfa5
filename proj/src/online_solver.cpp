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


#include "coalflow/online_solver.hpp"

#include <algorithm>
#include <memory>

#include "coalflow/errors.hpp"
#include "coalflow/graph_ops.hpp"

namespace coalflow {

double OnlineState::travel_time(NodeId from, NodeId to) const {
  if (from == to) return 0.0;
  auto it = travel.find({from, to});
  return it == travel.end() ? 0.0 : it->second;
}

DispatchState OnlineState::dispatch() const {
  DispatchState d;
  d.now = now;
  d.robots = free_robots;
  for (const auto& [task, ip] : in_progress) {
    for (int r : ip.robots) d.robots.push_back({r, ip.source, ip.finish, task});
  }
  auto table = std::make_shared<const std::map<std::pair<NodeId, NodeId>,
                                               double>>(travel);
  d.travel = [table](NodeId from, NodeId to) {
    if (from == to) return 0.0;
    auto it = table->find({from, to});
    return it == table->end() ? 0.0 : it->second;
  };
  return d;
}

std::vector<std::string> OnlineState::invariant_violations() const {
  std::vector<std::string> v;
  int robots = static_cast<int>(free_robots.size());
  for (NodeId id : graph.node_ids()) {
    const TaskNode& n = graph.node(id);
    switch (n.kind) {
      case NodeKind::kSource:
        if (id != kSourceId) v.push_back("extra free-agent source");
        break;
      case NodeKind::kInProgressSource: {
        const auto& succ = graph.successors(id);
        if (succ.size() != 1) {
          v.push_back("artificial source with " +
                      std::to_string(succ.size()) + " successors");
        } else if (!in_progress.contains(*succ.begin())) {
          v.push_back("artificial source feeds a task that is not running");
        }
        break;
      }
      case NodeKind::kTask:
        if (completed.contains(id) || zeroed.contains(id)) {
          v.push_back("finished task still in graph");
        }
        break;
    }
  }
  double supply = graph.node(kSourceId).supply;
  for (const auto& [task, ip] : in_progress) {
    robots += ip.coalition_size;
    if (ip.source >= 0) {
      if (!graph.has_node(ip.source)) {
        v.push_back("running task lost its artificial source");
      } else {
        supply += graph.node(ip.source).supply;
      }
    }
  }
  if (robots != fleet.size) v.push_back("robot count mismatch");
  if (supply > 1.0 + kFlowEps) v.push_back("total supply exceeds the fleet");
  return v;
}

namespace {

double remaining_budget(const OnlineState& s) {
  return std::max(s.makespan - s.now, 0.0);
}

void replan(OnlineState& s, StepResult* result) {
  const double budget = remaining_budget(s);
  PruneResult pr = prune_graph(s.graph, s.reward, budget);
  if (result != nullptr) result->pruned = pr.removed;
  std::vector<std::map<Edge, double>> warm;
  if (!s.history.empty()) {
    warm.push_back(project_solution(s.history.back(), pr.graph));
  }
  SolverConfig cfg = s.solver;
  cfg.seed = s.solver.seed + 1000003ULL * static_cast<std::uint64_t>(s.iteration);
  FlowSolution fresh =
      solve_offline(pr.graph, pr.reward, s.fleet, budget, cfg, warm);
  SolutionOrigin origin = SolutionOrigin::kFresh;
  FlowSolution chosen =
      check_and_update(fresh, pr.graph, pr.reward, s.history, &origin);
  if (result != nullptr) {
    result->fresh_objective = fresh.objective;
    result->origin = origin;
    result->solution = chosen;
  }
  s.allocation = round_flows(pr.graph, chosen, s.fleet);
  s.plan = chosen;
  s.plan_graph = pr.graph;
  s.history.push_back({std::move(chosen), std::move(pr.graph)});
}

bool is_pending(const OnlineState& s, NodeId id) {
  return s.graph.has_node(id) && s.graph.node(id).kind == NodeKind::kTask &&
         !s.in_progress.contains(id);
}

}  // namespace

OnlineState init_online(const Mission& planner, const SolverConfig& cfg) {
  OnlineState s;
  s.makespan = planner.makespan;
  s.fleet = planner.fleet;
  s.solver = cfg;
  s.graph = planner.graph;
  s.reward = planner.reward;
  s.travel = planner.graph.travel_times();
  const std::vector<NodeId> ids = planner.graph.node_ids();
  s.source_offset = ids.empty() ? 0 : ids.back();
  for (int r = 0; r < planner.fleet.size; ++r) {
    s.free_robots.push_back({r, kSourceId, 0.0, kSourceId});
  }
  replan(s, nullptr);
  return s;
}

void commit_task(OnlineState& s, NodeId task, std::vector<int> robots,
                 double start) {
  if (!s.graph.has_node(task)) {
    throw InputError("unknown task " + std::to_string(task));
  }
  if (!is_pending(s, task)) {
    throw StateError("task " + std::to_string(task) + " is not pending");
  }
  if (robots.empty()) throw StateError("a task needs at least one robot");
  std::sort(robots.begin(), robots.end());
  for (int r : robots) {
    auto it = std::find_if(s.free_robots.begin(), s.free_robots.end(),
                           [r](const RobotState& x) { return x.id == r; });
    if (it == s.free_robots.end()) {
      throw StateError("robot " + std::to_string(r) + " is not free");
    }
    s.free_robots.erase(it);
  }
  InProgressTask ip;
  ip.coalition_size = static_cast<int>(robots.size());
  ip.start = start;
  ip.finish = start + s.graph.node(task).duration;
  ip.robots = std::move(robots);
  s.in_progress[task] = std::move(ip);
}

StepResult step(OnlineState& s, NodeId c, double observed_reward, double now) {
  if (!s.graph.has_node(c)) {
    throw InputError("unknown task " + std::to_string(c));
  }
  auto ipit = s.in_progress.find(c);
  if (ipit == s.in_progress.end()) {
    throw StateError("task " + std::to_string(c) + " is not in progress");
  }
  StepResult result;
  s.now = now;
  ++s.iteration;

  // Free the coalition at the completed task's site.
  const InProgressTask done = ipit->second;
  s.in_progress.erase(ipit);
  s.completed[c] = observed_reward;
  for (int r : done.robots) s.free_robots.push_back({r, kSourceId, now, c});
  std::sort(s.free_robots.begin(), s.free_robots.end(),
            [](const RobotState& a, const RobotState& b) { return a.id < b.id; });

  TaskGraph& g = s.graph;
  const std::set<NodeId> former_out = g.successors(c);

  // Pending direct predecessors of the completed task and of every running
  // task can no longer precede them; they finish with reward 0.
  std::vector<std::pair<NodeId, double>> finalized{{c, observed_reward}};
  std::set<NodeId> doomed;
  auto doom_preds = [&](NodeId t) {
    for (NodeId p : g.predecessors(t)) {
      if (is_pending(s, p)) doomed.insert(p);
    }
  };
  doom_preds(c);
  for (const auto& [t, ip] : s.in_progress) doom_preds(t);
  for (NodeId p : doomed) {
    s.zeroed.insert(p);
    result.zeroed.push_back(p);
    finalized.push_back({p, 0.0});
  }

  // Freeze each finalized reward into its remaining successors.
  std::set<NodeId> gone(doomed);
  gone.insert(c);
  for (const auto& [x, rx] : finalized) {
    for (NodeId j : g.successors(x)) {
      if (gone.contains(j)) continue;
      auto inf = s.reward.influence.find({x, j});
      if (inf == s.reward.influence.end()) continue;
      s.reward.nodes.at(j).ghost_influence.push_back(
          eval_scalar(inf->second, rx));
    }
  }
  for (const auto& [x, rx] : finalized) {
    std::erase_if(s.reward.influence, [x](const auto& kv) {
      return kv.first.tail == x || kv.first.head == x;
    });
    s.reward.nodes.erase(x);
    g.remove_node(x);
  }
  if (done.source >= 0) g.remove_node(done.source);

  // Anchor newly running tasks to their own artificial source.
  for (auto& [t, ip] : s.in_progress) {
    if (ip.source >= 0) continue;
    for (NodeId p : std::set<NodeId>(g.predecessors(t))) {
      const Edge e{p, t};
      auto inf = s.reward.influence.find(e);
      if (inf != s.reward.influence.end()) {
        // Only a still-running predecessor can remain here; its reward is
        // frozen when it completes.
        s.deferred[p].push_back({t, inf->second});
        s.reward.influence.erase(inf);
      }
      g.remove_edge(e);
    }
    ip.source = s.source_offset + t;
    g.add_node(TaskNode{ip.source, 0.0, "running " + std::to_string(t),
                        NodeKind::kInProgressSource,
                        static_cast<double>(ip.coalition_size) / s.fleet.size});
    g.add_edge({ip.source, t});
    g.set_travel_time(ip.source, t, 0.0);
  }
  auto def = s.deferred.find(c);
  if (def != s.deferred.end()) {
    for (const auto& [j, f] : def->second) {
      if (s.reward.nodes.contains(j)) {
        s.reward.nodes.at(j).ghost_influence.push_back(
            eval_scalar(f, observed_reward));
      }
    }
    s.deferred.erase(def);
  }
  for (auto& [t, ip] : s.in_progress) {
    g.mutable_node(t).duration = std::max(ip.finish - now, 0.0);
  }

  // Rebuild the free-agent source.
  for (NodeId j : std::set<NodeId>(g.successors(kSourceId))) {
    if (!is_pending(s, j)) g.remove_edge({kSourceId, j});
  }
  for (NodeId j : g.task_ids()) {
    if (!is_pending(s, j)) continue;
    if (g.predecessors(j).empty() || former_out.contains(j)) {
      if (!g.has_edge({kSourceId, j})) g.add_edge({kSourceId, j});
    }
  }
  g.mutable_node(kSourceId).supply =
      static_cast<double>(s.free_robots.size()) / s.fleet.size;
  for (NodeId j : g.successors(kSourceId)) {
    double t = 0.0;
    for (const RobotState& r : s.free_robots) {
      t = std::max(t, r.ready + s.travel_time(r.location, j) - now);
    }
    g.set_travel_time(kSourceId, j, t);
  }

  replan(s, &result);
  return result;
}

std::map<Edge, double> project_solution(const HistoryEntry& prior,
                                        const TaskGraph& current) {
  std::map<NodeId, double> prior_in;
  for (const auto& [e, f] : prior.solution.flow) prior_in[e.head] += f;
  std::map<Edge, double> cand;
  for (const auto& [e, cap] : current.edge_capacities()) {
    const TaskNode& tail = current.node(e.tail);
    double x = 0.0;
    if (tail.kind == NodeKind::kInProgressSource) {
      x = tail.supply;
    } else if (tail.kind == NodeKind::kSource) {
      auto it = prior_in.find(e.head);
      x = it == prior_in.end() ? 0.0 : it->second;
    } else {
      auto it = prior.solution.flow.find(e);
      x = it == prior.solution.flow.end() ? 0.0 : it->second;
    }
    cand[e] = std::clamp(x, 0.0, cap);
  }
  return cand;
}

FlowSolution check_and_update(const FlowSolution& current,
                              const TaskGraph& current_graph,
                              const RewardModel& current_model,
                              const std::vector<HistoryEntry>& history,
                              SolutionOrigin* origin) {
  FlowSolution best = current;
  if (origin != nullptr) *origin = SolutionOrigin::kFresh;
  if (current_graph.num_tasks() == 0) return best;
  double best_val = flow_objective(current_graph, current_model, current.flow);
  best.objective = best_val;
  for (const HistoryEntry& prior : history) {
    std::map<Edge, double> cand = project_solution(prior, current_graph);
    if (!flow_violations(current_graph, cand).empty()) continue;
    const double val = flow_objective(current_graph, current_model, cand);
    if (val > best_val + 1e-12) {
      best_val = val;
      best.flow = std::move(cand);
      best.objective = val;
      if (origin != nullptr) *origin = SolutionOrigin::kProjected;
    }
  }
  return best;
}

}  // namespace coalflow
