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

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "coalflow/flow_solver.hpp"
#include "coalflow/mission.hpp"

namespace coalflow {

struct InProgressTask {
  int coalition_size = 0;
  double start = 0.0;
  double finish = 0.0;
  std::vector<int> robots;
  NodeId source = -1;  // artificial source id, -1 until surgery creates it
};

struct HistoryEntry {
  FlowSolution solution;
  TaskGraph graph;  // pruned graph the solution lives on
};

enum class SolutionOrigin { kFresh, kProjected };

// Everything the closed loop needs between completions. The working graph is
// kept unpruned because pruned tasks can become reachable again once robots
// sit closer to them.
struct OnlineState {
  int iteration = 0;
  double now = 0.0;
  double makespan = 0.0;
  Fleet fleet;
  SolverConfig solver;

  TaskGraph graph;
  RewardModel reward;
  std::map<std::pair<NodeId, NodeId>, double> travel;  // original entries
  NodeId source_offset = 0;

  std::map<NodeId, double> completed;  // observed rewards
  std::set<NodeId> zeroed;             // removed by precedence, reward 0
  std::map<NodeId, InProgressTask> in_progress;
  std::vector<RobotState> free_robots;  // source is always node 0
  std::vector<HistoryEntry> history;
  // Influence of a running task on a task that started before it finished,
  // keyed by the running task and applied when it completes.
  std::map<NodeId, std::vector<std::pair<NodeId, ScalarFunction>>> deferred;

  // Current plan.
  TaskGraph plan_graph;
  FlowSolution plan;
  IntegerAllocation allocation;

  double travel_time(NodeId from, NodeId to) const;
  DispatchState dispatch() const;
  // Partition check: node 0, artificial sources and internal tasks.
  std::vector<std::string> invariant_violations() const;
};

// Plans the mission from scratch (iteration 0) with every robot at node 0.
OnlineState init_online(const Mission& planner, const SolverConfig& cfg);

// Marks a planned task as executing with the given robots. The graph surgery
// happens in the next step().
void commit_task(OnlineState& state, NodeId task, std::vector<int> robots,
                 double start);

struct StepResult {
  FlowSolution solution;
  SolutionOrigin origin = SolutionOrigin::kFresh;
  std::vector<NodeId> zeroed;  // pending predecessors removed this step
  std::vector<NodeId> pruned;
  double fresh_objective = 0.0;
};

// Re-plans after `completed_task` finished at `now` with the observed reward.
StepResult step(OnlineState& state, NodeId completed_task,
                double observed_reward, double now);

// Candidate built from a prior solution on the current edge set: in-progress
// source edges carry their fixed supply, (0,q) carries q's prior inflow and
// every other edge its prior flow (0 if absent). Capacities are clamped.
std::map<Edge, double> project_solution(const HistoryEntry& prior,
                                        const TaskGraph& current);

// Returns the best of the current solution and every feasible projection.
// `origin` receives which one won; ties keep the current solution.
FlowSolution check_and_update(const FlowSolution& current,
                              const TaskGraph& current_graph,
                              const RewardModel& current_model,
                              const std::vector<HistoryEntry>& history,
                              SolutionOrigin* origin = nullptr);

}  // namespace coalflow
