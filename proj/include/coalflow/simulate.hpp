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
#include "coalflow/online_solver.hpp"
#include "coalflow/testbed.hpp"

namespace coalflow {

enum class SolverKind { kOffline, kGreedy, kOnline, kClairvoyantOffline,
                        kClairvoyantOnline };

std::string solver_name(SolverKind k);
SolverKind parse_solver(const std::string& s);  // throws InputError

struct ExecutedTask {
  NodeId task = 0;
  double start = 0.0;
  double finish = 0.0;
  std::vector<int> robots;
};

struct TaskOutcome {
  double predicted = 0.0;
  double observed = 0.0;
  int coalition_size = 0;
  bool executed = false;
  bool pruned = false;     // never part of any plan graph it could run in
  bool zeroed = false;     // removed by precedence during re-planning
  bool failed = false;     // drawn by the failure model
};

struct StepTrace {
  int iteration = 0;
  NodeId completed = 0;
  double time = 0.0;
  double observed = 0.0;
  double predicted = 0.0;
  std::vector<NodeId> zeroed;
  std::vector<NodeId> pruned;
  std::string origin;  // "fresh" or "projected"
  double plan_objective = 0.0;
};

struct TrialRecord {
  std::string mission_id;
  std::string solver;
  std::map<NodeId, TaskOutcome> tasks;
  std::vector<ExecutedTask> executed;  // in completion order
  std::vector<StepTrace> trace;
  double total_reward = 0.0;
  double solve_time_s = 0.0;
  double makespan = 0.0;
  std::string error_model;
  std::vector<NodeId> failed;
  double planned_objective = 0.0;  // objective of the first plan
};

struct SimulationOptions {
  SolverConfig solver;
  std::string mission_id;
  // Closed loop only: called after the initial plan (with nullptr) and after
  // every step. Handy for checking per-step invariants.
  std::function<void(const OnlineState&, const StepResult*)> on_replan;
};

// Reward of task j in `rm` when it ran with `coalition` robots, given the
// rewards already realized upstream (missing or unexecuted upstream is 0).
double observe_reward(const TaskGraph& original, const RewardModel& rm,
                      NodeId j, int coalition, int fleet_size,
                      const std::map<NodeId, double>& upstream);

TrialRecord simulate_mission(const Mission& mission, SolverKind solver,
                             const ErrorModel& em,
                             const SimulationOptions& opts);

// TrialRecord as one JSON object (one JSONL line when dumped).
std::string trial_to_jsonl(const TrialRecord& r);

}  // namespace coalflow
