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

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "coalflow/mission.hpp"

namespace coalflow {

// Feasibility tolerance for flow constraints.
inline constexpr double kFlowEps = 1e-6;

enum class SolverStatus { kConverged, kIterationLimit, kInfeasibleInput };

std::string status_name(SolverStatus s);

struct FlowSolution {
  std::map<Edge, double> flow;  // population fraction per edge
  double objective = 0.0;       // predicted total reward
  SolverStatus status = SolverStatus::kConverged;
};

struct SolverConfig {
  int restarts = 10;
  int max_iters = 300;
  double tol = 1e-7;
  std::uint64_t seed = 0;
  double gradient_step = 1e-5;  // central-difference half width
};

// Sum of incoming flow per task (the coalition fraction).
std::map<NodeId, double> coalition_fractions(
    const TaskGraph& g, const std::map<Edge, double>& flow);

// Predicted total reward of a flow on g. Edges missing from the map carry 0.
double flow_objective(const TaskGraph& g, const RewardModel& rm,
                      const std::map<Edge, double>& flow);

// Human-readable constraint violations; empty when the flow is feasible.
// Node 0 may emit at most its supply, an in-progress source exactly its
// supply, and every task at most what it receives.
std::vector<std::string> flow_violations(const TaskGraph& g,
                                         const std::map<Edge, double>& flow,
                                         double eps = kFlowEps);

// Maximizes predicted reward over feasible flows on the pruned graph.
// warm_starts are extra starting points (flows on g, projected first).
FlowSolution solve_offline(const TaskGraph& g, const RewardModel& rm,
                           const Fleet& fleet, double makespan,
                           const SolverConfig& cfg,
                           const std::vector<std::map<Edge, double>>&
                               warm_starts = {});

struct IntegerAllocation {
  std::map<Edge, int> robots_on_edge;
  std::map<NodeId, int> coalition_size;  // tasks only
  friend bool operator==(const IntegerAllocation&,
                         const IntegerAllocation&) = default;
};

// Robots available at a source node: round(supply * N).
int source_robots(const TaskGraph& g, NodeId source, const Fleet& fleet);

// Rounding cost minimized by round_flows: the edge error
// sum |x_e - N f_e| plus, for every source and every task with outgoing
// edges, |leftover - N * unused fraction|. Robots that end at a leaf are free.
double rounding_cost(const TaskGraph& g, const std::map<Edge, double>& flow,
                     const IntegerAllocation& alloc, const Fleet& fleet);

// Sum of |x_e - N f_e| over edges of g.
double rounding_edge_error(const TaskGraph& g,
                           const std::map<Edge, double>& flow,
                           const IntegerAllocation& alloc, const Fleet& fleet);

// Integer violations of the allocation (conservation, capacity, supply).
std::vector<std::string> allocation_violations(const TaskGraph& g,
                                               const IntegerAllocation& alloc,
                                               const Fleet& fleet);

// Globally minimum-cost integer allocation (see rounding_cost); ties go to
// using more robots and then to lower head ids.
IntegerAllocation round_flows(const TaskGraph& g, const FlowSolution& f,
                              const Fleet& fleet);

struct RobotState {
  int id = 0;
  NodeId source = kSourceId;  // node 0 or an in-progress source
  double ready = 0.0;         // when the robot is free at `location`
  NodeId location = kSourceId;
};

// Robot positions for a schedule that starts mid-mission.
struct DispatchState {
  double now = 0.0;
  std::vector<RobotState> robots;
  // Travel time between original node ids.
  std::function<double(NodeId, NodeId)> travel;
};

struct Schedule {
  std::vector<std::vector<NodeId>> robot_tasks;  // indexed by robot id
  std::map<NodeId, double> start;
  std::map<NodeId, double> finish;
};

// Peels the integer flow into robot paths and times them. Without a dispatch
// state, all N robots leave node 0 at time 0.
Schedule extract_schedule(const TaskGraph& g, const IntegerAllocation& alloc,
                          const Fleet& fleet,
                          const DispatchState* dispatch = nullptr);

}  // namespace coalflow
