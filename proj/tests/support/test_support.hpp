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

// Fixtures and independent reference implementations shared by the tests.
// Nothing here calls into the code it is used to check, apart from the data
// types themselves.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "coalflow/flow_solver.hpp"
#include "coalflow/mission.hpp"
#include "coalflow/simulate.hpp"

namespace coalflow::testing {

// 0 -> 1 -> 2, d = [5, 5], travel 0->1 = 0 and 1->2 = 2, rho(x) = x on both
// tasks, delta_12(r) = 2r, Sum aggregation, Product combination. N = 3.
Mission chain_mission(double makespan = 100.0);

// 0 -> 1, 0 -> 2, 1 -> 3, 2 -> 3 with the given durations and zero travel.
TaskGraph diamond_graph(double d1 = 5.0, double d2 = 9.0, double d3 = 1.0);

// 0 -> 1, 0 -> 2 with rho1 = x and rho2 = x^2.
Mission fork_mission();

// A fork where branch A pays more right away but branch B leads to a much
// larger reward one step later.
Mission myopia_mission();

// Three independent tasks for three robots: two of them need a pair of
// robots, the third is a long single-robot task. One robot pair can do both
// pair tasks back to back, which no flow can express.
Mission domain_gap_mission();

// The six-robot branch-crossing scene: a five-robot coalition finishes task 1
// while one robot still works on task 2.
Mission six_robot_mission();

// Random generated mission with 1..max_tasks tasks and 1..max_robots robots.
Mission random_small_mission(std::uint64_t seed, int max_tasks, int max_robots);

// Straight recursive evaluation of the reward equation, with its own copy of
// the function catalog formulas.
double ref_scalar(const ScalarFunction& f, double x);
std::map<NodeId, double> ref_rewards(const TaskGraph& g, const RewardModel& rm,
                                     const std::map<NodeId, double>& fraction);
double ref_total(const TaskGraph& g, const RewardModel& rm,
                 const std::map<NodeId, double>& fraction);

// Depth-first topological order (any valid order, independent of topo_order).
std::vector<NodeId> ref_topo(const TaskGraph& g);

// Exhaustive minimum of the rounding cost over every feasible integer
// allocation.
struct BruteRounding {
  double cost = 0.0;
  IntegerAllocation best;
  long long feasible = 0;
};
double ref_rounding_cost(const TaskGraph& g, const std::map<Edge, double>& flow,
                         const IntegerAllocation& alloc, const Fleet& fleet);
BruteRounding brute_force_rounding(const TaskGraph& g,
                                   const std::map<Edge, double>& flow,
                                   const Fleet& fleet);

// Exhaustive best integer-flow objective: every allocation as above, scored
// with ref_total.
double brute_force_flow_optimum(const TaskGraph& g, const RewardModel& rm,
                                const Fleet& fleet);

// Independent check of a static schedule (all robots at node 0 at time 0)
// against the legality rules: finish within the makespan, one task at a time
// per robot with travel in between, precedence among scheduled tasks, at most
// N robots, start after every robot arrived, full durations.
std::vector<std::string> check_schedule(const TaskGraph& g, const Schedule& s,
                                        const Fleet& fleet, double makespan);

// Same rules over an executed trace on the original mission graph.
std::vector<std::string> check_trace(const Mission& m, const TrialRecord& r);

}  // namespace coalflow::testing
