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

#include "coalflow/flow_solver.hpp"

namespace coalflow {

inline constexpr int kFlowOracleMaxTasks = 8;
inline constexpr int kFlowOracleMaxRobots = 5;
inline constexpr int kScheduleOracleMaxTasks = 4;
inline constexpr int kScheduleOracleMaxRobots = 3;

struct OracleResult {
  double best_objective = 0.0;
  // Integer-flow oracle: robots per edge. Schedule oracle: coalition sizes
  // only, the witness itself is in best_schedule.
  IntegerAllocation best_allocation;
  Schedule best_schedule;
  std::int64_t nodes_explored = 0;
  bool exhaustive = false;
};

// Every integer edge flow on the pruned graph that respects supplies,
// conservation and capacities. Throws GuardError above the size limits.
OracleResult enumerate_integer_flows(const TaskGraph& g, const RewardModel& rm,
                                     const Fleet& fleet, double makespan);

// Every assignment of robots to ordered task subsets on the pruned graph,
// timed with earliest starts and checked against precedence and the
// makespan. Robots may move between any two tasks. Throws GuardError above
// the size limits.
OracleResult enumerate_schedules(const TaskGraph& g, const RewardModel& rm,
                                 const Fleet& fleet, double makespan);

}  // namespace coalflow
