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

struct GreedyConfig {
  int samples = 50;
  int steps = 100;
  double step_size = 0.01;
  double gradient_step = 1e-5;
};

// One-step lookahead baseline. Each node, in topological order, hands all of
// its inflow to its out-edges so as to maximize the immediate reward of its
// out-neighbours given the flows decided so far. Leaves drop their flow.
FlowSolution solve_greedy(const TaskGraph& g, const RewardModel& rm,
                          const Fleet& fleet, double makespan,
                          std::uint64_t seed, const GreedyConfig& cfg = {});

}  // namespace coalflow
