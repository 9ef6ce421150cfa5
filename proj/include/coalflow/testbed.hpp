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
#include <random>
#include <set>
#include <string>
#include <variant>

#include "coalflow/mission.hpp"

namespace coalflow {

// Reward presets. kRandom samples the generic catalog; the others give every
// task the coalition form of one robot activity with influence r / |N_in|.
enum class Preset { kRandom, kCoverage, kExploration, kTransport, kCarry, kMixed };

std::string preset_name(Preset p);
Preset parse_preset(const std::string& s);  // throws InputError

struct GeneratorConfig {
  int num_tasks = 10;
  int fleet_size = 4;
  double makespan_fraction = 0.6;  // tau = fraction * sum of durations
  double edge_density = 0.4;       // chance of an edge between adjacent layers
  int layers = 0;                  // 0 picks ceil(sqrt(num_tasks))
  double weight_polynomial = 1.0;
  double weight_power = 1.0;
  double weight_sigmoid = 1.0;
  double duration_min = 1.0;
  double duration_max = 10.0;
  double travel_min = 0.0;  // travel time between coincident sites
  double travel_max = 2.0;  // travel time across the unit square diagonal
  Preset preset = Preset::kRandom;
  std::uint64_t seed = 0;
};

// Throws InputError when a field is out of range.
void validate_config(const GeneratorConfig& cfg);

Mission generate_mission(const GeneratorConfig& cfg);

struct NoError {};
struct TaskFailure {
  double p_f = 0.0;
  std::uint64_t seed = 0;
};
struct ModelPerturbation {
  double p_m = 0.0;
  std::uint64_t seed = 0;
};
using ErrorModel = std::variant<NoError, TaskFailure, ModelPerturbation>;

struct ErrorRealization {
  RewardModel ground_truth;
  RewardModel planner;
  std::set<NodeId> failed;
};

ErrorRealization apply_error(const RewardModel& rm, const ErrorModel& em);

// Draws one perturbed parameter set, redrawing up to 100 times when a sign
// constraint of the function form is violated and clamping afterwards.
ScalarFunction perturb_function(const ScalarFunction& f, double p_m,
                                std::mt19937_64& rng);

// splitmix64 step, used to derive independent per-trial streams.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace coalflow
