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
#include <string>
#include <vector>

#include <json.hpp>

#include "coalflow/simulate.hpp"
#include "coalflow/testbed.hpp"

namespace coalflow {

enum class ErrorKind { kNone, kTaskFailure, kModelPerturbation };

struct ExperimentSpec {
  std::string name;
  // num_tasks | fleet_size | makespan_fraction | failure_prob | perturbation
  std::string variable = "num_tasks";
  std::vector<double> levels;
  int trials = 10;
  std::vector<SolverKind> solvers;
  GeneratorConfig generator;
  ErrorKind error = ErrorKind::kNone;
  double error_level = 0.0;  // used when the error level is not swept
  SolverConfig solver;
  std::uint64_t seed = 0;
  bool record_timing = true;  // false writes 0 so output is byte-stable
};

// Throws InputError on malformed specs (unknown keys, empty levels, ...).
ExperimentSpec spec_from_json(const nlohmann::json& j);

struct SweepRecord {
  int level_index = 0;
  int trial = 0;
  TrialRecord record;
};

struct SweepRow {
  double level = 0.0;
  std::string solver;
  double mean_reward = 0.0;
  double std_reward = 0.0;
  double mean_ratio_vs_offline = 0.0;  // NaN when no usable offline trial
  double mean_solve_time_s = 0.0;
  int n_trials = 0;
};

struct SweepResult {
  std::vector<SweepRecord> records;  // level, trial, solver order
  std::vector<SweepRow> rows;        // level, solver order
};

// Mission and error seeds for one trial; shared by every solver in it.
std::uint64_t trial_mission_seed(const ExperimentSpec& s, int level, int trial);
std::uint64_t trial_error_seed(const ExperimentSpec& s, int level, int trial);

// Mission and error model of one (level, trial) cell.
Mission sweep_mission(const ExperimentSpec& s, int level, int trial);
ErrorModel sweep_error(const ExperimentSpec& s, int level, int trial);

SweepResult run_sweep(const ExperimentSpec& spec, int jobs = 1);

std::string rows_to_csv(const std::vector<SweepRow>& rows);
std::vector<SweepRow> rows_from_csv(const std::string& text);

}  // namespace coalflow
