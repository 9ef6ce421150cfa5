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


#include "coalflow/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "coalflow/errors.hpp"

namespace coalflow {

namespace {

const std::set<std::string> kVariables{"num_tasks", "fleet_size",
                                       "makespan_fraction", "failure_prob",
                                       "perturbation"};

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& keys,
                    const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    if (!keys.contains(k)) {
      throw InputError(where + ": unknown key '" + k + "'");
    }
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out,
          const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(where + "." + key + ": " + e.what());
  }
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fmt_level(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

ExperimentSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("experiment: expected an object");
  reject_unknown(j,
                 {"name", "variable", "levels", "trials", "solvers", "seed",
                  "generator", "error", "solver_config", "record_timing"},
                 "experiment");
  ExperimentSpec s;
  read(j, "name", s.name, "experiment");
  read(j, "variable", s.variable, "experiment");
  if (!kVariables.contains(s.variable)) {
    throw InputError("experiment.variable: unknown variable '" + s.variable +
                     "'");
  }
  read(j, "levels", s.levels, "experiment");
  if (s.levels.empty()) throw InputError("experiment.levels: empty");
  read(j, "trials", s.trials, "experiment");
  if (s.trials < 1) throw InputError("experiment.trials must be >= 1");
  std::vector<std::string> solvers;
  read(j, "solvers", solvers, "experiment");
  if (solvers.empty()) throw InputError("experiment.solvers: empty");
  for (const auto& name : solvers) s.solvers.push_back(parse_solver(name));
  read(j, "seed", s.seed, "experiment");
  read(j, "record_timing", s.record_timing, "experiment");

  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    reject_unknown(g,
                   {"num_tasks", "fleet_size", "makespan_fraction",
                    "edge_density", "layers", "weight_polynomial",
                    "weight_power", "weight_sigmoid", "duration_min",
                    "duration_max", "travel_min", "travel_max", "preset"},
                   "experiment.generator");
    GeneratorConfig& c = s.generator;
    const std::string w = "experiment.generator";
    read(g, "num_tasks", c.num_tasks, w);
    read(g, "fleet_size", c.fleet_size, w);
    read(g, "makespan_fraction", c.makespan_fraction, w);
    read(g, "edge_density", c.edge_density, w);
    read(g, "layers", c.layers, w);
    read(g, "weight_polynomial", c.weight_polynomial, w);
    read(g, "weight_power", c.weight_power, w);
    read(g, "weight_sigmoid", c.weight_sigmoid, w);
    read(g, "duration_min", c.duration_min, w);
    read(g, "duration_max", c.duration_max, w);
    read(g, "travel_min", c.travel_min, w);
    read(g, "travel_max", c.travel_max, w);
    std::string preset = "random";
    read(g, "preset", preset, w);
    c.preset = parse_preset(preset);
  }
  validate_config(s.generator);

  if (j.contains("error")) {
    const auto& e = j.at("error");
    reject_unknown(e, {"kind", "level"}, "experiment.error");
    std::string kind = "none";
    read(e, "kind", kind, "experiment.error");
    if (kind == "none") {
      s.error = ErrorKind::kNone;
    } else if (kind == "task_failure") {
      s.error = ErrorKind::kTaskFailure;
    } else if (kind == "model_perturbation") {
      s.error = ErrorKind::kModelPerturbation;
    } else {
      throw InputError("experiment.error.kind: unknown kind '" + kind + "'");
    }
    read(e, "level", s.error_level, "experiment.error");
  }
  if (s.variable == "failure_prob") s.error = ErrorKind::kTaskFailure;
  if (s.variable == "perturbation") s.error = ErrorKind::kModelPerturbation;

  if (j.contains("solver_config")) {
    const auto& c = j.at("solver_config");
    reject_unknown(c, {"restarts", "max_iters", "tol"},
                   "experiment.solver_config");
    read(c, "restarts", s.solver.restarts, "experiment.solver_config");
    read(c, "max_iters", s.solver.max_iters, "experiment.solver_config");
    read(c, "tol", s.solver.tol, "experiment.solver_config");
    if (s.solver.restarts < 1 || s.solver.max_iters < 1 ||
        !(s.solver.tol > 0)) {
      throw InputError("experiment.solver_config: values must be positive");
    }
  }
  for (double lv : s.levels) {
    const bool prob = s.variable == "failure_prob" || s.variable == "perturbation";
    if (prob && !(lv >= 0.0 && lv <= 1.0)) {
      throw InputError("experiment.levels: probabilities must lie in [0,1]");
    }
    if ((s.variable == "num_tasks" || s.variable == "fleet_size") &&
        (lv < 1 || lv != std::floor(lv))) {
      throw InputError("experiment.levels: counts must be positive integers");
    }
    if (s.variable == "makespan_fraction" && !(lv > 0.0)) {
      throw InputError("experiment.levels: makespan fractions must be > 0");
    }
  }
  return s;
}

std::uint64_t trial_mission_seed(const ExperimentSpec& s, int level, int trial) {
  // Missions are shared across error levels so those sweeps are paired.
  const bool error_sweep =
      s.variable == "failure_prob" || s.variable == "perturbation";
  return mix_seed(mix_seed(s.seed, error_sweep ? 0 : level + 1), trial);
}

std::uint64_t trial_error_seed(const ExperimentSpec& s, int level, int trial) {
  return mix_seed(mix_seed(s.seed ^ 0x5bd1e995ULL, level + 1), trial);
}

Mission sweep_mission(const ExperimentSpec& s, int level, int trial) {
  GeneratorConfig cfg = s.generator;
  const double lv = s.levels.at(level);
  if (s.variable == "num_tasks") cfg.num_tasks = static_cast<int>(lv);
  if (s.variable == "fleet_size") cfg.fleet_size = static_cast<int>(lv);
  if (s.variable == "makespan_fraction") cfg.makespan_fraction = lv;
  cfg.seed = trial_mission_seed(s, level, trial);
  return generate_mission(cfg);
}

ErrorModel sweep_error(const ExperimentSpec& s, int level, int trial) {
  const bool swept =
      s.variable == "failure_prob" || s.variable == "perturbation";
  const double p = swept ? s.levels.at(level) : s.error_level;
  const std::uint64_t seed = trial_error_seed(s, level, trial);
  switch (s.error) {
    case ErrorKind::kNone:
      return NoError{};
    case ErrorKind::kTaskFailure:
      return TaskFailure{p, seed};
    case ErrorKind::kModelPerturbation:
      return ModelPerturbation{p, seed};
  }
  return NoError{};
}

SweepResult run_sweep(const ExperimentSpec& spec, int jobs) {
  const int levels = static_cast<int>(spec.levels.size());
  const int cells = levels * spec.trials;
  const int ns = static_cast<int>(spec.solvers.size());
  std::vector<SweepRecord> records(static_cast<std::size_t>(cells) * ns);

  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&]() {
    for (;;) {
      const int cell = next.fetch_add(1);
      if (cell >= cells) return;
      try {
        const int level = cell / spec.trials;
        const int trial = cell % spec.trials;
        const Mission mission = sweep_mission(spec, level, trial);
        const ErrorModel em = sweep_error(spec, level, trial);
        SimulationOptions opts;
        opts.solver = spec.solver;
        opts.solver.seed = mix_seed(trial_mission_seed(spec, level, trial), 7);
        opts.mission_id = spec.name + "/L" + std::to_string(level) + "/T" +
                          std::to_string(trial);
        for (int k = 0; k < ns; ++k) {
          TrialRecord rec = simulate_mission(mission, spec.solvers[k], em, opts);
          if (!spec.record_timing) rec.solve_time_s = 0.0;
          records[static_cast<std::size_t>(cell) * ns + k] = {level, trial,
                                                              std::move(rec)};
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(cells);
      }
    }
  };
  const int threads = std::max(1, std::min(jobs, cells));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  SweepResult res;
  res.records = std::move(records);
  int offline = -1;
  for (int k = 0; k < ns; ++k) {
    if (spec.solvers[k] == SolverKind::kOffline) offline = k;
  }
  for (int level = 0; level < levels; ++level) {
    for (int k = 0; k < ns; ++k) {
      SweepRow row;
      row.level = spec.levels[level];
      row.solver = solver_name(spec.solvers[k]);
      row.n_trials = spec.trials;
      double sum = 0.0;
      double sum_t = 0.0;
      double ratio_sum = 0.0;
      int ratio_n = 0;
      std::vector<double> values;
      for (int t = 0; t < spec.trials; ++t) {
        const std::size_t cell = static_cast<std::size_t>(level) * spec.trials + t;
        const TrialRecord& rec = res.records[cell * ns + k].record;
        values.push_back(rec.total_reward);
        sum += rec.total_reward;
        sum_t += rec.solve_time_s;
        if (offline >= 0) {
          const double base = res.records[cell * ns + offline].record.total_reward;
          if (base > 1e-9) {
            ratio_sum += rec.total_reward / base;
            ++ratio_n;
          }
        }
      }
      row.mean_reward = sum / spec.trials;
      double var = 0.0;
      for (double v : values) var += (v - row.mean_reward) * (v - row.mean_reward);
      row.std_reward = spec.trials > 1 ? std::sqrt(var / (spec.trials - 1)) : 0.0;
      row.mean_ratio_vs_offline = ratio_n > 0
                                      ? ratio_sum / ratio_n
                                      : std::numeric_limits<double>::quiet_NaN();
      row.mean_solve_time_s = sum_t / spec.trials;
      res.rows.push_back(row);
    }
  }
  return res;
}

std::string rows_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "level,solver,mean_reward,std_reward,mean_ratio_vs_offline,"
        "mean_solve_time_s,n_trials\n";
  for (const SweepRow& r : rows) {
    os << fmt_level(r.level) << ',' << r.solver << ',' << fmt(r.mean_reward)
       << ',' << fmt(r.std_reward) << ',' << fmt(r.mean_ratio_vs_offline) << ','
       << fmt(r.mean_solve_time_s) << ',' << r.n_trials << '\n';
  }
  return os.str();
}

std::vector<SweepRow> rows_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<SweepRow> rows;
  if (!std::getline(in, line) || line.rfind("level,solver", 0) != 0) {
    throw InputError("csv: missing header");
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 7) {
      throw InputError("csv line " + std::to_string(lineno) +
                       ": expected 7 fields");
    }
    try {
      SweepRow r;
      r.level = std::stod(f[0]);
      r.solver = f[1];
      r.mean_reward = std::stod(f[2]);
      r.std_reward = std::stod(f[3]);
      r.mean_ratio_vs_offline = std::stod(f[4]);
      r.mean_solve_time_s = std::stod(f[5]);
      r.n_trials = std::stoi(f[6]);
      rows.push_back(r);
    } catch (const std::exception&) {
      throw InputError("csv line " + std::to_string(lineno) + ": bad number");
    }
  }
  return rows;
}

}  // namespace coalflow
