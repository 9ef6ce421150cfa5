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


// coalflow command-line front end.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "coalflow/errors.hpp"
#include "coalflow/exact_oracle.hpp"
#include "coalflow/flow_solver.hpp"
#include "coalflow/graph_ops.hpp"
#include "coalflow/greedy_solver.hpp"
#include "coalflow/mission_io.hpp"
#include "coalflow/report.hpp"
#include "coalflow/simulate.hpp"
#include "coalflow/sweep.hpp"
#include "coalflow/testbed.hpp"

#ifndef COALFLOW_VERSION
#define COALFLOW_VERSION "dev"
#endif

namespace {

using namespace coalflow;

constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitGuard = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- generate --------------------------------------------------------------

struct GenerateArgs {
  GeneratorConfig cfg;
  std::string preset = "random";
  std::string out;
};

int run_generate(GenerateArgs& a) {
  a.cfg.preset = parse_preset(a.preset);
  try {
    validate_config(a.cfg);
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  const Mission m = generate_mission(a.cfg);
  save_mission(m, a.out);
  std::printf("M=%zu |E|=%zu tau=%.6f N=%d\n", m.graph.num_tasks(),
              m.graph.num_edges(), m.makespan, m.fleet.size);
  return 0;
}

// --- solve -----------------------------------------------------------------

struct SolveArgs {
  std::string mission;
  std::string solver = "offline";
  SolverConfig cfg;
  std::string out;
};

int run_solve(SolveArgs& a) {
  const Mission m = load_mission(a.mission);
  const auto t0 = std::chrono::steady_clock::now();
  Json doc;
  double objective = 0.0;
  if (a.solver == "offline" || a.solver == "greedy") {
    const FlowSolution f =
        a.solver == "offline"
            ? solve_offline(m.graph, m.reward, m.fleet, m.makespan, a.cfg)
            : solve_greedy(m.graph, m.reward, m.fleet, m.makespan, a.cfg.seed);
    const PruneResult pr = prune_graph(m.graph, m.reward, m.makespan);
    const IntegerAllocation alloc = round_flows(pr.graph, f, m.fleet);
    const Schedule sched = extract_schedule(pr.graph, alloc, m.fleet);
    objective = f.objective;
    doc["flow"] = flow_to_json(f);
    doc["allocation"] = allocation_to_json(alloc);
    doc["schedule"] = schedule_to_json(sched);
  } else if (a.solver == "oracle-flow") {
    const OracleResult r =
        enumerate_integer_flows(m.graph, m.reward, m.fleet, m.makespan);
    objective = r.best_objective;
    doc["allocation"] = allocation_to_json(r.best_allocation);
    doc["objective"] = r.best_objective;
    doc["nodes_explored"] = r.nodes_explored;
  } else if (a.solver == "oracle-schedule") {
    const OracleResult r =
        enumerate_schedules(m.graph, m.reward, m.fleet, m.makespan);
    objective = r.best_objective;
    doc["schedule"] = schedule_to_json(r.best_schedule);
    doc["objective"] = r.best_objective;
    doc["nodes_explored"] = r.nodes_explored;
  } else {
    throw UsageError("unknown solver '" + a.solver + "'");
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  doc["solver"] = a.solver;
  if (!a.out.empty()) write_text_file(a.out, doc.dump(2) + "\n");
  std::printf("solver=%s objective=%.6f solve_time_s=%.3f\n", a.solver.c_str(),
              objective, secs);
  return 0;
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
  std::string mission;
  std::string solver = "online";
  std::string error = "none";
  double level = 0.0;
  std::uint64_t error_seed = 0;
  SolverConfig cfg;
  std::string out;
};

int run_simulate(SimulateArgs& a) {
  const Mission m = load_mission(a.mission);
  ErrorModel em = NoError{};
  if (a.error == "task_failure") {
    em = TaskFailure{a.level, a.error_seed};
  } else if (a.error == "model_perturbation") {
    em = ModelPerturbation{a.level, a.error_seed};
  } else if (a.error != "none") {
    throw UsageError("unknown error model '" + a.error + "'");
  }
  SimulationOptions opts;
  opts.solver = a.cfg;
  opts.mission_id = a.mission;
  const TrialRecord r = simulate_mission(m, parse_solver(a.solver), em, opts);
  if (!a.out.empty()) write_text_file(a.out, trial_to_jsonl(r) + "\n");
  std::printf("solver=%s total_reward=%.6f executed=%zu solve_time_s=%.3f\n",
              r.solver.c_str(), r.total_reward, r.executed.size(),
              r.solve_time_s);
  return 0;
}

// --- sweep -----------------------------------------------------------------

struct SweepArgs {
  std::string spec;
  int jobs = 1;
  std::string csv;
  std::string jsonl;
  bool no_timing = false;
};

int run_sweep_cmd(SweepArgs& a) {
  Json j;
  try {
    j = Json::parse(read_text(a.spec));
  } catch (const Json::parse_error& e) {
    throw InputError(a.spec + ": " + e.what());
  }
  ExperimentSpec spec;
  try {
    spec = spec_from_json(j);
  } catch (const InputError& e) {
    // A spec that parses but cannot be run is a usage problem.
    throw UsageError(e.what());
  }
  if (a.no_timing) spec.record_timing = false;
  const SweepResult res = run_sweep(spec, a.jobs);
  const std::string csv = rows_to_csv(res.rows);
  if (a.csv.empty()) {
    std::cout << csv;
  } else {
    write_text_file(a.csv, csv);
  }
  if (!a.jsonl.empty()) {
    std::string lines;
    for (const SweepRecord& r : res.records) {
      lines += trial_to_jsonl(r.record) + "\n";
    }
    write_text_file(a.jsonl, lines);
  }
  std::fprintf(stderr, "sweep %s: %zu rows, %zu trials\n", spec.name.c_str(),
               res.rows.size(), res.records.size());
  return 0;
}

// --- oracle ----------------------------------------------------------------

struct OracleArgs {
  std::vector<std::string> missions;
  std::string kind = "both";
  std::string out;
};

int run_oracle(OracleArgs& a) {
  if (a.kind != "flow" && a.kind != "schedule" && a.kind != "both") {
    throw UsageError("--kind must be flow, schedule or both");
  }
  std::ostringstream csv;
  csv << "mission,oracle,objective,nodes_explored,exhaustive\n";
  for (const std::string& path : a.missions) {
    const Mission m = load_mission(path);
    auto emit = [&](const char* name, const OracleResult& r) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f", r.best_objective);
      csv << path << ',' << name << ',' << buf << ',' << r.nodes_explored << ','
          << (r.exhaustive ? 1 : 0) << '\n';
    };
    if (a.kind != "schedule") {
      emit("flow", enumerate_integer_flows(m.graph, m.reward, m.fleet, m.makespan));
    }
    if (a.kind != "flow") {
      emit("schedule", enumerate_schedules(m.graph, m.reward, m.fleet, m.makespan));
    }
  }
  if (a.out.empty()) {
    std::cout << csv.str();
  } else {
    write_text_file(a.out, csv.str());
  }
  return 0;
}

// --- report ----------------------------------------------------------------

struct ReportArgs {
  std::string csv;
  std::string out;
  ChartOptions chart;
};

int run_report(ReportArgs& a) {
  const std::vector<SweepRow> rows = rows_from_csv(read_text(a.csv));
  write_text_file(a.out, render_svg(rows, a.chart));
  std::printf("wrote %s (%zu rows)\n", a.out.c_str(), rows.size());
  return 0;
}

void add_solver_flags(CLI::App* cmd, SolverConfig& cfg) {
  cmd->add_option("--restarts", cfg.restarts, "Multi-start count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", cfg.max_iters, "Iterations per start")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol", cfg.tol, "Step-size stopping tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", cfg.seed, "Solver seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coalflow: flow-based multi-robot coalition planning"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("coalflow ") + COALFLOW_VERSION);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a random mission");
  generate->add_option("--tasks", gen.cfg.num_tasks, "Number of tasks");
  generate->add_option("--agents", gen.cfg.fleet_size, "Fleet size");
  generate->add_option("--makespan-frac", gen.cfg.makespan_fraction,
                       "Makespan as a fraction of total duration");
  generate->add_option("--density", gen.cfg.edge_density, "Edge density");
  generate->add_option("--layers", gen.cfg.layers, "Layer count (0 = auto)");
  generate->add_option("--preset", gen.preset, "Reward preset");
  generate->add_option("--seed", gen.cfg.seed, "Generator seed");
  generate->add_option("-o,--output", gen.out, "Mission file")->required();

  SolveArgs sol;
  auto* solve = app.add_subcommand("solve", "Plan a mission");
  solve->add_option("mission", sol.mission, "Mission file")->required();
  solve->add_option("--solver", sol.solver,
                    "offline | greedy | oracle-flow | oracle-schedule");
  add_solver_flags(solve, sol.cfg);
  solve->add_option("-o,--output", sol.out, "Solution file");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Execute one mission");
  simulate->add_option("mission", sim.mission, "Mission file")->required();
  simulate->add_option("--solver", sim.solver,
                       "offline | greedy | online | clairvoyant-off | clairvoyant-on");
  simulate->add_option("--error", sim.error,
                       "none | task_failure | model_perturbation");
  simulate->add_option("--level", sim.level, "p_f or p_m")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--error-seed", sim.error_seed, "Error model seed");
  add_solver_flags(simulate, sim.cfg);
  simulate->add_option("-o,--output", sim.out, "Trial record (JSONL)");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Run an experiment spec");
  sweep->add_option("spec", sw.spec, "Experiment JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--jobs", sw.jobs, "Worker threads")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--csv", sw.csv, "Aggregate CSV (stdout if omitted)");
  sweep->add_option("--jsonl", sw.jsonl, "Per-trial records");
  sweep->add_flag("--no-timing", sw.no_timing,
                  "Write 0 solve times for byte-stable output");

  OracleArgs orc;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive optima of small missions");
  oracle->add_option("missions", orc.missions, "Mission files")->required();
  oracle->add_option("--kind", orc.kind, "flow | schedule | both");
  oracle->add_option("-o,--output", orc.out, "CSV file (stdout if omitted)");

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Render a sweep CSV as SVG");
  report->add_option("csv", rep.csv, "Sweep CSV")->required()->check(CLI::ExistingFile);
  report->add_option("-o,--output", rep.out, "SVG file")->required();
  report->add_option("--title", rep.chart.title, "Chart title");
  report->add_option("--x-label", rep.chart.x_label, "X axis label");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (generate->parsed()) return run_generate(gen);
    if (solve->parsed()) return run_solve(sol);
    if (simulate->parsed()) return run_simulate(sim);
    if (sweep->parsed()) return run_sweep_cmd(sw);
    if (oracle->parsed()) return run_oracle(orc);
    if (report->parsed()) return run_report(rep);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const GuardError& e) {
    std::fprintf(stderr, "guard: %s\n", e.what());
    return kExitGuard;
  } catch (const InputError& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitUsage;
}
