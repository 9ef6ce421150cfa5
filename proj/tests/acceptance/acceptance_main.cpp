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


// Acceptance run: one PASS/FAIL line per criterion, exit code 1 on any FAIL.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "coalflow/exact_oracle.hpp"
#include "coalflow/graph_ops.hpp"
#include "coalflow/simulate.hpp"
#include "coalflow/sweep.hpp"
#include "coalflow/testbed.hpp"
#include "support/test_support.hpp"

#ifndef COALFLOW_PROPERTY_TEST
#define COALFLOW_PROPERTY_TEST ""
#endif

using namespace coalflow;
namespace t = coalflow::testing;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("criterion %d %-28s %s  %s\n", id, name, ok ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rounded_objective(const TaskGraph& g, const RewardModel& rm,
                         const IntegerAllocation& a, const Fleet& fleet) {
  std::map<NodeId, double> x;
  for (NodeId j : g.task_ids()) {
    auto it = a.coalition_size.find(j);
    x[j] = it == a.coalition_size.end() ? 0.0
                                        : static_cast<double>(it->second) / fleet.size;
  }
  return total_reward(eval_rewards(g, rm, x));
}

struct SmallMission {
  Mission m;
  PruneResult pruned;
  FlowSolution flow;
  IntegerAllocation alloc;
};

std::vector<SmallMission> small_missions() {
  std::vector<SmallMission> out;
  for (int i = 0; i < 50; ++i) {
    SmallMission s;
    s.m = t::random_small_mission(mix_seed(2026, i), 6, 4);
    s.pruned = prune_graph(s.m.graph, s.m.reward, s.m.makespan);
    SolverConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(i);
    s.flow = solve_offline(s.m.graph, s.m.reward, s.m.fleet, s.m.makespan, cfg);
    s.alloc = round_flows(s.pruned.graph, s.flow, s.m.fleet);
    out.push_back(std::move(s));
  }
  return out;
}

void criterion_1(const std::vector<SmallMission>& ms, double setup_s) {
  const auto t0 = Clock::now();
  int ok = 0;
  for (const SmallMission& s : ms) {
    const auto brute = t::brute_force_rounding(s.pruned.graph, s.flow.flow, s.m.fleet);
    const double got = rounding_cost(s.pruned.graph, s.flow.flow, s.alloc, s.m.fleet);
    const Schedule sch = extract_schedule(s.pruned.graph, s.alloc, s.m.fleet);
    const bool legal =
        t::check_schedule(s.pruned.graph, sch, s.m.fleet, s.m.makespan).empty() &&
        allocation_violations(s.pruned.graph, s.alloc, s.m.fleet).empty();
    if (std::abs(got - brute.cost) <= 1e-9 && legal) ++ok;
  }
  const double secs = setup_s + since(t0);
  report(1, "oracle equivalence", ok == 50 && secs < 120.0,
         std::to_string(ok) + "/50 exact and legal, " + fmt("%.2fs", secs));
}

void criterion_2(const std::vector<SmallMission>& ms) {
  int ok = 0;
  double worst = 1.0;
  for (const SmallMission& s : ms) {
    const OracleResult o =
        enumerate_integer_flows(s.m.graph, s.m.reward, s.m.fleet, s.m.makespan);
    const double got =
        rounded_objective(s.pruned.graph, s.pruned.reward, s.alloc, s.m.fleet);
    const double ratio = o.best_objective > 1e-12 ? got / o.best_objective : 1.0;
    worst = std::min(worst, ratio);
    if (ratio >= 0.9 - 1e-12) ++ok;
  }
  report(2, "flow-optimum proximity", ok >= 40,
         std::to_string(ok) + "/50 within 90%, worst ratio " + fmt("%.3f", worst));
}

void criterion_3() {
  const Mission m = t::domain_gap_mission();
  const OracleResult f = enumerate_integer_flows(m.graph, m.reward, m.fleet, m.makespan);
  const OracleResult s = enumerate_schedules(m.graph, m.reward, m.fleet, m.makespan);
  const TrialRecord on = simulate_mission(m, SolverKind::kOnline, NoError{}, {});
  const TrialRecord off = simulate_mission(m, SolverKind::kOffline, NoError{}, {});
  const bool ok = s.best_objective > f.best_objective &&
                  on.total_reward > off.total_reward &&
                  t::check_trace(m, on).empty();
  report(3, "domain-gap witness", ok,
         fmt("schedule %.3f", s.best_objective) + fmt(" > flow %.3f", f.best_objective) +
             fmt("; online %.3f", on.total_reward) +
             fmt(" > offline %.3f", off.total_reward));
}

ExperimentSpec desk_spec(const std::string& name, const std::string& var,
                         std::vector<double> levels,
                         std::vector<SolverKind> solvers, std::uint64_t seed) {
  ExperimentSpec s;
  s.name = name;
  s.variable = var;
  s.levels = std::move(levels);
  s.trials = 30;
  s.solvers = std::move(solvers);
  s.seed = seed;
  s.generator.num_tasks = 10;
  s.generator.fleet_size = 4;
  s.generator.makespan_fraction = 0.6;
  s.record_timing = false;
  if (var == "failure_prob") s.error = ErrorKind::kTaskFailure;
  if (var == "perturbation") s.error = ErrorKind::kModelPerturbation;
  return s;
}

const SweepRow& row(const SweepResult& r, double level, const std::string& solver) {
  for (const SweepRow& x : r.rows) {
    if (std::abs(x.level - level) < 1e-12 && x.solver == solver) return x;
  }
  std::fprintf(stderr, "missing row %g %s\n", level, solver.c_str());
  std::abort();
}

void criterion_4() {
  const auto t0 = Clock::now();
  const ExperimentSpec spec = desk_spec("exp5", "num_tasks", {8, 12, 15},
                                        {SolverKind::kOffline, SolverKind::kOnline}, 5);
  const SweepResult r = run_sweep(spec, 1);
  const double secs = since(t0);
  const double a = row(r, 8, "online").mean_ratio_vs_offline;
  const double b = row(r, 12, "online").mean_ratio_vs_offline;
  const double c = row(r, 15, "online").mean_ratio_vs_offline;
  const bool ok = a > 1.0 && b > 1.0 && c > 1.0 && a <= b && b <= c && c > 1.2 &&
                  secs < 1200.0;
  report(4, "experiment-5 trend", ok,
         fmt("ratio M=8 %.3f", a) + fmt(", M=12 %.3f", b) + fmt(", M=15 %.3f", c) +
             fmt(", %.1fs", secs));
}

void criterion_5() {
  const ExperimentSpec spec =
      desk_spec("exp7", "failure_prob", {0.0, 0.25, 0.5},
                {SolverKind::kOffline, SolverKind::kOnline,
                 SolverKind::kClairvoyantOffline, SolverKind::kClairvoyantOnline},
                7);
  const SweepResult r = run_sweep(spec, 1);
  bool ok = true;
  std::string detail;
  for (double lv : spec.levels) {
    const double off = row(r, lv, "offline").mean_reward;
    const double on = row(r, lv, "online").mean_reward;
    const double coff = row(r, lv, "clairvoyant-off").mean_reward;
    ok = ok && on >= off && coff >= off;
    detail += fmt("p_f=%.2f:", lv) + fmt(" off %.2f", off) + fmt(" on %.2f", on) +
              fmt(" c-off %.2f", coff) + fmt(" c-on %.2f; ", row(r, lv, "clairvoyant-on").mean_reward);
  }
  const double con = row(r, 0.5, "clairvoyant-on").mean_reward;
  const double on = row(r, 0.5, "online").mean_reward;
  const double gap = con - on;
  ok = ok && gap <= 0.25 * con;
  report(5, "experiment-7 trend", ok,
         detail + fmt("gap at 0.5 = %.1f%%", con > 0 ? 100.0 * gap / con : 0.0));
}

void criterion_6() {
  const ExperimentSpec spec =
      desk_spec("exp8", "perturbation", {0.0, 0.3},
                {SolverKind::kOnline, SolverKind::kClairvoyantOffline}, 8);
  const SweepResult r = run_sweep(spec, 1);
  const double on = row(r, 0.3, "online").mean_reward;
  const double coff = row(r, 0.3, "clairvoyant-off").mean_reward;
  report(6, "experiment-8 trend", on >= 0.95 * coff,
         fmt("p_m=0.3: online %.3f", on) + fmt(" vs 0.95 x c-off %.3f", 0.95 * coff) +
             fmt(" (p_m=0: online %.3f", row(r, 0.0, "online").mean_reward) +
             fmt(", c-off %.3f)", row(r, 0.0, "clairvoyant-off").mean_reward));
}

void criterion_7() {
  const std::string exe = COALFLOW_PROPERTY_TEST;
  bool ok = false;
  std::string detail = "property binary not configured";
  if (!exe.empty()) {
    const std::string cmd = "\"" + exe + "\" --minimal > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    ok = rc == 0;
    detail = std::string("property suite (200 seeds per case) ") +
             (ok ? "green" : "red, rc=" + std::to_string(rc));
  }
  report(7, "invariant suites", ok, detail);
}

void criterion_8() {
  GeneratorConfig cfg;
  cfg.num_tasks = 50;
  cfg.seed = 50;
  const Mission big = generate_mission(cfg);
  auto t0 = Clock::now();
  const FlowSolution f = solve_offline(big.graph, big.reward, big.fleet, big.makespan, {});
  const double offline_s = since(t0);
  cfg.num_tasks = 30;
  cfg.seed = 30;
  const Mission mid = generate_mission(cfg);
  t0 = Clock::now();
  const TrialRecord r = simulate_mission(mid, SolverKind::kOnline, NoError{}, {});
  const double online_s = since(t0);
  const bool ok = offline_s < 60.0 && online_s < 600.0 && t::check_trace(mid, r).empty();
  report(8, "scale smoke test", ok,
         fmt("offline M=50 %.2fs", offline_s) + fmt(" (objective %.3f)", f.objective) +
             fmt(", online M=30 %.2fs", online_s) +
             ", " + std::to_string(r.executed.size()) + " tasks run");
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const std::vector<SmallMission> ms = small_missions();
  criterion_1(ms, since(t0));
  criterion_2(ms);
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  std::printf("acceptance: %d failing criteria, %.1fs total\n", failures, since(t0));
  return failures == 0 ? 0 : 1;
}
