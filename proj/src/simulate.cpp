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


#include "coalflow/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include <json.hpp>

#include "coalflow/errors.hpp"
#include "coalflow/graph_ops.hpp"
#include "coalflow/greedy_solver.hpp"

namespace coalflow {

std::string solver_name(SolverKind k) {
  switch (k) {
    case SolverKind::kOffline:
      return "offline";
    case SolverKind::kGreedy:
      return "greedy";
    case SolverKind::kOnline:
      return "online";
    case SolverKind::kClairvoyantOffline:
      return "clairvoyant-off";
    case SolverKind::kClairvoyantOnline:
      return "clairvoyant-on";
  }
  return "offline";
}

SolverKind parse_solver(const std::string& s) {
  for (SolverKind k : {SolverKind::kOffline, SolverKind::kGreedy,
                       SolverKind::kOnline, SolverKind::kClairvoyantOffline,
                       SolverKind::kClairvoyantOnline}) {
    if (solver_name(k) == s) return k;
  }
  throw InputError("unknown solver '" + s + "'");
}

double observe_reward(const TaskGraph& original, const RewardModel& rm,
                      NodeId j, int coalition, int fleet_size,
                      const std::map<NodeId, double>& upstream) {
  const NodeReward& nr = rm.nodes.at(j);
  std::vector<double> values;
  for (NodeId p : original.predecessors(j)) {
    if (original.is_source(p)) continue;
    auto up = upstream.find(p);
    const double rp = up == upstream.end() ? 0.0 : up->second;
    values.push_back(eval_scalar(rm.influence.at({p, j}), rp));
  }
  values.insert(values.end(), nr.ghost_influence.begin(),
                nr.ghost_influence.end());
  const double x = static_cast<double>(coalition) / fleet_size;
  return combine_reward(nr, eval_scalar(nr.coalition, x), values);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string describe(const ErrorModel& em) {
  if (const auto* tf = std::get_if<TaskFailure>(&em)) {
    return "task-failure p_f=" + std::to_string(tf->p_f);
  }
  if (const auto* mp = std::get_if<ModelPerturbation>(&em)) {
    return "model-perturbation p_m=" + std::to_string(mp->p_m);
  }
  return "none";
}

void run_open_loop(const Mission& mission, const RewardModel& planner,
                   const RewardModel& truth, bool greedy,
                   const SimulationOptions& opts, TrialRecord& rec) {
  const TaskGraph& g = mission.graph;
  const auto t0 = Clock::now();
  const PruneResult pr = prune_graph(g, planner, mission.makespan);
  const FlowSolution sol =
      greedy ? solve_greedy(pr.graph, pr.reward, mission.fleet,
                            mission.makespan, opts.solver.seed)
             : solve_offline(pr.graph, pr.reward, mission.fleet,
                             mission.makespan, opts.solver);
  const IntegerAllocation alloc = round_flows(pr.graph, sol, mission.fleet);
  const Schedule sched = extract_schedule(pr.graph, alloc, mission.fleet);
  rec.solve_time_s = seconds_since(t0);
  rec.planned_objective = sol.objective;
  for (NodeId id : pr.removed) rec.tasks[id].pruned = true;

  std::vector<ExecutedTask> runs;
  for (const auto& [j, c] : alloc.coalition_size) {
    if (c <= 0) continue;
    ExecutedTask run{j, sched.start.at(j), sched.finish.at(j), {}};
    for (std::size_t r = 0; r < sched.robot_tasks.size(); ++r) {
      const auto& path = sched.robot_tasks[r];
      if (std::find(path.begin(), path.end(), j) != path.end()) {
        run.robots.push_back(static_cast<int>(r));
      }
    }
    runs.push_back(std::move(run));
  }
  std::sort(runs.begin(), runs.end(),
            [](const ExecutedTask& a, const ExecutedTask& b) {
              return a.finish != b.finish ? a.finish < b.finish
                                          : a.task < b.task;
            });
  std::map<NodeId, double> observed;
  for (const ExecutedTask& run : runs) {
    const int c = alloc.coalition_size.at(run.task);
    observed[run.task] =
        observe_reward(g, truth, run.task, c, mission.fleet.size, observed);
    TaskOutcome& o = rec.tasks[run.task];
    o.executed = true;
    o.coalition_size = c;
    o.observed = observed[run.task];
  }
  // Predictions use the planner model on the same realized allocation.
  std::map<NodeId, double> predicted;
  for (NodeId j : topo_order(g)) {
    auto it = alloc.coalition_size.find(j);
    if (it == alloc.coalition_size.end() || it->second <= 0) continue;
    predicted[j] =
        observe_reward(g, planner, j, it->second, mission.fleet.size, predicted);
    rec.tasks[j].predicted = predicted[j];
  }
  rec.executed = std::move(runs);
}

void run_closed_loop(const Mission& mission, const RewardModel& planner,
                     const RewardModel& truth, const SimulationOptions& opts,
                     TrialRecord& rec) {
  const TaskGraph& g = mission.graph;
  Mission planned = mission;
  planned.reward = planner;
  auto t0 = Clock::now();
  OnlineState state = init_online(planned, opts.solver);
  rec.solve_time_s += seconds_since(t0);
  rec.planned_objective = state.plan.objective;
  if (opts.on_replan) opts.on_replan(state, nullptr);

  std::set<NodeId> ever_pruned;
  {
    const PruneResult pr = prune_graph(g, planner, mission.makespan);
    ever_pruned.insert(pr.removed.begin(), pr.removed.end());
  }
  std::map<NodeId, double> observed;
  const int limit = 4 * static_cast<int>(g.num_tasks()) + 8;
  for (int guard = 0; guard < limit; ++guard) {
    const DispatchState dispatch = state.dispatch();
    const Schedule sched = extract_schedule(state.plan_graph, state.allocation,
                                            mission.fleet, &dispatch);
    double t_next = std::numeric_limits<double>::infinity();
    for (const auto& [t, ip] : state.in_progress) {
      t_next = std::min(t_next, ip.finish);
    }
    struct Candidate {
      double start;
      NodeId task;
      std::vector<int> robots;
    };
    std::vector<Candidate> cands;
    for (const auto& [j, c] : state.allocation.coalition_size) {
      if (c <= 0 || state.in_progress.contains(j) || !sched.start.contains(j)) {
        continue;
      }
      std::vector<int> robots;
      for (std::size_t r = 0; r < sched.robot_tasks.size(); ++r) {
        const auto& path = sched.robot_tasks[r];
        if (!path.empty() && path.front() == j) {
          robots.push_back(static_cast<int>(r));
        }
      }
      if (static_cast<int>(robots.size()) == c) {
        cands.push_back({sched.start.at(j), j, std::move(robots)});
      }
    }
    std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
      return a.start != b.start ? a.start < b.start : a.task < b.task;
    });
    for (auto& cand : cands) {
      if (cand.start > t_next) break;
      commit_task(state, cand.task, cand.robots, cand.start);
      t_next = std::min(t_next, state.in_progress.at(cand.task).finish);
    }
    if (state.in_progress.empty()) break;

    NodeId c = -1;
    double fc = std::numeric_limits<double>::infinity();
    for (const auto& [t, ip] : state.in_progress) {
      if (ip.finish < fc) {
        fc = ip.finish;
        c = t;
      }
    }
    const InProgressTask ip = state.in_progress.at(c);
    const double r =
        observe_reward(g, truth, c, ip.coalition_size, mission.fleet.size,
                       observed);
    observed[c] = r;

    // Planner's own expectation at completion time: frozen upstream values
    // plus zero from any predecessor that is about to be dropped.
    double predicted = 0.0;
    {
      const NodeReward& nr = state.reward.nodes.at(c);
      std::vector<double> vals = nr.ghost_influence;
      for (NodeId p : state.graph.predecessors(c)) {
        auto inf = state.reward.influence.find({p, c});
        if (inf != state.reward.influence.end()) {
          vals.push_back(eval_scalar(inf->second, 0.0));
        }
      }
      predicted = combine_reward(
          nr,
          eval_scalar(nr.coalition,
                      static_cast<double>(ip.coalition_size) /
                          mission.fleet.size),
          vals);
    }
    TaskOutcome& o = rec.tasks[c];
    o.executed = true;
    o.coalition_size = ip.coalition_size;
    o.observed = r;
    o.predicted = predicted;
    rec.executed.push_back({c, ip.start, ip.finish, ip.robots});

    t0 = Clock::now();
    StepResult res = step(state, c, r, fc);
    rec.solve_time_s += seconds_since(t0);
    if (opts.on_replan) opts.on_replan(state, &res);
    ever_pruned.insert(res.pruned.begin(), res.pruned.end());
    StepTrace tr;
    tr.iteration = state.iteration;
    tr.completed = c;
    tr.time = fc;
    tr.observed = r;
    tr.predicted = predicted;
    tr.zeroed = res.zeroed;
    tr.pruned = res.pruned;
    tr.origin = res.origin == SolutionOrigin::kFresh ? "fresh" : "projected";
    tr.plan_objective = res.solution.objective;
    rec.trace.push_back(std::move(tr));
  }
  for (NodeId z : state.zeroed) rec.tasks[z].zeroed = true;
  for (NodeId p : ever_pruned) {
    TaskOutcome& o = rec.tasks[p];
    if (!o.executed && !o.zeroed) o.pruned = true;
  }
}

}  // namespace

TrialRecord simulate_mission(const Mission& mission, SolverKind solver,
                             const ErrorModel& em,
                             const SimulationOptions& opts) {
  const ErrorRealization er = apply_error(mission.reward, em);
  const bool clairvoyant = solver == SolverKind::kClairvoyantOffline ||
                           solver == SolverKind::kClairvoyantOnline;
  const RewardModel& planner = clairvoyant ? er.ground_truth : er.planner;

  TrialRecord rec;
  rec.mission_id = opts.mission_id;
  rec.solver = solver_name(solver);
  rec.makespan = mission.makespan;
  rec.error_model = describe(em);
  rec.failed.assign(er.failed.begin(), er.failed.end());
  for (NodeId j : mission.graph.task_ids()) {
    rec.tasks[j].failed = er.failed.contains(j);
  }
  switch (solver) {
    case SolverKind::kOffline:
    case SolverKind::kClairvoyantOffline:
      run_open_loop(mission, planner, er.ground_truth, false, opts, rec);
      break;
    case SolverKind::kGreedy:
      run_open_loop(mission, planner, er.ground_truth, true, opts, rec);
      break;
    case SolverKind::kOnline:
    case SolverKind::kClairvoyantOnline:
      run_closed_loop(mission, planner, er.ground_truth, opts, rec);
      break;
  }
  rec.total_reward = 0.0;
  for (const auto& [id, o] : rec.tasks) rec.total_reward += o.observed;
  return rec;
}

std::string trial_to_jsonl(const TrialRecord& r) {
  using nlohmann::json;
  json tasks = json::array();
  for (const auto& [id, o] : r.tasks) {
    tasks.push_back({{"node", id},
                     {"predicted", o.predicted},
                     {"observed", o.observed},
                     {"coalition_size", o.coalition_size},
                     {"executed", o.executed},
                     {"pruned", o.pruned},
                     {"zeroed", o.zeroed},
                     {"failed", o.failed}});
  }
  json runs = json::array();
  for (const auto& e : r.executed) {
    runs.push_back({{"node", e.task},
                    {"start", e.start},
                    {"finish", e.finish},
                    {"robots", e.robots}});
  }
  json trace = json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"iteration", t.iteration},
                     {"completed", t.completed},
                     {"time", t.time},
                     {"observed", t.observed},
                     {"predicted", t.predicted},
                     {"zeroed", t.zeroed},
                     {"pruned", t.pruned},
                     {"origin", t.origin},
                     {"plan_objective", t.plan_objective}});
  }
  json j{{"mission_id", r.mission_id},
         {"solver", r.solver},
         {"total_reward", r.total_reward},
         {"solve_time_s", r.solve_time_s},
         {"makespan", r.makespan},
         {"error_model", r.error_model},
         {"failed", r.failed},
         {"planned_objective", r.planned_objective},
         {"tasks", tasks},
         {"executed", runs},
         {"trace", trace}};
  return j.dump();
}

}  // namespace coalflow
