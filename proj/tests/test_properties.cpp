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


// Randomized invariant checks. Every case runs over at least 200 seeds.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "coalflow/exact_oracle.hpp"
#include "coalflow/graph_ops.hpp"
#include "coalflow/greedy_solver.hpp"
#include "coalflow/online_solver.hpp"
#include "coalflow/simulate.hpp"
#include "coalflow/testbed.hpp"
#include "support/test_support.hpp"

using namespace coalflow;
namespace t = coalflow::testing;

namespace {

constexpr int kSeeds = 200;

std::map<NodeId, double> random_fractions(const TaskGraph& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::map<NodeId, double> x;
  for (NodeId j : g.task_ids()) x[j] = u(rng);
  return x;
}

// Same mission with task ids shuffled (node 0 kept).
Mission relabel(const Mission& m, std::mt19937_64& rng, std::map<NodeId, NodeId>& map) {
  std::vector<NodeId> ids = m.graph.task_ids();
  std::vector<NodeId> fresh(ids.size());
  std::iota(fresh.begin(), fresh.end(), 100);
  std::shuffle(fresh.begin(), fresh.end(), rng);
  map = {{kSourceId, kSourceId}};
  for (std::size_t i = 0; i < ids.size(); ++i) map[ids[i]] = fresh[i];
  Mission out;
  out.fleet = m.fleet;
  out.makespan = m.makespan;
  for (NodeId j : ids) out.graph.add_task(map[j], m.graph.node(j).duration);
  for (const auto& [e, c] : m.graph.edge_capacities()) {
    out.graph.add_edge({map[e.tail], map[e.head]}, c);
  }
  for (const auto& [k, v] : m.graph.travel_times()) {
    out.graph.set_travel_time(map[k.first], map[k.second], v);
  }
  for (const auto& [j, nr] : m.reward.nodes) out.reward.nodes[map[j]] = nr;
  for (const auto& [e, f] : m.reward.influence) {
    out.reward.influence[{map[e.tail], map[e.head]}] = f;
  }
  return out;
}

ScalarFunction random_monotone(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 2.0);
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0:
      return PowerSublinear{u(rng), std::uniform_real_distribution<double>(0.1, 0.9)(rng)};
    case 1:
      return Sigmoid{u(rng), 5.0 * u(rng), 0.5 * u(rng)};
    case 2:
      return ExpSaturation{u(rng), u(rng)};
    default:
      return Linear{0.5 * u(rng), u(rng)};
  }
}

// Random feasible flow on g: every node in topological order spreads a
// random share of what it has over its out-edges.
std::map<Edge, double> random_flow(const TaskGraph& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::map<NodeId, double> have;
  std::map<Edge, double> f;
  for (NodeId v : topo_order(g)) {
    const TaskNode& n = g.node(v);
    const double avail = n.kind == NodeKind::kTask ? have[v] : n.supply;
    const std::vector<NodeId> outs(g.successors(v).begin(), g.successors(v).end());
    if (outs.empty()) continue;
    std::vector<double> w(outs.size());
    double sum = 0.0;
    for (double& x : w) sum += (x = u(rng));
    const double keep = n.kind == NodeKind::kInProgressSource ? 0.0 : 0.3 * u(rng);
    for (std::size_t k = 0; k < outs.size(); ++k) {
      const Edge e{v, outs[k]};
      const double x = std::min(g.capacity(e), avail * (1.0 - keep) * w[k] / sum);
      f[e] = x;
      have[outs[k]] += x;
    }
  }
  return f;
}

}  // namespace

TEST_CASE("reward evaluation: reference equivalence, relabeling, non-negativity") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    std::mt19937_64 rng(seed);
    const Mission m = t::random_small_mission(seed, 5, 4);
    const auto x = random_fractions(m.graph, rng);
    const RewardVector r = eval_rewards(m.graph, m.reward, x);
    const auto ref = t::ref_rewards(m.graph, m.reward, x);
    for (const auto& [j, v] : ref) {
      CHECK(r.at(j) == doctest::Approx(v).epsilon(1e-12));
      CHECK(r.at(j) >= 0.0);
    }
    std::map<NodeId, NodeId> map;
    const Mission p = relabel(m, rng, map);
    std::map<NodeId, double> px;
    for (const auto& [j, v] : x) px[map[j]] = v;
    const RewardVector pr = eval_rewards(p.graph, p.reward, px);
    for (const auto& [j, v] : r) {
      if (!m.graph.is_source(j)) CHECK(pr.at(map[j]) == doctest::Approx(v).epsilon(1e-12));
    }
  }
}

TEST_CASE("reward evaluation: non-negative on larger random missions") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    std::mt19937_64 rng(seed + 10000);
    const Mission m = t::random_small_mission(seed + 10000, 25, 6);
    const RewardVector r = eval_rewards(m.graph, m.reward, random_fractions(m.graph, rng));
    for (const auto& [j, v] : r) {
      CHECK(v >= 0.0);
      CHECK(std::isfinite(v));
    }
  }
}

TEST_CASE("reward evaluation: monotone in the node's own coalition") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    std::mt19937_64 rng(seed + 20000);
    Mission m = t::random_small_mission(seed + 20000, 6, 4);
    const Combination combos[] = {Combination::kSum, Combination::kProduct,
                                  Combination::kMin};
    for (auto& [j, nr] : m.reward.nodes) {
      nr.coalition = random_monotone(rng);
      nr.combination = combos[std::uniform_int_distribution<int>(0, 2)(rng)];
    }
    for (auto& [e, f] : m.reward.influence) f = random_monotone(rng);
    auto x = random_fractions(m.graph, rng);
    const NodeId j = m.graph.task_ids()[std::uniform_int_distribution<std::size_t>(
        0, m.graph.num_tasks() - 1)(rng)];
    const double before = eval_rewards(m.graph, m.reward, x).at(j);
    x[j] = std::min(1.0, x[j] + 0.1 + 0.5 * std::uniform_real_distribution<double>(0, 1)(rng));
    const double after = eval_rewards(m.graph, m.reward, x).at(j);
    CHECK(after >= before - 1e-12);
  }
}

TEST_CASE("pruning: soundness, idempotence, monotonicity") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    const Mission m = t::random_small_mission(seed + 30000, 20, 4);
    const PruneResult p = prune_graph(m.graph, m.reward, m.makespan);
    CHECK(validate_graph(p.graph).empty());
    CHECK(validate_model(p.graph, p.reward).empty());
    for (const auto& [id, w] : label_makespan(p.graph).worst_finish) {
      CHECK(w <= m.makespan + kMakespanSlack);
    }
    const PruneResult q = prune_graph(p.graph, p.reward, m.makespan);
    CHECK(q.graph == p.graph);
    CHECK(q.removed.empty());
    const PruneResult wide = prune_graph(m.graph, m.reward, m.makespan * 1.3);
    for (NodeId id : p.graph.node_ids()) CHECK(wide.graph.has_node(id));
  }
}

TEST_CASE("offline solver: feasibility, determinism, legal schedules") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    const Mission m = t::random_small_mission(seed + 40000, 12, 5);
    SolverConfig cfg;
    cfg.restarts = 3;
    cfg.seed = static_cast<std::uint64_t>(seed);
    const FlowSolution f = solve_offline(m.graph, m.reward, m.fleet, m.makespan, cfg);
    const PruneResult p = prune_graph(m.graph, m.reward, m.makespan);
    CHECK(flow_violations(p.graph, f.flow, kFlowEps).empty());
    if (seed % 4 == 0) {
      const FlowSolution g = solve_offline(m.graph, m.reward, m.fleet, m.makespan, cfg);
      CHECK(g.flow == f.flow);
    }
    const IntegerAllocation a = round_flows(p.graph, f, m.fleet);
    CHECK(allocation_violations(p.graph, a, m.fleet).empty());
    const Schedule s = extract_schedule(p.graph, a, m.fleet);
    CHECK(t::check_schedule(p.graph, s, m.fleet, m.makespan).empty());
  }
}

TEST_CASE("rounding reaches the brute-force minimum") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    std::mt19937_64 rng(seed + 50000);
    const Mission m = t::random_small_mission(seed + 50000, 5, 5);
    const PruneResult p = prune_graph(m.graph, m.reward, m.makespan);
    FlowSolution f;
    if (seed % 2 == 0) {
      f = solve_offline(m.graph, m.reward, m.fleet, m.makespan, {});
    } else {
      f.flow = random_flow(p.graph, rng);
    }
    const IntegerAllocation a = round_flows(p.graph, f, m.fleet);
    CHECK(allocation_violations(p.graph, a, m.fleet).empty());
    const auto brute = t::brute_force_rounding(p.graph, f.flow, m.fleet);
    CHECK(t::ref_rounding_cost(p.graph, f.flow, a, m.fleet) ==
          doctest::Approx(brute.cost).epsilon(1e-9));
    CHECK(rounding_cost(p.graph, f.flow, a, m.fleet) ==
          doctest::Approx(brute.cost).epsilon(1e-9));
  }
}

TEST_CASE("greedy: feasibility, strict conservation, determinism") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    const Mission m = t::random_small_mission(seed + 60000, 10, 5);
    const FlowSolution a = solve_greedy(m.graph, m.reward, m.fleet, m.makespan, seed);
    const PruneResult p = prune_graph(m.graph, m.reward, m.makespan);
    CHECK(flow_violations(p.graph, a.flow).empty());
    std::map<NodeId, double> in, out;
    for (const auto& [e, f] : a.flow) {
      in[e.head] += f;
      out[e.tail] += f;
    }
    for (NodeId v : p.graph.node_ids()) {
      if (p.graph.successors(v).empty()) continue;
      const double have = v == kSourceId ? p.graph.node(v).supply : in[v];
      CHECK(std::abs(out[v] - have) <= 1e-9);
    }
    if (seed % 4 == 0) {
      CHECK(solve_greedy(m.graph, m.reward, m.fleet, m.makespan, seed).flow == a.flow);
    }
  }
}

TEST_CASE("online loop: per-step feasibility, bookkeeping, legal traces") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    const Mission m = t::random_small_mission(seed + 70000, 10, 5);
    SimulationOptions opts;
    opts.solver.restarts = 3;
    opts.solver.seed = static_cast<std::uint64_t>(seed);
    std::size_t last_completed = 0;
    int bad = 0;
    opts.on_replan = [&](const OnlineState& s, const StepResult* r) {
      if (!s.invariant_violations().empty()) ++bad;
      if (!flow_violations(s.plan_graph, s.plan.flow).empty()) ++bad;
      if (!allocation_violations(s.plan_graph, s.allocation, s.fleet).empty()) ++bad;
      if (r != nullptr) {
        if (s.completed.size() != last_completed + 1) ++bad;
        // Every projection that survives the feasibility filter is feasible
        // by construction; the returned one must be too.
        if (!flow_violations(s.plan_graph, r->solution.flow).empty()) ++bad;
        // Candidates are clamped into [0, capacity] on the current graph and
        // only defined on current edges.
        for (const HistoryEntry& h : s.history) {
          for (const auto& [e, f] : project_solution(h, s.plan_graph)) {
            if (!s.plan_graph.has_edge(e) || f < -1e-12 ||
                f > s.plan_graph.capacity(e) + 1e-9) {
              ++bad;
            }
          }
        }
      }
      last_completed = s.completed.size();
      if (s.iteration > static_cast<int>(m.graph.num_tasks())) ++bad;
    };
    const ErrorModel em = seed % 2 == 0 ? ErrorModel{NoError{}}
                                        : ErrorModel{TaskFailure{0.3, static_cast<std::uint64_t>(seed)}};
    const TrialRecord r = simulate_mission(m, SolverKind::kOnline, em, opts);
    CHECK(bad == 0);
    CHECK(t::check_trace(m, r).empty());
    for (const auto& [id, o] : r.tasks) CHECK(o.observed >= 0.0);
  }
}

TEST_CASE("open loop: traces are legal and error-free runs match predictions") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    const Mission m = t::random_small_mission(seed + 80000, 10, 5);
    SimulationOptions opts;
    opts.solver.restarts = 3;
    const SolverKind kind = seed % 2 == 0 ? SolverKind::kOffline : SolverKind::kGreedy;
    const TrialRecord r = simulate_mission(m, kind, NoError{}, opts);
    CHECK(t::check_trace(m, r).empty());
    for (const auto& [id, o] : r.tasks) CHECK(o.observed == o.predicted);
    const TrialRecord f =
        simulate_mission(m, kind, TaskFailure{0.4, static_cast<std::uint64_t>(seed)}, opts);
    CHECK(t::check_trace(m, f).empty());
    for (NodeId j : f.failed) CHECK(f.tasks.at(j).observed == 0.0);
  }
}

TEST_CASE("oracles: schedule optimum contains the flow optimum") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    const Mission m = t::random_small_mission(seed + 90000, 4, 3);
    const OracleResult f = enumerate_integer_flows(m.graph, m.reward, m.fleet, m.makespan);
    const OracleResult s = enumerate_schedules(m.graph, m.reward, m.fleet, m.makespan);
    CHECK(f.exhaustive);
    CHECK(s.exhaustive);
    CHECK(s.best_objective >= f.best_objective - 1e-9);
    CHECK(t::check_schedule(m.graph, s.best_schedule, m.fleet, m.makespan).empty());
    const PruneResult p = prune_graph(m.graph, m.reward, m.makespan);
    CHECK(f.best_objective ==
          doctest::Approx(t::brute_force_flow_optimum(p.graph, p.reward, m.fleet)));
    if (seed % 10 == 0) {
      CHECK(enumerate_schedules(m.graph, m.reward, m.fleet, m.makespan).best_objective ==
            s.best_objective);
    }
  }
}

TEST_CASE("perturbation: sign constraints hold for generated catalogs") {
  for (int seed = 0; seed < kSeeds; ++seed) {
    const Mission m = t::random_small_mission(seed + 100000, 10, 4);
    const ErrorRealization er = apply_error(m.reward, ModelPerturbation{0.5, static_cast<std::uint64_t>(seed)});
    CHECK(er.ground_truth == m.reward);
    for (const auto& [j, nr] : er.planner.nodes) {
      const auto before = function_params(m.reward.nodes.at(j).coalition);
      const auto after = function_params(nr.coalition);
      REQUIRE(before.size() == after.size());
      // Constrained slots: polynomial coefficients keep a non-negative sign,
      // scales and slopes stay non-negative, exponents stay inside (0,1).
      const std::string kind = function_kind(nr.coalition);
      if (kind == "polynomial") {
        for (std::size_t k = 0; k < before.size(); ++k) {
          if (before[k] >= 0.0) CHECK(after[k] >= 0.0);
        }
      } else if (kind == "power") {
        CHECK(after[0] >= 0.0);
        CHECK(after[1] > 0.0);
        CHECK(after[1] < 1.0);
      } else if (kind == "sigmoid" || kind == "exp_saturation") {
        CHECK(after[0] >= 0.0);
        CHECK(after[1] > 0.0);
      }
    }
  }
}

TEST_CASE("clairvoyant solvers dominate on average under failures") {
  double on = 0, con = 0, off = 0, coff = 0;
  for (int seed = 0; seed < kSeeds; ++seed) {
    const Mission m = t::random_small_mission(seed + 110000, 8, 4);
    const TaskFailure em{0.3, static_cast<std::uint64_t>(seed) * 7 + 1};
    SimulationOptions opts;
    opts.solver.restarts = 3;
    on += simulate_mission(m, SolverKind::kOnline, em, opts).total_reward;
    con += simulate_mission(m, SolverKind::kClairvoyantOnline, em, opts).total_reward;
    off += simulate_mission(m, SolverKind::kOffline, em, opts).total_reward;
    coff += simulate_mission(m, SolverKind::kClairvoyantOffline, em, opts).total_reward;
  }
  CHECK(con >= on);
  CHECK(coff >= off);
}
