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


#include <doctest.h>

#include <cmath>

#include "coalflow/errors.hpp"
#include "coalflow/mission_io.hpp"
#include "coalflow/simulate.hpp"
#include "coalflow/sweep.hpp"
#include "coalflow/testbed.hpp"
#include "support/test_support.hpp"

using namespace coalflow;
namespace t = coalflow::testing;

TEST_CASE("generator is deterministic and sound") {
  GeneratorConfig cfg;
  cfg.num_tasks = 10;
  cfg.makespan_fraction = 0.6;
  cfg.seed = 42;
  const Mission a = generate_mission(cfg);
  const Mission b = generate_mission(cfg);
  CHECK(mission_to_json(a) == mission_to_json(b));
  CHECK(validate_graph(a.graph).empty());
  CHECK(validate_model(a.graph, a.reward).empty());
  cfg.seed = 43;
  CHECK(mission_to_json(generate_mission(cfg)) != mission_to_json(a));
}

TEST_CASE("task count and makespan follow the config") {
  GeneratorConfig cfg;
  cfg.num_tasks = 20;
  cfg.makespan_fraction = 0.6;
  cfg.seed = 3;
  const Mission m = generate_mission(cfg);
  CHECK(m.graph.num_tasks() == 20);
  double total = 0.0;
  for (NodeId j : m.graph.task_ids()) {
    const double d = m.graph.node(j).duration;
    CHECK(d >= 1.0);
    CHECK(d <= 10.0);
    total += d;
  }
  CHECK(m.makespan == doctest::Approx(0.6 * total));
  for (const auto& [key, tt] : m.graph.travel_times()) {
    CHECK(tt >= 0.0);
    CHECK(tt <= 2.0 + 1e-12);
  }
}

TEST_CASE("presets use their combination rule") {
  GeneratorConfig cfg;
  cfg.num_tasks = 8;
  cfg.preset = Preset::kTransport;
  const Mission m = generate_mission(cfg);
  for (const auto& [id, nr] : m.reward.nodes) {
    CHECK(nr.combination == Combination::kMin);
  }
  CHECK(parse_preset("carry") == Preset::kCarry);
  CHECK_THROWS_AS(parse_preset("juggling"), InputError);
}

TEST_CASE("invalid configs") {
  GeneratorConfig cfg;
  cfg.num_tasks = 0;
  CHECK_THROWS_AS(validate_config(cfg), InputError);
  cfg = {};
  cfg.edge_density = 1.5;
  CHECK_THROWS_AS(validate_config(cfg), InputError);
  cfg = {};
  cfg.fleet_size = 0;
  CHECK_THROWS_AS(generate_mission(cfg), InputError);
}

TEST_CASE("no failures at p_f = 0, no change at p_m = 0") {
  const Mission m = t::random_small_mission(4, 10, 4);
  const ErrorRealization f = apply_error(m.reward, TaskFailure{0.0, 9});
  CHECK(f.failed.empty());
  CHECK(f.ground_truth == f.planner);
  const ErrorRealization p = apply_error(m.reward, ModelPerturbation{0.0, 9});
  CHECK(p.ground_truth == p.planner);
  CHECK(p.planner == m.reward);
}

TEST_CASE("failure rate matches p_f over 10k draws") {
  GeneratorConfig cfg;
  cfg.num_tasks = 10;
  const Mission m = generate_mission(cfg);
  int failed = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    failed += static_cast<int>(apply_error(m.reward, TaskFailure{0.5, seed}).failed.size());
  }
  CHECK(failed / 10000.0 == doctest::Approx(0.5).epsilon(0.1));
  CHECK(std::abs(failed / 10000.0 - 0.5) <= 0.05);
}

TEST_CASE("failed tasks are worth nothing in the ground truth") {
  Mission m;
  m.graph.add_task(1, 1.0);
  m.graph.add_edge({0, 1});
  m.reward.nodes[1] = NodeReward{};
  m.fleet = {2};
  m.makespan = 5.0;
  for (SolverKind k : {SolverKind::kOffline, SolverKind::kGreedy,
                       SolverKind::kOnline, SolverKind::kClairvoyantOffline,
                       SolverKind::kClairvoyantOnline}) {
    const TrialRecord r = simulate_mission(m, k, TaskFailure{1.0, 1}, {});
    CHECK(r.total_reward == 0.0);
    CHECK(r.tasks.at(1).failed);
  }
}

TEST_CASE("perturbation keeps sign constraints") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto p = std::get<PowerSublinear>(
        perturb_function(PowerSublinear{1.0, 0.5}, 1.0, rng));
    CHECK(p.scale >= 0.0);
    CHECK(p.exponent > 0.0);
    CHECK(p.exponent < 1.0);
    const auto s = std::get<Sigmoid>(perturb_function(Sigmoid{1.0, 8.0, 0.3}, 1.0, rng));
    CHECK(s.c0 >= 0.0);
    CHECK(s.c1 > 0.0);
  }
}

TEST_CASE("open loop without error sees exactly what it predicted") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Mission m = t::random_small_mission(seed + 77, 10, 4);
    for (SolverKind k : {SolverKind::kOffline, SolverKind::kGreedy}) {
      const TrialRecord r = simulate_mission(m, k, NoError{}, {});
      for (const auto& [id, o] : r.tasks) {
        CHECK(o.observed == o.predicted);
      }
      CHECK(t::check_trace(m, r).empty());
    }
  }
}

TEST_CASE("sweep shapes and reproducibility") {
  nlohmann::json j = {
      {"name", "tiny"},
      {"variable", "failure_prob"},
      {"levels", {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}},
      {"trials", 2},
      {"solvers", {"offline", "online"}},
      {"seed", 3},
      {"generator", {{"num_tasks", 6}}},
      {"record_timing", false}};
  const ExperimentSpec spec = spec_from_json(j);
  const SweepResult a = run_sweep(spec, 1);
  const SweepResult b = run_sweep(spec, 3);
  CHECK(a.rows.size() == 12);
  CHECK(a.records.size() == 24);
  CHECK(rows_to_csv(a.rows) == rows_to_csv(b.rows));
  const auto back = rows_from_csv(rows_to_csv(a.rows));
  CHECK(back.size() == a.rows.size());

  j["levels"] = {8, 10, 12, 15, 20, 25, 30};
  j["variable"] = "num_tasks";
  CHECK(spec_from_json(j).levels.size() == 7);

  j["levels"] = nlohmann::json::array();
  CHECK_THROWS_AS(spec_from_json(j), InputError);
  j["levels"] = {1};
  j["bogus"] = 1;
  CHECK_THROWS_AS(spec_from_json(j), InputError);
}

TEST_CASE("one level, one trial, one solver") {
  nlohmann::json j = {{"name", "one"},  {"levels", {5}},  {"trials", 1},
                      {"solvers", {"greedy"}}, {"seed", 1}};
  const SweepResult r = run_sweep(spec_from_json(j), 1);
  CHECK(r.records.size() == 1);
  CHECK(r.rows.size() == 1);
  CHECK(r.records[0].record.solver == "greedy");
}
