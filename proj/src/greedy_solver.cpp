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


#include "coalflow/greedy_solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "coalflow/graph_ops.hpp"
#include "flow_model.hpp"

namespace coalflow {

FlowSolution solve_greedy(const TaskGraph& g, const RewardModel& rm,
                          const Fleet& fleet, double makespan,
                          std::uint64_t seed, const GreedyConfig& cfg) {
  (void)fleet;
  const PruneResult pruned = prune_graph(g, rm, makespan);
  FlowSolution sol;
  if (pruned.graph.num_tasks() == 0) {
    for (const Edge& e : pruned.graph.edges()) sol.flow[e] = 0.0;
    sol.status = SolverStatus::kInfeasibleInput;
    return sol;
  }
  const detail::FlowModel model(pruned.graph, pruned.reward);
  std::vector<double> flow(model.num_edges(), 0.0);
  std::vector<double> in(model.num_nodes(), 0.0);
  std::vector<double> rewards(model.num_nodes(), 0.0);
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);

  for (std::size_t i = 0; i < model.num_nodes(); ++i) {
    const auto& node = model.node(i);
    if (node.out_degree == 0) continue;
    const int first = node.first_edge;
    const int deg = node.out_degree;
    if (node.kind == NodeKind::kInProgressSource) {
      for (int e = first; e < first + deg; ++e) flow[e] = node.supply;
      continue;
    }
    model.inflow(flow, in);
    const double total = in[i];
    if (total <= 0.0) continue;
    std::vector<double> cap(deg);
    for (int k = 0; k < deg; ++k) {
      cap[k] = std::min(model.edge(first + k).capacity, total);
    }
    auto score = [&](const std::vector<double>& x) {
      std::copy(x.begin(), x.end(), flow.begin() + first);
      model.objective(flow, rewards);
      double s = 0.0;
      for (int k = 0; k < deg; ++k) s += rewards[model.edge(first + k).head];
      return s;
    };

    std::vector<double> best(deg, 0.0);
    double best_score = -1.0;
    std::vector<double> x(deg);
    for (int t = 0; t < cfg.samples; ++t) {
      double sum = 0.0;
      for (double& v : x) {
        v = expo(rng);
        sum += v;
      }
      for (double& v : x) v = v / sum * total;
      detail::project_boxed_simplex(x, cap, total);
      const double s = score(x);
      if (s > best_score) {
        best_score = s;
        best = x;
      }
    }

    x = best;
    std::vector<double> grad(deg);
    const double h = cfg.gradient_step;
    for (int t = 0; t < cfg.steps; ++t) {
      for (int k = 0; k < deg; ++k) {
        const double orig = x[k];
        const double lo = std::max(orig - h, 0.0);
        x[k] = orig + h;
        const double fhi = score(x);
        x[k] = lo;
        const double flo = score(x);
        x[k] = orig;
        grad[k] = (fhi - flo) / (orig + h - lo);
      }
      for (int k = 0; k < deg; ++k) x[k] += cfg.step_size * grad[k];
      detail::project_boxed_simplex(x, cap, total);
      const double s = score(x);
      if (s > best_score) {
        best_score = s;
        best = x;
      }
    }
    std::copy(best.begin(), best.end(), flow.begin() + first);
  }
  sol.flow = model.to_map(flow);
  sol.objective = model.objective(flow);
  sol.status = SolverStatus::kConverged;
  return sol;
}

}  // namespace coalflow
