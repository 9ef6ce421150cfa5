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

// Flat view of a task graph used by the continuous solvers. Nodes follow the
// topological order of CompiledRewards; edges are grouped by tail.

#include <map>
#include <span>
#include <vector>

#include "coalflow/mission.hpp"

namespace coalflow::detail {

struct FlatEdge {
  Edge edge;
  int tail = 0;  // flat node index
  int head = 0;
  double capacity = 1.0;
};

struct FlatNode {
  NodeKind kind = NodeKind::kTask;
  double supply = 0.0;
  int first_edge = 0;  // out edges are [first_edge, first_edge + out_degree)
  int out_degree = 0;
};

class FlowModel {
 public:
  FlowModel(const TaskGraph& g, const RewardModel& rm);

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  const FlatNode& node(std::size_t i) const { return nodes_[i]; }
  const FlatEdge& edge(std::size_t e) const { return edges_[e]; }
  const CompiledRewards& rewards() const { return rewards_; }
  int edge_index(Edge e) const;

  // Total predicted reward for per-edge flows. Scratch buffers are resized
  // on demand so one model can be evaluated from one thread at a time.
  double objective(std::span<const double> flow) const;
  // Same, also writing each flat node's reward.
  double objective(std::span<const double> flow,
                   std::span<double> rewards) const;

  // Per-node inflow (sources report their supply).
  void inflow(std::span<const double> flow, std::span<double> in) const;

  std::vector<double> to_vector(const std::map<Edge, double>& flow) const;
  std::map<Edge, double> to_map(std::span<const double> flow) const;

 private:
  CompiledRewards rewards_;
  std::vector<FlatNode> nodes_;
  std::vector<FlatEdge> edges_;
  std::map<Edge, int> edge_index_;
  mutable std::vector<double> coalition_;
  mutable std::vector<double> reward_;
};

// Euclidean projection onto {x >= 0, sum x <= bound}.
void project_capped_simplex(std::span<double> x, double bound);

// Euclidean projection onto {x >= 0, sum x == total}.
void project_simplex(std::span<double> x, double total);

// Euclidean projection onto {0 <= x <= cap, sum x == min(total, sum cap)}.
void project_boxed_simplex(std::span<double> x, std::span<const double> cap,
                           double total);

}  // namespace coalflow::detail
