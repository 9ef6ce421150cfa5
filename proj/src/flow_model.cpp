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


#include "flow_model.hpp"

#include <algorithm>
#include <numeric>

namespace coalflow::detail {

FlowModel::FlowModel(const TaskGraph& g, const RewardModel& rm)
    : rewards_(g, rm) {
  const auto& order = rewards_.order();
  nodes_.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const TaskNode& n = g.node(order[i]);
    FlatNode& fn = nodes_[i];
    fn.kind = n.kind;
    fn.supply = n.supply;
    fn.first_edge = static_cast<int>(edges_.size());
    for (NodeId s : g.successors(order[i])) {
      const Edge e{order[i], s};
      edge_index_[e] = static_cast<int>(edges_.size());
      edges_.push_back({e, static_cast<int>(i), rewards_.index_of(s),
                        g.capacity(e)});
    }
    fn.out_degree = static_cast<int>(edges_.size()) - fn.first_edge;
  }
}

int FlowModel::edge_index(Edge e) const {
  auto it = edge_index_.find(e);
  return it == edge_index_.end() ? -1 : it->second;
}

void FlowModel::inflow(std::span<const double> flow,
                       std::span<double> in) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    in[i] = TaskGraph::is_source_kind(nodes_[i].kind) ? nodes_[i].supply : 0.0;
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    in[edges_[e].head] += flow[e];
  }
}

double FlowModel::objective(std::span<const double> flow) const {
  coalition_.assign(nodes_.size(), 0.0);
  reward_.resize(nodes_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    coalition_[edges_[e].head] += flow[e];
  }
  return rewards_.evaluate(coalition_, reward_);
}

double FlowModel::objective(std::span<const double> flow,
                            std::span<double> rewards) const {
  coalition_.assign(nodes_.size(), 0.0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    coalition_[edges_[e].head] += flow[e];
  }
  return rewards_.evaluate(coalition_, rewards);
}

std::vector<double> FlowModel::to_vector(
    const std::map<Edge, double>& flow) const {
  std::vector<double> v(edges_.size(), 0.0);
  for (const auto& [e, x] : flow) {
    const int k = edge_index(e);
    if (k >= 0) v[k] = x;
  }
  return v;
}

std::map<Edge, double> FlowModel::to_map(std::span<const double> flow) const {
  std::map<Edge, double> m;
  for (std::size_t e = 0; e < edges_.size(); ++e) m[edges_[e].edge] = flow[e];
  return m;
}

void project_simplex(std::span<double> x, double total) {
  if (x.empty()) return;
  if (total <= 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return;
  }
  std::vector<double> u(x.begin(), x.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    const double t = (cum - total) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  for (double& v : x) v = std::max(v - theta, 0.0);
}

void project_capped_simplex(std::span<double> x, double bound) {
  for (double& v : x) v = std::max(v, 0.0);
  const double sum = std::accumulate(x.begin(), x.end(), 0.0);
  if (sum > bound) project_simplex(x, bound);
}

void project_boxed_simplex(std::span<double> x, std::span<const double> cap,
                           double total) {
  const double room = std::accumulate(cap.begin(), cap.end(), 0.0);
  if (total >= room) {
    std::copy(cap.begin(), cap.end(), x.begin());
    return;
  }
  auto mass = [&](double theta) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      m += std::clamp(x[i] - theta, 0.0, cap[i]);
    }
    return m;
  };
  // mass() is non-increasing in theta; bracket and bisect.
  double lo = *std::min_element(x.begin(), x.end()) - 1.0;
  double hi = *std::max_element(x.begin(), x.end());
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mass(mid) > total) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double theta = 0.5 * (lo + hi);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::clamp(x[i] - theta, 0.0, cap[i]);
  }
}

}  // namespace coalflow::detail
