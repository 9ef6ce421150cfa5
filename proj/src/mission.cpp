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


#include "coalflow/mission.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "coalflow/errors.hpp"
#include "coalflow/graph_ops.hpp"

namespace coalflow {

namespace {

const std::set<NodeId>& empty_set() {
  static const std::set<NodeId> kEmpty;
  return kEmpty;
}

std::string edge_str(Edge e) {
  std::ostringstream os;
  os << "(" << e.tail << "," << e.head << ")";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// TaskGraph

TaskGraph::TaskGraph() {
  add_node(TaskNode{kSourceId, 0.0, "source", NodeKind::kSource, 1.0});
}

void TaskGraph::add_node(TaskNode node) {
  const NodeId id = node.id;
  nodes_[id] = std::move(node);
  out_.try_emplace(id);
  in_.try_emplace(id);
}

void TaskGraph::add_task(NodeId id, double duration, std::string label) {
  add_node(TaskNode{id, duration, std::move(label), NodeKind::kTask, 0.0});
}

void TaskGraph::remove_node(NodeId id) {
  if (!has_node(id)) return;
  for (NodeId s : std::set<NodeId>(out_[id])) remove_edge({id, s});
  for (NodeId p : std::set<NodeId>(in_[id])) remove_edge({p, id});
  nodes_.erase(id);
  out_.erase(id);
  in_.erase(id);
  std::erase_if(travel_, [id](const auto& kv) {
    return kv.first.first == id || kv.first.second == id;
  });
}

void TaskGraph::add_edge(Edge e, double capacity) {
  if (!has_node(e.tail) || !has_node(e.head)) {
    throw InputError("edge " + edge_str(e) + " references an unknown node");
  }
  edges_[e] = capacity;
  out_[e.tail].insert(e.head);
  in_[e.head].insert(e.tail);
}

void TaskGraph::remove_edge(Edge e) {
  if (edges_.erase(e) == 0) return;
  out_[e.tail].erase(e.head);
  in_[e.head].erase(e.tail);
}

void TaskGraph::set_capacity(Edge e, double capacity) {
  auto it = edges_.find(e);
  if (it == edges_.end()) throw InputError("no edge " + edge_str(e));
  it->second = capacity;
}

void TaskGraph::set_travel_time(NodeId from, NodeId to, double seconds) {
  travel_[{from, to}] = seconds;
}

double TaskGraph::travel_time(NodeId from, NodeId to) const {
  if (from == to) return 0.0;
  auto it = travel_.find({from, to});
  return it == travel_.end() ? 0.0 : it->second;
}

bool TaskGraph::has_travel_time(NodeId from, NodeId to) const {
  return travel_.contains({from, to});
}

const TaskNode& TaskGraph::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw InputError("unknown node id " + std::to_string(id));
  }
  return it->second;
}

TaskNode& TaskGraph::mutable_node(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw InputError("unknown node id " + std::to_string(id));
  }
  return it->second;
}

double TaskGraph::capacity(Edge e) const {
  auto it = edges_.find(e);
  if (it == edges_.end()) throw InputError("no edge " + edge_str(e));
  return it->second;
}

std::vector<NodeId> TaskGraph::node_ids() const {
  std::vector<NodeId> ids;
  ids.reserve(nodes_.size());
  for (const auto& [id, n] : nodes_) ids.push_back(id);
  return ids;
}

std::vector<NodeId> TaskGraph::task_ids() const {
  std::vector<NodeId> ids;
  for (const auto& [id, n] : nodes_) {
    if (n.kind == NodeKind::kTask) ids.push_back(id);
  }
  return ids;
}

std::size_t TaskGraph::num_tasks() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const auto& kv) {
        return kv.second.kind == NodeKind::kTask;
      }));
}

std::vector<Edge> TaskGraph::edges() const {
  std::vector<Edge> es;
  es.reserve(edges_.size());
  for (const auto& [e, c] : edges_) es.push_back(e);
  return es;
}

const std::set<NodeId>& TaskGraph::successors(NodeId id) const {
  auto it = out_.find(id);
  return it == out_.end() ? empty_set() : it->second;
}

const std::set<NodeId>& TaskGraph::predecessors(NodeId id) const {
  auto it = in_.find(id);
  return it == in_.end() ? empty_set() : it->second;
}

// ---------------------------------------------------------------------------
// Scalar functions

namespace {

struct Evaluator {
  double x;
  double operator()(const Polynomial& p) const {
    double acc = 0.0;
    for (auto it = p.coefficients.rbegin(); it != p.coefficients.rend(); ++it) {
      acc = acc * x + *it;
    }
    return acc;
  }
  double operator()(const PowerSublinear& p) const {
    return p.scale * std::pow(std::max(x, 0.0), p.exponent);
  }
  double operator()(const Sigmoid& s) const {
    return s.c0 / (1.0 + std::exp(-s.c1 * (x - s.c2)));
  }
  double operator()(const Linear& l) const { return l.a0 + l.a1 * x; }
  double operator()(const ExpSaturation& e) const {
    return e.a0 * (1.0 - std::exp(-e.a1 * x));
  }
  double operator()(const Constant& c) const { return c.value; }
};

}  // namespace

double eval_scalar(const ScalarFunction& f, double x) {
  return std::visit(Evaluator{x}, f);
}

std::string function_kind(const ScalarFunction& f) {
  struct Namer {
    std::string operator()(const Polynomial&) const { return "polynomial"; }
    std::string operator()(const PowerSublinear&) const { return "power"; }
    std::string operator()(const Sigmoid&) const { return "sigmoid"; }
    std::string operator()(const Linear&) const { return "linear"; }
    std::string operator()(const ExpSaturation&) const {
      return "exp_saturation";
    }
    std::string operator()(const Constant&) const { return "constant"; }
  };
  return std::visit(Namer{}, f);
}

std::vector<double> function_params(const ScalarFunction& f) {
  struct Params {
    std::vector<double> operator()(const Polynomial& p) const {
      return p.coefficients;
    }
    std::vector<double> operator()(const PowerSublinear& p) const {
      return {p.scale, p.exponent};
    }
    std::vector<double> operator()(const Sigmoid& s) const {
      return {s.c0, s.c1, s.c2};
    }
    std::vector<double> operator()(const Linear& l) const {
      return {l.a0, l.a1};
    }
    std::vector<double> operator()(const ExpSaturation& e) const {
      return {e.a0, e.a1};
    }
    std::vector<double> operator()(const Constant& c) const {
      return {c.value};
    }
  };
  return std::visit(Params{}, f);
}

ScalarFunction make_function(const std::string& kind,
                             const std::vector<double>& params) {
  auto need = [&](std::size_t n) {
    if (params.size() != n) {
      throw InputError("function '" + kind + "' expects " + std::to_string(n) +
                       " parameters, got " + std::to_string(params.size()));
    }
  };
  for (double p : params) {
    if (!std::isfinite(p)) {
      throw InputError("function '" + kind + "' has a non-finite parameter");
    }
  }
  if (kind == "polynomial") {
    if (params.empty()) throw InputError("polynomial needs coefficients");
    return Polynomial{params};
  }
  if (kind == "power") {
    need(2);
    return PowerSublinear{params[0], params[1]};
  }
  if (kind == "sigmoid") {
    need(3);
    return Sigmoid{params[0], params[1], params[2]};
  }
  if (kind == "linear") {
    need(2);
    return Linear{params[0], params[1]};
  }
  if (kind == "exp_saturation") {
    need(2);
    return ExpSaturation{params[0], params[1]};
  }
  if (kind == "constant") {
    need(1);
    return Constant{params[0]};
  }
  throw InputError("unknown function kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Validation

std::vector<Violation> validate_graph(const TaskGraph& g) {
  std::vector<Violation> out;
  if (!g.has_node(kSourceId) || g.node(kSourceId).kind != NodeKind::kSource) {
    out.push_back({"source-missing", {kSourceId}, "node 0 must be the source"});
    return out;
  }
  if (!g.predecessors(kSourceId).empty()) {
    out.push_back({"source-incoming",
                   {g.predecessors(kSourceId).begin(),
                    g.predecessors(kSourceId).end()},
                   "node 0 has incoming edges"});
  }
  for (NodeId id : g.node_ids()) {
    const TaskNode& n = g.node(id);
    if (n.kind == NodeKind::kTask) {
      if (!(n.duration >= 0.0) || !std::isfinite(n.duration)) {
        out.push_back({"duration", {id}, "negative or non-finite duration"});
      }
      if (g.predecessors(id).empty()) {
        out.push_back({"orphan", {id},
                       "task " + std::to_string(id) +
                           " has no incoming edge and no edge from node 0"});
      }
    } else {
      if (n.duration != 0.0) {
        out.push_back({"duration", {id}, "source nodes have zero duration"});
      }
      if (!(n.supply >= 0.0 && n.supply <= 1.0 + 1e-12)) {
        out.push_back({"supply", {id}, "source supply outside [0,1]"});
      }
      if (n.kind == NodeKind::kInProgressSource) {
        if (!g.predecessors(id).empty()) {
          out.push_back({"source-incoming", {id},
                         "in-progress source has incoming edges"});
        }
        if (g.successors(id).size() != 1) {
          out.push_back({"in-progress-source", {id},
                         "in-progress source must feed exactly one task"});
        }
      }
    }
  }
  for (const auto& [e, cap] : g.edge_capacities()) {
    if (!(cap > 0.0 && cap <= 1.0)) {
      out.push_back({"capacity", {e.tail, e.head},
                     "capacity of " + edge_str(e) + " outside (0,1]"});
    }
  }
  for (const auto& [key, t] : g.travel_times()) {
    if (key.first == key.second && t != 0.0) {
      out.push_back({"travel-diagonal", {key.first}, "travel time to self"});
    } else if (!(t >= 0.0) || !std::isfinite(t)) {
      out.push_back({"travel-negative", {key.first, key.second},
                     "negative or non-finite travel time"});
    }
  }

  // Cycle detection: whatever Kahn's algorithm cannot schedule lies on or
  // behind a cycle; report the strongly tangled part (nodes left with
  // in-degree > 0 that also reach themselves).
  std::map<NodeId, int> indeg;
  for (NodeId id : g.node_ids()) {
    indeg[id] = static_cast<int>(g.predecessors(id).size());
  }
  std::vector<NodeId> ready;
  for (const auto& [id, d] : indeg) {
    if (d == 0) ready.push_back(id);
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    NodeId v = ready.back();
    ready.pop_back();
    ++seen;
    for (NodeId s : g.successors(v)) {
      if (--indeg[s] == 0) ready.push_back(s);
    }
  }
  if (seen != g.num_nodes()) {
    std::vector<NodeId> stuck;
    for (const auto& [id, d] : indeg) {
      if (d > 0) stuck.push_back(id);
    }
    // Keep only nodes that can reach themselves.
    std::vector<NodeId> cyclic;
    for (NodeId start : stuck) {
      std::set<NodeId> visited;
      std::vector<NodeId> stack(g.successors(start).begin(),
                                g.successors(start).end());
      bool found = false;
      while (!stack.empty() && !found) {
        NodeId v = stack.back();
        stack.pop_back();
        if (v == start) found = true;
        if (!visited.insert(v).second) continue;
        for (NodeId s : g.successors(v)) stack.push_back(s);
      }
      if (found) cyclic.push_back(start);
    }
    out.push_back({"cycle", cyclic, "graph contains a directed cycle"});
  }
  return out;
}

std::vector<Violation> validate_model(const TaskGraph& g,
                                      const RewardModel& rm) {
  std::vector<Violation> out;
  for (NodeId id : g.task_ids()) {
    if (!rm.nodes.contains(id)) {
      out.push_back({"reward-missing", {id},
                     "task " + std::to_string(id) + " has no reward entry"});
    }
  }
  for (const Edge& e : g.edges()) {
    if (!g.is_source(e.tail) && !rm.influence.contains(e)) {
      out.push_back({"influence-missing", {e.tail, e.head},
                     "edge " + edge_str(e) + " has no influence function"});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reward propagation

double combine_reward(const NodeReward& nr, double coalition_value,
                      std::span<const double> influence_values) {
  double r = coalition_value;
  if (!influence_values.empty()) {
    double agg = nr.aggregation == Aggregation::kSum ? 0.0 : 1.0;
    for (double v : influence_values) {
      if (nr.aggregation == Aggregation::kSum) {
        agg += v;
      } else {
        agg *= v;
      }
    }
    switch (nr.combination) {
      case Combination::kSum:
        r = coalition_value + agg;
        break;
      case Combination::kProduct:
        r = coalition_value * agg;
        break;
      case Combination::kMin:
        r = std::min(coalition_value, agg);
        break;
    }
  }
  return std::isnan(r) ? 0.0 : std::max(r, 0.0);
}

CompiledRewards::CompiledRewards(const TaskGraph& g, const RewardModel& rm)
    : order_(topo_order(g)) {
  nodes_.resize(order_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) {
    index_[order_[i]] = static_cast<int>(i);
  }
  for (std::size_t i = 0; i < order_.size(); ++i) {
    const NodeId id = order_[i];
    Node& n = nodes_[i];
    n.is_task = !g.is_source(id);
    if (!n.is_task) continue;
    auto it = rm.nodes.find(id);
    if (it == rm.nodes.end()) {
      throw InputError("task " + std::to_string(id) + " has no reward entry");
    }
    n.reward = it->second;
    for (NodeId p : g.predecessors(id)) {
      if (g.is_source(p)) continue;
      auto inf = rm.influence.find({p, id});
      if (inf == rm.influence.end()) {
        throw InputError("edge " + edge_str({p, id}) +
                         " has no influence function");
      }
      n.in.push_back({index_.at(p), inf->second});
    }
  }
}

int CompiledRewards::index_of(NodeId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

double CompiledRewards::evaluate(std::span<const double> coalition,
                                 std::span<double> rewards) const {
  double total = 0.0;
  std::vector<double> values;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (!n.is_task) {
      rewards[i] = 0.0;
      continue;
    }
    values.clear();
    for (const InEdge& in : n.in) {
      values.push_back(eval_scalar(in.influence, rewards[in.tail]));
    }
    values.insert(values.end(), n.reward.ghost_influence.begin(),
                  n.reward.ghost_influence.end());
    const double rho = eval_scalar(n.reward.coalition, coalition[i]);
    rewards[i] = combine_reward(n.reward, rho, values);
    total += rewards[i];
  }
  return total;
}

RewardVector eval_rewards(const TaskGraph& g, const RewardModel& rm,
                          const std::map<NodeId, double>& coalition_fraction) {
  for (const auto& [id, x] : coalition_fraction) {
    if (!g.has_node(id)) {
      throw InputError("coalition fraction for unknown node " +
                       std::to_string(id));
    }
  }
  CompiledRewards compiled(g, rm);
  std::vector<double> coalition(compiled.size(), 0.0);
  for (std::size_t i = 0; i < compiled.size(); ++i) {
    const NodeId id = compiled.order()[i];
    if (!compiled.is_task(i)) continue;
    auto it = coalition_fraction.find(id);
    if (it == coalition_fraction.end()) {
      throw InputError("no coalition fraction for task " + std::to_string(id));
    }
    coalition[i] = it->second;
  }
  std::vector<double> rewards(compiled.size(), 0.0);
  compiled.evaluate(coalition, rewards);
  RewardVector out;
  for (std::size_t i = 0; i < compiled.size(); ++i) {
    out[compiled.order()[i]] = rewards[i];
  }
  return out;
}

double total_reward(const RewardVector& r) {
  double t = 0.0;
  for (const auto& [id, v] : r) t += v;
  return t;
}

}  // namespace coalflow
