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

#include <compare>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace coalflow {

using NodeId = int;

// Node 0 is the virtual source that all free robots leave from.
inline constexpr NodeId kSourceId = 0;

struct Edge {
  NodeId tail = 0;
  NodeId head = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class NodeKind {
  kSource,            // node 0, holds the free robots
  kInProgressSource,  // anchors a coalition executing a task (online only)
  kTask,
};

struct TaskNode {
  NodeId id = 0;
  double duration = 0.0;  // seconds
  std::string label;
  NodeKind kind = NodeKind::kTask;
  // Fraction of the fleet available at a source node. Unused for tasks.
  double supply = 0.0;
  friend bool operator==(const TaskNode&, const TaskNode&) = default;
};

// Directed acyclic task graph. Mutators exist for construction and for the
// online graph surgery; all solver entry points take it by const reference.
class TaskGraph {
 public:
  // Creates a graph holding only the source node with supply 1.
  TaskGraph();

  void add_node(TaskNode node);
  void add_task(NodeId id, double duration, std::string label = {});
  // Removes the node, its incident edges and its travel-time entries.
  void remove_node(NodeId id);

  void add_edge(Edge e, double capacity = 1.0);
  void remove_edge(Edge e);
  void set_capacity(Edge e, double capacity);

  void set_travel_time(NodeId from, NodeId to, double seconds);
  // 0 when from == to or when no entry was set.
  double travel_time(NodeId from, NodeId to) const;
  bool has_travel_time(NodeId from, NodeId to) const;
  const std::map<std::pair<NodeId, NodeId>, double>& travel_times() const {
    return travel_;
  }

  bool has_node(NodeId id) const { return nodes_.contains(id); }
  bool has_edge(Edge e) const { return edges_.contains(e); }
  const TaskNode& node(NodeId id) const;
  TaskNode& mutable_node(NodeId id);
  double capacity(Edge e) const;

  // All ids in ascending order.
  std::vector<NodeId> node_ids() const;
  // Ids of kTask nodes in ascending order.
  std::vector<NodeId> task_ids() const;
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_tasks() const;
  std::size_t num_edges() const { return edges_.size(); }

  // Edges sorted by (tail, head).
  std::vector<Edge> edges() const;
  const std::map<Edge, double>& edge_capacities() const { return edges_; }

  const std::set<NodeId>& successors(NodeId id) const;
  const std::set<NodeId>& predecessors(NodeId id) const;

  static bool is_source_kind(NodeKind kind) { return kind != NodeKind::kTask; }
  bool is_source(NodeId id) const { return is_source_kind(node(id).kind); }

  friend bool operator==(const TaskGraph&, const TaskGraph&) = default;

 private:
  std::map<NodeId, TaskNode> nodes_;
  std::map<Edge, double> edges_;
  std::map<NodeId, std::set<NodeId>> out_;
  std::map<NodeId, std::set<NodeId>> in_;
  std::map<std::pair<NodeId, NodeId>, double> travel_;
};

// ---------------------------------------------------------------------------
// Scalar function catalog.

struct Polynomial {
  std::vector<double> coefficients;  // lowest degree first
  friend bool operator==(const Polynomial&, const Polynomial&) = default;
};
struct PowerSublinear {
  double scale = 1.0;
  double exponent = 0.5;  // in (0, 1)
  friend bool operator==(const PowerSublinear&, const PowerSublinear&) = default;
};
struct Sigmoid {
  double c0 = 1.0;  // maximum value
  double c1 = 1.0;  // slope
  double c2 = 0.0;  // step position
  friend bool operator==(const Sigmoid&, const Sigmoid&) = default;
};
struct Linear {
  double a0 = 0.0;
  double a1 = 1.0;
  friend bool operator==(const Linear&, const Linear&) = default;
};
struct ExpSaturation {
  double a0 = 1.0;
  double a1 = 1.0;
  friend bool operator==(const ExpSaturation&, const ExpSaturation&) = default;
};
struct Constant {
  double value = 0.0;
  friend bool operator==(const Constant&, const Constant&) = default;
};

using ScalarFunction =
    std::variant<Polynomial, PowerSublinear, Sigmoid, Linear, ExpSaturation,
                 Constant>;

double eval_scalar(const ScalarFunction& f, double x);

// Catalog name used in mission files ("polynomial", "sigmoid", ...).
std::string function_kind(const ScalarFunction& f);
// Flat parameter list in the same order as the mission-file descriptor.
std::vector<double> function_params(const ScalarFunction& f);
// Inverse of function_kind/function_params. Throws InputError.
ScalarFunction make_function(const std::string& kind,
                             const std::vector<double>& params);

// ---------------------------------------------------------------------------
// Reward model.

enum class Aggregation { kSum, kProduct };
enum class Combination { kSum, kProduct, kMin };

struct NodeReward {
  ScalarFunction coalition = Linear{0.0, 1.0};
  Aggregation aggregation = Aggregation::kSum;
  Combination combination = Combination::kProduct;
  // Influence values frozen from observed upstream rewards (online solver).
  std::vector<double> ghost_influence;
  friend bool operator==(const NodeReward&, const NodeReward&) = default;
};

struct RewardModel {
  std::map<NodeId, NodeReward> nodes;
  // One entry per edge whose tail is a real task.
  std::map<Edge, ScalarFunction> influence;
  friend bool operator==(const RewardModel&, const RewardModel&) = default;
};

using RewardVector = std::map<NodeId, double>;

struct Fleet {
  int size = 1;
};

struct Mission {
  TaskGraph graph;
  RewardModel reward;
  Fleet fleet;
  double makespan = 0.0;
};

// ---------------------------------------------------------------------------
// Validation.

struct Violation {
  std::string rule;  // "cycle", "orphan", "source-incoming", ...
  std::vector<NodeId> nodes;
  std::string message;
};

std::vector<Violation> validate_graph(const TaskGraph& g);
// Checks that every task has a reward entry and every task-tailed edge an
// influence entry.
std::vector<Violation> validate_model(const TaskGraph& g,
                                      const RewardModel& rm);

// ---------------------------------------------------------------------------
// Reward propagation.

// Combines the coalition value with the aggregated influence values. An empty
// influence set is neutral: the result is the coalition value. Clamped at 0.
double combine_reward(const NodeReward& nr, double coalition_value,
                      std::span<const double> influence_values);

// Flattened evaluator for repeated evaluation inside solvers. Nodes are held
// in topological order; index i refers to order()[i].
class CompiledRewards {
 public:
  CompiledRewards(const TaskGraph& g, const RewardModel& rm);

  const std::vector<NodeId>& order() const { return order_; }
  std::size_t size() const { return order_.size(); }
  // -1 when the node is not in the graph.
  int index_of(NodeId id) const;
  bool is_task(std::size_t index) const { return nodes_[index].is_task; }

  // coalition[i] is the coalition fraction of order()[i]. Writes each node's
  // reward into rewards (sources get 0) and returns the sum over tasks.
  double evaluate(std::span<const double> coalition,
                  std::span<double> rewards) const;

 private:
  struct InEdge {
    int tail;
    ScalarFunction influence;
  };
  struct Node {
    bool is_task = false;
    NodeReward reward;
    std::vector<InEdge> in;
  };
  std::vector<NodeId> order_;
  std::map<NodeId, int> index_;
  std::vector<Node> nodes_;
};

// Reward of every node given a coalition fraction for every task. Throws
// InputError on missing entries or unknown ids.
RewardVector eval_rewards(const TaskGraph& g, const RewardModel& rm,
                          const std::map<NodeId, double>& coalition_fraction);

double total_reward(const RewardVector& r);

}  // namespace coalflow
