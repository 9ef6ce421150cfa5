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


#include "coalflow/flow_solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "coalflow/errors.hpp"
#include "coalflow/graph_ops.hpp"
#include "flow_model.hpp"

namespace coalflow {

std::string status_name(SolverStatus s) {
  switch (s) {
    case SolverStatus::kConverged:
      return "converged";
    case SolverStatus::kIterationLimit:
      return "iteration-limit";
    case SolverStatus::kInfeasibleInput:
      return "infeasible-input";
  }
  return "unknown";
}

std::map<NodeId, double> coalition_fractions(
    const TaskGraph& g, const std::map<Edge, double>& flow) {
  std::map<NodeId, double> x;
  for (NodeId id : g.task_ids()) x[id] = 0.0;
  for (const auto& [e, f] : flow) {
    if (g.has_edge(e) && !g.is_source(e.head)) x[e.head] += f;
  }
  return x;
}

double flow_objective(const TaskGraph& g, const RewardModel& rm,
                      const std::map<Edge, double>& flow) {
  detail::FlowModel model(g, rm);
  return model.objective(model.to_vector(flow));
}

std::vector<std::string> flow_violations(const TaskGraph& g,
                                         const std::map<Edge, double>& flow,
                                         double eps) {
  std::vector<std::string> out;
  auto fmt = [](Edge e) {
    std::ostringstream os;
    os << "(" << e.tail << "," << e.head << ")";
    return os.str();
  };
  std::map<NodeId, double> in;
  std::map<NodeId, double> outflow;
  for (const auto& [e, f] : flow) {
    if (!g.has_edge(e)) {
      out.push_back("flow on missing edge " + fmt(e));
      continue;
    }
    if (!std::isfinite(f) || f < -eps) {
      out.push_back("negative flow on " + fmt(e));
    }
    if (f > g.capacity(e) + eps) out.push_back("capacity exceeded on " + fmt(e));
    in[e.head] += f;
    outflow[e.tail] += f;
  }
  for (NodeId id : g.node_ids()) {
    const TaskNode& n = g.node(id);
    const double o = outflow[id];
    switch (n.kind) {
      case NodeKind::kSource:
        if (o > n.supply + eps) {
          out.push_back("source " + std::to_string(id) + " emits " +
                        std::to_string(o) + " > supply");
        }
        break;
      case NodeKind::kInProgressSource:
        if (std::abs(o - n.supply) > eps) {
          out.push_back("in-progress source " + std::to_string(id) +
                        " must emit exactly its supply");
        }
        break;
      case NodeKind::kTask:
        if (o > in[id] + eps) {
          out.push_back("task " + std::to_string(id) +
                        " emits more than it receives");
        }
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Continuous solver. Each node's outflow is parametrized by split fractions
// s of its inflow, f = min(c, in * s) with s >= 0 and sum s <= 1, so every
// iterate is feasible and ascent happens inside a product of simplices.

namespace {

using detail::FlowModel;

class SplitProblem {
 public:
  explicit SplitProblem(const FlowModel& m)
      : m_(m), in_(m.num_nodes()), flow_(m.num_edges()) {}

  const FlowModel& model() const { return m_; }

  bool is_free(std::size_t i) const {
    const auto& n = m_.node(i);
    return n.kind != NodeKind::kInProgressSource && n.out_degree > 0;
  }

  void flows(std::span<const double> s, std::span<double> f) const {
    for (std::size_t i = 0; i < m_.num_nodes(); ++i) {
      const auto& n = m_.node(i);
      in_[i] = TaskGraph::is_source_kind(n.kind) ? n.supply : 0.0;
    }
    for (std::size_t i = 0; i < m_.num_nodes(); ++i) {
      const auto& n = m_.node(i);
      for (int e = n.first_edge; e < n.first_edge + n.out_degree; ++e) {
        const auto& fe = m_.edge(e);
        double x = n.kind == NodeKind::kInProgressSource
                       ? n.supply
                       : std::min(fe.capacity, in_[i] * s[e]);
        x = std::max(x, 0.0);
        f[e] = x;
        in_[fe.head] += x;
      }
    }
  }

  double value(std::span<const double> s) const {
    flows(s, flow_);
    return m_.objective(flow_);
  }

  void project(std::span<double> s) const {
    for (std::size_t i = 0; i < m_.num_nodes(); ++i) {
      if (!is_free(i)) continue;
      const auto& n = m_.node(i);
      detail::project_capped_simplex(s.subspan(n.first_edge, n.out_degree), 1.0);
    }
  }

  // Split fractions that reproduce a flow (after capacity clamping).
  std::vector<double> splits_from_flow(std::span<const double> f) const {
    std::vector<double> s(m_.num_edges(), 0.0);
    std::vector<double> in(m_.num_nodes(), 0.0);
    std::vector<double> clamped(f.begin(), f.end());
    for (std::size_t e = 0; e < clamped.size(); ++e) {
      clamped[e] = std::clamp(clamped[e], 0.0, m_.edge(e).capacity);
    }
    m_.inflow(clamped, in);
    for (std::size_t i = 0; i < m_.num_nodes(); ++i) {
      if (!is_free(i)) continue;
      const auto& n = m_.node(i);
      auto si = std::span<double>(s).subspan(n.first_edge, n.out_degree);
      if (in[i] > 1e-12) {
        for (int k = 0; k < n.out_degree; ++k) {
          si[k] = clamped[n.first_edge + k] / in[i];
        }
        const double sum = std::accumulate(si.begin(), si.end(), 0.0);
        if (sum > 1.0) {
          for (double& v : si) v /= sum;
        }
      } else {
        std::fill(si.begin(), si.end(), 1.0 / n.out_degree);
      }
    }
    return s;
  }

 private:
  const FlowModel& m_;
  mutable std::vector<double> in_;
  mutable std::vector<double> flow_;
};

struct AscentResult {
  std::vector<double> s;
  double value = 0.0;
  bool converged = false;
};

AscentResult ascend(const SplitProblem& p, std::vector<double> s,
                    const SolverConfig& cfg) {
  p.project(s);
  const std::size_t n = s.size();
  double cur = p.value(s);
  std::vector<double> grad(n, 0.0);
  std::vector<double> trial(n);
  double step = 0.1;
  bool need_grad = true;
  double gmax = 0.0;
  const double h = cfg.gradient_step;
  for (int it = 0; it < cfg.max_iters; ++it) {
    if (need_grad) {
      gmax = 0.0;
      for (std::size_t i = 0; i < p.model().num_nodes(); ++i) {
        if (!p.is_free(i)) continue;
        const auto& node = p.model().node(i);
        for (int e = node.first_edge; e < node.first_edge + node.out_degree;
             ++e) {
          const double orig = s[e];
          const double lo = std::max(orig - h, 0.0);
          const double hi = orig + h;
          s[e] = hi;
          const double fhi = p.value(s);
          s[e] = lo;
          const double flo = p.value(s);
          s[e] = orig;
          grad[e] = (fhi - flo) / (hi - lo);
          gmax = std::max(gmax, std::abs(grad[e]));
        }
      }
      need_grad = false;
      if (gmax < 1e-12) return {std::move(s), cur, true};
    }
    for (std::size_t e = 0; e < n; ++e) trial[e] = s[e] + step * grad[e] / gmax;
    p.project(trial);
    const double val = p.value(trial);
    if (val > cur + 1e-15) {
      s.swap(trial);
      cur = val;
      step = std::min(step * 1.5, 1.0);
      need_grad = true;
    } else {
      step *= 0.5;
      if (step < cfg.tol) return {std::move(s), cur, true};
    }
  }
  return {std::move(s), cur, false};
}

}  // namespace

FlowSolution solve_offline(const TaskGraph& g, const RewardModel& rm,
                           const Fleet& fleet, double makespan,
                           const SolverConfig& cfg,
                           const std::vector<std::map<Edge, double>>&
                               warm_starts) {
  (void)fleet;  // flows are fleet-size independent fractions
  const PruneResult pruned = prune_graph(g, rm, makespan);
  FlowSolution sol;
  if (pruned.graph.num_tasks() == 0) {
    for (const Edge& e : pruned.graph.edges()) sol.flow[e] = 0.0;
    sol.objective = 0.0;
    sol.status = SolverStatus::kInfeasibleInput;
    return sol;
  }
  const FlowModel model(pruned.graph, pruned.reward);
  const SplitProblem problem(model);
  const std::size_t n = model.num_edges();

  std::vector<std::vector<double>> starts;
  {
    std::vector<double> equal(n, 0.0);
    for (std::size_t i = 0; i < model.num_nodes(); ++i) {
      const auto& node = model.node(i);
      for (int e = node.first_edge; e < node.first_edge + node.out_degree; ++e) {
        equal[e] = 1.0 / node.out_degree;
      }
    }
    starts.push_back(equal);
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int r = 1; r < cfg.restarts; ++r) {
      std::vector<double> s = equal;
      for (std::size_t i = 0; i < model.num_nodes(); ++i) {
        const auto& node = model.node(i);
        if (node.kind != NodeKind::kSource || node.out_degree == 0) continue;
        double sum = 0.0;
        for (int e = node.first_edge; e < node.first_edge + node.out_degree;
             ++e) {
          s[e] = unif(rng);
          sum += s[e];
        }
        for (int e = node.first_edge; e < node.first_edge + node.out_degree;
             ++e) {
          s[e] = sum > 0.0 ? s[e] / sum : 1.0 / node.out_degree;
        }
      }
      starts.push_back(std::move(s));
    }
    for (const auto& w : warm_starts) {
      starts.push_back(problem.splits_from_flow(model.to_vector(w)));
    }
  }

  AscentResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (const auto& s0 : starts) {
    AscentResult r = ascend(problem, s0, cfg);
    if (r.value > best.value) best = std::move(r);
  }
  std::vector<double> f(n, 0.0);
  problem.flows(best.s, f);
  sol.flow = model.to_map(f);
  sol.objective = model.objective(f);
  sol.status =
      best.converged ? SolverStatus::kConverged : SolverStatus::kIterationLimit;
  return sol;
}

// ---------------------------------------------------------------------------
// Rounding.

int source_robots(const TaskGraph& g, NodeId source, const Fleet& fleet) {
  return static_cast<int>(std::lround(g.node(source).supply * fleet.size));
}

namespace {

// |x - t| as a convex function of integer x >= 0.
double abs_err(int x, double t) { return std::abs(static_cast<double>(x) - t); }

struct NodeFlows {
  std::map<NodeId, double> in;
  std::map<NodeId, double> out;
};

NodeFlows node_flows(const TaskGraph& g, const std::map<Edge, double>& flow) {
  NodeFlows nf;
  for (const auto& [e, x] : flow) {
    if (!g.has_edge(e)) continue;
    nf.in[e.head] += x;
    nf.out[e.tail] += x;
  }
  return nf;
}

// Target number of robots left over at a node with outgoing edges.
double leftover_target(const TaskGraph& g, NodeId id, const NodeFlows& nf,
                       const Fleet& fleet) {
  const double n = fleet.size;
  const TaskNode& node = g.node(id);
  double avail = 0.0;
  if (node.kind == NodeKind::kTask) {
    avail = nf.in.contains(id) ? nf.in.at(id) * n : 0.0;
  } else {
    avail = source_robots(g, id, fleet);
  }
  const double out = nf.out.contains(id) ? nf.out.at(id) * n : 0.0;
  return std::max(avail - out, 0.0);
}

// Costs are exact integers: a fixed-point primary cost scaled by a radix
// larger than any tie rank, so tie ranks only decide among exact equals and
// the residual graph can never pick up rounding-induced negative cycles.
using Cost = long long;
constexpr double kCostScale = 1e9;

class MinCostFlow {
 public:
  MinCostFlow(int n, Cost radix) : adj_(n), radix_(radix) {}

  Cost cost(double primary, int rank) const {
    return std::llround(primary * kCostScale) * radix_ + rank;
  }

  int add_arc(int from, int to, int cap, Cost cost) {
    const int id = static_cast<int>(arcs_.size());
    arcs_.push_back({to, cap, cost});
    adj_[from].push_back(id);
    arcs_.push_back({from, 0, -cost});
    adj_[to].push_back(id + 1);
    return id;
  }

  // Successive shortest paths with Bellman-Ford (costs may be negative).
  void run(int s, int t) {
    const int n = static_cast<int>(adj_.size());
    constexpr Cost kInf = std::numeric_limits<Cost>::max();
    for (;;) {
      std::vector<Cost> dist(n, kInf);
      std::vector<int> via(n, -1);
      std::vector<bool> queued(n, false);
      std::deque<int> queue{s};
      dist[s] = 0;
      queued[s] = true;
      while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        queued[u] = false;
        for (int a : adj_[u]) {
          const Arc& arc = arcs_[a];
          if (arc.cap <= 0) continue;
          const Cost nd = dist[u] + arc.cost;
          if (nd < dist[arc.to]) {
            dist[arc.to] = nd;
            via[arc.to] = a;
            if (!queued[arc.to]) {
              queued[arc.to] = true;
              queue.push_back(arc.to);
            }
          }
        }
      }
      if (via[t] < 0) return;
      int push = std::numeric_limits<int>::max();
      for (int v = t; v != s; v = arcs_[via[v] ^ 1].to) {
        push = std::min(push, arcs_[via[v]].cap);
      }
      for (int v = t; v != s; v = arcs_[via[v] ^ 1].to) {
        arcs_[via[v]].cap -= push;
        arcs_[via[v] ^ 1].cap += push;
      }
    }
  }

  int flow_on(int arc) const { return arcs_[arc ^ 1].cap; }

 private:
  struct Arc {
    int to;
    int cap;
    Cost cost;
  };
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> adj_;
  Cost radix_;
};

// Adds the convex piecewise-linear cost |x - target| (per unit) for integers
// 0..cap and returns the arc ids. tie is added to every unit.
std::vector<int> add_abs_arcs(MinCostFlow& mcf, int from, int to, int cap,
                              double target, int tie) {
  std::vector<int> ids;
  if (cap <= 0) return ids;
  target = std::max(target, 0.0);
  const int below = std::min(cap, static_cast<int>(std::floor(target)));
  if (below > 0) ids.push_back(mcf.add_arc(from, to, below, mcf.cost(-1.0, tie)));
  int rest = cap - below;
  if (rest > 0) {
    const double frac = target - std::floor(target);
    if (below == static_cast<int>(std::floor(target)) && frac > 0.0) {
      ids.push_back(mcf.add_arc(from, to, 1, mcf.cost(1.0 - 2.0 * frac, tie)));
      --rest;
    }
    if (rest > 0) ids.push_back(mcf.add_arc(from, to, rest, mcf.cost(1.0, tie)));
  }
  return ids;
}

int edge_cap(const TaskGraph& g, Edge e, const Fleet& fleet) {
  return std::min(fleet.size, static_cast<int>(std::floor(
                                  g.capacity(e) * fleet.size + 1e-9)));
}

}  // namespace

double rounding_edge_error(const TaskGraph& g,
                           const std::map<Edge, double>& flow,
                           const IntegerAllocation& alloc,
                           const Fleet& fleet) {
  double err = 0.0;
  for (const Edge& e : g.edges()) {
    const double t = flow.contains(e) ? flow.at(e) * fleet.size : 0.0;
    const int x = alloc.robots_on_edge.contains(e) ? alloc.robots_on_edge.at(e)
                                                   : 0;
    err += abs_err(x, t);
  }
  return err;
}

double rounding_cost(const TaskGraph& g, const std::map<Edge, double>& flow,
                     const IntegerAllocation& alloc, const Fleet& fleet) {
  double cost = rounding_edge_error(g, flow, alloc, fleet);
  const NodeFlows nf = node_flows(g, flow);
  std::map<NodeId, int> in;
  std::map<NodeId, int> out;
  for (const auto& [e, x] : alloc.robots_on_edge) {
    in[e.head] += x;
    out[e.tail] += x;
  }
  for (NodeId id : g.node_ids()) {
    const TaskNode& node = g.node(id);
    if (g.successors(id).empty() ||
        node.kind == NodeKind::kInProgressSource) {
      continue;
    }
    const int avail = node.kind == NodeKind::kTask
                          ? in[id]
                          : source_robots(g, id, fleet);
    cost += abs_err(avail - out[id], leftover_target(g, id, nf, fleet));
  }
  return cost;
}

std::vector<std::string> allocation_violations(const TaskGraph& g,
                                               const IntegerAllocation& alloc,
                                               const Fleet& fleet) {
  std::vector<std::string> v;
  std::map<NodeId, int> in;
  std::map<NodeId, int> out;
  for (const auto& [e, x] : alloc.robots_on_edge) {
    if (!g.has_edge(e)) {
      v.push_back("robots on missing edge");
      continue;
    }
    if (x < 0) v.push_back("negative robot count");
    if (x > edge_cap(g, e, fleet)) v.push_back("edge capacity exceeded");
    in[e.head] += x;
    out[e.tail] += x;
  }
  for (NodeId id : g.node_ids()) {
    const TaskNode& node = g.node(id);
    switch (node.kind) {
      case NodeKind::kSource:
        if (out[id] > source_robots(g, id, fleet)) {
          v.push_back("source emits more robots than it holds");
        }
        break;
      case NodeKind::kInProgressSource:
        if (out[id] != source_robots(g, id, fleet)) {
          v.push_back("in-progress source must emit its whole coalition");
        }
        break;
      case NodeKind::kTask: {
        if (out[id] > in[id]) v.push_back("task emits more than it receives");
        auto it = alloc.coalition_size.find(id);
        const int c = it == alloc.coalition_size.end() ? 0 : it->second;
        if (c != in[id]) v.push_back("coalition size differs from inflow");
        break;
      }
    }
  }
  return v;
}

IntegerAllocation round_flows(const TaskGraph& g, const FlowSolution& f,
                              const Fleet& fleet) {
  const std::vector<NodeId> ids = g.node_ids();
  std::map<NodeId, int> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = int(i);
  const int super = static_cast<int>(ids.size());
  const int sink = super + 1;
  const std::vector<Edge> edges = g.edges();
  // Tie ranks follow (tail, head); drop arcs rank last.
  MinCostFlow mcf(sink + 1, static_cast<Cost>(edges.size()) + 2);
  const NodeFlows nf = node_flows(g, f.flow);

  std::map<Edge, std::vector<int>> arcs;
  for (std::size_t r = 0; r < edges.size(); ++r) {
    const Edge e = edges[r];
    const double t = f.flow.contains(e) ? f.flow.at(e) * fleet.size : 0.0;
    arcs[e] = add_abs_arcs(mcf, index[e.tail], index[e.head],
                           edge_cap(g, e, fleet), t, static_cast<int>(r) + 1);
  }
  const int drop_tie = static_cast<int>(edges.size()) + 1;
  int total = 0;
  for (NodeId id : ids) {
    const TaskNode& node = g.node(id);
    const int v = index[id];
    if (node.kind == NodeKind::kInProgressSource) {
      const int c = source_robots(g, id, fleet);
      // Forced: far above any saving from leaving these robots idle.
      mcf.add_arc(super, v, c, mcf.cost(-1e4, 0));
      total += c;
      continue;
    }
    if (node.kind == NodeKind::kSource) {
      const int c = source_robots(g, id, fleet);
      mcf.add_arc(super, v, c, 0);
      total += c;
    }
    const int cap = fleet.size * 2 + total;
    if (g.successors(id).empty()) {
      mcf.add_arc(v, sink, cap, mcf.cost(0.0, drop_tie));
    } else {
      add_abs_arcs(mcf, v, sink, cap, leftover_target(g, id, nf, fleet),
                   drop_tie);
    }
  }
  mcf.run(super, sink);

  IntegerAllocation alloc;
  for (NodeId id : g.task_ids()) alloc.coalition_size[id] = 0;
  for (const auto& [e, ids_e] : arcs) {
    int x = 0;
    for (int a : ids_e) x += mcf.flow_on(a);
    alloc.robots_on_edge[e] = x;
    if (!g.is_source(e.head)) alloc.coalition_size[e.head] += x;
  }
  (void)total;
  return alloc;
}

// ---------------------------------------------------------------------------
// Schedules.

Schedule extract_schedule(const TaskGraph& g, const IntegerAllocation& alloc,
                          const Fleet& fleet, const DispatchState* dispatch) {
  std::vector<RobotState> robots;
  if (dispatch != nullptr) {
    robots = dispatch->robots;
  } else {
    for (int r = 0; r < fleet.size; ++r) robots.push_back({r, kSourceId, 0.0,
                                                           kSourceId});
  }
  std::sort(robots.begin(), robots.end(),
            [](const RobotState& a, const RobotState& b) {
              return a.source != b.source ? a.source < b.source : a.id < b.id;
            });
  int max_id = fleet.size - 1;
  for (const auto& r : robots) max_id = std::max(max_id, r.id);

  Schedule sch;
  sch.robot_tasks.assign(static_cast<std::size_t>(max_id + 1), {});
  std::map<Edge, int> left = alloc.robots_on_edge;
  for (const RobotState& r : robots) {
    if (!g.has_node(r.source)) continue;
    NodeId cur = r.source;
    for (;;) {
      NodeId next = -1;
      for (NodeId s : g.successors(cur)) {
        auto it = left.find({cur, s});
        if (it != left.end() && it->second > 0) {
          next = s;
          break;
        }
      }
      if (next < 0) break;
      --left[{cur, next}];
      sch.robot_tasks[r.id].push_back(next);
      cur = next;
    }
  }
  for (const auto& [e, x] : left) {
    if (x != 0) {
      throw StateError("integer flow does not decompose into robot paths");
    }
  }

  // Arrival of each robot at each of its tasks depends only on earlier tasks
  // in topological order, so one pass suffices.
  std::map<NodeId, std::vector<std::pair<int, int>>> visits;  // robot, pos
  for (const RobotState& r : robots) {
    const auto& path = sch.robot_tasks[r.id];
    for (std::size_t k = 0; k < path.size(); ++k) {
      visits[path[k]].push_back({r.id, static_cast<int>(k)});
    }
  }
  std::map<int, const RobotState*> by_id;
  for (const RobotState& r : robots) by_id[r.id] = &r;
  const double now = dispatch != nullptr ? dispatch->now : 0.0;
  for (NodeId j : topo_order(g)) {
    auto vit = visits.find(j);
    if (vit == visits.end() || g.is_source(j)) continue;
    double start = now;
    for (const auto& [rid, pos] : vit->second) {
      const RobotState& r = *by_id.at(rid);
      double arrive = 0.0;
      if (pos > 0) {
        const NodeId prev = sch.robot_tasks[rid][pos - 1];
        arrive = sch.finish.at(prev) + g.travel_time(prev, j);
      } else if (g.node(r.source).kind == NodeKind::kInProgressSource) {
        arrive = now;
      } else if (dispatch != nullptr && dispatch->travel) {
        arrive = std::max(now, r.ready + dispatch->travel(r.location, j));
      } else {
        arrive = now + g.travel_time(r.source, j);
      }
      start = std::max(start, arrive);
    }
    for (NodeId p : g.predecessors(j)) {
      auto fit = sch.finish.find(p);
      if (fit != sch.finish.end()) start = std::max(start, fit->second);
    }
    sch.start[j] = start;
    sch.finish[j] = start + g.node(j).duration;
  }
  return sch;
}

}  // namespace coalflow
