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


#include "coalflow/mission_io.hpp"

#include <fstream>
#include <sstream>

#include "coalflow/errors.hpp"

namespace coalflow {

namespace {

template <typename T>
T get(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(where + ": missing key '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InputError(where + "." + key + ": " + e.what());
  }
}

std::string kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::kSource:
      return "source";
    case NodeKind::kInProgressSource:
      return "in_progress_source";
    case NodeKind::kTask:
      return "task";
  }
  return "task";
}

NodeKind parse_kind(const std::string& s, const std::string& where) {
  if (s == "source") return NodeKind::kSource;
  if (s == "in_progress_source") return NodeKind::kInProgressSource;
  if (s == "task") return NodeKind::kTask;
  throw InputError(where + ": unknown node kind '" + s + "'");
}

std::string aggregation_name(Aggregation a) {
  return a == Aggregation::kSum ? "sum" : "product";
}

Aggregation parse_aggregation(const std::string& s, const std::string& where) {
  if (s == "sum") return Aggregation::kSum;
  if (s == "product") return Aggregation::kProduct;
  throw InputError(where + ": unknown aggregation '" + s + "'");
}

std::string combination_name(Combination c) {
  switch (c) {
    case Combination::kSum:
      return "sum";
    case Combination::kProduct:
      return "product";
    case Combination::kMin:
      return "min";
  }
  return "product";
}

Combination parse_combination(const std::string& s, const std::string& where) {
  if (s == "sum") return Combination::kSum;
  if (s == "product") return Combination::kProduct;
  if (s == "min") return Combination::kMin;
  throw InputError(where + ": unknown combination '" + s + "'");
}

}  // namespace

Json function_to_json(const ScalarFunction& f) {
  return Json{{"kind", function_kind(f)}, {"params", function_params(f)}};
}

ScalarFunction function_from_json(const Json& j) {
  const auto kind = get<std::string>(j, "kind", "function");
  const auto params = get<std::vector<double>>(j, "params", "function");
  return make_function(kind, params);
}

Json mission_to_json(const Mission& m) {
  const TaskGraph& g = m.graph;
  Json nodes = Json::array();
  for (NodeId id : g.node_ids()) {
    const TaskNode& n = g.node(id);
    Json jn{{"id", id}, {"duration", n.duration}, {"label", n.label}};
    if (n.kind != NodeKind::kTask) {
      jn["kind"] = kind_name(n.kind);
      jn["supply"] = n.supply;
    }
    nodes.push_back(std::move(jn));
  }
  Json edges = Json::array();
  for (const auto& [e, cap] : g.edge_capacities()) {
    Json je{{"tail", e.tail}, {"head", e.head}, {"capacity", cap}};
    auto it = m.reward.influence.find(e);
    if (it != m.reward.influence.end()) {
      je["influence"] = function_to_json(it->second);
    }
    edges.push_back(std::move(je));
  }
  Json reward = Json::array();
  for (const auto& [id, nr] : m.reward.nodes) {
    Json jr{{"node", id},
            {"coalition", function_to_json(nr.coalition)},
            {"aggregation", aggregation_name(nr.aggregation)},
            {"combination", combination_name(nr.combination)}};
    if (!nr.ghost_influence.empty()) jr["ghost_influence"] = nr.ghost_influence;
    reward.push_back(std::move(jr));
  }
  Json travel = Json::array();
  for (const auto& [key, t] : g.travel_times()) {
    travel.push_back({{"from", key.first}, {"to", key.second}, {"time", t}});
  }
  return Json{{"nodes", nodes},         {"edges", edges},
              {"reward", reward},       {"travel_time", travel},
              {"fleet_size", m.fleet.size}, {"makespan", m.makespan}};
}

Mission mission_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("mission: expected a JSON object");
  Mission m;
  TaskGraph& g = m.graph;

  const Json& nodes = j.contains("nodes") ? j.at("nodes") : Json();
  if (!nodes.is_array()) throw InputError("mission.nodes: expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "mission.nodes[" + std::to_string(i) + "]";
    const Json& jn = nodes[i];
    TaskNode n;
    n.id = get<int>(jn, "id", where);
    n.duration = jn.contains("duration") ? get<double>(jn, "duration", where)
                                         : 0.0;
    n.label = jn.contains("label") ? get<std::string>(jn, "label", where) : "";
    n.kind = jn.contains("kind")
                 ? parse_kind(get<std::string>(jn, "kind", where), where)
                 : (n.id == kSourceId ? NodeKind::kSource : NodeKind::kTask);
    if (n.id == kSourceId && n.kind != NodeKind::kSource) {
      throw InputError(where + ": node 0 must be the source");
    }
    n.supply = jn.contains("supply")
                   ? get<double>(jn, "supply", where)
                   : (n.kind == NodeKind::kSource ? 1.0 : 0.0);
    if (n.id < 0) throw InputError(where + ": negative node id");
    if (n.id != kSourceId && g.has_node(n.id)) {
      throw InputError(where + ": duplicate node id " + std::to_string(n.id));
    }
    g.add_node(n);
  }

  const Json& edges = j.contains("edges") ? j.at("edges") : Json::array();
  if (!edges.is_array()) throw InputError("mission.edges: expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "mission.edges[" + std::to_string(i) + "]";
    const Json& je = edges[i];
    const Edge e{get<int>(je, "tail", where), get<int>(je, "head", where)};
    const double cap =
        je.contains("capacity") ? get<double>(je, "capacity", where) : 1.0;
    if (g.has_edge(e)) throw InputError(where + ": duplicate edge");
    g.add_edge(e, cap);
    if (je.contains("influence") && !je.at("influence").is_null()) {
      m.reward.influence[e] = function_from_json(je.at("influence"));
    }
  }

  const Json& reward = j.contains("reward") ? j.at("reward") : Json::array();
  if (!reward.is_array()) throw InputError("mission.reward: expected an array");
  for (std::size_t i = 0; i < reward.size(); ++i) {
    const std::string where = "mission.reward[" + std::to_string(i) + "]";
    const Json& jr = reward[i];
    const NodeId id = get<int>(jr, "node", where);
    if (!g.has_node(id) || g.is_source(id)) {
      throw InputError(where + ": reward for unknown task " +
                       std::to_string(id));
    }
    NodeReward nr;
    nr.coalition = function_from_json(jr.at("coalition"));
    nr.aggregation = jr.contains("aggregation")
                         ? parse_aggregation(
                               get<std::string>(jr, "aggregation", where), where)
                         : Aggregation::kSum;
    nr.combination = jr.contains("combination")
                         ? parse_combination(
                               get<std::string>(jr, "combination", where), where)
                         : Combination::kProduct;
    if (jr.contains("ghost_influence")) {
      nr.ghost_influence =
          get<std::vector<double>>(jr, "ghost_influence", where);
    }
    if (m.reward.nodes.contains(id)) {
      throw InputError(where + ": duplicate reward entry");
    }
    m.reward.nodes[id] = std::move(nr);
  }

  if (j.contains("travel_time")) {
    const Json& tt = j.at("travel_time");
    const Json* matrix = nullptr;
    if (tt.is_object() && tt.contains("matrix")) matrix = &tt.at("matrix");
    if (tt.is_array() && !tt.empty() && tt.front().is_array()) matrix = &tt;
    if (matrix != nullptr) {
      const std::vector<NodeId> ids = g.node_ids();
      const auto rows = matrix->get<std::vector<std::vector<double>>>();
      if (rows.size() != ids.size()) {
        throw InputError("mission.travel_time: matrix must have one row per "
                         "node");
      }
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != ids.size()) {
          throw InputError("mission.travel_time: ragged matrix row " +
                           std::to_string(r));
        }
        for (std::size_t c = 0; c < ids.size(); ++c) {
          g.set_travel_time(ids[r], ids[c], rows[r][c]);
        }
      }
    } else if (tt.is_array()) {
      for (std::size_t i = 0; i < tt.size(); ++i) {
        const std::string where =
            "mission.travel_time[" + std::to_string(i) + "]";
        const NodeId from = get<int>(tt[i], "from", where);
        const NodeId to = get<int>(tt[i], "to", where);
        if (!g.has_node(from) || !g.has_node(to)) {
          throw InputError(where + ": unknown node");
        }
        g.set_travel_time(from, to, get<double>(tt[i], "time", where));
      }
    } else {
      throw InputError("mission.travel_time: expected a matrix or a list");
    }
  }

  m.fleet.size = get<int>(j, "fleet_size", "mission");
  m.makespan = get<double>(j, "makespan", "mission");
  if (m.fleet.size < 1) throw InputError("mission.fleet_size must be >= 1");
  if (!(m.makespan >= 0.0)) throw InputError("mission.makespan must be >= 0");

  std::vector<Violation> v = validate_graph(g);
  const std::vector<Violation> vm = validate_model(g, m.reward);
  v.insert(v.end(), vm.begin(), vm.end());
  if (!v.empty()) {
    std::ostringstream os;
    os << "invalid mission:";
    for (const auto& x : v) os << " [" << x.rule << "] " << x.message << ";";
    throw InputError(os.str());
  }
  return m;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("write failed for " + path);
}

Mission load_mission(const std::string& path) {
  return mission_from_json(read_json_file(path));
}

void save_mission(const Mission& m, const std::string& path) {
  write_text_file(path, mission_to_json(m).dump(2) + "\n");
}

Json flow_to_json(const FlowSolution& f) {
  Json edges = Json::array();
  for (const auto& [e, x] : f.flow) {
    edges.push_back({{"tail", e.tail}, {"head", e.head}, {"flow", x}});
  }
  return Json{{"flow", edges},
              {"objective", f.objective},
              {"status", status_name(f.status)}};
}

FlowSolution flow_from_json(const Json& j) {
  FlowSolution f;
  for (const Json& je : j.at("flow")) {
    f.flow[{je.at("tail").get<int>(), je.at("head").get<int>()}] =
        je.at("flow").get<double>();
  }
  f.objective = j.at("objective").get<double>();
  const auto s = j.at("status").get<std::string>();
  if (s == "converged") {
    f.status = SolverStatus::kConverged;
  } else if (s == "iteration-limit") {
    f.status = SolverStatus::kIterationLimit;
  } else if (s == "infeasible-input") {
    f.status = SolverStatus::kInfeasibleInput;
  } else {
    throw InputError("unknown solver status '" + s + "'");
  }
  return f;
}

Json allocation_to_json(const IntegerAllocation& a) {
  Json edges = Json::array();
  for (const auto& [e, x] : a.robots_on_edge) {
    edges.push_back({{"tail", e.tail}, {"head", e.head}, {"robots", x}});
  }
  Json sizes = Json::array();
  for (const auto& [id, c] : a.coalition_size) {
    sizes.push_back({{"node", id}, {"robots", c}});
  }
  return Json{{"robots_on_edge", edges}, {"coalition_size", sizes}};
}

IntegerAllocation allocation_from_json(const Json& j) {
  IntegerAllocation a;
  for (const Json& je : j.at("robots_on_edge")) {
    a.robots_on_edge[{je.at("tail").get<int>(), je.at("head").get<int>()}] =
        je.at("robots").get<int>();
  }
  for (const Json& jc : j.at("coalition_size")) {
    a.coalition_size[jc.at("node").get<int>()] = jc.at("robots").get<int>();
  }
  return a;
}

Json schedule_to_json(const Schedule& s) {
  Json robots = Json::array();
  for (std::size_t r = 0; r < s.robot_tasks.size(); ++r) {
    robots.push_back({{"robot", r}, {"tasks", s.robot_tasks[r]}});
  }
  Json tasks = Json::array();
  for (const auto& [id, t] : s.start) {
    tasks.push_back({{"node", id}, {"start", t}, {"finish", s.finish.at(id)}});
  }
  return Json{{"robots", robots}, {"tasks", tasks}};
}

}  // namespace coalflow
