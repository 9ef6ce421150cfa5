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


#include "coalflow/testbed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "coalflow/errors.hpp"

namespace coalflow {

std::string preset_name(Preset p) {
  switch (p) {
    case Preset::kRandom:
      return "random";
    case Preset::kCoverage:
      return "coverage";
    case Preset::kExploration:
      return "exploration";
    case Preset::kTransport:
      return "transport";
    case Preset::kCarry:
      return "carry";
    case Preset::kMixed:
      return "mixed";
  }
  return "random";
}

Preset parse_preset(const std::string& s) {
  for (Preset p : {Preset::kRandom, Preset::kCoverage, Preset::kExploration,
                   Preset::kTransport, Preset::kCarry, Preset::kMixed}) {
    if (preset_name(p) == s) return p;
  }
  throw InputError("unknown preset '" + s + "'");
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  auto split = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return split(a ^ split(b + 0x632be59bd9b4e019ULL));
}

void validate_config(const GeneratorConfig& c) {
  auto fail = [](const std::string& m) { throw InputError(m); };
  if (c.num_tasks < 1) fail("num_tasks must be >= 1");
  if (c.fleet_size < 1) fail("fleet_size must be >= 1");
  if (!(c.makespan_fraction > 0.0)) fail("makespan_fraction must be > 0");
  if (!(c.edge_density >= 0.0 && c.edge_density <= 1.0)) {
    fail("edge_density must lie in [0,1]");
  }
  if (c.layers < 0) fail("layers must be >= 0");
  if (c.weight_polynomial < 0 || c.weight_power < 0 || c.weight_sigmoid < 0 ||
      c.weight_polynomial + c.weight_power + c.weight_sigmoid <= 0) {
    fail("catalog weights must be non-negative and not all zero");
  }
  if (!(c.duration_min >= 0.0 && c.duration_max >= c.duration_min)) {
    fail("duration range must be non-negative and ordered");
  }
  if (!(c.travel_min >= 0.0 && c.travel_max >= c.travel_min)) {
    fail("travel range must be non-negative and ordered");
  }
}

namespace {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  bool coin(double p) { return uniform(0.0, 1.0) < p; }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

enum class Family { kPolynomial, kPower, kSigmoid };

Family pick_family(Sampler& s, const GeneratorConfig& c) {
  const double total = c.weight_polynomial + c.weight_power + c.weight_sigmoid;
  const double u = s.uniform(0.0, total);
  if (u < c.weight_polynomial) return Family::kPolynomial;
  if (u < c.weight_polynomial + c.weight_power) return Family::kPower;
  return Family::kSigmoid;
}

// Coalition functions take a fraction in [0,1] and vanish at 0 (except for
// the small sigmoid tail).
ScalarFunction sample_coalition(Sampler& s, Family f) {
  const double peak = s.uniform(0.5, 1.5);
  switch (f) {
    case Family::kPolynomial: {
      const int degree = s.integer(1, 3);
      std::vector<double> c(degree + 1, 0.0);
      double sum = 0.0;
      for (int k = 1; k <= degree; ++k) {
        c[k] = s.uniform(0.05, 1.0);
        sum += c[k];
      }
      for (int k = 1; k <= degree; ++k) c[k] *= peak / sum;
      return Polynomial{c};
    }
    case Family::kPower:
      return PowerSublinear{peak, s.uniform(0.2, 0.8)};
    case Family::kSigmoid:
      return Sigmoid{peak, s.uniform(5.0, 15.0), s.uniform(0.1, 0.6)};
  }
  return Linear{0.0, 1.0};
}

// Influence functions take an upstream reward, typically O(1). They are
// divided by the in-degree so that Sum aggregation stays bounded.
ScalarFunction sample_influence(Sampler& s, Family f, int in_degree) {
  const double k = 1.0 / std::max(in_degree, 1);
  switch (f) {
    case Family::kPolynomial: {
      const int degree = s.integer(1, 3);
      std::vector<double> c(degree + 1, 0.0);
      c[1] = s.uniform(0.5, 1.5) * k;
      if (degree >= 2) c[2] = s.uniform(0.0, 0.3) * k;
      if (degree >= 3) c[3] = s.uniform(0.0, 0.05) * k;
      return Polynomial{c};
    }
    case Family::kPower:
      return PowerSublinear{s.uniform(0.5, 1.5) * k, s.uniform(0.2, 0.8)};
    case Family::kSigmoid:
      return Sigmoid{s.uniform(0.5, 1.5) * k, s.uniform(2.0, 8.0),
                     s.uniform(0.2, 1.0)};
  }
  return Linear{0.0, k};
}

NodeReward preset_reward(Sampler& s, Preset p) {
  NodeReward nr;
  nr.aggregation = Aggregation::kSum;
  switch (p) {
    case Preset::kCoverage: {
      const double a0 = s.uniform(1.0, 2.0);
      nr.coalition = Linear{a0, -s.uniform(0.0, 0.5 * a0)};
      nr.combination = Combination::kProduct;
      break;
    }
    case Preset::kExploration:
      nr.coalition = ExpSaturation{s.uniform(0.5, 1.5), s.uniform(1.0, 5.0)};
      nr.combination = Combination::kProduct;
      break;
    case Preset::kTransport:
      nr.coalition = Linear{s.uniform(0.0, 0.5), s.uniform(0.5, 1.5)};
      nr.combination = Combination::kMin;
      break;
    case Preset::kCarry:
      nr.coalition =
          Sigmoid{s.uniform(0.5, 1.5), s.uniform(5.0, 15.0), s.uniform(0.2, 0.7)};
      nr.combination = Combination::kProduct;
      break;
    default:
      break;
  }
  return nr;
}

}  // namespace

Mission generate_mission(const GeneratorConfig& cfg) {
  validate_config(cfg);
  Sampler s(cfg.seed);
  const int m = cfg.num_tasks;
  const int layers =
      std::min(m, cfg.layers > 0 ? cfg.layers
                                 : static_cast<int>(std::ceil(std::sqrt(m))));

  // Layer sizes: one task each, the rest spread uniformly at random.
  std::vector<int> size(layers, 1);
  for (int i = layers; i < m; ++i) ++size[s.integer(0, layers - 1)];
  std::vector<std::vector<NodeId>> layer(layers);
  NodeId next = 1;
  for (int l = 0; l < layers; ++l) {
    for (int k = 0; k < size[l]; ++k) layer[l].push_back(next++);
  }

  Mission mis;
  TaskGraph& g = mis.graph;
  double total_duration = 0.0;
  for (NodeId id = 1; id <= m; ++id) {
    const double d = s.uniform(cfg.duration_min, cfg.duration_max);
    total_duration += d;
    g.add_task(id, d, "task " + std::to_string(id));
  }
  for (int l = 0; l + 1 < layers; ++l) {
    for (NodeId i : layer[l]) {
      for (NodeId j : layer[l + 1]) {
        if (s.coin(cfg.edge_density)) g.add_edge({i, j});
      }
    }
  }
  for (NodeId id = 1; id <= m; ++id) {
    if (g.predecessors(id).empty()) g.add_edge({kSourceId, id});
  }

  // Sites in the unit square; node 0 is the depot.
  std::vector<std::pair<double, double>> pos(m + 1);
  for (auto& p : pos) p = {s.uniform(0.0, 1.0), s.uniform(0.0, 1.0)};
  for (NodeId i = 0; i <= m; ++i) {
    for (NodeId j = 0; j <= m; ++j) {
      if (i == j) {
        g.set_travel_time(i, j, 0.0);
        continue;
      }
      const double dist = std::hypot(pos[i].first - pos[j].first,
                                     pos[i].second - pos[j].second);
      g.set_travel_time(i, j, cfg.travel_min + (cfg.travel_max - cfg.travel_min) *
                                                   dist / std::sqrt(2.0));
    }
  }

  static constexpr Preset kMixable[] = {Preset::kCoverage, Preset::kExploration,
                                        Preset::kTransport, Preset::kCarry};
  for (NodeId j = 1; j <= m; ++j) {
    int task_preds = 0;
    for (NodeId p : g.predecessors(j)) task_preds += p != kSourceId ? 1 : 0;
    NodeReward nr;
    if (cfg.preset == Preset::kRandom) {
      nr.coalition = sample_coalition(s, pick_family(s, cfg));
      nr.aggregation = Aggregation::kSum;
      nr.combination = s.coin(0.5) ? Combination::kSum : Combination::kProduct;
      for (NodeId p : g.predecessors(j)) {
        if (p == kSourceId) continue;
        mis.reward.influence[{p, j}] =
            sample_influence(s, pick_family(s, cfg), task_preds);
      }
    } else {
      const Preset p = cfg.preset == Preset::kMixed ? kMixable[s.integer(0, 3)]
                                                    : cfg.preset;
      nr = preset_reward(s, p);
      for (NodeId q : g.predecessors(j)) {
        if (q == kSourceId) continue;
        mis.reward.influence[{q, j}] = Linear{0.0, 1.0 / task_preds};
      }
    }
    mis.reward.nodes[j] = std::move(nr);
  }

  mis.fleet.size = cfg.fleet_size;
  mis.makespan = cfg.makespan_fraction * total_duration;
  return mis;
}

// ---------------------------------------------------------------------------
// Error models.

namespace {

struct Bound {
  double lo = -INFINITY;
  double hi = INFINITY;
  bool open_lo = false;
  bool open_hi = false;
  bool ok(double v) const {
    return (open_lo ? v > lo : v >= lo) && (open_hi ? v < hi : v <= hi);
  }
  double clamp(double v) const {
    constexpr double kIn = 1e-9;
    if (!(open_lo ? v > lo : v >= lo)) v = open_lo ? lo + kIn : lo;
    if (!(open_hi ? v < hi : v <= hi)) v = open_hi ? hi - kIn : hi;
    return v;
  }
};

std::vector<Bound> bounds_for(const ScalarFunction& f) {
  const std::vector<double> p = function_params(f);
  const Bound any;
  const Bound nonneg{0.0, INFINITY, false, false};
  const Bound positive{0.0, INFINITY, true, false};
  const Bound unit_open{0.0, 1.0, true, true};
  const std::string kind = function_kind(f);
  if (kind == "polynomial") {
    std::vector<Bound> b;
    for (double c : p) b.push_back(c >= 0.0 ? nonneg : any);
    return b;
  }
  if (kind == "power") return {nonneg, unit_open};
  if (kind == "sigmoid") return {nonneg, positive, any};
  if (kind == "linear") return {any, any};
  if (kind == "exp_saturation") return {nonneg, positive};
  return {nonneg};
}

}  // namespace

ScalarFunction perturb_function(const ScalarFunction& f, double p_m,
                                std::mt19937_64& rng) {
  const std::vector<double> p = function_params(f);
  const std::vector<Bound> b = bounds_for(f);
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double sd = p_m * std::abs(p[i]);
    if (sd <= 0.0) {
      out[i] = p[i];
      continue;
    }
    std::normal_distribution<double> normal(p[i], sd);
    double v = normal(rng);
    for (int attempt = 1; attempt < 100 && !b[i].ok(v); ++attempt) {
      v = normal(rng);
    }
    out[i] = b[i].clamp(v);
  }
  return make_function(function_kind(f), out);
}

ErrorRealization apply_error(const RewardModel& rm, const ErrorModel& em) {
  ErrorRealization er{rm, rm, {}};
  if (const auto* tf = std::get_if<TaskFailure>(&em)) {
    std::mt19937_64 rng(tf->seed);
    std::bernoulli_distribution fail(std::clamp(tf->p_f, 0.0, 1.0));
    for (auto& [id, nr] : er.ground_truth.nodes) {
      if (fail(rng)) {
        er.failed.insert(id);
        nr.coalition = Constant{0.0};
        nr.combination = Combination::kProduct;
      }
    }
  } else if (const auto* mp = std::get_if<ModelPerturbation>(&em)) {
    std::mt19937_64 rng(mp->seed);
    const double p = std::clamp(mp->p_m, 0.0, 1.0);
    for (auto& [id, nr] : er.planner.nodes) {
      nr.coalition = perturb_function(nr.coalition, p, rng);
    }
    for (auto& [e, f] : er.planner.influence) {
      f = perturb_function(f, p, rng);
    }
  }
  return er;
}

}  // namespace coalflow
