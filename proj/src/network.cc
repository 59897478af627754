// Copyright 2026 The stgames Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "stgames/network.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <fmt/format.h>

#include "stgames/errors.h"

namespace stgames {
namespace {

constexpr double kGapTarget = 1e-9;
constexpr long kMaxMoves = 2000000;

bool Finite(double x) { return std::isfinite(x); }

}  // namespace

CongestionNetwork::CongestionNetwork(std::vector<Edge> edges, std::string origin,
                                     std::string destination, double demand)
    : edges_(std::move(edges)),
      origin_(std::move(origin)),
      destination_(std::move(destination)),
      demand_(demand) {
  if (!(demand_ > 0.0) || !Finite(demand_)) {
    throw DomainError(fmt::format("demand {} must be positive and finite", demand_));
  }
  if (origin_ == destination_) {
    throw DomainError("origin and destination coincide");
  }
  auto add_node = [this](const std::string& node) {
    if (std::find(nodes_.begin(), nodes_.end(), node) == nodes_.end()) {
      nodes_.push_back(node);
    }
  };
  add_node(origin_);
  for (const Edge& e : edges_) {
    if (!(e.a >= 0.0) || !(e.b >= 0.0) || !Finite(e.a) || !Finite(e.b)) {
      throw DomainError(fmt::format("edge {}->{} has invalid latency ({}, {})",
                                    e.tail, e.head, e.a, e.b));
    }
    if (e.tail == e.head) {
      throw DomainError(fmt::format("self-loop at node {}", e.tail));
    }
    add_node(e.tail);
    add_node(e.head);
  }
  add_node(destination_);
  EnumeratePaths();
}

void CongestionNetwork::EnumeratePaths() {
  std::vector<int> stack;
  std::vector<std::string> visited{origin_};
  std::function<void(const std::string&)> dfs = [&](const std::string& node) {
    if (node == destination_) {
      if (static_cast<int>(paths_.size()) == kMaxPaths) {
        throw CapacityError(
            fmt::format("network has more than {} acyclic paths", kMaxPaths));
      }
      paths_.push_back(stack);
      return;
    }
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
      if (edges_[e].tail != node) continue;
      const std::string& next = edges_[e].head;
      if (std::find(visited.begin(), visited.end(), next) != visited.end()) continue;
      visited.push_back(next);
      stack.push_back(e);
      dfs(next);
      stack.pop_back();
      visited.pop_back();
    }
  };
  dfs(origin_);
  if (paths_.empty()) {
    throw DomainError(
        fmt::format("no path from {} to {}", origin_, destination_));
  }
}

std::string CongestionNetwork::PathLabel(int path) const {
  auto nodes_of = [this](int p) {
    std::string label = origin_;
    for (int e : paths_.at(p)) label += "-" + edges_[e].head;
    return label;
  };
  const std::string label = nodes_of(path);
  // Parallel edges give paths with equal node sequences; number those.
  for (int q = 0; q < num_paths(); ++q) {
    if (q != path && nodes_of(q) == label) return fmt::format("{}#{}", label, path + 1);
  }
  return label;
}

CongestionNetwork CongestionNetwork::WithEdge(const Edge& extra) const {
  std::vector<Edge> edges = edges_;
  edges.push_back(extra);
  return CongestionNetwork(std::move(edges), origin_, destination_, demand_);
}

CongestionNetwork CongestionNetwork::WithDemand(double demand) const {
  return CongestionNetwork(edges_, origin_, destination_, demand);
}

std::vector<double> CongestionNetwork::EdgeFlows(
    std::span<const double> path_flows) const {
  if (static_cast<int>(path_flows.size()) != num_paths()) {
    throw DomainError("path flow vector has the wrong length");
  }
  std::vector<double> flows(edges_.size(), 0.0);
  for (int p = 0; p < num_paths(); ++p) {
    for (int e : paths_[p]) flows[e] += path_flows[p];
  }
  return flows;
}

double CongestionNetwork::EdgeLatency(int edge, double flow, double toll) const {
  const Edge& e = edges_.at(edge);
  return e.a + toll + e.b * flow;
}

namespace {

// Beckmann descent with per-edge slope multiplier: slope_scale 1 gives the
// equilibrium, 2 gives the system optimum.
FlowAssignment Descend(const CongestionNetwork& net, std::span<const double> tolls,
                       double slope_scale) {
  const int num_paths = net.num_paths();
  const int num_edges = static_cast<int>(net.edges().size());
  if (!tolls.empty() && static_cast<int>(tolls.size()) != num_edges) {
    throw DomainError(fmt::format("{} tolls for {} edges", tolls.size(), num_edges));
  }
  for (double t : tolls) {
    if (!Finite(t)) throw DomainError("toll is not finite");
  }
  auto toll = [&](int e) { return tolls.empty() ? 0.0 : tolls[e]; };
  auto slope = [&](int e) { return slope_scale * net.edges()[e].b; };

  std::vector<std::vector<char>> uses(num_paths, std::vector<char>(num_edges, 0));
  for (int p = 0; p < num_paths; ++p) {
    for (int e : net.paths()[p]) uses[p][e] = 1;
  }

  FlowAssignment out;
  out.path_flow.assign(num_paths, 0.0);
  out.path_flow[0] = net.demand();
  std::vector<double> edge_flow = net.EdgeFlows(out.path_flow);

  auto potential = [&]() {
    double phi = 0.0;
    for (int e = 0; e < num_edges; ++e) {
      const Edge& edge = net.edges()[e];
      phi += (edge.a + toll(e)) * edge_flow[e] + 0.5 * slope(e) * edge_flow[e] * edge_flow[e];
    }
    return phi;
  };
  auto path_latency = [&](int p) {
    double l = 0.0;
    for (int e : net.paths()[p]) {
      l += net.edges()[e].a + toll(e) + slope(e) * edge_flow[e];
    }
    return l;
  };

  out.potential.push_back(potential());
  std::vector<double> latency(num_paths);
  while (true) {
    for (int p = 0; p < num_paths; ++p) latency[p] = path_latency(p);
    int worst = -1;
    int best = 0;
    for (int p = 0; p < num_paths; ++p) {
      if (latency[p] < latency[best]) best = p;
      if (out.path_flow[p] > 0.0 && (worst < 0 || latency[p] > latency[worst])) worst = p;
    }
    const double gap = latency[worst] - latency[best];
    if (gap < kGapTarget) break;
    if (out.iterations >= kMaxMoves) {
      throw ComputationError(
          fmt::format("flow descent stalled with latency gap {}", gap));
    }
    double curvature = 0.0;
    for (int e = 0; e < num_edges; ++e) {
      if (uses[worst][e] != uses[best][e]) curvature += slope(e);
    }
    double shift = out.path_flow[worst];
    if (curvature > 0.0) shift = std::min(shift, gap / curvature);
    out.path_flow[worst] -= shift;
    out.path_flow[best] += shift;
    if (out.path_flow[worst] < 1e-15 * net.demand()) {
      out.path_flow[best] += out.path_flow[worst];
      out.path_flow[worst] = 0.0;
    }
    for (int e = 0; e < num_edges; ++e) {
      if (uses[worst][e] && !uses[best][e]) edge_flow[e] -= shift;
      if (uses[best][e] && !uses[worst][e]) edge_flow[e] += shift;
    }
    ++out.iterations;
    out.potential.push_back(potential());
  }

  // Recompute edge flows from path flows so they are the exact incidence
  // product, then report true (untolled, unscaled) costs and tolled latencies.
  out.edge_flow = net.EdgeFlows(out.path_flow);
  out.path_latency.assign(num_paths, 0.0);
  for (int p = 0; p < num_paths; ++p) {
    for (int e : net.paths()[p]) {
      out.path_latency[p] += net.EdgeLatency(e, out.edge_flow[e], toll(e));
    }
  }
  for (int e = 0; e < num_edges; ++e) {
    out.total_cost += out.edge_flow[e] * net.EdgeLatency(e, out.edge_flow[e]);
  }
  out.per_unit_cost = out.total_cost / net.demand();
  return out;
}

}  // namespace

FlowAssignment WardropEquilibrium(const CongestionNetwork& network,
                                  std::span<const double> tolls) {
  return Descend(network, tolls, 1.0);
}

FlowAssignment SystemOptimum(const CongestionNetwork& network) {
  FlowAssignment out = Descend(network, {}, 2.0);
  // Report plain latencies rather than marginal costs.
  for (int p = 0; p < network.num_paths(); ++p) {
    out.path_latency[p] = 0.0;
    for (int e : network.paths()[p]) {
      out.path_latency[p] += network.EdgeLatency(e, out.edge_flow[e]);
    }
  }
  return out;
}

double WardropGap(const FlowAssignment& flow) {
  const double low =
      *std::min_element(flow.path_latency.begin(), flow.path_latency.end());
  double gap = 0.0;
  for (std::size_t p = 0; p < flow.path_flow.size(); ++p) {
    if (flow.path_flow[p] > 0.0) gap = std::max(gap, flow.path_latency[p] - low);
  }
  return gap;
}

PoaResult PriceOfAnarchy(const CongestionNetwork& network) {
  PoaResult r;
  r.equilibrium_cost = WardropEquilibrium(network).total_cost;
  r.optimum_cost = SystemOptimum(network).total_cost;
  if (r.optimum_cost > 0.0) r.ratio = r.equilibrium_cost / r.optimum_cost;
  return r;
}

BraessResult BraessDelta(const CongestionNetwork& network, const Edge& extra) {
  BraessResult r;
  r.before = WardropEquilibrium(network).per_unit_cost;
  r.after = WardropEquilibrium(network.WithEdge(extra)).per_unit_cost;
  r.delta = r.after - r.before;
  return r;
}

std::vector<double> MarginalCostTolls(const CongestionNetwork& network) {
  const FlowAssignment opt = SystemOptimum(network);
  std::vector<double> tolls(network.edges().size());
  for (std::size_t e = 0; e < tolls.size(); ++e) {
    tolls[e] = network.edges()[e].b * opt.edge_flow[e];
  }
  return tolls;
}

}  // namespace stgames
