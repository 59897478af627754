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

#ifndef STGAMES_NETWORK_H_
#define STGAMES_NETWORK_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stgames {

inline constexpr int kMaxPaths = 32;

// Directed edge with affine latency a + b * flow (time units; minimized).
struct Edge {
  std::string tail;
  std::string head;
  double a = 0.0;
  double b = 0.0;
};

// Single origin-destination routing network with nonatomic demand.
class CongestionNetwork {
 public:
  CongestionNetwork(std::vector<Edge> edges, std::string origin,
                    std::string destination, double demand);

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::string& origin() const { return origin_; }
  const std::string& destination() const { return destination_; }
  double demand() const { return demand_; }

  // Acyclic origin-destination paths as edge-index lists, in DFS order over
  // edge insertion order.
  const std::vector<std::vector<int>>& paths() const { return paths_; }
  int num_paths() const { return static_cast<int>(paths_.size()); }
  // Node sequence such as "s-u-t"; paths over parallel edges get a "#k"
  // suffix with their 1-based index.
  std::string PathLabel(int path) const;

  CongestionNetwork WithEdge(const Edge& extra) const;
  CongestionNetwork WithDemand(double demand) const;

  // Edge flows induced by path flows.
  std::vector<double> EdgeFlows(std::span<const double> path_flows) const;
  // Edge latency at a flow, plus an optional per-edge toll.
  double EdgeLatency(int edge, double flow, double toll = 0.0) const;

 private:
  void EnumeratePaths();

  std::vector<Edge> edges_;
  std::vector<std::string> nodes_;
  std::string origin_;
  std::string destination_;
  double demand_;
  std::vector<std::vector<int>> paths_;
};

struct FlowAssignment {
  std::vector<double> path_flow;
  std::vector<double> edge_flow;
  std::vector<double> path_latency;   // includes tolls when present
  double total_cost = 0.0;            // sum_e f_e * latency_e(f_e), tolls excluded
  double per_unit_cost = 0.0;         // total_cost / demand
  std::vector<double> potential;      // objective value after every descent move
  long iterations = 0;
};

// Minimizes the Beckmann potential by exact line search between the costliest
// used path and the cheapest path until their latency gap is below 1e-9.
// `tolls` (optional, per edge) are added to the edge latencies.
FlowAssignment WardropEquilibrium(const CongestionNetwork& network,
                                  std::span<const double> tolls = {});

// Minimizes total cost; equals the equilibrium under marginal-cost latency.
FlowAssignment SystemOptimum(const CongestionNetwork& network);

// Largest latency gap between a used path and the cheapest path.
double WardropGap(const FlowAssignment& flow);

struct PoaResult {
  double equilibrium_cost = 0.0;
  double optimum_cost = 0.0;
  std::optional<double> ratio;  // empty when the optimum cost is zero
};

PoaResult PriceOfAnarchy(const CongestionNetwork& network);

struct BraessResult {
  double before = 0.0;  // per-unit equilibrium cost
  double after = 0.0;
  double delta = 0.0;
};

BraessResult BraessDelta(const CongestionNetwork& network, const Edge& extra);

// toll_e = b_e * f_e at the system optimum.
std::vector<double> MarginalCostTolls(const CongestionNetwork& network);

}  // namespace stgames

#endif  // STGAMES_NETWORK_H_
