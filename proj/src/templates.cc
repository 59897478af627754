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

#include "stgames/templates.h"

#include <fmt/format.h>

#include "stgames/errors.h"

namespace stgames {

StrategicGame AtomicRoutingGame(const CongestionNetwork& network, int num_agents,
                                const std::vector<TollSignal>& toll_signals) {
  if (num_agents < 1) throw DomainError("atomic routing game needs an agent");
  const int num_paths = network.num_paths();
  const int num_edges = static_cast<int>(network.edges().size());
  std::vector<std::string> names;
  std::vector<std::string> paths;
  for (int p = 0; p < num_paths; ++p) paths.push_back(network.PathLabel(p));
  for (int i = 0; i < num_agents; ++i) names.push_back(fmt::format("d{}", i + 1));
  std::vector<std::string> signals;
  std::vector<std::vector<double>> tolls;
  if (toll_signals.empty()) {
    signals.push_back("none");
    tolls.push_back(std::vector<double>(num_edges, 0.0));
  }
  for (const TollSignal& s : toll_signals) {
    if (static_cast<int>(s.tolls.size()) != num_edges) {
      throw DomainError(fmt::format("toll signal {} has {} entries for {} edges",
                                    s.label, s.tolls.size(), num_edges));
    }
    signals.push_back(s.label);
    tolls.push_back(s.tolls);
  }
  StrategicGame game(names, std::vector<std::vector<std::string>>(num_agents, paths),
                     signals);
  const double unit = network.demand() / num_agents;
  std::vector<double> path_flow(num_paths);
  for (long k = 0; k < game.num_profiles(); ++k) {
    const ActionProfile profile = game.ProfileAt(k);
    std::fill(path_flow.begin(), path_flow.end(), 0.0);
    for (int p : profile) path_flow[p] += unit;
    const std::vector<double> edge_flow = network.EdgeFlows(path_flow);
    for (int s = 0; s < game.num_signals(); ++s) {
      for (int i = 0; i < num_agents; ++i) {
        double cost = 0.0;
        for (int e : network.paths()[profile[i]]) {
          cost += network.EdgeLatency(e, edge_flow[e], tolls[s][e]);
        }
        game.SetPayoff(s, k, i, -cost);
      }
    }
  }
  return game;
}

CongestionNetwork PigouNetwork(double demand) {
  return CongestionNetwork({{"s", "t", 1.0, 0.0}, {"s", "t", 0.0, 1.0}}, "s", "t",
                           demand);
}

CongestionNetwork BraessNetwork(double demand) {
  return CongestionNetwork({{"s", "u", 0.0, 1.0},
                            {"u", "t", 1.0, 0.0},
                            {"s", "v", 1.0, 0.0},
                            {"v", "t", 0.0, 1.0}},
                           "s", "t", demand);
}

Edge BraessShortcut() { return {"u", "v", 0.0, 0.0}; }

}  // namespace stgames
