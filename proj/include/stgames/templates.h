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

#ifndef STGAMES_TEMPLATES_H_
#define STGAMES_TEMPLATES_H_

#include <string>
#include <utility>
#include <vector>

#include "stgames/network.h"
#include "stgames/strategic_game.h"

namespace stgames {

// Named per-edge toll vector; becomes one signal of an atomic routing game.
struct TollSignal {
  std::string label;
  std::vector<double> tolls;
};

// Atomic discretization of a routing network: each of `num_agents` agents
// carries demand / num_agents units over one path. Payoff is minus the path
// latency plus tolls (costs enter the maximization convention negated). With
// no toll signals the game has the single untolled signal "none".
StrategicGame AtomicRoutingGame(const CongestionNetwork& network, int num_agents,
                                const std::vector<TollSignal>& toll_signals = {});

// Pigou network: constant-latency link s->t (a=1) and linear link s->t (b=1).
CongestionNetwork PigouNetwork(double demand = 1.0);
// Braess base network: s->u (x), u->t (1), s->v (1), v->t (x).
CongestionNetwork BraessNetwork(double demand = 1.0);
// Zero-latency shortcut u->v added to the Braess network.
Edge BraessShortcut();

}  // namespace stgames

#endif  // STGAMES_TEMPLATES_H_
