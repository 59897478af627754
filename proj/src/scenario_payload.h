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

// Parsed, validated scenario payloads. Internal to the scenario layer.

#ifndef STGAMES_SCENARIO_PAYLOAD_H_
#define STGAMES_SCENARIO_PAYLOAD_H_

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "stgames/coalition_game.h"
#include "stgames/coordination.h"
#include "stgames/incentives.h"
#include "stgames/learning.h"
#include "stgames/matching.h"
#include "stgames/network.h"
#include "stgames/resilience.h"
#include "stgames/scenario.h"
#include "stgames/strategic_game.h"

namespace stgames {

struct CoopPayload {
  std::vector<std::string> agents;
  std::optional<CoalitionGame> game;
  bool dynamics = false;
};

struct MatchPayload {
  std::vector<std::string> m;
  std::vector<std::string> w;
  std::optional<MatchingMarket> market;
  Side proposing = Side::kM;
  bool enumerate = false;
};

struct NashPayload {
  std::optional<StrategicGame> game;
};

struct LearnPayload {
  std::optional<StrategicGame> game;
  std::vector<LearnerSpec> learners;
  long horizon = 1;
  UpdateSchedule schedule = UpdateSchedule::kSimultaneous;
  std::vector<int> signals;
  long trace_stride = 1;
};

struct TwoTimescalePayload {
  std::optional<StrategicGame> game;
  std::vector<LearnerSpec> learners;
  CoordinatorKind coordinator = CoordinatorKind::kConstant;
  std::vector<int> candidates;
  std::vector<int> controlled;
  long outer_steps = 1;
  long inner_steps = 1;
  UpdateSchedule schedule = UpdateSchedule::kSimultaneous;
  std::optional<AdmissibleSetRule> admissible;
};

struct StackelbergPayload {
  std::optional<StrategicGame> game;
  std::vector<int> candidates;
  bool welfare = false;  // leader scores the sum of follower payoffs
  std::map<std::pair<int, long>, double> leader;
  std::vector<FollowerSelection> modes;
};

struct WardropPayload {
  std::optional<CongestionNetwork> network;
  std::optional<Edge> shortcut;
  bool marginal_tolls = false;
};

struct IncentivePayload {
  std::optional<StrategicGame> game;
  TrajectoryStep target;
  Trajectory baseline;
  BudgetSpec budget;
  double margin = 1e-6;
};

struct ResiliencePayload {
  bool learning = false;
  ConsensusScenario consensus;
  std::optional<StrategicGame> game;
  std::vector<LearnerSpec> learners;
  std::vector<int> signals;
  AdversaryModel adversary;
  ResilienceConfig defense;
  long steps = 1;
};

struct ScenarioPayload {
  std::variant<CoopPayload, MatchPayload, NashPayload, LearnPayload, TwoTimescalePayload,
               StackelbergPayload, WardropPayload, IncentivePayload, ResiliencePayload>
      data;
};

}  // namespace stgames

#endif  // STGAMES_SCENARIO_PAYLOAD_H_
