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

#ifndef STGAMES_COORDINATION_H_
#define STGAMES_COORDINATION_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "stgames/coalition_game.h"
#include "stgames/learning.h"
#include "stgames/strategic_game.h"

namespace stgames {

// Labeled scalar environment state z_t.
struct SystemState {
  long t = 0;
  std::vector<std::string> labels;
  std::vector<double> values;

  bool operator==(const SystemState&) const = default;
};

// -- Information mechanisms ---------------------------------------------------

enum class InformationKind {
  kIdentity,      // every agent sees (z, x, c) verbatim
  kPublicOnly,    // every agent sees the same public channel (z, c)
  kPrivateNoisy,  // public channel c; private channel z plus Gaussian noise
};

const char* ToString(InformationKind kind);
std::optional<InformationKind> ParseInformationKind(const std::string& name);

struct InformationMechanism {
  InformationKind kind = InformationKind::kIdentity;
  double noise = 0.0;  // standard deviation of the private perturbation
};

struct InformationRecord {
  SystemState state;            // identity kind only
  ActionProfile actions;        // identity kind only
  std::optional<int> signal;
  std::vector<double> public_channel;
  std::vector<double> private_channel;

  bool operator==(const InformationRecord&) const = default;
};

// One record per agent. Noise is drawn from `noise` in agent order.
std::vector<InformationRecord> GenerateInformation(const InformationMechanism& mech,
                                                   int num_agents,
                                                   const SystemState& state,
                                                   const ActionProfile& actions,
                                                   int signal, std::mt19937_64& noise);

// -- Admissible sets ----------------------------------------------------------

// (signal, agent) -> allowed actions. Missing entries allow every action.
struct AdmissibleSetRule {
  std::map<std::pair<int, int>, std::vector<int>> allowed;
};

struct RestrictedGame {
  StrategicGame game;                     // single signal, restricted actions
  std::vector<std::vector<int>> actions;  // restricted index -> original index
};

RestrictedGame ApplyAdmissibleSets(const AdmissibleSetRule& rule,
                                   const StrategicGame& game, int signal);

// Per-agent flags; `controlled` (empty: everyone) limits which agents the
// rule applies to.
AdmissibleMask MaskFor(const AdmissibleSetRule& rule, const StrategicGame& game,
                       int signal, const std::vector<int>& controlled = {});

// -- Coordinator --------------------------------------------------------------

// Summary of one inner epoch, the coordinator's only input.
struct EpochDigest {
  int signal = 0;
  double mean_welfare = 0.0;
  std::vector<double> mean_payoff;
  MixedProfile final_frequency;  // empirical action frequencies over the epoch
};

enum class CoordinatorKind { kConstant, kRoundRobin, kGreedy, kCustom };

const char* ToString(CoordinatorKind kind);
std::optional<CoordinatorKind> ParseCoordinatorKind(const std::string& name);

class Coordinator {
 public:
  using Rule = std::function<int(const EpochDigest&, int current)>;

  // `candidates` are signal indices; the first one is emitted initially.
  Coordinator(CoordinatorKind kind, std::vector<int> candidates,
              std::vector<int> controlled = {}, Rule custom = nullptr);

  int current() const { return current_; }
  const std::vector<int>& candidates() const { return candidates_; }
  const std::vector<int>& controlled() const { return controlled_; }
  CoordinatorKind kind() const { return kind_; }

  // c_{t+1} = Q(H_t, c_t).
  int Update(const EpochDigest& digest);

 private:
  CoordinatorKind kind_;
  std::vector<int> candidates_;
  std::vector<int> controlled_;
  Rule custom_;
  int current_;
  // Greedy: last observed epoch welfare per candidate position.
  std::vector<std::optional<double>> observed_;
};

// Welfare of one step; default is the sum of realized payoffs.
using WelfareFunctional = std::function<double(const StepRecord&)>;

// Sum of payoffs of the step's actions under a fixed signal (e.g. the untolled
// one, so transfers do not count as welfare).
WelfareFunctional WelfareUnderSignal(const StrategicGame& game, int signal);

EpochDigest DigestEpoch(const std::vector<StepRecord>& steps,
                        const StrategicGame& game, const WelfareFunctional& welfare);

struct TwoTimescaleOptions {
  long outer_steps = 1;
  long inner_steps = 1;
  std::uint64_t seed = 0;
  UpdateSchedule schedule = UpdateSchedule::kSimultaneous;
  const AdmissibleSetRule* admissible = nullptr;
  WelfareFunctional welfare;  // empty: sum of payoffs
};

struct TwoTimescaleTrace {
  Trace fast;                       // every inner step, signal recorded
  std::vector<EpochDigest> epochs;  // one per outer step
  std::vector<int> signals;         // signal used in each epoch
};

// The learning state and random stream persist across epochs.
TwoTimescaleTrace RunTwoTimescale(const StrategicGame& family,
                                  std::vector<LearnerSpec> learners,
                                  Coordinator coordinator,
                                  const TwoTimescaleOptions& options);

// -- Stackelberg --------------------------------------------------------------

enum class FollowerSelection { kOptimistic, kPessimistic };

using LeaderObjective = std::function<double(int signal, const ActionProfile&)>;

struct StackelbergCandidate {
  int signal = 0;
  bool defined = false;
  std::vector<ActionProfile> equilibria;
  double value = 0.0;
  ActionProfile used;
};

struct StackelbergResult {
  bool solved = false;
  int signal = 0;
  double value = 0.0;
  ActionProfile equilibrium;
  std::vector<StackelbergCandidate> candidates;
  std::vector<std::string> warnings;
};

StackelbergResult StackelbergSolve(const LeaderObjective& objective,
                                   const std::vector<int>& candidates,
                                   const StrategicGame& family,
                                   FollowerSelection mode);

// -- Dynamic-game rollouts ----------------------------------------------------

// Finite-state stochastic game. Stage payoffs use `stage` with one signal per
// state; transition[state][profile] is a distribution over next states.
struct MarkovGame {
  StrategicGame stage;
  std::vector<std::vector<std::vector<double>>> transition;
  int initial_state = 0;

  void Validate() const;
};

enum class PolicyInformation { kOpenLoop, kFeedback };

// table[state][action]: action distribution given the informing state (the
// initial state for open-loop, the current state for feedback policies).
struct MarkovPolicy {
  PolicyInformation information = PolicyInformation::kFeedback;
  std::vector<std::vector<double>> table;
};

struct RolloutResult {
  std::vector<double> mean;
  std::vector<double> standard_error;
  long horizon = 0;
  long runs = 0;
  // Per agent: max |payoff| * beta^H / (1 - beta).
  std::vector<double> truncation_bound;
};

// Default horizon is the smallest H whose tail bound
// max(1, max|J|) * beta_i^H / (1 - beta_i) is below 1e-6 for every agent.
RolloutResult RolloutDynamicGame(const MarkovGame& game,
                                 const std::vector<MarkovPolicy>& policies,
                                 const std::vector<double>& discounts, long runs,
                                 std::uint64_t seed,
                                 std::optional<long> horizon = std::nullopt);

// -- Coalition structures -----------------------------------------------------

// Blocks as bitmasks, sorted ascending.
using CoalitionStructure = std::vector<Coalition>;

void CheckStructure(const CoalitionStructure& structure, int num_agents);
CoalitionStructure Singletons(int num_agents);
std::string StructureString(const CoalitionStructure& structure);

// One greedy merge-split move, or the input when it is a fixed point.
CoalitionStructure EvolveCoalitions(const CoalitionStructure& structure,
                                    const CoalitionGame& game);

// Repeats moves until a fixed point; returns every visited structure.
std::vector<CoalitionStructure> CoalitionDynamics(CoalitionStructure structure,
                                                  const CoalitionGame& game,
                                                  long max_moves = 1 << 20);

}  // namespace stgames

#endif  // STGAMES_COORDINATION_H_
