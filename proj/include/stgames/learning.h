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

#ifndef STGAMES_LEARNING_H_
#define STGAMES_LEARNING_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "stgames/strategic_game.h"

namespace stgames {

// Adaptation rules. Each kind fixes the payoff-estimate target and the policy
// map used by the coupled estimate/policy update.
//
//   kind                   estimate target           policy map
//   best-response          counterfactual payoffs    argmax indicator
//   smoothed-best-response counterfactual payoffs    softmax(q / tau)
//   fictitious-play        payoffs vs empirical mix  argmax indicator
//   replicator             counterfactual payoffs    pi * (q - min q + 1)
//   payoff-estimation      realized payoff, own slot softmax(q / tau)
//
// "Counterfactual payoffs" are the payoffs of every own action against the
// opponents' observed actions of the current step.
enum class LearnerKind {
  kBestResponse,
  kSmoothedBestResponse,
  kFictitiousPlay,
  kReplicator,
  kPayoffEstimation,
};

const char* ToString(LearnerKind kind);
std::optional<LearnerKind> ParseLearnerKind(const std::string& name);

struct RateSchedule {
  enum class Kind { kConstant, kHarmonic };
  Kind kind = Kind::kConstant;
  double value = 1.0;

  // Rate at 1-based step t: value, or value / t.
  double At(long t) const;
  static RateSchedule Constant(double value) { return {Kind::kConstant, value}; }
  static RateSchedule Harmonic(double value = 1.0) { return {Kind::kHarmonic, value}; }
};

struct LearnerSpec {
  LearnerKind kind = LearnerKind::kBestResponse;
  RateSchedule payoff_rate = RateSchedule::Constant(1.0);
  RateSchedule policy_rate = RateSchedule::Constant(1.0);
  double temperature = 1.0;
  std::vector<double> initial_policy;    // empty: uniform
  std::vector<double> initial_estimate;  // empty: zeros

  void Validate(int num_actions) const;
};

struct LearningState {
  long t = 0;
  MixedProfile policy;
  std::vector<std::vector<double>> estimate;
  // counts[i][j][a]: times agent i has observed agent j play a.
  std::vector<std::vector<std::vector<long>>> counts;
};

LearningState InitialState(const StrategicGame& game,
                           std::span<const LearnerSpec> learners);

// What agent i learned from one step of play.
struct PayoffObservation {
  int action = 0;
  double payoff = 0.0;
  std::vector<double> counterfactual;
  std::vector<double> empirical;
};

// q <- (1 - rate) q + rate * target, with the kind-specific target. The
// payoff-estimation kind only moves the realized action's coordinate.
void StepPayoffEstimate(LearningState& state, int agent, LearnerKind kind,
                        double rate, const PayoffObservation& observation);

// pi <- (1 - rate) pi + rate * map(q). `admissible` (optional, one flag per
// action) restricts the policy map to allowed actions. Output is clamped and
// renormalized onto the simplex.
void StepPolicy(LearningState& state, int agent, const LearnerSpec& learner,
                double rate, std::span<const char> admissible = {});

// Policy maps, exposed for testing.
std::vector<double> ArgmaxIndicator(std::span<const double> q,
                                    std::span<const char> admissible = {});
std::vector<double> Softmax(std::span<const double> q, double temperature,
                            std::span<const char> admissible = {});
std::vector<double> ReplicatorMap(std::span<const double> policy,
                                  std::span<const double> q,
                                  std::span<const char> admissible = {});

enum class UpdateSchedule {
  kSimultaneous,  // every agent updates every step
  kRoundRobin,    // only agent (t - 1) mod N updates at step t
};

struct StepRecord {
  long t = 0;
  int signal = 0;
  ActionProfile actions;
  std::vector<double> payoffs;
  MixedProfile policy;  // after the update
  std::vector<std::vector<double>> estimate;
};

struct Trace {
  std::uint64_t seed = 0;
  std::string config_digest;
  std::vector<StepRecord> steps;
};

// admissible[i][a] != 0 when agent i may play a.
using AdmissibleMask = std::vector<std::vector<char>>;

// Maps the true joint action to what `receiver` observes at step t.
using ObservationFilter =
    std::function<ActionProfile(long t, int receiver, const ActionProfile& actual)>;

// Owns one run's learning state and random stream.
class DynamicsEngine {
 public:
  DynamicsEngine(const StrategicGame& game, std::vector<LearnerSpec> learners,
                 std::uint64_t seed,
                 UpdateSchedule schedule = UpdateSchedule::kSimultaneous);

  StepRecord Step(int signal, const AdmissibleMask* mask = nullptr,
                  const ObservationFilter* filter = nullptr);

  // Removes mass from inadmissible actions and renormalizes each policy;
  // falls back to uniform over the allowed set when nothing remains.
  void Restrict(const AdmissibleMask& mask);

  const LearningState& state() const { return state_; }
  const StrategicGame& game() const { return *game_; }

 private:
  int Sample(std::span<const double> policy);

  const StrategicGame* game_;
  std::vector<LearnerSpec> learners_;
  UpdateSchedule schedule_;
  std::mt19937_64 rng_;
  LearningState state_;
};

// Plays T steps. `signal_schedule` is cycled (empty: signal 0 throughout).
Trace RunDynamics(const StrategicGame& game, std::vector<LearnerSpec> learners,
                  long horizon, std::uint64_t seed,
                  const std::vector<int>& signal_schedule = {},
                  UpdateSchedule schedule = UpdateSchedule::kSimultaneous);

struct Diagnostics {
  std::vector<double> regret;  // average external regret per agent
  // Joint-action frequencies, lexicographic by profile, zero entries omitted.
  std::vector<std::pair<ActionProfile, double>> joint_frequency;
  MixedProfile marginal_frequency;
  // Nash gap of the product of cumulative empirical marginals, per step.
  std::vector<double> equilibrium_gap;
};

Diagnostics Diagnose(const Trace& trace, const StrategicGame& game,
                     long gap_stride = 1);

}  // namespace stgames

#endif  // STGAMES_LEARNING_H_
