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

#ifndef STGAMES_RESILIENCE_H_
#define STGAMES_RESILIENCE_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stgames/learning.h"
#include "stgames/strategic_game.h"

namespace stgames {

enum class AttackKind { kConstantInjection, kSignFlip, kReplay, kChannelDrop };

const char* ToString(AttackKind kind);
std::optional<AttackKind> ParseAttackKind(const std::string& name);

struct AdversaryModel {
  std::vector<int> compromised;
  AttackKind kind = AttackKind::kConstantInjection;
  double value = 0.0;        // constant-injection payload
  long lag = 1;              // replay
  double probability = 0.0;  // channel-drop
  long start = 0;            // activation window, inclusive
  long end = std::numeric_limits<long>::max();

  void Validate(int num_agents) const;
  bool Active(long t) const { return t >= start && t <= end; }
  bool Compromised(int agent) const;
};

// board[receiver][sender]: the value `sender` communicated to `receiver`, or
// nothing when the message was lost. The diagonal is unused.
using MessageBoard = std::vector<std::vector<std::optional<double>>>;

// Replaces messages sent by compromised agents during the window.
// history[t'][j] is the value agent j broadcast at step t' (needed for
// replay; steps before the lag replay the current value). Drops are drawn
// from a generator seeded by (seed, t) in receiver-major order.
MessageBoard CorruptInformation(const AdversaryModel& adversary,
                                const MessageBoard& honest, long t, std::uint64_t seed,
                                std::span<const std::vector<double>> history = {});

// Row-stochastic trust over each agent's neighbors and itself.
class TrustMatrix {
 public:
  TrustMatrix() = default;
  // Uniform weights over self plus neighbors.
  explicit TrustMatrix(const std::vector<std::vector<int>>& neighbors);

  int size() const { return static_cast<int>(weights_.size()); }
  double weight(int i, int j) const { return weights_[i][j]; }
  const std::vector<double>& row(int i) const { return weights_[i]; }
  void set_row(int i, std::vector<double> row);
  // Largest |row sum - 1|.
  double RowSumError() const;

 private:
  std::vector<std::vector<double>> weights_;
};

// w'_ij proportional to w_ij * exp(-eta * residual_ij), renormalized per row.
// residuals[i][j] must be nonnegative where w_ij > 0; NaN marks a missing
// report, which leaves that weight's relative standing unchanged.
TrustMatrix UpdateTrust(const TrustMatrix& trust,
                        const std::vector<std::vector<double>>& residuals, double eta);

struct ResilienceConfig {
  int trim = 0;                 // f: values dropped per side
  double eta = 0.0;             // trust learning rate
  double residual_scale = 1.0;  // residual = |report - aggregate| / scale

  void Validate() const;
};

// Complete graph adjacency (neighbors exclude self).
std::vector<std::vector<int>> CompleteGraph(int n);

struct ConsensusStep {
  std::vector<double> values;
  std::vector<std::vector<double>> residuals;
};

// Each agent trims the `trim` largest and smallest received neighbor values
// and takes the trust-weighted mean of itself and the survivors.
ConsensusStep ResilientConsensusStep(const std::vector<double>& values,
                                     const MessageBoard& board,
                                     const std::vector<std::vector<int>>& neighbors,
                                     const TrustMatrix& trust,
                                     const ResilienceConfig& config);

struct ConsensusScenario {
  std::vector<double> initial;
  std::vector<std::vector<int>> neighbors;  // empty: complete graph
};

// Plain averaging over self plus neighbors, no corruption or defense.
std::vector<std::vector<double>> NaiveConsensus(const ConsensusScenario& scenario, long steps);

struct ResilienceMetrics {
  double max_honest_deviation = 0.0;  // vs the adversary-free run
  std::vector<double> diameter;       // honest max - min, per step from t=0
  std::optional<long> recovery_time;  // first t after the window with small diameter
  bool honest_in_hull = true;         // within the initial honest hull throughout
};

struct AdversarialConsensusRun {
  std::vector<std::vector<double>> values;   // per step from t=0
  std::vector<std::vector<double>> nominal;  // same defense, no adversary
  TrustMatrix trust;                         // final
  ResilienceMetrics metrics;
};

AdversarialConsensusRun RunAdversarialConsensus(const ConsensusScenario& scenario,
                                                const AdversaryModel& adversary,
                                                const ResilienceConfig& config, long steps,
                                                std::uint64_t seed);

struct AdversarialLearningRun {
  Trace trace;
  Trace nominal;
  std::vector<double> deviation;  // per step: max honest policy gap vs nominal
  double max_honest_deviation = 0.0;
  std::optional<long> recovery_time;
};

// Learning base: compromised agents misreport their actions to the others.
// Actions are carried as numbers; injection must name a valid action index,
// sign-flip mirrors the index (a -> m - 1 - a), and a dropped report is
// replaced by the last one received (action 0 before any arrives).
AdversarialLearningRun RunAdversarialLearning(const StrategicGame& game,
                                              std::vector<LearnerSpec> learners,
                                              const AdversaryModel& adversary, long steps,
                                              std::uint64_t seed,
                                              const std::vector<int>& signal_schedule = {});

}  // namespace stgames

#endif  // STGAMES_RESILIENCE_H_
