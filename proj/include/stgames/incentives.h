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

#ifndef STGAMES_INCENTIVES_H_
#define STGAMES_INCENTIVES_H_

#include <optional>
#include <vector>

#include "stgames/strategic_game.h"

namespace stgames {

// Stationary incentive term rho_i(x, c) in payoff units; positive values are
// transfers to the agent. Laid out like the game's payoff tables.
class IncentiveSchedule {
 public:
  IncentiveSchedule() = default;
  // Zero schedule on the game's grid.
  explicit IncentiveSchedule(const StrategicGame& game);
  static IncentiveSchedule Constant(const StrategicGame& game, double value);

  int num_signals() const { return num_signals_; }
  long num_profiles() const { return num_profiles_; }
  int num_agents() const { return num_agents_; }

  double at(int signal, long profile, int agent) const {
    return table_[Offset(signal, profile) + agent];
  }
  void set(int signal, long profile, int agent, double value);
  // Sum over agents at one profile.
  double Total(int signal, long profile) const;

  IncentiveSchedule Negated() const;
  bool Fits(const StrategicGame& game) const;

 private:
  std::size_t Offset(int signal, long profile) const {
    return (static_cast<std::size_t>(signal) * num_profiles_ + profile) * num_agents_;
  }
  int num_signals_ = 0;
  long num_profiles_ = 0;
  int num_agents_ = 0;
  std::vector<double> table_;
};

// J~_i = J_i + rho_i entrywise.
StrategicGame ModifiedPayoff(const StrategicGame& game,
                             const IncentiveSchedule& schedule);

// Blocks of agent indices.
using GroupPartition = std::vector<std::vector<int>>;

void CheckPartition(const GroupPartition& partition, int num_agents);

// Each term is either one scalar (applied at every profile) or one value per
// profile, shared by all signals.
struct HierarchicalIncentive {
  std::vector<std::vector<double>> intragroup;  // per agent
  std::vector<std::vector<double>> intergroup;  // per group
};

IncentiveSchedule Flatten(const StrategicGame& game,
                          const GroupPartition& partition,
                          const HierarchicalIncentive& hierarchy);

StrategicGame ApplyHierarchical(const StrategicGame& game,
                                const GroupPartition& partition,
                                const HierarchicalIncentive& hierarchy);

struct TrajectoryStep {
  int signal = 0;
  ActionProfile profile;
};
using Trajectory = std::vector<TrajectoryStep>;

// Per-step per-agent payoffs. One step stands for a stationary outcome.
struct PayoffRecord {
  Trajectory trajectory;
  std::vector<std::vector<double>> payoffs;
};

PayoffRecord BaselineRecord(const StrategicGame& game, const Trajectory& trajectory);
// Payoffs along the trajectory with the schedule's transfers included.
PayoffRecord InducedRecord(const StrategicGame& game,
                           const IncentiveSchedule& schedule,
                           const Trajectory& trajectory);

// Weak improvement for every agent (tolerance 1e-9), strict for one. Steps
// are combined as discounted sums (discount^t, t from 0).
bool IsParetoImproving(const PayoffRecord& baseline, const PayoffRecord& induced,
                       double discount = 1.0);

struct BudgetSpec {
  double budget = 0.0;
  double discount = 1.0;          // in (0, 1]
  std::optional<long> horizon;    // empty: infinite (requires discount < 1)

  void Validate() const;
  // Sum of discount^t over the horizon.
  double DiscountMass() const;
};

struct BudgetReport {
  double spent = 0.0;
  bool feasible = false;
};

// Discounted spend along the trajectory. A one-step trajectory is treated as
// stationary and repeated over the horizon; otherwise its length must match a
// finite horizon.
BudgetReport BudgetCheck(const StrategicGame& game, const IncentiveSchedule& schedule,
                         const Trajectory& trajectory, const BudgetSpec& spec);

struct IncentiveDesign {
  bool feasible = false;
  IncentiveSchedule schedule;
  std::vector<double> transfer;  // rho at the target
  double per_period = 0.0;       // sum of transfers in one period
  double spent = 0.0;            // discounted over the budget horizon
  // Set when the cheapest weakly improving schedule was not strict for anyone
  // and one agent had to be raised by `margin`.
  std::optional<int> strict_agent;
};

// Cheapest nonnegative transfer supported on the target profile that makes it
// a pure equilibrium, Pareto-improves on the stationary baseline, and fits
// the budget.
IncentiveDesign DesignIncentive(const StrategicGame& game, const TrajectoryStep& target,
                                const PayoffRecord& baseline, const BudgetSpec& spec,
                                double margin = 1e-6);

}  // namespace stgames

#endif  // STGAMES_INCENTIVES_H_
