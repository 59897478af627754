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

#include "stgames/incentives.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "stgames/errors.h"
#include "stgames/lp.h"

namespace stgames {
namespace {

constexpr double kTolerance = 1e-9;

void CheckFits(const IncentiveSchedule& schedule, const StrategicGame& game) {
  if (!schedule.Fits(game)) {
    throw DomainError(fmt::format(
        "schedule grid ({} signals x {} profiles x {} agents) does not match the game",
        schedule.num_signals(), schedule.num_profiles(), schedule.num_agents()));
  }
}

double TermAt(const std::vector<double>& term, long profile, long num_profiles) {
  if (term.empty()) return 0.0;
  if (term.size() == 1) return term[0];
  if (static_cast<long>(term.size()) != num_profiles) {
    throw DomainError(fmt::format("hierarchical term has {} entries, expected 1 or {}",
                                  term.size(), num_profiles));
  }
  return term[profile];
}

// Discounted per-agent sums of a record, plus the discount mass used.
std::vector<double> DiscountedSums(const PayoffRecord& record, double discount) {
  std::vector<double> sums(record.payoffs.at(0).size(), 0.0);
  double weight = 1.0;
  for (const std::vector<double>& step : record.payoffs) {
    if (step.size() != sums.size()) {
      throw DomainError("agent count mismatch between payoff records");
    }
    for (std::size_t i = 0; i < sums.size(); ++i) sums[i] += weight * step[i];
    weight *= discount;
  }
  return sums;
}

void CheckDiscount(double discount) {
  if (!(discount > 0.0 && discount <= 1.0)) {
    throw DomainError(fmt::format("discount {} outside (0, 1]", discount));
  }
}

}  // namespace

IncentiveSchedule::IncentiveSchedule(const StrategicGame& game)
    : num_signals_(game.num_signals()),
      num_profiles_(game.num_profiles()),
      num_agents_(game.num_agents()),
      table_(static_cast<std::size_t>(num_signals_) * num_profiles_ * num_agents_, 0.0) {}

IncentiveSchedule IncentiveSchedule::Constant(const StrategicGame& game, double value) {
  if (!std::isfinite(value)) throw DomainError("incentive value is not finite");
  IncentiveSchedule s(game);
  std::fill(s.table_.begin(), s.table_.end(), value);
  return s;
}

void IncentiveSchedule::set(int signal, long profile, int agent, double value) {
  if (signal < 0 || signal >= num_signals_ || profile < 0 || profile >= num_profiles_ ||
      agent < 0 || agent >= num_agents_) {
    throw DomainError("schedule index out of range");
  }
  if (!std::isfinite(value)) throw DomainError("incentive value is not finite");
  table_[Offset(signal, profile) + agent] = value;
}

double IncentiveSchedule::Total(int signal, long profile) const {
  double total = 0.0;
  for (int i = 0; i < num_agents_; ++i) total += at(signal, profile, i);
  return total;
}

IncentiveSchedule IncentiveSchedule::Negated() const {
  IncentiveSchedule s = *this;
  for (double& x : s.table_) x = -x;
  return s;
}

bool IncentiveSchedule::Fits(const StrategicGame& game) const {
  return num_signals_ == game.num_signals() && num_profiles_ == game.num_profiles() &&
         num_agents_ == game.num_agents();
}

StrategicGame ModifiedPayoff(const StrategicGame& game,
                             const IncentiveSchedule& schedule) {
  CheckFits(schedule, game);
  StrategicGame out = game;
  for (int s = 0; s < game.num_signals(); ++s) {
    for (long k = 0; k < game.num_profiles(); ++k) {
      for (int i = 0; i < game.num_agents(); ++i) {
        out.SetPayoff(s, k, i, game.payoff(s, k, i) + schedule.at(s, k, i));
      }
    }
  }
  return out;
}

void CheckPartition(const GroupPartition& partition, int num_agents) {
  std::vector<int> seen(num_agents, 0);
  for (std::size_t m = 0; m < partition.size(); ++m) {
    if (partition[m].empty()) throw DomainError(fmt::format("group {} is empty", m + 1));
    for (int i : partition[m]) {
      if (i < 0 || i >= num_agents) {
        throw DomainError(fmt::format("group {} names unknown agent {}", m + 1, i));
      }
      if (seen[i]++) throw DomainError(fmt::format("agent {} is in two groups", i));
    }
  }
  for (int i = 0; i < num_agents; ++i) {
    if (!seen[i]) {
      throw DomainError(fmt::format("agent {} is missing from the partition", i));
    }
  }
}

IncentiveSchedule Flatten(const StrategicGame& game, const GroupPartition& partition,
                          const HierarchicalIncentive& hierarchy) {
  const int n = game.num_agents();
  CheckPartition(partition, n);
  if (static_cast<int>(hierarchy.intragroup.size()) != n) {
    throw DomainError("intragroup terms must be given for every agent");
  }
  if (hierarchy.intergroup.size() != partition.size()) {
    throw DomainError("intergroup terms must be given for every group");
  }
  std::vector<int> group_of(n);
  for (std::size_t m = 0; m < partition.size(); ++m) {
    for (int i : partition[m]) group_of[i] = static_cast<int>(m);
  }
  IncentiveSchedule s(game);
  const long profiles = game.num_profiles();
  for (int c = 0; c < game.num_signals(); ++c) {
    for (long k = 0; k < profiles; ++k) {
      for (int i = 0; i < n; ++i) {
        s.set(c, k, i,
              TermAt(hierarchy.intragroup[i], k, profiles) +
                  TermAt(hierarchy.intergroup[group_of[i]], k, profiles));
      }
    }
  }
  return s;
}

StrategicGame ApplyHierarchical(const StrategicGame& game,
                                const GroupPartition& partition,
                                const HierarchicalIncentive& hierarchy) {
  return ModifiedPayoff(game, Flatten(game, partition, hierarchy));
}

PayoffRecord BaselineRecord(const StrategicGame& game, const Trajectory& trajectory) {
  if (trajectory.empty()) throw DomainError("empty trajectory");
  PayoffRecord r;
  r.trajectory = trajectory;
  for (const TrajectoryStep& step : trajectory) {
    game.CheckSignal(step.signal);
    r.payoffs.push_back(Payoff(game, step.profile, step.signal));
  }
  return r;
}

PayoffRecord InducedRecord(const StrategicGame& game, const IncentiveSchedule& schedule,
                           const Trajectory& trajectory) {
  CheckFits(schedule, game);
  PayoffRecord r = BaselineRecord(game, trajectory);
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const long k = game.ProfileIndex(trajectory[t].profile);
    for (int i = 0; i < game.num_agents(); ++i) {
      r.payoffs[t][i] += schedule.at(trajectory[t].signal, k, i);
    }
  }
  return r;
}

bool IsParetoImproving(const PayoffRecord& baseline, const PayoffRecord& induced,
                       double discount) {
  if (baseline.payoffs.size() != induced.payoffs.size()) {
    throw DomainError(fmt::format("horizon mismatch: baseline {} steps, induced {}",
                                  baseline.payoffs.size(), induced.payoffs.size()));
  }
  if (baseline.payoffs.empty()) throw DomainError("empty payoff records");
  CheckDiscount(discount);
  const std::vector<double> base = DiscountedSums(baseline, discount);
  const std::vector<double> ind = DiscountedSums(induced, discount);
  if (base.size() != ind.size()) {
    throw DomainError("agent count mismatch between payoff records");
  }
  bool strict = false;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (ind[i] < base[i] - kTolerance) return false;
    if (ind[i] > base[i] + kTolerance) strict = true;
  }
  return strict;
}

void BudgetSpec::Validate() const {
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw DomainError(fmt::format("budget {} must be finite and nonnegative", budget));
  }
  CheckDiscount(discount);
  if (horizon && *horizon < 1) throw DomainError("budget horizon must be at least 1");
  if (!horizon && discount == 1.0) {
    throw DomainError("an infinite horizon requires a discount below 1");
  }
}

double BudgetSpec::DiscountMass() const {
  Validate();
  if (!horizon) return 1.0 / (1.0 - discount);
  if (discount == 1.0) return static_cast<double>(*horizon);
  return (1.0 - std::pow(discount, static_cast<double>(*horizon))) / (1.0 - discount);
}

BudgetReport BudgetCheck(const StrategicGame& game, const IncentiveSchedule& schedule,
                         const Trajectory& trajectory, const BudgetSpec& spec) {
  spec.Validate();
  CheckFits(schedule, game);
  if (trajectory.empty()) throw DomainError("empty trajectory");
  auto period_total = [&](const TrajectoryStep& step) {
    game.CheckSignal(step.signal);
    return schedule.Total(step.signal, game.ProfileIndex(step.profile));
  };
  BudgetReport r;
  if (trajectory.size() == 1) {
    r.spent = spec.DiscountMass() * period_total(trajectory[0]);
  } else {
    if (!spec.horizon) {
      throw DomainError("an infinite horizon needs a stationary (one-step) trajectory");
    }
    if (static_cast<long>(trajectory.size()) != *spec.horizon) {
      throw DomainError(fmt::format("trajectory has {} steps, horizon is {}",
                                    trajectory.size(), *spec.horizon));
    }
    double weight = 1.0;
    for (const TrajectoryStep& step : trajectory) {
      r.spent += weight * period_total(step);
      weight *= spec.discount;
    }
  }
  r.feasible = r.spent <= spec.budget + kTolerance;
  return r;
}

IncentiveDesign DesignIncentive(const StrategicGame& game, const TrajectoryStep& target,
                                const PayoffRecord& baseline, const BudgetSpec& spec,
                                double margin) {
  spec.Validate();
  game.CheckSignal(target.signal);
  game.CheckProfile(target.profile);
  if (!(margin > 0.0)) throw DomainError("strictness margin must be positive");
  const int n = game.num_agents();
  if (n > kMaxLpVariables) {
    throw CapacityError(fmt::format("incentive LP limited to {} agents", kMaxLpVariables));
  }
  if (baseline.payoffs.empty()) throw DomainError("empty baseline");
  // Baseline level per period: the discounted baseline sum spread over the
  // same discount mass.
  double mass = 0.0, weight = 1.0;
  for (std::size_t t = 0; t < baseline.payoffs.size(); ++t) {
    mass += weight;
    weight *= spec.discount;
  }
  std::vector<double> level = DiscountedSums(baseline, spec.discount);
  if (static_cast<int>(level.size()) != n) {
    throw DomainError("baseline agent count does not match the game");
  }
  for (double& x : level) x /= mass;

  const long k = game.ProfileIndex(target.profile);
  const std::vector<double> own = Payoff(game, target.profile, target.signal);
  const double budget_mass = spec.DiscountMass();

  // Smallest transfer each row alone demands, used to snap LP output onto the
  // exact binding values.
  std::vector<double> floor_of(n, 0.0);
  LinearProgram lp;
  lp.objective.assign(n, 1.0);
  for (int i = 0; i < n; ++i) {
    ActionProfile dev = target.profile;
    for (int a = 0; a < game.num_actions(i); ++a) {
      if (a == target.profile[i]) continue;
      dev[i] = a;
      const double need = game.payoff(target.signal, game.ProfileIndex(dev), i) - own[i];
      std::vector<double> row(n, 0.0);
      row[i] = 1.0;
      lp.AddConstraint(row, Relation::kGreaterEqual, need);
      floor_of[i] = std::max(floor_of[i], need);
    }
    std::vector<double> row(n, 0.0);
    row[i] = 1.0;
    lp.AddConstraint(row, Relation::kGreaterEqual, level[i] - own[i]);
    floor_of[i] = std::max(floor_of[i], level[i] - own[i]);
  }
  lp.AddConstraint(std::vector<double>(n, budget_mass), Relation::kLessEqual, spec.budget);

  auto solve = [&](std::optional<int> strict) -> std::optional<std::vector<double>> {
    LinearProgram copy = lp;
    std::vector<double> floors = floor_of;
    if (strict) {
      std::vector<double> row(n, 0.0);
      row[*strict] = 1.0;
      const double need = level[*strict] - own[*strict] + margin;
      copy.AddConstraint(row, Relation::kGreaterEqual, need);
      floors[*strict] = std::max(floors[*strict], need);
    }
    const LpSolution sol = SolveLp(copy);
    if (sol.status != LpStatus::kOptimal) return std::nullopt;
    std::vector<double> rho(n);
    for (int i = 0; i < n; ++i) rho[i] = std::max(sol.x[i], floors[i]);
    return rho;
  };

  auto strictly_better = [&](const std::vector<double>& rho) {
    for (int i = 0; i < n; ++i) {
      if (own[i] + rho[i] > level[i] + kTolerance) return true;
    }
    return false;
  };

  IncentiveDesign design;
  std::optional<std::vector<double>> rho = solve(std::nullopt);
  if (rho && !strictly_better(*rho)) {
    std::optional<std::vector<double>> best;
    double best_total = 0.0;
    for (int i = 0; i < n; ++i) {
      std::optional<std::vector<double>> r = solve(i);
      if (!r) continue;
      double total = 0.0;
      for (double x : *r) total += x;
      if (!best || total < best_total - kTolerance) {
        best = r;
        best_total = total;
        design.strict_agent = i;
      }
    }
    rho = best;
  }
  if (!rho) return design;

  design.feasible = true;
  design.transfer = *rho;
  design.schedule = IncentiveSchedule(game);
  for (int i = 0; i < n; ++i) {
    design.schedule.set(target.signal, k, i, design.transfer[i]);
    design.per_period += design.transfer[i];
  }
  design.spent = budget_mass * design.per_period;
  return design;
}

}  // namespace stgames
