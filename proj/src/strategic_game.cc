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

#include "stgames/strategic_game.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "stgames/errors.h"

namespace stgames {

StrategicGame::StrategicGame(std::vector<std::string> agent_names,
                             std::vector<std::vector<std::string>> action_labels,
                             std::vector<std::string> signal_labels)
    : agent_names_(std::move(agent_names)),
      action_labels_(std::move(action_labels)),
      signal_labels_(std::move(signal_labels)) {
  if (agent_names_.empty()) throw DomainError("a game needs at least one agent");
  if (agent_names_.size() != action_labels_.size()) {
    throw DomainError("one action set is required per agent");
  }
  if (signal_labels_.empty()) throw DomainError("signal set must be nonempty");
  strides_.assign(agent_names_.size(), 1);
  for (int i = num_agents() - 1; i >= 0; --i) {
    if (action_labels_[i].empty()) {
      throw DomainError(fmt::format("agent '{}' has no actions", agent_names_[i]));
    }
    strides_[i] = num_profiles_;
    num_profiles_ *= static_cast<long>(action_labels_[i].size());
    if (num_profiles_ > kMaxProfiles) {
      throw CapacityError(fmt::format(
          "joint-action grid exceeds {} profiles", kMaxProfiles));
    }
  }
  table_.assign(static_cast<std::size_t>(num_signals()) * num_profiles_ *
                    agent_names_.size(),
                0.0);
}

int StrategicGame::num_actions(int agent) const {
  CheckAgent(agent);
  return static_cast<int>(action_labels_[agent].size());
}

const std::string& StrategicGame::agent_name(int agent) const {
  CheckAgent(agent);
  return agent_names_[agent];
}

const std::string& StrategicGame::action_label(int agent, int action) const {
  CheckAgent(agent);
  if (action < 0 || action >= num_actions(agent)) {
    throw DomainError(fmt::format("action {} out of range for agent {}", action,
                                  agent));
  }
  return action_labels_[agent][action];
}

const std::string& StrategicGame::signal_label(int signal) const {
  CheckSignal(signal);
  return signal_labels_[signal];
}

int StrategicGame::AgentIndex(const std::string& name) const {
  auto it = std::find(agent_names_.begin(), agent_names_.end(), name);
  if (it == agent_names_.end()) {
    throw DomainError(fmt::format("unknown agent '{}'", name));
  }
  return static_cast<int>(it - agent_names_.begin());
}

int StrategicGame::ActionIndex(int agent, const std::string& label) const {
  CheckAgent(agent);
  const auto& labels = action_labels_[agent];
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    throw DomainError(fmt::format("unknown action '{}' for agent '{}'", label,
                                  agent_names_[agent]));
  }
  return static_cast<int>(it - labels.begin());
}

int StrategicGame::SignalIndex(const std::string& label) const {
  auto it = std::find(signal_labels_.begin(), signal_labels_.end(), label);
  if (it == signal_labels_.end()) {
    throw DomainError(fmt::format("unknown signal '{}'", label));
  }
  return static_cast<int>(it - signal_labels_.begin());
}

ActionProfile StrategicGame::ParseProfile(
    const std::vector<std::string>& labels) const {
  if (static_cast<int>(labels.size()) != num_agents()) {
    throw DomainError(fmt::format("profile has {} entries; game has {} agents",
                                  labels.size(), num_agents()));
  }
  ActionProfile profile(labels.size());
  for (int i = 0; i < num_agents(); ++i) profile[i] = ActionIndex(i, labels[i]);
  return profile;
}

std::string StrategicGame::ProfileString(const ActionProfile& profile) const {
  CheckProfile(profile);
  std::string out = "(";
  for (int i = 0; i < num_agents(); ++i) {
    if (i > 0) out += ",";
    out += action_labels_[i][profile[i]];
  }
  return out + ")";
}

long StrategicGame::ProfileIndex(const ActionProfile& profile) const {
  CheckProfile(profile);
  long index = 0;
  for (int i = 0; i < num_agents(); ++i) index += strides_[i] * profile[i];
  return index;
}

ActionProfile StrategicGame::ProfileAt(long index) const {
  if (index < 0 || index >= num_profiles_) {
    throw DomainError(fmt::format("profile index {} out of range", index));
  }
  ActionProfile profile(agent_names_.size());
  for (int i = 0; i < num_agents(); ++i) {
    profile[i] = static_cast<int>(index / strides_[i]);
    index %= strides_[i];
  }
  return profile;
}

void StrategicGame::CheckProfile(const ActionProfile& profile) const {
  if (static_cast<int>(profile.size()) != num_agents()) {
    throw DomainError(fmt::format("profile has {} entries; game has {} agents",
                                  profile.size(), num_agents()));
  }
  for (int i = 0; i < num_agents(); ++i) {
    if (profile[i] < 0 ||
        profile[i] >= static_cast<int>(action_labels_[i].size())) {
      throw DomainError(fmt::format("action {} out of range for agent '{}'",
                                    profile[i], agent_names_[i]));
    }
  }
}

void StrategicGame::CheckSignal(int signal) const {
  if (signal < 0 || signal >= num_signals()) {
    throw DomainError(fmt::format("signal index {} out of range", signal));
  }
}

void StrategicGame::CheckAgent(int agent) const {
  if (agent < 0 || agent >= num_agents()) {
    throw DomainError(fmt::format("agent index {} out of range", agent));
  }
}

std::span<const double> StrategicGame::payoffs(int signal,
                                               long profile_index) const {
  CheckSignal(signal);
  return {table_.data() + Offset(signal, profile_index), agent_names_.size()};
}

void StrategicGame::SetPayoffs(int signal, const ActionProfile& profile,
                               std::span<const double> values) {
  CheckSignal(signal);
  if (static_cast<int>(values.size()) != num_agents()) {
    throw DomainError("payoff vector length differs from agent count");
  }
  const std::size_t offset = Offset(signal, ProfileIndex(profile));
  std::copy(values.begin(), values.end(), table_.begin() + offset);
}

bool StrategicGame::SameShape(const StrategicGame& other) const {
  return action_labels_ == other.action_labels_ &&
         signal_labels_ == other.signal_labels_ &&
         agent_names_ == other.agent_names_;
}

std::vector<double> Payoff(const StrategicGame& game,
                           const ActionProfile& profile, int signal) {
  game.CheckSignal(signal);
  auto values = game.payoffs(signal, game.ProfileIndex(profile));
  return {values.begin(), values.end()};
}

std::vector<double> Payoff(const StrategicGame& game,
                           const std::vector<std::string>& profile,
                           const std::string& signal) {
  return Payoff(game, game.ParseProfile(profile), game.SignalIndex(signal));
}

std::vector<int> BestResponses(const StrategicGame& game, int agent,
                               const ActionProfile& opponents, int signal) {
  game.CheckAgent(agent);
  game.CheckSignal(signal);
  ActionProfile probe = opponents;
  if (static_cast<int>(probe.size()) != game.num_agents()) {
    throw DomainError("opponent profile must have one entry per agent");
  }
  probe[agent] = 0;
  game.CheckProfile(probe);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> argmax;
  for (int a = 0; a < game.num_actions(agent); ++a) {
    probe[agent] = a;
    const double value = game.payoff(signal, game.ProfileIndex(probe), agent);
    if (value > best) {
      best = value;
      argmax.assign(1, a);
    } else if (value == best) {
      argmax.push_back(a);
    }
  }
  return argmax;
}

NashCheck IsNash(const StrategicGame& game, const ActionProfile& profile,
                 int signal, double eps) {
  if (!(eps >= 0.0)) throw DomainError("eps must be nonnegative");
  game.CheckSignal(signal);
  const long base = game.ProfileIndex(profile);
  NashCheck result;
  std::optional<Deviation> best;
  ActionProfile probe = profile;
  for (int i = 0; i < game.num_agents(); ++i) {
    const double current = game.payoff(signal, base, i);
    for (int a = 0; a < game.num_actions(i); ++a) {
      if (a == profile[i]) continue;
      probe[i] = a;
      const double gain =
          game.payoff(signal, game.ProfileIndex(probe), i) - current;
      if (gain > result.max_gain) {
        result.max_gain = gain;
        best = Deviation{i, a, gain};
      }
    }
    probe[i] = profile[i];
  }
  result.is_nash = result.max_gain <= eps;
  if (!result.is_nash) result.witness = best;
  return result;
}

std::vector<ActionProfile> EnumeratePureNash(const StrategicGame& game,
                                             int signal) {
  game.CheckSignal(signal);
  if (game.num_profiles() > kMaxProfiles) {
    throw CapacityError("joint-action grid too large to enumerate");
  }
  std::vector<ActionProfile> equilibria;
  for (long k = 0; k < game.num_profiles(); ++k) {
    ActionProfile profile = game.ProfileAt(k);
    if (IsNash(game, profile, signal).is_nash) {
      equilibria.push_back(std::move(profile));
    }
  }
  return equilibria;
}

const char* ToString(PoaStatus status) {
  switch (status) {
    case PoaStatus::kDefined:
      return "defined";
    case PoaStatus::kNoPureEquilibrium:
      return "undefined: no pure equilibrium";
    case PoaStatus::kNonPositiveWelfare:
      return "undefined: non-positive welfare";
  }
  return "unknown";
}

WelfareReport WelfareAndPoa(const StrategicGame& game, int signal) {
  game.CheckSignal(signal);
  WelfareReport report;
  auto welfare = [&](long k) {
    double w = 0.0;
    for (double x : game.payoffs(signal, k)) w += x;
    return w;
  };
  long best = 0;
  for (long k = 1; k < game.num_profiles(); ++k) {
    if (welfare(k) > welfare(best)) best = k;
  }
  report.optimal_welfare = welfare(best);
  report.optimal_profile = game.ProfileAt(best);
  const auto equilibria = EnumeratePureNash(game, signal);
  if (equilibria.empty()) {
    report.status = PoaStatus::kNoPureEquilibrium;
    report.ratio = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  report.worst_equilibrium = equilibria.front();
  report.worst_equilibrium_welfare = welfare(game.ProfileIndex(equilibria.front()));
  for (const auto& eq : equilibria) {
    const double w = welfare(game.ProfileIndex(eq));
    if (w < report.worst_equilibrium_welfare) {
      report.worst_equilibrium_welfare = w;
      report.worst_equilibrium = eq;
    }
  }
  if (report.optimal_welfare > 0.0 && report.worst_equilibrium_welfare > 0.0) {
    report.status = PoaStatus::kDefined;
    report.ratio = report.optimal_welfare / report.worst_equilibrium_welfare;
  } else {
    report.status = PoaStatus::kNonPositiveWelfare;
    report.ratio = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

void CheckMixed(const StrategicGame& game, const MixedProfile& mixed) {
  if (static_cast<int>(mixed.size()) != game.num_agents()) {
    throw DomainError("mixed profile needs one distribution per agent");
  }
  for (int i = 0; i < game.num_agents(); ++i) {
    if (static_cast<int>(mixed[i].size()) != game.num_actions(i)) {
      throw DomainError(fmt::format(
          "distribution for agent {} has wrong length", i));
    }
    double total = 0.0;
    for (double p : mixed[i]) {
      if (!(p >= 0.0)) throw DomainError("probabilities must be nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw DomainError(fmt::format(
          "distribution for agent {} sums to {}", i, total));
    }
  }
}

std::vector<double> ExpectedPayoffs(const StrategicGame& game,
                                    const MixedProfile& mixed, int signal) {
  CheckMixed(game, mixed);
  game.CheckSignal(signal);
  std::vector<double> expected(game.num_agents(), 0.0);
  for (long k = 0; k < game.num_profiles(); ++k) {
    const ActionProfile profile = game.ProfileAt(k);
    double weight = 1.0;
    for (int i = 0; i < game.num_agents() && weight != 0.0; ++i) {
      weight *= mixed[i][profile[i]];
    }
    if (weight == 0.0) continue;
    const auto values = game.payoffs(signal, k);
    for (int i = 0; i < game.num_agents(); ++i) expected[i] += weight * values[i];
  }
  return expected;
}

std::vector<double> ActionValues(const StrategicGame& game,
                                 const MixedProfile& mixed, int agent,
                                 int signal) {
  CheckMixed(game, mixed);
  game.CheckAgent(agent);
  game.CheckSignal(signal);
  std::vector<double> values(game.num_actions(agent), 0.0);
  for (long k = 0; k < game.num_profiles(); ++k) {
    const ActionProfile profile = game.ProfileAt(k);
    double weight = 1.0;
    for (int j = 0; j < game.num_agents() && weight != 0.0; ++j) {
      if (j != agent) weight *= mixed[j][profile[j]];
    }
    if (weight == 0.0) continue;
    values[profile[agent]] += weight * game.payoff(signal, k, agent);
  }
  return values;
}

double MixedNashGap(const StrategicGame& game, const MixedProfile& mixed,
                    int signal) {
  double gap = 0.0;
  for (int i = 0; i < game.num_agents(); ++i) {
    const auto values = ActionValues(game, mixed, i, signal);
    double current = 0.0;
    for (int a = 0; a < game.num_actions(i); ++a) current += mixed[i][a] * values[a];
    const double best = *std::max_element(values.begin(), values.end());
    gap = std::max(gap, best - current);
  }
  return gap;
}

}  // namespace stgames
