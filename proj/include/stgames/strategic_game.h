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

#ifndef STGAMES_STRATEGIC_GAME_H_
#define STGAMES_STRATEGIC_GAME_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stgames {

// One action index per agent.
using ActionProfile = std::vector<int>;

// One probability vector per agent over its actions.
using MixedProfile = std::vector<std::vector<double>>;

inline constexpr long kMaxProfiles = 1000000;

// Finite N-agent game in strategic form. Payoffs are maximized. The payoff
// table for each signal value covers the full joint-action grid; profiles are
// indexed lexicographically with agent 0 most significant.
class StrategicGame {
 public:
  StrategicGame(std::vector<std::string> agent_names,
                std::vector<std::vector<std::string>> action_labels,
                std::vector<std::string> signal_labels = {"none"});

  int num_agents() const { return static_cast<int>(agent_names_.size()); }
  int num_actions(int agent) const;
  int num_signals() const { return static_cast<int>(signal_labels_.size()); }
  long num_profiles() const { return num_profiles_; }

  const std::string& agent_name(int agent) const;
  const std::string& action_label(int agent, int action) const;
  const std::string& signal_label(int signal) const;
  const std::vector<std::string>& signal_labels() const {
    return signal_labels_;
  }

  int AgentIndex(const std::string& name) const;
  int ActionIndex(int agent, const std::string& label) const;
  int SignalIndex(const std::string& label) const;
  ActionProfile ParseProfile(const std::vector<std::string>& labels) const;
  std::string ProfileString(const ActionProfile& profile) const;

  long ProfileIndex(const ActionProfile& profile) const;
  ActionProfile ProfileAt(long index) const;
  void CheckProfile(const ActionProfile& profile) const;
  void CheckSignal(int signal) const;
  void CheckAgent(int agent) const;

  // Payoff vector of every agent at a profile.
  std::span<const double> payoffs(int signal, long profile_index) const;
  double payoff(int signal, long profile_index, int agent) const {
    return table_[Offset(signal, profile_index) + agent];
  }
  void SetPayoffs(int signal, const ActionProfile& profile,
                  std::span<const double> values);
  void SetPayoff(int signal, long profile_index, int agent, double value) {
    table_[Offset(signal, profile_index) + agent] = value;
  }

  bool SameShape(const StrategicGame& other) const;

 private:
  std::size_t Offset(int signal, long profile_index) const {
    return (static_cast<std::size_t>(signal) * num_profiles_ + profile_index) *
           agent_names_.size();
  }

  std::vector<std::string> agent_names_;
  std::vector<std::vector<std::string>> action_labels_;
  std::vector<std::string> signal_labels_;
  std::vector<long> strides_;
  long num_profiles_ = 1;
  std::vector<double> table_;
};

// Payoff lookup (J_1, ..., J_N) at a profile.
std::vector<double> Payoff(const StrategicGame& game,
                           const ActionProfile& profile, int signal = 0);
std::vector<double> Payoff(const StrategicGame& game,
                           const std::vector<std::string>& profile,
                           const std::string& signal);

// All maximizers of agent's payoff against the other entries of `opponents`
// (the agent's own entry is ignored). Ties are exact.
std::vector<int> BestResponses(const StrategicGame& game, int agent,
                               const ActionProfile& opponents, int signal = 0);

struct Deviation {
  int agent = 0;
  int action = 0;
  double gain = 0.0;
};

struct NashCheck {
  bool is_nash = true;
  // Largest unilateral improvement; staying put counts as a zero gain.
  double max_gain = 0.0;
  std::optional<Deviation> witness;  // present iff !is_nash
};

NashCheck IsNash(const StrategicGame& game, const ActionProfile& profile,
                 int signal = 0, double eps = 0.0);

// Pure equilibria in lexicographic profile order.
std::vector<ActionProfile> EnumeratePureNash(const StrategicGame& game,
                                             int signal = 0);

enum class PoaStatus { kDefined, kNoPureEquilibrium, kNonPositiveWelfare };

const char* ToString(PoaStatus status);

// Welfare is the sum of agent payoffs (maximization convention). The ratio is
// optimal / worst-equilibrium welfare, defined only when both are positive.
struct WelfareReport {
  PoaStatus status = PoaStatus::kNoPureEquilibrium;
  double optimal_welfare = 0.0;
  ActionProfile optimal_profile;
  double worst_equilibrium_welfare = 0.0;
  ActionProfile worst_equilibrium;
  double ratio = 0.0;
  static constexpr const char* kConvention =
      "payoffs maximized; ratio = optimal welfare / worst pure-equilibrium "
      "welfare (>= 1), defined when both are positive";
};

WelfareReport WelfareAndPoa(const StrategicGame& game, int signal = 0);

// Mixed profiles.
void CheckMixed(const StrategicGame& game, const MixedProfile& mixed);
std::vector<double> ExpectedPayoffs(const StrategicGame& game,
                                    const MixedProfile& mixed, int signal = 0);
// Expected payoff of each pure action of `agent` against the others' mixture.
std::vector<double> ActionValues(const StrategicGame& game,
                                 const MixedProfile& mixed, int agent,
                                 int signal = 0);
// Largest gain any agent obtains by a pure unilateral deviation.
double MixedNashGap(const StrategicGame& game, const MixedProfile& mixed,
                    int signal = 0);

}  // namespace stgames

#endif  // STGAMES_STRATEGIC_GAME_H_
