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

#include "stgames/learning.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "stgames/errors.h"

namespace stgames {
namespace {

void CheckRate(double rate, const char* what) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw DomainError(fmt::format("{} {} outside [0, 1]", what, rate));
  }
}

bool Allowed(std::span<const char> admissible, int a) {
  return admissible.empty() || admissible[a] != 0;
}

void CheckAdmissible(std::span<const char> admissible, std::size_t size) {
  if (admissible.empty()) return;
  if (admissible.size() != size) {
    throw DomainError("admissible mask size does not match action count");
  }
  if (std::none_of(admissible.begin(), admissible.end(),
                   [](char c) { return c != 0; })) {
    throw DomainError("admissible set is empty");
  }
}

// Clamps tiny negatives and rescales to unit mass.
void Renormalize(std::vector<double>& p) {
  double total = 0.0;
  for (double& x : p) {
    if (x < 0.0) x = 0.0;
    total += x;
  }
  if (total <= 0.0) {
    std::fill(p.begin(), p.end(), 1.0 / p.size());
    return;
  }
  for (double& x : p) x /= total;
}

}  // namespace

const char* ToString(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::kBestResponse: return "best-response";
    case LearnerKind::kSmoothedBestResponse: return "smoothed-best-response";
    case LearnerKind::kFictitiousPlay: return "fictitious-play";
    case LearnerKind::kReplicator: return "replicator";
    case LearnerKind::kPayoffEstimation: return "payoff-estimation";
  }
  return "?";
}

std::optional<LearnerKind> ParseLearnerKind(const std::string& name) {
  for (LearnerKind k :
       {LearnerKind::kBestResponse, LearnerKind::kSmoothedBestResponse,
        LearnerKind::kFictitiousPlay, LearnerKind::kReplicator,
        LearnerKind::kPayoffEstimation}) {
    if (name == ToString(k)) return k;
  }
  return std::nullopt;
}

double RateSchedule::At(long t) const {
  if (t < 1) t = 1;
  return kind == Kind::kConstant ? value : value / static_cast<double>(t);
}

void LearnerSpec::Validate(int num_actions) const {
  CheckRate(payoff_rate.value, "payoff rate");
  CheckRate(policy_rate.value, "policy rate");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw DomainError(fmt::format("temperature {} must be positive", temperature));
  }
  if (!initial_policy.empty()) {
    if (static_cast<int>(initial_policy.size()) != num_actions) {
      throw DomainError(fmt::format("initial policy has {} entries, expected {}",
                                    initial_policy.size(), num_actions));
    }
    double total = 0.0;
    for (double p : initial_policy) {
      if (!(p >= 0.0)) throw DomainError("initial policy has a negative entry");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw DomainError(fmt::format("initial policy sums to {}", total));
    }
  }
  if (!initial_estimate.empty() &&
      static_cast<int>(initial_estimate.size()) != num_actions) {
    throw DomainError("initial estimate size does not match action count");
  }
}

LearningState InitialState(const StrategicGame& game,
                           std::span<const LearnerSpec> learners) {
  const int n = game.num_agents();
  if (static_cast<int>(learners.size()) != n) {
    throw DomainError(fmt::format("{} learners for {} agents", learners.size(), n));
  }
  LearningState state;
  state.policy.resize(n);
  state.estimate.resize(n);
  state.counts.resize(n);
  for (int i = 0; i < n; ++i) {
    const int m = game.num_actions(i);
    learners[i].Validate(m);
    state.policy[i] = learners[i].initial_policy.empty()
                          ? std::vector<double>(m, 1.0 / m)
                          : learners[i].initial_policy;
    state.estimate[i] = learners[i].initial_estimate.empty()
                            ? std::vector<double>(m, 0.0)
                            : learners[i].initial_estimate;
    state.counts[i].resize(n);
    for (int j = 0; j < n; ++j) state.counts[i][j].assign(game.num_actions(j), 0);
  }
  return state;
}

void StepPayoffEstimate(LearningState& state, int agent, LearnerKind kind,
                        double rate, const PayoffObservation& observation) {
  CheckRate(rate, "payoff rate");
  if (agent < 0 || agent >= static_cast<int>(state.estimate.size())) {
    throw DomainError(fmt::format("agent {} out of range", agent));
  }
  std::vector<double>& q = state.estimate[agent];
  if (kind == LearnerKind::kPayoffEstimation) {
    const int a = observation.action;
    if (a < 0 || a >= static_cast<int>(q.size())) {
      throw DomainError(fmt::format("realized action {} out of range", a));
    }
    q[a] = (1.0 - rate) * q[a] + rate * observation.payoff;
    return;
  }
  const std::vector<double>& target = kind == LearnerKind::kFictitiousPlay
                                          ? observation.empirical
                                          : observation.counterfactual;
  if (target.size() != q.size()) {
    throw DomainError("payoff target size does not match action count");
  }
  for (std::size_t a = 0; a < q.size(); ++a) {
    q[a] = (1.0 - rate) * q[a] + rate * target[a];
  }
}

std::vector<double> ArgmaxIndicator(std::span<const double> q,
                                    std::span<const char> admissible) {
  CheckAdmissible(admissible, q.size());
  int best = -1;
  for (int a = 0; a < static_cast<int>(q.size()); ++a) {
    if (!Allowed(admissible, a)) continue;
    if (best < 0 || q[a] > q[best]) best = a;
  }
  std::vector<double> out(q.size(), 0.0);
  out[best] = 1.0;
  return out;
}

std::vector<double> Softmax(std::span<const double> q, double temperature,
                            std::span<const char> admissible) {
  CheckAdmissible(admissible, q.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (Allowed(admissible, a)) top = std::max(top, q[a]);
  }
  std::vector<double> out(q.size(), 0.0);
  double total = 0.0;
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (!Allowed(admissible, a)) continue;
    out[a] = std::exp((q[a] - top) / temperature);
    total += out[a];
  }
  for (double& x : out) x /= total;
  return out;
}

std::vector<double> ReplicatorMap(std::span<const double> policy,
                                  std::span<const double> q,
                                  std::span<const char> admissible) {
  CheckAdmissible(admissible, q.size());
  if (policy.size() != q.size()) {
    throw DomainError("policy and estimate sizes differ");
  }
  double low = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (Allowed(admissible, a)) low = std::min(low, q[a]);
  }
  std::vector<double> out(q.size(), 0.0);
  double total = 0.0;
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (!Allowed(admissible, a)) continue;
    out[a] = std::max(policy[a], 0.0) * (q[a] - low + 1.0);
    total += out[a];
  }
  if (total <= 0.0) {
    // All mass sat on excluded actions: restart from uniform on the allowed set.
    for (std::size_t a = 0; a < q.size(); ++a) out[a] = Allowed(admissible, a);
    Renormalize(out);
    return out;
  }
  for (double& x : out) x /= total;
  return out;
}

void StepPolicy(LearningState& state, int agent, const LearnerSpec& learner,
                double rate, std::span<const char> admissible) {
  CheckRate(rate, "policy rate");
  if (agent < 0 || agent >= static_cast<int>(state.policy.size())) {
    throw DomainError(fmt::format("agent {} out of range", agent));
  }
  std::vector<double>& pi = state.policy[agent];
  const std::vector<double>& q = state.estimate[agent];
  std::vector<double> target;
  switch (learner.kind) {
    case LearnerKind::kBestResponse:
    case LearnerKind::kFictitiousPlay:
      target = ArgmaxIndicator(q, admissible);
      break;
    case LearnerKind::kSmoothedBestResponse:
    case LearnerKind::kPayoffEstimation:
      target = Softmax(q, learner.temperature, admissible);
      break;
    case LearnerKind::kReplicator:
      target = ReplicatorMap(pi, q, admissible);
      break;
  }
  if (rate == 0.0) return;
  for (std::size_t a = 0; a < pi.size(); ++a) {
    pi[a] = (1.0 - rate) * pi[a] + rate * target[a];
  }
  Renormalize(pi);
}

DynamicsEngine::DynamicsEngine(const StrategicGame& game,
                               std::vector<LearnerSpec> learners,
                               std::uint64_t seed, UpdateSchedule schedule)
    : game_(&game),
      learners_(std::move(learners)),
      schedule_(schedule),
      rng_(seed),
      state_(InitialState(game, learners_)) {}

int DynamicsEngine::Sample(std::span<const double> policy) {
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  double cumulative = 0.0;
  int last = 0;
  for (int a = 0; a < static_cast<int>(policy.size()); ++a) {
    if (policy[a] <= 0.0) continue;
    cumulative += policy[a];
    last = a;
    if (u < cumulative) return a;
  }
  return last;
}

void DynamicsEngine::Restrict(const AdmissibleMask& mask) {
  const int n = game_->num_agents();
  if (static_cast<int>(mask.size()) != n) {
    throw DomainError("admissible mask agent count mismatch");
  }
  for (int i = 0; i < n; ++i) {
    CheckAdmissible(mask[i], state_.policy[i].size());
    std::vector<double>& pi = state_.policy[i];
    double kept = 0.0;
    for (std::size_t a = 0; a < pi.size(); ++a) {
      if (!mask[i][a]) pi[a] = 0.0;
      kept += pi[a];
    }
    if (kept <= 0.0) {
      for (std::size_t a = 0; a < pi.size(); ++a) pi[a] = mask[i][a] ? 1.0 : 0.0;
    }
    Renormalize(pi);
  }
}

StepRecord DynamicsEngine::Step(int signal, const AdmissibleMask* mask,
                                const ObservationFilter* filter) {
  const StrategicGame& game = *game_;
  game.CheckSignal(signal);
  const int n = game.num_agents();
  if (mask && static_cast<int>(mask->size()) != n) {
    throw DomainError("admissible mask agent count mismatch");
  }
  const long t = ++state_.t;

  StepRecord record;
  record.t = t;
  record.signal = signal;
  record.actions.resize(n);
  for (int i = 0; i < n; ++i) record.actions[i] = Sample(state_.policy[i]);
  const std::span<const double> realized =
      game.payoffs(signal, game.ProfileIndex(record.actions));
  record.payoffs.assign(realized.begin(), realized.end());

  for (int i = 0; i < n; ++i) {
    ActionProfile seen = filter ? (*filter)(t, i, record.actions) : record.actions;
    seen[i] = record.actions[i];
    game.CheckProfile(seen);
    for (int j = 0; j < n; ++j) {
      if (j != i) ++state_.counts[i][j][seen[j]];
    }
    if (schedule_ == UpdateSchedule::kRoundRobin && (t - 1) % n != i) continue;

    const LearnerSpec& learner = learners_[i];
    PayoffObservation obs;
    obs.action = record.actions[i];
    obs.payoff = record.payoffs[i];
    switch (learner.kind) {
      case LearnerKind::kPayoffEstimation:
        break;
      case LearnerKind::kFictitiousPlay: {
        MixedProfile empirical(n);
        for (int j = 0; j < n; ++j) {
          if (j == i) {
            empirical[j] = state_.policy[i];
            continue;
          }
          const std::vector<long>& c = state_.counts[i][j];
          const double total = std::accumulate(c.begin(), c.end(), 0.0);
          empirical[j].resize(c.size());
          for (std::size_t a = 0; a < c.size(); ++a) empirical[j][a] = c[a] / total;
        }
        obs.empirical = ActionValues(game, empirical, i, signal);
        break;
      }
      default: {
        const int m = game.num_actions(i);
        obs.counterfactual.resize(m);
        ActionProfile probe = seen;
        for (int a = 0; a < m; ++a) {
          probe[i] = a;
          obs.counterfactual[a] = game.payoff(signal, game.ProfileIndex(probe), i);
        }
      }
    }
    StepPayoffEstimate(state_, i, learner.kind, learner.payoff_rate.At(t), obs);
    std::span<const char> allowed;
    if (mask) allowed = (*mask)[i];
    StepPolicy(state_, i, learner, learner.policy_rate.At(t), allowed);
  }
  record.policy = state_.policy;
  record.estimate = state_.estimate;
  return record;
}

Trace RunDynamics(const StrategicGame& game, std::vector<LearnerSpec> learners,
                  long horizon, std::uint64_t seed,
                  const std::vector<int>& signal_schedule,
                  UpdateSchedule schedule) {
  if (horizon < 1) throw DomainError("horizon must be at least 1");
  for (int c : signal_schedule) game.CheckSignal(c);
  DynamicsEngine engine(game, std::move(learners), seed, schedule);
  Trace trace;
  trace.seed = seed;
  trace.steps.reserve(horizon);
  for (long t = 0; t < horizon; ++t) {
    const int signal = signal_schedule.empty()
                           ? 0
                           : signal_schedule[t % signal_schedule.size()];
    trace.steps.push_back(engine.Step(signal));
  }
  return trace;
}

Diagnostics Diagnose(const Trace& trace, const StrategicGame& game,
                     long gap_stride) {
  if (trace.steps.empty()) throw DomainError("empty trace");
  if (gap_stride < 1) throw DomainError("gap stride must be positive");
  const int n = game.num_agents();
  for (const StepRecord& s : trace.steps) {
    if (static_cast<int>(s.actions.size()) != n) {
      throw DomainError("trace does not match game: agent count");
    }
    game.CheckSignal(s.signal);
    game.CheckProfile(s.actions);
  }

  const double steps = static_cast<double>(trace.steps.size());
  Diagnostics d;
  d.regret.assign(n, 0.0);
  d.marginal_frequency.resize(n);
  std::vector<std::vector<long>> counts(n);
  for (int i = 0; i < n; ++i) counts[i].assign(game.num_actions(i), 0);

  std::vector<std::vector<double>> hindsight(n);
  for (int i = 0; i < n; ++i) hindsight[i].assign(game.num_actions(i), 0.0);
  std::vector<double> realized(n, 0.0);
  std::vector<long> joint;  // profile indices, sorted afterwards

  long index = 0;
  for (const StepRecord& s : trace.steps) {
    ++index;
    const long k = game.ProfileIndex(s.actions);
    joint.push_back(k);
    for (int i = 0; i < n; ++i) {
      realized[i] += game.payoff(s.signal, k, i);
      ActionProfile probe = s.actions;
      for (int a = 0; a < game.num_actions(i); ++a) {
        probe[i] = a;
        hindsight[i][a] += game.payoff(s.signal, game.ProfileIndex(probe), i);
      }
      ++counts[i][s.actions[i]];
    }
    if (index % gap_stride == 0 || index == static_cast<long>(steps)) {
      MixedProfile product(n);
      for (int i = 0; i < n; ++i) {
        product[i].resize(counts[i].size());
        for (std::size_t a = 0; a < counts[i].size(); ++a) {
          product[i][a] = counts[i][a] / static_cast<double>(index);
        }
      }
      d.equilibrium_gap.push_back(MixedNashGap(game, product, s.signal));
      if (index == static_cast<long>(steps)) d.marginal_frequency = product;
    }
  }
  for (int i = 0; i < n; ++i) {
    const double best = *std::max_element(hindsight[i].begin(), hindsight[i].end());
    d.regret[i] = (best - realized[i]) / steps;
  }
  std::sort(joint.begin(), joint.end());
  for (std::size_t a = 0; a < joint.size();) {
    std::size_t b = a;
    while (b < joint.size() && joint[b] == joint[a]) ++b;
    d.joint_frequency.emplace_back(game.ProfileAt(joint[a]), (b - a) / steps);
    a = b;
  }
  return d;
}

}  // namespace stgames
