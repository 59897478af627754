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

#include "stgames/coordination.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "stgames/errors.h"

namespace stgames {

const char* ToString(InformationKind kind) {
  switch (kind) {
    case InformationKind::kIdentity: return "identity";
    case InformationKind::kPublicOnly: return "public-only";
    case InformationKind::kPrivateNoisy: return "private-noisy";
  }
  return "?";
}

std::optional<InformationKind> ParseInformationKind(const std::string& name) {
  for (InformationKind k : {InformationKind::kIdentity, InformationKind::kPublicOnly,
                            InformationKind::kPrivateNoisy}) {
    if (name == ToString(k)) return k;
  }
  return std::nullopt;
}

std::vector<InformationRecord> GenerateInformation(const InformationMechanism& mech,
                                                   int num_agents,
                                                   const SystemState& state,
                                                   const ActionProfile& actions,
                                                   int signal, std::mt19937_64& noise) {
  if (num_agents < 1) throw DomainError("information mechanism needs an agent");
  if (!(mech.noise >= 0.0) || !std::isfinite(mech.noise)) {
    throw DomainError(fmt::format("noise magnitude {} is invalid", mech.noise));
  }
  std::vector<InformationRecord> records(num_agents);
  switch (mech.kind) {
    case InformationKind::kIdentity:
      for (InformationRecord& r : records) {
        r.state = state;
        r.actions = actions;
        r.signal = signal;
      }
      break;
    case InformationKind::kPublicOnly: {
      InformationRecord shared;
      shared.signal = signal;
      shared.public_channel = state.values;
      std::fill(records.begin(), records.end(), shared);
      break;
    }
    case InformationKind::kPrivateNoisy: {
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (int i = 0; i < num_agents; ++i) {
        InformationRecord& r = records[i];
        r.signal = signal;
        r.public_channel = {static_cast<double>(signal)};
        r.private_channel = state.values;
        for (double& x : r.private_channel) x += mech.noise * gauss(noise);
      }
      break;
    }
  }
  return records;
}

namespace {

std::vector<int> AllowedFor(const AdmissibleSetRule& rule, const StrategicGame& game,
                            int signal, int agent) {
  const auto it = rule.allowed.find({signal, agent});
  std::vector<int> actions;
  if (it == rule.allowed.end()) {
    actions.resize(game.num_actions(agent));
    std::iota(actions.begin(), actions.end(), 0);
    return actions;
  }
  actions = it->second;
  if (actions.empty()) {
    throw DomainError(fmt::format("admissible set of {} under signal {} is empty",
                                  game.agent_name(agent), game.signal_label(signal)));
  }
  std::sort(actions.begin(), actions.end());
  actions.erase(std::unique(actions.begin(), actions.end()), actions.end());
  for (int a : actions) {
    if (a < 0 || a >= game.num_actions(agent)) {
      throw DomainError(fmt::format("admissible action {} out of range for {}", a,
                                    game.agent_name(agent)));
    }
  }
  return actions;
}

}  // namespace

RestrictedGame ApplyAdmissibleSets(const AdmissibleSetRule& rule,
                                   const StrategicGame& game, int signal) {
  game.CheckSignal(signal);
  const int n = game.num_agents();
  RestrictedGame out{game, {}};
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> labels(n);
  for (int i = 0; i < n; ++i) {
    names.push_back(game.agent_name(i));
    out.actions.push_back(AllowedFor(rule, game, signal, i));
    for (int a : out.actions[i]) labels[i].push_back(game.action_label(i, a));
  }
  StrategicGame restricted(names, labels, {game.signal_label(signal)});
  ActionProfile original(n);
  for (long k = 0; k < restricted.num_profiles(); ++k) {
    const ActionProfile p = restricted.ProfileAt(k);
    for (int i = 0; i < n; ++i) original[i] = out.actions[i][p[i]];
    restricted.SetPayoffs(0, p, game.payoffs(signal, game.ProfileIndex(original)));
  }
  out.game = std::move(restricted);
  return out;
}

AdmissibleMask MaskFor(const AdmissibleSetRule& rule, const StrategicGame& game,
                       int signal, const std::vector<int>& controlled) {
  game.CheckSignal(signal);
  const int n = game.num_agents();
  AdmissibleMask mask(n);
  for (int i = 0; i < n; ++i) {
    const bool applies = controlled.empty() ||
                         std::find(controlled.begin(), controlled.end(), i) != controlled.end();
    if (!applies) {
      mask[i].assign(game.num_actions(i), 1);
      continue;
    }
    mask[i].assign(game.num_actions(i), 0);
    for (int a : AllowedFor(rule, game, signal, i)) mask[i][a] = 1;
  }
  return mask;
}

const char* ToString(CoordinatorKind kind) {
  switch (kind) {
    case CoordinatorKind::kConstant: return "constant";
    case CoordinatorKind::kRoundRobin: return "round-robin";
    case CoordinatorKind::kGreedy: return "greedy";
    case CoordinatorKind::kCustom: return "custom";
  }
  return "?";
}

std::optional<CoordinatorKind> ParseCoordinatorKind(const std::string& name) {
  for (CoordinatorKind k : {CoordinatorKind::kConstant, CoordinatorKind::kRoundRobin,
                            CoordinatorKind::kGreedy}) {
    if (name == ToString(k)) return k;
  }
  return std::nullopt;
}

Coordinator::Coordinator(CoordinatorKind kind, std::vector<int> candidates,
                         std::vector<int> controlled, Rule custom)
    : kind_(kind),
      candidates_(std::move(candidates)),
      controlled_(std::move(controlled)),
      custom_(std::move(custom)) {
  if (candidates_.empty()) throw DomainError("coordinator needs a candidate signal");
  if (kind_ == CoordinatorKind::kCustom && !custom_) {
    throw DomainError("custom coordinator without an update rule");
  }
  current_ = candidates_[0];
  observed_.assign(candidates_.size(), std::nullopt);
}

int Coordinator::Update(const EpochDigest& digest) {
  const auto position = [this](int signal) {
    return std::find(candidates_.begin(), candidates_.end(), signal) - candidates_.begin();
  };
  const std::size_t here = position(current_);
  int next = current_;
  switch (kind_) {
    case CoordinatorKind::kConstant:
      break;
    case CoordinatorKind::kRoundRobin:
      next = candidates_[(here + 1) % candidates_.size()];
      break;
    case CoordinatorKind::kGreedy: {
      const std::size_t seen = position(digest.signal);
      if (seen < candidates_.size()) observed_[seen] = digest.mean_welfare;
      std::optional<std::size_t> pick;
      for (std::size_t k = 0; k < candidates_.size() && !pick; ++k) {
        if (!observed_[k]) pick = k;
      }
      if (!pick) {
        pick = 0;
        for (std::size_t k = 1; k < candidates_.size(); ++k) {
          if (*observed_[k] > *observed_[*pick]) pick = k;
        }
      }
      next = candidates_[*pick];
      break;
    }
    case CoordinatorKind::kCustom:
      next = custom_(digest, current_);
      break;
  }
  if (position(next) >= static_cast<std::ptrdiff_t>(candidates_.size())) {
    throw ContractError(fmt::format("coordinator emitted signal {} outside its candidates", next));
  }
  current_ = next;
  return next;
}

WelfareFunctional WelfareUnderSignal(const StrategicGame& game, int signal) {
  game.CheckSignal(signal);
  return [&game, signal](const StepRecord& step) {
    const std::span<const double> p = game.payoffs(signal, game.ProfileIndex(step.actions));
    return std::accumulate(p.begin(), p.end(), 0.0);
  };
}

EpochDigest DigestEpoch(const std::vector<StepRecord>& steps, const StrategicGame& game,
                        const WelfareFunctional& welfare) {
  if (steps.empty()) throw DomainError("empty epoch");
  const int n = game.num_agents();
  EpochDigest d;
  d.signal = steps.back().signal;
  d.mean_payoff.assign(n, 0.0);
  d.final_frequency.resize(n);
  for (int i = 0; i < n; ++i) d.final_frequency[i].assign(game.num_actions(i), 0.0);
  for (const StepRecord& s : steps) {
    d.mean_welfare += welfare ? welfare(s)
                              : std::accumulate(s.payoffs.begin(), s.payoffs.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      d.mean_payoff[i] += s.payoffs[i];
      d.final_frequency[i][s.actions[i]] += 1.0;
    }
  }
  const double count = static_cast<double>(steps.size());
  d.mean_welfare /= count;
  for (int i = 0; i < n; ++i) {
    d.mean_payoff[i] /= count;
    for (double& f : d.final_frequency[i]) f /= count;
  }
  return d;
}

TwoTimescaleTrace RunTwoTimescale(const StrategicGame& family,
                                  std::vector<LearnerSpec> learners,
                                  Coordinator coordinator,
                                  const TwoTimescaleOptions& options) {
  if (options.outer_steps < 1 || options.inner_steps < 1) {
    throw DomainError("outer and inner step counts must be at least 1");
  }
  for (int c : coordinator.candidates()) family.CheckSignal(c);
  DynamicsEngine engine(family, std::move(learners), options.seed, options.schedule);
  TwoTimescaleTrace out;
  out.fast.seed = options.seed;
  out.fast.steps.reserve(options.outer_steps * options.inner_steps);
  for (long k = 0; k < options.outer_steps; ++k) {
    const int signal = coordinator.current();
    out.signals.push_back(signal);
    std::optional<AdmissibleMask> mask;
    if (options.admissible) {
      mask = MaskFor(*options.admissible, family, signal, coordinator.controlled());
      const bool restricts = std::any_of(mask->begin(), mask->end(), [](const auto& m) {
        return std::find(m.begin(), m.end(), 0) != m.end();
      });
      if (restricts) {
        engine.Restrict(*mask);
      } else {
        mask.reset();
      }
    }
    std::vector<StepRecord> epoch;
    epoch.reserve(options.inner_steps);
    for (long t = 0; t < options.inner_steps; ++t) {
      epoch.push_back(engine.Step(signal, mask ? &*mask : nullptr));
    }
    out.epochs.push_back(DigestEpoch(epoch, family, options.welfare));
    out.fast.steps.insert(out.fast.steps.end(), epoch.begin(), epoch.end());
    // The slow update after the last epoch would never be used.
    if (k + 1 < options.outer_steps) coordinator.Update(out.epochs.back());
  }
  return out;
}

StackelbergResult StackelbergSolve(const LeaderObjective& objective,
                                   const std::vector<int>& candidates,
                                   const StrategicGame& family, FollowerSelection mode) {
  if (!objective) throw DomainError("missing leader objective");
  if (candidates.empty()) throw DomainError("no candidate signals");
  StackelbergResult result;
  for (int c : candidates) {
    family.CheckSignal(c);
    StackelbergCandidate cand;
    cand.signal = c;
    cand.equilibria = EnumeratePureNash(family, c);
    if (cand.equilibria.empty()) {
      result.warnings.push_back(fmt::format(
          "signal {} skipped: follower game has no pure equilibrium", family.signal_label(c)));
      result.candidates.push_back(std::move(cand));
      continue;
    }
    cand.defined = true;
    for (const ActionProfile& x : cand.equilibria) {
      const double v = objective(c, x);
      const bool better = mode == FollowerSelection::kOptimistic ? v > cand.value
                                                                 : v < cand.value;
      if (cand.used.empty() || better) {
        cand.value = v;
        cand.used = x;
      }
    }
    if (!result.solved || cand.value > result.value) {
      result.solved = true;
      result.signal = c;
      result.value = cand.value;
      result.equilibrium = cand.used;
    }
    result.candidates.push_back(std::move(cand));
  }
  return result;
}

void MarkovGame::Validate() const {
  const int states = stage.num_signals();
  if (initial_state < 0 || initial_state >= states) {
    throw DomainError(fmt::format("initial state {} out of range", initial_state));
  }
  if (static_cast<int>(transition.size()) != states) {
    throw DomainError("transition table must have one block per state");
  }
  for (int s = 0; s < states; ++s) {
    if (static_cast<long>(transition[s].size()) != stage.num_profiles()) {
      throw DomainError(fmt::format("transition block of state {} has {} rows, expected {}",
                                    stage.signal_label(s), transition[s].size(),
                                    stage.num_profiles()));
    }
    for (const std::vector<double>& row : transition[s]) {
      if (static_cast<int>(row.size()) != states) {
        throw DomainError("transition row has the wrong number of states");
      }
      double total = 0.0;
      for (double p : row) {
        if (!(p >= 0.0)) throw DomainError("negative transition probability");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-9) {
        throw DomainError(fmt::format("transition row sums to {}", total));
      }
    }
  }
}

namespace {

int Draw(std::span<const double> p, std::mt19937_64& rng) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  double cumulative = 0.0;
  int last = 0;
  for (int k = 0; k < static_cast<int>(p.size()); ++k) {
    if (p[k] <= 0.0) continue;
    cumulative += p[k];
    last = k;
    if (u < cumulative) return k;
  }
  return last;
}

}  // namespace

RolloutResult RolloutDynamicGame(const MarkovGame& game,
                                 const std::vector<MarkovPolicy>& policies,
                                 const std::vector<double>& discounts, long runs,
                                 std::uint64_t seed, std::optional<long> horizon) {
  game.Validate();
  const StrategicGame& stage = game.stage;
  const int n = stage.num_agents();
  const int states = stage.num_signals();
  if (static_cast<int>(policies.size()) != n || static_cast<int>(discounts.size()) != n) {
    throw DomainError("need one policy and one discount per agent");
  }
  if (runs < 1) throw DomainError("at least one rollout is required");
  for (double beta : discounts) {
    if (!(beta > 0.0 && beta < 1.0)) {
      throw DomainError(fmt::format("discount {} outside (0, 1)", beta));
    }
  }
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(policies[i].table.size()) != states) {
      throw DomainError(fmt::format("policy of {} must cover every state", stage.agent_name(i)));
    }
    for (const std::vector<double>& row : policies[i].table) {
      if (static_cast<int>(row.size()) != stage.num_actions(i)) {
        throw DomainError("policy row has the wrong number of actions");
      }
      double total = 0.0;
      for (double p : row) {
        if (!(p >= 0.0)) throw DomainError("negative policy probability");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-9) throw DomainError("policy row does not sum to 1");
    }
  }

  double max_abs = 0.0;
  for (int s = 0; s < states; ++s) {
    for (long k = 0; k < stage.num_profiles(); ++k) {
      for (int i = 0; i < n; ++i) max_abs = std::max(max_abs, std::abs(stage.payoff(s, k, i)));
    }
  }

  RolloutResult out;
  out.runs = runs;
  if (horizon) {
    out.horizon = *horizon;
  } else {
    // Smallest H whose tail bound max(1, |J|) * beta^H / (1 - beta) is below
    // 1e-6 for every agent; this also gives beta^H < 1e-6.
    const double scale = std::max(1.0, max_abs);
    for (double beta : discounts) {
      const double h = std::log(1e-6 * (1.0 - beta) / scale) / std::log(beta);
      out.horizon = std::max(out.horizon, static_cast<long>(std::floor(h)) + 1);
    }
  }
  if (out.horizon < 1) throw DomainError("rollout horizon must be at least 1");
  for (double beta : discounts) {
    out.truncation_bound.push_back(max_abs * std::pow(beta, out.horizon) / (1.0 - beta));
  }

  // Per-run seeds drawn up front so runs are independent of evaluation order.
  std::mt19937_64 seeder(seed);
  std::vector<std::uint64_t> run_seeds(runs);
  for (std::uint64_t& s : run_seeds) s = seeder();

  std::vector<double> sum(n, 0.0), sum_sq(n, 0.0);
  ActionProfile profile(n);
  std::vector<double> value(n);
  for (long r = 0; r < runs; ++r) {
    std::mt19937_64 rng(run_seeds[r]);
    int state = game.initial_state;
    std::fill(value.begin(), value.end(), 0.0);
    std::vector<double> weight(n, 1.0);
    for (long t = 0; t < out.horizon; ++t) {
      for (int i = 0; i < n; ++i) {
        const int informing =
            policies[i].information == PolicyInformation::kOpenLoop ? game.initial_state : state;
        profile[i] = Draw(policies[i].table[informing], rng);
      }
      const long k = stage.ProfileIndex(profile);
      for (int i = 0; i < n; ++i) {
        value[i] += weight[i] * stage.payoff(state, k, i);
        weight[i] *= discounts[i];
      }
      state = Draw(game.transition[state][k], rng);
    }
    for (int i = 0; i < n; ++i) {
      sum[i] += value[i];
      sum_sq[i] += value[i] * value[i];
    }
  }
  for (int i = 0; i < n; ++i) {
    const double mean = sum[i] / runs;
    out.mean.push_back(mean);
    double se = 0.0;
    if (runs > 1) {
      const double var = std::max(0.0, (sum_sq[i] - runs * mean * mean) / (runs - 1));
      se = std::sqrt(var / runs);
    }
    out.standard_error.push_back(se);
  }
  return out;
}

void CheckStructure(const CoalitionStructure& structure, int num_agents) {
  if (num_agents < 1 || num_agents > kMaxCoalitionAgents) {
    throw DomainError(fmt::format("agent count {} out of range", num_agents));
  }
  const Coalition grand = (Coalition{1} << num_agents) - 1;
  Coalition seen = 0;
  for (Coalition block : structure) {
    if (block == 0) throw DomainError("coalition structure has an empty block");
    if (block & ~grand) throw DomainError("coalition structure names an unknown agent");
    if (block & seen) throw DomainError("coalition structure blocks overlap");
    seen |= block;
  }
  if (seen != grand) throw DomainError("coalition structure does not cover every agent");
}

CoalitionStructure Singletons(int num_agents) {
  CoalitionStructure s;
  for (int i = 0; i < num_agents; ++i) s.push_back(Coalition{1} << i);
  return s;
}

std::string StructureString(const CoalitionStructure& structure) {
  std::string out;
  for (Coalition block : structure) out += CoalitionString(block);
  return out;
}

CoalitionStructure EvolveCoalitions(const CoalitionStructure& structure,
                                    const CoalitionGame& game) {
  CheckStructure(structure, game.num_agents());
  CoalitionStructure blocks = structure;
  std::sort(blocks.begin(), blocks.end());

  double best_gain = kCoalitionTolerance;
  std::optional<std::pair<std::size_t, std::size_t>> merge;
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    for (std::size_t b = a + 1; b < blocks.size(); ++b) {
      const double gain = game.value(blocks[a] | blocks[b]) - game.value(blocks[a]) -
                          game.value(blocks[b]);
      if (gain > best_gain) {
        best_gain = gain;
        merge = {a, b};
      }
    }
  }
  if (merge) {
    blocks[merge->first] |= blocks[merge->second];
    blocks.erase(blocks.begin() + merge->second);
    std::sort(blocks.begin(), blocks.end());
    return blocks;
  }

  best_gain = kCoalitionTolerance;
  std::optional<std::pair<std::size_t, Coalition>> split;
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    const Coalition s = blocks[a];
    const Coalition low = s & (~s + 1);
    // Parts containing the lowest member enumerate each bipartition once.
    for (Coalition part = (s - 1) & s; part; part = (part - 1) & s) {
      if (!(part & low)) continue;
      const double gain = game.value(part) + game.value(s ^ part) - game.value(s);
      if (gain > best_gain || (gain == best_gain && split && split->first == a &&
                               part < split->second)) {
        best_gain = gain;
        split = {a, part};
      }
    }
  }
  if (split) {
    const Coalition s = blocks[split->first];
    blocks[split->first] = split->second;
    blocks.push_back(s ^ split->second);
    std::sort(blocks.begin(), blocks.end());
  }
  return blocks;
}

std::vector<CoalitionStructure> CoalitionDynamics(CoalitionStructure structure,
                                                  const CoalitionGame& game,
                                                  long max_moves) {
  CheckStructure(structure, game.num_agents());
  std::sort(structure.begin(), structure.end());
  std::vector<CoalitionStructure> history{structure};
  for (long move = 0; move < max_moves; ++move) {
    CoalitionStructure next = EvolveCoalitions(history.back(), game);
    if (next == history.back()) return history;
    history.push_back(std::move(next));
  }
  throw ComputationError("coalition dynamics did not reach a fixed point");
}

}  // namespace stgames
