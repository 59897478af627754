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

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "coop_oracles.h"
#include "doctest.h"
#include "stgames/coordination.h"
#include "stgames/errors.h"
#include "stgames/network.h"
#include "stgames/templates.h"
#include "test_games.h"

namespace stgames {
namespace {

using testing::PrisonersDilemma;

LearnerSpec Learner(LearnerKind kind, double mu, double lambda) {
  LearnerSpec s;
  s.kind = kind;
  s.payoff_rate = RateSchedule::Constant(mu);
  s.policy_rate = RateSchedule::Constant(lambda);
  return s;
}

bool SameSteps(const std::vector<StepRecord>& a, const std::vector<StepRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (a[t].actions != b[t].actions || a[t].payoffs != b[t].payoffs ||
        a[t].policy != b[t].policy || a[t].estimate != b[t].estimate ||
        a[t].signal != b[t].signal || a[t].t != b[t].t) {
      return false;
    }
  }
  return true;
}

TEST_CASE("information mechanisms") {
  const SystemState z{3, {"load", "price"}, {0.7, 1.5}};
  const ActionProfile x{1, 0, 2};
  std::mt19937_64 rng(1);

  const auto identity = GenerateInformation({InformationKind::kIdentity, 0.0}, 3, z, x, 1, rng);
  REQUIRE(identity.size() == 3);
  for (const InformationRecord& r : identity) {
    CHECK(r.state == z);
    CHECK(r.actions == x);
    CHECK(r.signal == 1);
  }

  const auto pub = GenerateInformation({InformationKind::kPublicOnly, 0.0}, 3, z, x, 1, rng);
  CHECK(pub[0] == pub[1]);
  CHECK(pub[1] == pub[2]);

  std::mt19937_64 a(77), b(77);
  const InformationMechanism noisy{InformationKind::kPrivateNoisy, 0.3};
  const auto first = GenerateInformation(noisy, 3, z, x, 0, a);
  const auto second = GenerateInformation(noisy, 3, z, x, 0, b);
  CHECK(first == second);
  CHECK(first[0].private_channel != first[1].private_channel);
  CHECK(first[0].public_channel == first[2].public_channel);

  std::mt19937_64 c(5);
  const auto quiet =
      GenerateInformation({InformationKind::kPrivateNoisy, 0.0}, 2, z, x, 0, c);
  CHECK(quiet[0].private_channel == z.values);
  CHECK_THROWS_AS(GenerateInformation({InformationKind::kPrivateNoisy, -1}, 2, z, x, 0, c),
                  DomainError);
}

TEST_CASE("admissible sets") {
  const StrategicGame pd = PrisonersDilemma();
  const RestrictedGame full = ApplyAdmissibleSets({}, pd, 0);
  CHECK(full.game.num_profiles() == 4);
  for (long k = 0; k < 4; ++k) {
    CHECK(full.game.payoff(0, k, 0) == pd.payoff(0, k, 0));
    CHECK(full.game.payoff(0, k, 1) == pd.payoff(0, k, 1));
  }

  AdmissibleSetRule no_defect;
  no_defect.allowed[{0, 0}] = {0};
  no_defect.allowed[{0, 1}] = {0};
  const RestrictedGame only_c = ApplyAdmissibleSets(no_defect, pd, 0);
  CHECK(only_c.game.num_profiles() == 1);
  CHECK(only_c.game.action_label(0, 0) == "C");
  CHECK(EnumeratePureNash(only_c.game) == std::vector<ActionProfile>{{0, 0}});

  // Removing C (never played in equilibrium) keeps the equilibrium (D,D).
  AdmissibleSetRule no_coop;
  no_coop.allowed[{0, 0}] = {1};
  const RestrictedGame r = ApplyAdmissibleSets(no_coop, pd, 0);
  const auto eq = EnumeratePureNash(r.game);
  REQUIRE(eq.size() == 1);
  CHECK(ActionProfile{r.actions[0][eq[0][0]], r.actions[1][eq[0][1]]} ==
        EnumeratePureNash(pd)[0]);

  AdmissibleSetRule empty;
  empty.allowed[{0, 1}] = {};
  CHECK_THROWS_AS(ApplyAdmissibleSets(empty, pd, 0), DomainError);
  AdmissibleSetRule bad;
  bad.allowed[{0, 1}] = {5};
  CHECK_THROWS_AS(ApplyAdmissibleSets(bad, pd, 0), DomainError);

  const AdmissibleMask mask = MaskFor(no_defect, pd, 0, {1});
  CHECK(mask[0] == std::vector<char>{1, 1});
  CHECK(mask[1] == std::vector<char>{1, 0});
}

TEST_CASE("equilibria survive removal of an unused action") {
  std::mt19937_64 rng(4);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const StrategicGame game = testing::RandomGame(rng, {3, 3});
    const auto before = EnumeratePureNash(game);
    // Find an action of agent 0 used by no equilibrium.
    for (int a = 0; a < 3; ++a) {
      if (std::any_of(before.begin(), before.end(),
                      [a](const ActionProfile& x) { return x[0] == a; })) {
        continue;
      }
      AdmissibleSetRule rule;
      for (int b = 0; b < 3; ++b) {
        if (b != a) rule.allowed[{0, 0}].push_back(b);
      }
      const RestrictedGame r = ApplyAdmissibleSets(rule, game, 0);
      std::vector<ActionProfile> after;
      for (const ActionProfile& x : EnumeratePureNash(r.game)) {
        after.push_back({r.actions[0][x[0]], r.actions[1][x[1]]});
      }
      // Removing a deviation option can only add equilibria.
      for (const ActionProfile& x : before) {
        CHECK(std::find(after.begin(), after.end(), x) != after.end());
      }
      ++checked;
      break;
    }
  }
  CHECK(checked > 50);
}

EpochDigest Digest(int signal, double welfare) {
  EpochDigest d;
  d.signal = signal;
  d.mean_welfare = welfare;
  return d;
}

TEST_CASE("coordinator updates") {
  Coordinator constant(CoordinatorKind::kConstant, {2, 0, 1});
  for (int k = 0; k < 5; ++k) CHECK(constant.Update(Digest(constant.current(), k)) == 2);

  Coordinator rr(CoordinatorKind::kRoundRobin, {0, 1, 2});
  std::vector<int> seq{rr.current()};
  for (int k = 0; k < 6; ++k) seq.push_back(rr.Update(Digest(rr.current(), 0)));
  CHECK(seq == std::vector<int>{0, 1, 2, 0, 1, 2, 0});

  Coordinator custom(CoordinatorKind::kCustom, {0, 1}, {},
                     [](const EpochDigest&, int) { return 7; });
  CHECK_THROWS_AS(custom.Update(Digest(0, 0)), ContractError);
  CHECK_THROWS_AS(Coordinator(CoordinatorKind::kConstant, {}), DomainError);
}

TEST_CASE("greedy coordinator locks onto the better signal") {
  // Signal c2 adds 1 to every payoff of the PD.
  StrategicGame family({"row", "col"}, {{"C", "D"}, {"C", "D"}}, {"c1", "c2"});
  const StrategicGame pd = PrisonersDilemma();
  for (long k = 0; k < 4; ++k) {
    for (int i = 0; i < 2; ++i) {
      family.SetPayoff(0, k, i, pd.payoff(0, k, i));
      family.SetPayoff(1, k, i, pd.payoff(0, k, i) + 1);
    }
  }
  TwoTimescaleOptions options;
  options.outer_steps = 6;
  options.inner_steps = 25;
  options.seed = 3;
  const LearnerSpec pe = Learner(LearnerKind::kPayoffEstimation, 0.2, 0.2);
  const TwoTimescaleTrace trace =
      RunTwoTimescale(family, {pe, pe}, Coordinator(CoordinatorKind::kGreedy, {0, 1}), options);
  CHECK(trace.signals == std::vector<int>{0, 1, 1, 1, 1, 1});
  REQUIRE(trace.fast.steps.size() == 150);
  CHECK(trace.fast.steps[30].signal == 1);
}

TEST_CASE("two-timescale reduces to plain dynamics") {
  std::mt19937_64 rng(12);
  const StrategicGame family = testing::RandomGame(rng, {3, 2}, 3);
  const LearnerSpec a = Learner(LearnerKind::kSmoothedBestResponse, 0.3, 0.4);
  const LearnerSpec b = Learner(LearnerKind::kFictitiousPlay, 1.0, 0.5);

  TwoTimescaleOptions one;
  one.outer_steps = 1;
  one.inner_steps = 300;
  one.seed = 99;
  const TwoTimescaleTrace k1 =
      RunTwoTimescale(family, {a, b}, Coordinator(CoordinatorKind::kGreedy, {2, 0}), one);
  CHECK(SameSteps(k1.fast.steps, RunDynamics(family, {a, b}, 300, 99, {2}).steps));

  AdmissibleSetRule full;
  TwoTimescaleOptions many = one;
  many.outer_steps = 7;
  many.inner_steps = 40;
  many.admissible = &full;
  const TwoTimescaleTrace k7 =
      RunTwoTimescale(family, {a, b}, Coordinator(CoordinatorKind::kConstant, {1}), many);
  CHECK(SameSteps(k7.fast.steps, RunDynamics(family, {a, b}, 280, 99, {1}).steps));

  LearnerSpec frozen = Learner(LearnerKind::kReplicator, 0, 0);
  frozen.initial_policy = {0.1, 0.2, 0.7};
  const LearnerSpec frozen2 = Learner(LearnerKind::kBestResponse, 0, 0);
  const TwoTimescaleTrace fixed = RunTwoTimescale(
      family, {frozen, frozen2}, Coordinator(CoordinatorKind::kRoundRobin, {0, 1, 2}), many);
  for (const StepRecord& s : fixed.fast.steps) {
    CHECK(s.policy[0] == frozen.initial_policy);
    CHECK(s.policy[1] == std::vector<double>{0.5, 0.5});
  }
}

TEST_CASE("admissible sets restrict play inside epochs") {
  const StrategicGame pd = PrisonersDilemma();
  AdmissibleSetRule rule;
  rule.allowed[{0, 0}] = {0};
  rule.allowed[{0, 1}] = {0};
  TwoTimescaleOptions options;
  options.outer_steps = 3;
  options.inner_steps = 20;
  options.seed = 8;
  options.admissible = &rule;
  const LearnerSpec br = Learner(LearnerKind::kBestResponse, 1, 1);
  const TwoTimescaleTrace trace =
      RunTwoTimescale(pd, {br, br}, Coordinator(CoordinatorKind::kConstant, {0}), options);
  for (const StepRecord& s : trace.fast.steps) CHECK(s.actions == ActionProfile{0, 0});
}

TEST_CASE("greedy tolls on the discretized braess network") {
  const CongestionNetwork net = BraessNetwork().WithEdge(BraessShortcut());
  const StrategicGame family =
      AtomicRoutingGame(net, 4, {{"free", std::vector<double>(5, 0.0)},
                                 {"marginal", MarginalCostTolls(net)}});
  const LearnerSpec br = Learner(LearnerKind::kBestResponse, 1, 1);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    TwoTimescaleOptions options;
    options.outer_steps = 4;
    options.inner_steps = 40;
    options.seed = seed;
    options.schedule = UpdateSchedule::kRoundRobin;
    options.welfare = WelfareUnderSignal(family, 0);
    const TwoTimescaleTrace trace = RunTwoTimescale(
        family, {br, br, br, br}, Coordinator(CoordinatorKind::kGreedy, {0, 1}), options);
    CHECK(trace.epochs.back().mean_welfare >= trace.epochs.front().mean_welfare);
    CHECK(trace.signals.back() == 1);
  }
}

TEST_CASE("stackelberg examples") {
  const testing::StackelbergFixture f;
  auto objective = [&f](int c, const ActionProfile& x) { return f.Objective(c, x); };
  const StackelbergResult opt =
      StackelbergSolve(objective, {0, 1}, f.game, FollowerSelection::kOptimistic);
  CHECK(opt.solved);
  CHECK(opt.signal == 0);
  CHECK(opt.value == 5.0);
  CHECK(opt.equilibrium == ActionProfile{0, 0});
  const StackelbergResult pes =
      StackelbergSolve(objective, {0, 1}, f.game, FollowerSelection::kPessimistic);
  CHECK(pes.signal == 1);
  CHECK(pes.value == 3.0);
  CHECK(pes.equilibrium == ActionProfile{1, 1});

  for (FollowerSelection mode : {FollowerSelection::kOptimistic, FollowerSelection::kPessimistic}) {
    const StackelbergResult single = StackelbergSolve(objective, {1}, f.game, mode);
    CHECK(single.signal == 1);
    CHECK(single.equilibrium == ActionProfile{1, 1});
    const StackelbergResult flat =
        StackelbergSolve([](int, const ActionProfile&) { return 2.0; }, {1, 0}, f.game, mode);
    CHECK(flat.signal == 1);
  }

  StrategicGame pennies({"a", "b"}, {{"H", "T"}, {"H", "T"}}, {"only"});
  const StrategicGame mp = testing::MatchingPennies();
  for (long k = 0; k < 4; ++k) pennies.SetPayoffs(0, pennies.ProfileAt(k), mp.payoffs(0, k));
  const StackelbergResult none =
      StackelbergSolve(objective, {0}, pennies, FollowerSelection::kOptimistic);
  CHECK_FALSE(none.solved);
  CHECK(none.warnings.size() == 1);
}

TEST_CASE("optimistic value dominates pessimistic value") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> value(-5, 5);
  int solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const StrategicGame family = testing::RandomGame(rng, {2, 3}, 3);
    std::vector<std::vector<double>> leader(3, std::vector<double>(6));
    for (auto& row : leader) {
      for (double& v : row) v = value(rng);
    }
    auto objective = [&](int c, const ActionProfile& x) {
      return leader[c][family.ProfileIndex(x)];
    };
    const StackelbergResult o =
        StackelbergSolve(objective, {0, 1, 2}, family, FollowerSelection::kOptimistic);
    const StackelbergResult p =
        StackelbergSolve(objective, {0, 1, 2}, family, FollowerSelection::kPessimistic);
    CHECK(o.solved == p.solved);
    if (!o.solved) continue;
    ++solved;
    CHECK(o.value >= p.value);
    for (std::size_t c = 0; c < o.candidates.size(); ++c) {
      CHECK(o.candidates[c].defined == p.candidates[c].defined);
      if (o.candidates[c].defined) CHECK(o.candidates[c].value >= p.candidates[c].value);
    }
  }
  CHECK(solved > 80);
}

// One agent with a single action; payoff and chain given per state.
MarkovGame Chain(const std::vector<double>& payoff,
                 const std::vector<std::vector<double>>& transition) {
  std::vector<std::string> states;
  for (std::size_t s = 0; s < payoff.size(); ++s) states.push_back("z" + std::to_string(s));
  MarkovGame g{StrategicGame({"solo"}, {{"go"}}, states), {}, 0};
  for (std::size_t s = 0; s < payoff.size(); ++s) {
    g.stage.SetPayoff(static_cast<int>(s), 0, 0, payoff[s]);
    g.transition.push_back({transition[s]});
  }
  return g;
}

MarkovPolicy Trivial(int states) {
  return {PolicyInformation::kFeedback, std::vector<std::vector<double>>(states, {1.0})};
}

TEST_CASE("dynamic game rollouts") {
  const RolloutResult geometric =
      RolloutDynamicGame(Chain({1.0}, {{1.0}}), {Trivial(1)}, {0.5}, 3, 1);
  CHECK(std::abs(geometric.mean[0] - 2.0) <= geometric.truncation_bound[0] + 1e-12);
  CHECK(geometric.truncation_bound[0] < 1e-5);
  CHECK(geometric.standard_error[0] == 0.0);

  const RolloutResult zero =
      RolloutDynamicGame(Chain({0.0}, {{1.0}}), {Trivial(1)}, {0.99}, 2, 1);
  CHECK(zero.mean[0] == 0.0);
  CHECK(std::pow(0.99, zero.horizon) < 1e-6);

  const RolloutResult alternating = RolloutDynamicGame(
      Chain({1.0, 0.0}, {{0.0, 1.0}, {1.0, 0.0}}), {Trivial(2)}, {0.5}, 1, 1);
  CHECK(std::abs(alternating.mean[0] - 4.0 / 3.0) < 1e-6);

  CHECK_THROWS_AS(RolloutDynamicGame(Chain({1.0}, {{1.0}}), {Trivial(1)}, {1.0}, 1, 1),
                  DomainError);
  CHECK_THROWS_AS(RolloutDynamicGame(Chain({1.0}, {{0.5}}), {Trivial(1)}, {0.5}, 1, 1),
                  DomainError);
}

TEST_CASE("open-loop and feedback policies differ on a state-dependent game") {
  // Agent picks "stay" or "move"; payoff 1 for "stay" in z0 and "move" in
  // z1. The chain flips state every step regardless of the action.
  MarkovGame g{StrategicGame({"solo"}, {{"stay", "move"}}, {"z0", "z1"}), {}, 0};
  g.stage.SetPayoff(0, 0, 0, 1.0);
  g.stage.SetPayoff(1, 1, 0, 1.0);
  g.transition = {{{0, 1}, {0, 1}}, {{1, 0}, {1, 0}}};
  const std::vector<std::vector<double>> table{{1, 0}, {0, 1}};
  const RolloutResult feedback = RolloutDynamicGame(
      g, {{PolicyInformation::kFeedback, table}}, {0.5}, 1, 0);
  const RolloutResult open = RolloutDynamicGame(
      g, {{PolicyInformation::kOpenLoop, table}}, {0.5}, 1, 0);
  CHECK(std::abs(feedback.mean[0] - 2.0) < 1e-5);
  CHECK(std::abs(open.mean[0] - 4.0 / 3.0) < 1e-5);
}

TEST_CASE("rollout standard error shrinks with more runs") {
  const MarkovGame chain =
      Chain({1.0, -2.0, 0.5}, {{0.2, 0.5, 0.3}, {0.6, 0.1, 0.3}, {0.3, 0.3, 0.4}});
  const RolloutResult small = RolloutDynamicGame(chain, {Trivial(3)}, {0.8}, 1000, 17);
  const RolloutResult large = RolloutDynamicGame(chain, {Trivial(3)}, {0.8}, 4000, 18);
  const double ratio = small.standard_error[0] / large.standard_error[0];
  CHECK(ratio >= 1.7);
  CHECK(ratio <= 2.3);
  CHECK(std::abs(small.mean[0] - large.mean[0]) < 4 * small.standard_error[0]);
}

TEST_CASE("coalition merge-split examples") {
  const CoalitionGame example = testing::ThreeAgentExampleGame();
  const std::vector<CoalitionStructure> path = CoalitionDynamics(Singletons(3), example);
  REQUIRE(path.size() == 3);
  CHECK(path[1] == CoalitionStructure{0b011, 0b100});
  CHECK(path[2] == CoalitionStructure{0b111});
  CHECK(EvolveCoalitions(path[2], example) == path[2]);

  const CoalitionGame additive = testing::AdditiveGame(4);
  CHECK(EvolveCoalitions(Singletons(4), additive) == Singletons(4));

  const CoalitionGame majority = testing::MajorityGame();
  CHECK(EvolveCoalitions({0b111}, majority) == CoalitionStructure{0b111});

  CHECK_THROWS_AS(EvolveCoalitions({0b011, 0b110}, example), DomainError);
  CHECK_THROWS_AS(EvolveCoalitions({0b011}, example), DomainError);
}

TEST_CASE("coalition dynamics increase total value and terminate") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 5;
    const CoalitionGame game = RandomCoalitionGame(n, rng, -1.0, 3.0);
    CoalitionStructure start = Singletons(n);
    if (trial % 3 == 0) start = {game.grand()};
    const std::vector<CoalitionStructure> path = CoalitionDynamics(start, game);
    CHECK(static_cast<long>(path.size()) - 1 <= (1L << n));
    double previous = -1e300;
    for (const CoalitionStructure& s : path) {
      double total = 0.0;
      for (Coalition b : s) total += game.value(b);
      CHECK(total > previous);
      previous = total;
    }
  }
}

}  // namespace
}  // namespace stgames
