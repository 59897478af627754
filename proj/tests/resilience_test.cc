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

#include "doctest.h"
#include "stgames/errors.h"
#include "stgames/resilience.h"
#include "test_games.h"

namespace stgames {
namespace {

MessageBoard Board(const std::vector<double>& values) {
  const std::size_t n = values.size();
  MessageBoard b(n, std::vector<std::optional<double>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) b[i][j] = values[j];
    }
  }
  return b;
}

AdversaryModel Injection(std::vector<int> agents, double value) {
  AdversaryModel a;
  a.compromised = std::move(agents);
  a.kind = AttackKind::kConstantInjection;
  a.value = value;
  return a;
}

TEST_CASE("corrupt information") {
  const MessageBoard honest = Board({1, 2, 3, 4});
  CHECK(CorruptInformation(AdversaryModel{}, honest, 0, 1) == honest);

  AdversaryModel inject = Injection({3}, 10.0);
  inject.start = 2;
  inject.end = 4;
  const MessageBoard during = CorruptInformation(inject, honest, 3, 1);
  for (int i = 0; i < 3; ++i) {
    CHECK(during[i][3] == 10.0);
    for (int j = 0; j < 3; ++j) CHECK(during[i][j] == honest[i][j]);
  }
  CHECK(CorruptInformation(inject, honest, 1, 1) == honest);
  CHECK(CorruptInformation(inject, honest, 5, 1) == honest);

  AdversaryModel flip;
  flip.compromised = {0};
  flip.kind = AttackKind::kSignFlip;
  CHECK(CorruptInformation(flip, honest, 0, 1)[2][0] == -1.0);

  AdversaryModel replay;
  replay.compromised = {1};
  replay.kind = AttackKind::kReplay;
  replay.lag = 2;
  const std::vector<std::vector<double>> history{{0, 7, 0, 0}, {0, 8, 0, 0}, {0, 9, 0, 0}};
  CHECK(CorruptInformation(replay, honest, 3, 1, history)[0][1] == 8.0);
  CHECK(CorruptInformation(replay, honest, 1, 1, history)[0][1] == 2.0);

  AdversaryModel drop;
  drop.compromised = {1, 2};
  drop.kind = AttackKind::kChannelDrop;
  drop.probability = 1.0;
  const MessageBoard dropped = CorruptInformation(drop, honest, 0, 1);
  for (int i = 0; i < 4; ++i) {
    CHECK_FALSE(dropped[i][1 == i ? 2 : 1].has_value());
    if (i != 0) CHECK(dropped[i][0] == 1.0);
  }
  drop.probability = 0.5;
  CHECK(CorruptInformation(drop, honest, 6, 42) == CorruptInformation(drop, honest, 6, 42));

  AdversaryModel bad = Injection({9}, 1.0);
  CHECK_THROWS_AS(CorruptInformation(bad, honest, 0, 1), DomainError);
  bad = replay;
  bad.lag = 0;
  CHECK_THROWS_AS(CorruptInformation(bad, honest, 0, 1), DomainError);
  bad = drop;
  bad.probability = 1.5;
  CHECK_THROWS_AS(CorruptInformation(bad, honest, 0, 1), DomainError);
}

TEST_CASE("dropped channels renormalize the remaining weights") {
  // Agent 0 hears 1..3; with 3 dropped its aggregate is the uniform mean of
  // itself, 1 and 2.
  const std::vector<double> x{0.0, 3.0, 6.0, 100.0};
  AdversaryModel drop;
  drop.compromised = {3};
  drop.kind = AttackKind::kChannelDrop;
  drop.probability = 1.0;
  const auto neighbors = CompleteGraph(4);
  const MessageBoard board = CorruptInformation(drop, Board(x), 0, 5);
  const ConsensusStep step = ResilientConsensusStep(x, board, neighbors, TrustMatrix(neighbors), {});
  CHECK(step.values[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(std::isnan(step.residuals[0][3]));
  const TrustMatrix updated = UpdateTrust(TrustMatrix(neighbors), step.residuals, 0.5);
  CHECK(updated.RowSumError() < 1e-12);
}

TEST_CASE("trust update") {
  const auto neighbors = CompleteGraph(4);
  const TrustMatrix uniform(neighbors);
  std::vector<std::vector<double>> r(4, std::vector<double>(4, 0.0));
  r[0] = {0.3, 0.3, 0.3, 0.3};
  r[1] = {0.0, 0.0, 0.0, 10.0};
  const TrustMatrix frozen = UpdateTrust(uniform, r, 0.0);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) CHECK(frozen.weight(i, j) == doctest::Approx(uniform.weight(i, j)));
  }
  const TrustMatrix updated = UpdateTrust(uniform, r, 1.0);
  for (int j = 0; j < 4; ++j) CHECK(updated.weight(0, j) == doctest::Approx(0.25));
  const double ratio = updated.weight(1, 3) / updated.weight(1, 0);
  CHECK(std::abs(ratio - std::exp(-10.0)) < 1e-15);
  const double z = 3.0 + std::exp(-10.0);
  CHECK(std::abs(updated.weight(1, 0) - 1.0 / z) < 1e-15);

  r[2][1] = -1.0;
  CHECK_THROWS_AS(UpdateTrust(uniform, r, 0.5), DomainError);
  CHECK_THROWS_AS(UpdateTrust(uniform, {}, 0.5), DomainError);
  r[2][1] = 0.0;
  CHECK_THROWS_AS(UpdateTrust(uniform, r, 1.5), DomainError);
}

TEST_CASE("trust rows stay stochastic under fuzzed updates") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> residual(0.05);
  TrustMatrix trust(CompleteGraph(6));
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    std::vector<std::vector<double>> r(6, std::vector<double>(6));
    for (auto& row : r) {
      for (double& x : row) x = unit(rng) < 0.1 ? std::nan("") : residual(rng);
    }
    trust = UpdateTrust(trust, r, unit(rng));
    worst = std::max(worst, trust.RowSumError());
    if (k % 1000 == 999) trust = TrustMatrix(CompleteGraph(6));
  }
  CHECK(worst <= 1e-9);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) CHECK(trust.weight(i, j) >= 0.0);
  }
}

TEST_CASE("consensus step examples") {
  const auto neighbors = CompleteGraph(4);
  const std::vector<double> x{1.0, 2.0, 4.0, 9.0};
  const ConsensusStep plain =
      ResilientConsensusStep(x, Board(x), neighbors, TrustMatrix(neighbors), {});
  for (double v : plain.values) CHECK(v == doctest::Approx(4.0));

  const std::vector<double> same(5, 2.5);
  const auto g5 = CompleteGraph(5);
  ResilienceConfig trimmed{1, 0.3, 1.0};
  for (double v : ResilientConsensusStep(same, Board(same), g5, TrustMatrix(g5), trimmed).values) {
    CHECK(v == 2.5);
  }

  // Five honest agents and one adversary reporting 100.
  const std::vector<double> y{0.0, 0.25, 0.5, 0.75, 1.0, 0.5};
  const auto g6 = CompleteGraph(6);
  const MessageBoard board = CorruptInformation(Injection({5}, 100.0), Board(y), 0, 1);
  const ConsensusStep step = ResilientConsensusStep(y, board, g6, TrustMatrix(g6), trimmed);
  for (int i = 0; i < 5; ++i) {
    CHECK(step.values[i] >= 0.0);
    CHECK(step.values[i] <= 1.0);
  }

  CHECK_THROWS_AS(
      ResilientConsensusStep(x, Board(x), neighbors, TrustMatrix(neighbors), {2, 0.0, 1.0}),
      DomainError);
}

TEST_CASE("plain averaging preserves the mean") {
  ConsensusScenario s{{0.0, 1.0, 5.0, 2.0}, {}};
  const AdversarialConsensusRun run =
      RunAdversarialConsensus(s, AdversaryModel{}, ResilienceConfig{}, 30, 1);
  for (const auto& step : run.values) {
    double mean = 0.0;
    for (double v : step) mean += v / 4.0;
    CHECK(mean == doctest::Approx(2.0).epsilon(1e-12));
  }
  CHECK(run.metrics.max_honest_deviation == 0.0);
  CHECK(run.values == NaiveConsensus(s, 30));
}

ConsensusScenario RandomScenario(std::mt19937_64& rng, int honest) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  ConsensusScenario s;
  for (int i = 0; i < honest; ++i) s.initial.push_back(unit(rng));
  s.initial.push_back(unit(rng));  // the compromised agent's internal value
  return s;
}

TEST_CASE("trimmed trust-weighted consensus stays in the honest hull") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    const ConsensusScenario s = RandomScenario(rng, 5);
    const AdversaryModel adversary = Injection({5}, 100.0);
    const AdversarialConsensusRun naive =
        RunAdversarialConsensus(s, adversary, ResilienceConfig{0, 0.0, 1.0}, 60, seed);
    CHECK_FALSE(naive.metrics.honest_in_hull);
    const AdversarialConsensusRun defended =
        RunAdversarialConsensus(s, adversary, ResilienceConfig{1, 0.5, 1.0}, 60, seed);
    CHECK(defended.metrics.honest_in_hull);
    CHECK(defended.metrics.diameter.back() < 1e-6);
    CHECK(defended.trust.RowSumError() < 1e-9);
    for (int i = 0; i < 5; ++i) CHECK(defended.trust.weight(i, 5) < 0.05);
  }
}

TEST_CASE("validity against every attack kind on a sparse graph") {
  // Ring of 7 with chords; every agent has 4 neighbors, f = 1, agent 6 bad.
  std::vector<std::vector<int>> g(7);
  for (int i = 0; i < 7; ++i) {
    for (int d : {1, 2, 5, 6}) g[i].push_back((i + d) % 7);
    std::sort(g[i].begin(), g[i].end());
  }
  const AttackKind kinds[] = {AttackKind::kConstantInjection, AttackKind::kSignFlip,
                              AttackKind::kReplay, AttackKind::kChannelDrop};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed + 100);
    std::uniform_real_distribution<double> unit(-1.0, 3.0);
    ConsensusScenario s{{}, g};
    for (int i = 0; i < 7; ++i) s.initial.push_back(unit(rng));
    AdversaryModel adversary;
    adversary.compromised = {6};
    adversary.kind = kinds[seed % 4];
    adversary.value = -50.0;
    adversary.lag = 3;
    adversary.probability = 0.5;
    adversary.start = 2;
    adversary.end = 30;
    const AdversarialConsensusRun run =
        RunAdversarialConsensus(s, adversary, ResilienceConfig{1, 0.2, 1.0}, 80, seed);
    CHECK(run.metrics.honest_in_hull);
  }
}

TEST_CASE("recovery after the attack window") {
  std::mt19937_64 rng(9);
  const ConsensusScenario s = RandomScenario(rng, 5);
  AdversaryModel adversary = Injection({5}, 20.0);
  adversary.start = 0;
  adversary.end = 10;
  const AdversarialConsensusRun run =
      RunAdversarialConsensus(s, adversary, ResilienceConfig{1, 0.5, 1.0}, 80, 1);
  REQUIRE(run.metrics.recovery_time.has_value());
  CHECK(*run.metrics.recovery_time > 10);
  CHECK(run.metrics.diameter[*run.metrics.recovery_time] < 1e-3 * run.metrics.diameter[0]);
  CHECK(run.metrics.diameter.size() == 81);
}

TEST_CASE("naive deviation grows with the injected magnitude") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    const ConsensusScenario s = RandomScenario(rng, 5);
    double previous = -1.0;
    for (double magnitude : {1.0, 10.0, 100.0}) {
      const AdversarialConsensusRun run = RunAdversarialConsensus(
          s, Injection({5}, magnitude), ResilienceConfig{0, 0.0, 1.0}, 40, seed);
      CHECK(run.metrics.max_honest_deviation >= previous);
      previous = run.metrics.max_honest_deviation;
    }
  }
}

TEST_CASE("zero-adversary runs match the plain traces bit for bit") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const ConsensusScenario s = RandomScenario(rng, 4 + trial % 3);
    const AdversarialConsensusRun run =
        RunAdversarialConsensus(s, AdversaryModel{}, ResilienceConfig{}, 50, trial);
    CHECK(run.values == NaiveConsensus(s, 50));
    CHECK(run.values == run.nominal);
  }

  const StrategicGame game = testing::RandomGame(rng, {3, 2, 2});
  LearnerSpec a;
  a.kind = LearnerKind::kFictitiousPlay;
  LearnerSpec b;
  b.kind = LearnerKind::kSmoothedBestResponse;
  b.payoff_rate = RateSchedule::Constant(0.3);
  b.policy_rate = RateSchedule::Constant(0.2);
  const AdversarialLearningRun run =
      RunAdversarialLearning(game, {a, b, a}, AdversaryModel{}, 500, 12);
  const Trace plain = RunDynamics(game, {a, b, a}, 500, 12);
  REQUIRE(run.trace.steps.size() == plain.steps.size());
  bool same = true;
  for (std::size_t t = 0; t < plain.steps.size(); ++t) {
    same = same && run.trace.steps[t].actions == plain.steps[t].actions &&
           run.trace.steps[t].policy == plain.steps[t].policy &&
           run.trace.steps[t].estimate == plain.steps[t].estimate;
  }
  CHECK(same);
  CHECK(run.max_honest_deviation == 0.0);
}

TEST_CASE("misreported actions mislead fictitious play") {
  // Column always claims H in matching pennies; the row learner then plays
  // H (the matching response) once the lie dominates its counts.
  const StrategicGame mp = testing::MatchingPennies();
  LearnerSpec fp;
  fp.kind = LearnerKind::kFictitiousPlay;
  AdversaryModel lie = Injection({1}, 0.0);
  const AdversarialLearningRun run = RunAdversarialLearning(mp, {fp, fp}, lie, 2000, 4);
  int row_heads = 0;
  for (std::size_t t = 1000; t < 2000; ++t) row_heads += run.trace.steps[t].actions[0] == 0;
  CHECK(row_heads == 1000);
  CHECK(run.max_honest_deviation > 0.5);

  CHECK_THROWS_AS(RunAdversarialLearning(mp, {fp, fp}, Injection({1}, 2.0), 10, 1),
                  DomainError);
  CHECK_THROWS_AS(RunAdversarialLearning(mp, {fp, fp}, Injection({1}, 0.5), 10, 1),
                  DomainError);

  for (AttackKind kind : {AttackKind::kSignFlip, AttackKind::kReplay, AttackKind::kChannelDrop}) {
    AdversaryModel adv;
    adv.compromised = {0};
    adv.kind = kind;
    adv.probability = 0.7;
    adv.lag = 2;
    adv.end = 100;
    const AdversarialLearningRun r1 = RunAdversarialLearning(mp, {fp, fp}, adv, 300, 8);
    const AdversarialLearningRun r2 = RunAdversarialLearning(mp, {fp, fp}, adv, 300, 8);
    CHECK(r1.deviation == r2.deviation);
  }
}

}  // namespace
}  // namespace stgames
