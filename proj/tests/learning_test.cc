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
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "stgames/errors.h"
#include "stgames/learning.h"
#include "stgames/templates.h"
#include "test_games.h"

namespace stgames {
namespace {

using testing::ConstantGame;
using testing::MatchingPennies;
using testing::PrisonersDilemma;

LearnerSpec Learner(LearnerKind kind, double mu, double lambda) {
  LearnerSpec s;
  s.kind = kind;
  s.payoff_rate = RateSchedule::Constant(mu);
  s.policy_rate = RateSchedule::Constant(lambda);
  return s;
}

LearningState SingleAgentState(std::vector<double> policy, std::vector<double> q) {
  LearningState s;
  s.policy = {std::move(policy)};
  s.estimate = {std::move(q)};
  return s;
}

bool OnSimplex(const std::vector<double>& p) {
  double total = 0.0;
  for (double x : p) {
    if (x < -1e-12) return false;
    total += x;
  }
  return std::abs(total - 1.0) <= 1e-9;
}

TEST_CASE("payoff estimate update") {
  LearningState s = SingleAgentState({0.5, 0.5}, {1.0, 2.0});
  PayoffObservation obs{1, 4.0, {7.0, 8.0}, {}};
  StepPayoffEstimate(s, 0, LearnerKind::kPayoffEstimation, 0.0, obs);
  CHECK(s.estimate[0] == std::vector<double>{1.0, 2.0});
  StepPayoffEstimate(s, 0, LearnerKind::kBestResponse, 0.0, obs);
  CHECK(s.estimate[0] == std::vector<double>{1.0, 2.0});

  StepPayoffEstimate(s, 0, LearnerKind::kPayoffEstimation, 1.0, obs);
  CHECK(s.estimate[0] == std::vector<double>{1.0, 4.0});
  StepPayoffEstimate(s, 0, LearnerKind::kBestResponse, 0.5, obs);
  CHECK(s.estimate[0] == std::vector<double>{4.0, 6.0});

  CHECK_THROWS_AS(StepPayoffEstimate(s, 0, LearnerKind::kPayoffEstimation, 1.5, obs),
                  DomainError);
  CHECK_THROWS_AS(StepPayoffEstimate(s, 0, LearnerKind::kPayoffEstimation, -0.1, obs),
                  DomainError);
}

TEST_CASE("harmonic estimate converges to the mean payoff") {
  // Counterfactual observations with noise around m; q with rate 1/t is the
  // running sample mean, compared against the Monte-Carlo mean of the draws.
  const std::vector<double> m{1.0, -2.0, 0.5};
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 1.0);
  LearningState s = SingleAgentState({1.0 / 3, 1.0 / 3, 1.0 / 3}, {0, 0, 0});
  std::vector<double> sum(3, 0.0);
  const RateSchedule rate = RateSchedule::Harmonic();
  const long steps = 100000;
  for (long t = 1; t <= steps; ++t) {
    PayoffObservation obs;
    obs.counterfactual.resize(3);
    for (int a = 0; a < 3; ++a) {
      obs.counterfactual[a] = m[a] + noise(rng);
      sum[a] += obs.counterfactual[a];
    }
    StepPayoffEstimate(s, 0, LearnerKind::kBestResponse, rate.At(t), obs);
  }
  for (int a = 0; a < 3; ++a) {
    CHECK(std::abs(s.estimate[0][a] - m[a]) < 0.05);
    CHECK(std::abs(s.estimate[0][a] - sum[a] / steps) < 1e-9);
  }
}

TEST_CASE("policy update") {
  LearnerSpec br = Learner(LearnerKind::kBestResponse, 1, 1);
  LearningState s = SingleAgentState({0.2, 0.3, 0.5}, {1, 3, 2});
  StepPolicy(s, 0, br, 0.0);
  CHECK(s.policy[0] == std::vector<double>{0.2, 0.3, 0.5});
  StepPolicy(s, 0, br, 1.0);
  CHECK(s.policy[0] == std::vector<double>{0, 1, 0});

  // Ties go to the smallest index.
  CHECK(ArgmaxIndicator(std::vector<double>{2, 5, 5}) == std::vector<double>{0, 1, 0});
  const std::vector<char> mask{1, 0, 1};
  CHECK(ArgmaxIndicator(std::vector<double>{2, 5, 3}, mask) ==
        std::vector<double>{0, 0, 1});

  const std::vector<double> q{-3.0, 10.0, 0.25, 4.0};
  const std::vector<double> flat = Softmax(q, 1e6);
  for (double p : flat) CHECK(std::abs(p - 0.25) < 1e-3);

  CHECK_THROWS_AS(StepPolicy(s, 0, br, 2.0), DomainError);
  CHECK_THROWS_AS(ArgmaxIndicator(std::vector<double>{1, 2}, std::vector<char>{0, 0}),
                  DomainError);
}

TEST_CASE("policy stays on the simplex for every kind") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> value(-50.0, 50.0);
  std::uniform_int_distribution<int> size(1, 6);
  const LearnerKind kinds[] = {
      LearnerKind::kBestResponse, LearnerKind::kSmoothedBestResponse,
      LearnerKind::kFictitiousPlay, LearnerKind::kReplicator,
      LearnerKind::kPayoffEstimation};
  int failures = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int m = size(rng);
    std::vector<double> pi(m), q(m);
    for (int a = 0; a < m; ++a) {
      pi[a] = unit(rng) < 0.3 ? 0.0 : unit(rng);
      q[a] = value(rng);
    }
    const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
    if (total == 0.0) pi[0] = 1.0;
    else for (double& p : pi) p /= total;
    LearnerSpec learner;
    learner.kind = kinds[trial % 5];
    learner.temperature = std::exp(value(rng) / 10.0);
    LearningState s = SingleAgentState(pi, q);
    StepPolicy(s, 0, learner, unit(rng));
    if (!OnSimplex(s.policy[0])) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("replicator vertices are absorbing") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> value(-10.0, 10.0);
  LearnerSpec rep = Learner(LearnerKind::kReplicator, 1, 1);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 2 + trial % 4;
    const int vertex = trial % m;
    std::vector<double> pi(m, 0.0), q(m);
    pi[vertex] = 1.0;
    for (double& x : q) x = value(rng);
    LearningState s = SingleAgentState(pi, q);
    StepPolicy(s, 0, rep, std::uniform_real_distribution<double>(0, 1)(rng));
    CHECK(s.policy[0] == pi);
  }
}

TEST_CASE("best-response dynamics on the prisoner's dilemma") {
  const StrategicGame pd = PrisonersDilemma();
  LearnerSpec br = Learner(LearnerKind::kBestResponse, 1, 1);
  br.initial_policy = {1.0, 0.0};
  const Trace trace = RunDynamics(pd, {br, br}, 20, 1);
  REQUIRE(trace.steps.size() == 20);
  CHECK(trace.steps[0].actions == ActionProfile{0, 0});
  for (std::size_t t = 1; t < trace.steps.size(); ++t) {
    CHECK(trace.steps[t].actions == ActionProfile{1, 1});
  }
  const Diagnostics d = Diagnose(
      Trace{1, "", {trace.steps.begin() + 1, trace.steps.end()}}, pd);
  CHECK(d.regret == std::vector<double>{0.0, 0.0});
}

TEST_CASE("fictitious play on matching pennies") {
  const StrategicGame mp = MatchingPennies();
  const LearnerSpec fp = Learner(LearnerKind::kFictitiousPlay, 1, 1);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Trace trace = RunDynamics(mp, {fp, fp}, 100000, seed);
    const Diagnostics d = Diagnose(trace, mp, 1000);
    for (int i = 0; i < 2; ++i) {
      CHECK(std::abs(d.marginal_frequency[i][0] - 0.5) < 0.02);
      CHECK(d.regret[i] < 0.02);
    }
    CHECK(d.equilibrium_gap.back() < 0.08);
  }
}

TEST_CASE("frozen rates keep policies constant") {
  std::mt19937_64 rng(11);
  const StrategicGame game = testing::RandomGame(rng, {3, 2, 2});
  LearnerSpec a = Learner(LearnerKind::kSmoothedBestResponse, 0, 0);
  a.initial_policy = {0.2, 0.5, 0.3};
  LearnerSpec b = Learner(LearnerKind::kReplicator, 0, 0);
  LearnerSpec c = Learner(LearnerKind::kFictitiousPlay, 0, 0);
  const Trace trace = RunDynamics(game, {a, b, c}, 200, 3);
  for (const StepRecord& s : trace.steps) {
    CHECK(s.policy[0] == a.initial_policy);
    CHECK(s.policy[1] == std::vector<double>{0.5, 0.5});
    CHECK(s.policy[2] == std::vector<double>{0.5, 0.5});
  }
}

TEST_CASE("regret diagnostics") {
  const StrategicGame constant = ConstantGame({2, 3}, 4.0);
  const LearnerSpec pe = Learner(LearnerKind::kPayoffEstimation, 0.5, 0.5);
  const Diagnostics flat = Diagnose(RunDynamics(constant, {pe, pe}, 50, 9), constant);
  CHECK(flat.regret == std::vector<double>{0.0, 0.0});
  for (double g : flat.equilibrium_gap) CHECK(std::abs(g) < 1e-12);

  // One step at (C,D) in the PD: row would gain 1 by D, column nothing.
  const StrategicGame pd = PrisonersDilemma();
  StepRecord step;
  step.t = 1;
  step.actions = {0, 1};
  const Diagnostics one = Diagnose(Trace{0, "", {step}}, pd);
  CHECK(one.regret == std::vector<double>{1.0, 0.0});
  REQUIRE(one.joint_frequency.size() == 1);
  CHECK(one.joint_frequency[0].first == ActionProfile{0, 1});
  CHECK(one.joint_frequency[0].second == 1.0);
  CHECK(one.equilibrium_gap == std::vector<double>{1.0});

  StepRecord bad = step;
  bad.actions = {0, 2};
  CHECK_THROWS_AS(Diagnose(Trace{0, "", {bad}}, pd), DomainError);
  bad.actions = {0};
  CHECK_THROWS_AS(Diagnose(Trace{0, "", {bad}}, pd), DomainError);
}

TEST_CASE("run validation") {
  const StrategicGame pd = PrisonersDilemma();
  const LearnerSpec br = Learner(LearnerKind::kBestResponse, 1, 1);
  CHECK_THROWS_AS(RunDynamics(pd, {br}, 10, 1), DomainError);
  CHECK_THROWS_AS(RunDynamics(pd, {br, br}, 0, 1), DomainError);
  CHECK_THROWS_AS(RunDynamics(pd, {br, br}, 10, 1, {1}), DomainError);
  LearnerSpec bad = br;
  bad.temperature = 0.0;
  CHECK_THROWS_AS(RunDynamics(pd, {bad, br}, 10, 1), DomainError);
  bad = br;
  bad.initial_policy = {0.7, 0.7};
  CHECK_THROWS_AS(RunDynamics(pd, {bad, br}, 10, 1), DomainError);
  CHECK(ParseLearnerKind("replicator") == LearnerKind::kReplicator);
  CHECK_FALSE(ParseLearnerKind("q-learning").has_value());
}

bool SameTrace(const Trace& a, const Trace& b) {
  if (a.steps.size() != b.steps.size()) return false;
  for (std::size_t t = 0; t < a.steps.size(); ++t) {
    const StepRecord& x = a.steps[t];
    const StepRecord& y = b.steps[t];
    if (x.actions != y.actions || x.payoffs != y.payoffs || x.policy != y.policy ||
        x.estimate != y.estimate || x.signal != y.signal) {
      return false;
    }
  }
  return true;
}

TEST_CASE("identical seeds reproduce traces") {
  std::mt19937_64 rng(21);
  const StrategicGame game = testing::RandomGame(rng, {3, 3}, 2);
  LearnerSpec a = Learner(LearnerKind::kSmoothedBestResponse, 0.3, 0.2);
  a.payoff_rate = RateSchedule::Harmonic(1.0);
  const LearnerSpec b = Learner(LearnerKind::kReplicator, 0.5, 0.1);
  const Trace first = RunDynamics(game, {a, b}, 2000, 42, {0, 1, 1});
  const Trace second = RunDynamics(game, {a, b}, 2000, 42, {0, 1, 1});
  CHECK(SameTrace(first, second));
  const Trace other = RunDynamics(game, {a, b}, 2000, 43, {0, 1, 1});
  CHECK_FALSE(SameTrace(first, other));
}

TEST_CASE("round-robin best response settles on the congestion template") {
  // Augmented Braess network with perturbed coefficients to avoid payoff
  // ties; four agents choose among its three paths.
  const CongestionNetwork net(
      {{"s", "u", 0.1, 1.3}, {"u", "t", 1.05, 0.2}, {"s", "v", 0.95, 0.1},
       {"v", "t", 0.2, 1.1}, {"u", "v", 0.05, 0.3}},
      "s", "t", 4.0);
  const StrategicGame game = AtomicRoutingGame(net, 4);
  REQUIRE(game.num_actions(0) == 3);
  std::mt19937_64 starts(2025);
  for (int run = 0; run < 50; ++run) {
    std::vector<LearnerSpec> learners;
    for (int i = 0; i < 4; ++i) {
      LearnerSpec br = Learner(LearnerKind::kBestResponse, 1, 1);
      br.initial_policy.assign(3, 0.0);
      br.initial_policy[starts() % 3] = 1.0;
      learners.push_back(br);
    }
    const Trace trace = RunDynamics(game, learners, 200, run,
                                    {}, UpdateSchedule::kRoundRobin);
    const ActionProfile& last = trace.steps.back().actions;
    CHECK(IsNash(game, last).is_nash);
    // Absorbed: the final profile repeats over the last full round.
    for (std::size_t t = trace.steps.size() - 4; t < trace.steps.size(); ++t) {
      CHECK(trace.steps[t].actions == last);
    }
  }
}

}  // namespace
}  // namespace stgames
