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
#include <random>

#include "doctest.h"
#include "stgames/errors.h"
#include "test_games.h"

namespace stgames {
namespace {

using testing::Coordination;
using testing::MatchingPennies;
using testing::PrisonersDilemma;

TEST_CASE("payoff lookup") {
  const StrategicGame pd = PrisonersDilemma();
  CHECK(Payoff(pd, {"D", "D"}, "none") == std::vector<double>{1, 1});
  CHECK(Payoff(pd, {1, 0}) == std::vector<double>{5, 0});
  CHECK_THROWS_AS(Payoff(pd, {"D", "X"}, "none"), DomainError);
  CHECK_THROWS_AS(Payoff(pd, {"D", "D"}, "rain"), DomainError);

  StrategicGame solo({"only"}, {{"stay"}});
  const double v[1] = {2.5};
  solo.SetPayoffs(0, {0}, v);
  CHECK(Payoff(solo, {0}) == std::vector<double>{2.5});

  const StrategicGame mp = MatchingPennies();
  for (long k = 0; k < mp.num_profiles(); ++k) {
    const auto p = mp.payoffs(0, k);
    CHECK(p[0] + p[1] == 0.0);
  }
}

TEST_CASE("best responses") {
  const StrategicGame pd = PrisonersDilemma();
  CHECK(BestResponses(pd, 0, {0, 0}) == std::vector<int>{1});
  CHECK(BestResponses(pd, 1, {0, 0}) == std::vector<int>{1});
  CHECK(BestResponses(testing::ConstantGame({3, 2}, 4.0), 0, {0, 1}) ==
        std::vector<int>{0, 1, 2});
  const StrategicGame mp = MatchingPennies();
  CHECK(BestResponses(mp, 0, {0, 0}) == std::vector<int>{0});  // match heads
  CHECK(BestResponses(mp, 1, {0, 0}) == std::vector<int>{1});  // mismatch
  CHECK_THROWS_AS(BestResponses(pd, 2, {0, 0}), DomainError);
}

TEST_CASE("Nash check") {
  const StrategicGame pd = PrisonersDilemma();
  NashCheck dd = IsNash(pd, {1, 1});
  CHECK(dd.is_nash);
  CHECK(dd.max_gain == 0.0);
  CHECK_FALSE(dd.witness.has_value());

  NashCheck cc = IsNash(pd, {0, 0});
  CHECK_FALSE(cc.is_nash);
  CHECK(cc.max_gain == 2.0);
  REQUIRE(cc.witness.has_value());
  CHECK(cc.witness->agent == 0);
  CHECK(cc.witness->action == 1);

  CHECK(IsNash(pd, {0, 0}, 0, 2.0).is_nash);
  CHECK_THROWS_AS(IsNash(pd, {0, 0}, 0, -1.0), DomainError);
  const StrategicGame flat = testing::ConstantGame({2, 3, 2}, 1.0);
  for (long k = 0; k < flat.num_profiles(); ++k) {
    CHECK(IsNash(flat, flat.ProfileAt(k)).is_nash);
  }
}

TEST_CASE("pure equilibrium enumeration") {
  CHECK(EnumeratePureNash(MatchingPennies()).empty());
  CHECK(EnumeratePureNash(Coordination()) ==
        std::vector<ActionProfile>{{0, 0}, {1, 1}});
  CHECK(EnumeratePureNash(PrisonersDilemma()) ==
        std::vector<ActionProfile>{{1, 1}});
}

TEST_CASE("welfare and price of anarchy") {
  WelfareReport pd = WelfareAndPoa(PrisonersDilemma());
  CHECK(pd.status == PoaStatus::kDefined);
  CHECK(pd.optimal_welfare == 6.0);
  CHECK(pd.optimal_profile == ActionProfile{0, 0});
  CHECK(pd.worst_equilibrium_welfare == 2.0);
  CHECK(pd.ratio == 3.0);
  CHECK(WelfareAndPoa(Coordination()).ratio == 1.0);
  CHECK(WelfareAndPoa(MatchingPennies()).status == PoaStatus::kNoPureEquilibrium);
}

TEST_CASE("grid capacity") {
  std::vector<std::vector<std::string>> actions(7, std::vector<std::string>(8, "x"));
  std::vector<std::string> names(7, "p");
  CHECK_THROWS_AS(StrategicGame(names, actions), CapacityError);
}

TEST_CASE("best-response consistency and argmax invariance on random games") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> count(1, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 3;
    std::vector<int> counts(n);
    for (int& c : counts) c = count(rng);
    const StrategicGame game = testing::RandomGame(rng, counts);

    // Independent double loop over profiles and agents.
    std::vector<ActionProfile> fixed_points;
    for (long k = 0; k < game.num_profiles(); ++k) {
      const ActionProfile profile = game.ProfileAt(k);
      bool all_best = true;
      for (int i = 0; i < n; ++i) {
        const auto br = BestResponses(game, i, profile);
        const bool in_br =
            std::find(br.begin(), br.end(), profile[i]) != br.end();
        all_best = all_best && in_br;
      }
      CHECK(IsNash(game, profile).is_nash == all_best);
      if (all_best) fixed_points.push_back(profile);
    }
    const auto equilibria = EnumeratePureNash(game);
    CHECK(equilibria == fixed_points);

    StrategicGame shifted = game;
    const int agent = trial % n;
    for (long k = 0; k < game.num_profiles(); ++k) {
      shifted.SetPayoff(0, k, agent, game.payoff(0, k, agent) + 7.0);
    }
    CHECK(EnumeratePureNash(shifted) == equilibria);
    for (long k = 0; k < game.num_profiles(); ++k) {
      const ActionProfile profile = game.ProfileAt(k);
      CHECK(BestResponses(shifted, agent, profile) ==
            BestResponses(game, agent, profile));
      CHECK(IsNash(shifted, profile).is_nash == IsNash(game, profile).is_nash);
    }
  }
}

TEST_CASE("mixed profile helpers") {
  const StrategicGame mp = MatchingPennies();
  const MixedProfile half = {{0.5, 0.5}, {0.5, 0.5}};
  CHECK(MixedNashGap(mp, half) == doctest::Approx(0.0));
  CHECK(ExpectedPayoffs(mp, half)[0] == doctest::Approx(0.0));
  const MixedProfile pure = {{1.0, 0.0}, {1.0, 0.0}};
  CHECK(MixedNashGap(mp, pure) == doctest::Approx(2.0));
  CHECK_THROWS_AS(CheckMixed(mp, {{0.7, 0.7}, {0.5, 0.5}}), DomainError);
}

}  // namespace
}  // namespace stgames
