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

#include "stgames/matching.h"

#include <algorithm>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "stgames/errors.h"

namespace stgames {
namespace {

std::vector<std::vector<int>> Ranks(const std::vector<std::vector<int>>& prefs,
                                    const char* side) {
  const int n = static_cast<int>(prefs.size());
  std::vector<std::vector<int>> rank(n, std::vector<int>(n, -1));
  for (int a = 0; a < n; ++a) {
    if (static_cast<int>(prefs[a].size()) != n) {
      throw DomainError(fmt::format("{}{} must rank all {} opposite agents", side,
                                    a + 1, n));
    }
    for (int pos = 0; pos < n; ++pos) {
      const int partner = prefs[a][pos];
      if (partner < 0 || partner >= n || rank[a][partner] != -1) {
        throw DomainError(fmt::format(
            "{}{} preference list is not a permutation", side, a + 1));
      }
      rank[a][partner] = pos;
    }
  }
  return rank;
}

}  // namespace

MatchingMarket::MatchingMarket(std::vector<std::vector<int>> m_prefs,
                               std::vector<std::vector<int>> w_prefs)
    : m_prefs_(std::move(m_prefs)), w_prefs_(std::move(w_prefs)) {
  if (m_prefs_.empty()) throw DomainError("market needs at least one agent per side");
  if (m_prefs_.size() != w_prefs_.size()) {
    throw DomainError("both sides must have the same number of agents");
  }
  m_rank_ = Ranks(m_prefs_, "m");
  w_rank_ = Ranks(w_prefs_, "w");
}

const std::vector<int>& MatchingMarket::prefs(Side side, int agent) const {
  return side == Side::kM ? m_prefs_.at(agent) : w_prefs_.at(agent);
}

int MatchingMarket::rank(Side side, int agent, int partner) const {
  return side == Side::kM ? m_rank_.at(agent).at(partner)
                          : w_rank_.at(agent).at(partner);
}

void CheckMatching(const MatchingMarket& market, const Matching& matching) {
  const int n = market.size();
  if (static_cast<int>(matching.partner_of_m.size()) != n) {
    throw DomainError("matching must assign every side-M agent");
  }
  std::vector<char> seen(n, 0);
  for (int w : matching.partner_of_m) {
    if (w < 0 || w >= n || seen[w]) throw DomainError("matching is not a bijection");
    seen[w] = 1;
  }
}

std::vector<int> PartnersOfW(const Matching& matching) {
  std::vector<int> inverse(matching.partner_of_m.size());
  for (std::size_t m = 0; m < inverse.size(); ++m) {
    inverse[matching.partner_of_m[m]] = static_cast<int>(m);
  }
  return inverse;
}

DeferredAcceptanceRun RunDeferredAcceptance(const MatchingMarket& market,
                                            Side proposing,
                                            std::span<const int> priority) {
  const int n = market.size();
  const Side receiving = proposing == Side::kM ? Side::kW : Side::kM;
  std::vector<int> order(n);
  if (priority.empty()) {
    std::iota(order.begin(), order.end(), 0);
  } else {
    order.assign(priority.begin(), priority.end());
    std::vector<int> check = order;
    std::sort(check.begin(), check.end());
    for (int k = 0; k < n; ++k) {
      if (static_cast<int>(check.size()) != n || check[k] != k) {
        throw DomainError("priority must be a permutation of proposers");
      }
    }
  }
  std::vector<int> position(n);  // proposer -> slot in service order
  for (int k = 0; k < n; ++k) position[order[k]] = k;

  std::vector<int> next_choice(n, 0);
  std::vector<int> held(n, -1);     // receiver -> proposer
  std::vector<int> engaged(n, -1);  // proposer -> receiver
  std::set<int> free_slots;
  for (int k = 0; k < n; ++k) free_slots.insert(k);

  DeferredAcceptanceRun run;
  while (!free_slots.empty()) {
    const int proposer = order[*free_slots.begin()];
    free_slots.erase(free_slots.begin());
    const int target = market.prefs(proposing, proposer)[next_choice[proposer]++];
    ++run.proposals;
    const int incumbent = held[target];
    if (incumbent < 0) {
      held[target] = proposer;
      engaged[proposer] = target;
    } else if (market.Prefers(receiving, target, proposer, incumbent)) {
      held[target] = proposer;
      engaged[proposer] = target;
      engaged[incumbent] = -1;
      free_slots.insert(position[incumbent]);
    } else {
      free_slots.insert(position[proposer]);
    }
  }
  if (proposing == Side::kM) {
    run.matching.partner_of_m = engaged;
  } else {
    run.matching.partner_of_m = held;
  }
  return run;
}

Matching DeferredAcceptance(const MatchingMarket& market, Side proposing) {
  return RunDeferredAcceptance(market, proposing).matching;
}

std::vector<std::pair<int, int>> BlockingPairs(const MatchingMarket& market,
                                               const Matching& matching) {
  CheckMatching(market, matching);
  const std::vector<int> partner_of_w = PartnersOfW(matching);
  std::vector<std::pair<int, int>> pairs;
  for (int m = 0; m < market.size(); ++m) {
    for (int w = 0; w < market.size(); ++w) {
      if (matching.partner_of_m[m] == w) continue;
      if (market.Prefers(Side::kM, m, w, matching.partner_of_m[m]) &&
          market.Prefers(Side::kW, w, m, partner_of_w[w])) {
        pairs.emplace_back(m, w);
      }
    }
  }
  return pairs;
}

std::vector<Matching> EnumerateStable(const MatchingMarket& market) {
  if (market.size() > kMaxEnumerationSize) {
    throw CapacityError(fmt::format("stable-set enumeration is limited to n <= {}",
                                    kMaxEnumerationSize));
  }
  Matching candidate;
  candidate.partner_of_m.resize(market.size());
  std::iota(candidate.partner_of_m.begin(), candidate.partner_of_m.end(), 0);
  std::vector<Matching> stable;
  do {
    if (BlockingPairs(market, candidate).empty()) stable.push_back(candidate);
  } while (std::next_permutation(candidate.partner_of_m.begin(),
                                 candidate.partner_of_m.end()));
  return stable;
}

}  // namespace stgames
