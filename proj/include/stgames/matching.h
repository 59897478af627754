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

#ifndef STGAMES_MATCHING_H_
#define STGAMES_MATCHING_H_

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace stgames {

inline constexpr int kMaxEnumerationSize = 8;

enum class Side { kM, kW };

// One-to-one two-sided market with complete strict preferences. Preference
// lists hold opposite-side indices, most preferred first.
class MatchingMarket {
 public:
  MatchingMarket(std::vector<std::vector<int>> m_prefs,
                 std::vector<std::vector<int>> w_prefs);

  int size() const { return static_cast<int>(m_prefs_.size()); }
  const std::vector<int>& prefs(Side side, int agent) const;
  // Position of `partner` in agent's list; 0 is best.
  int rank(Side side, int agent, int partner) const;
  bool Prefers(Side side, int agent, int a, int b) const {
    return rank(side, agent, a) < rank(side, agent, b);
  }

 private:
  std::vector<std::vector<int>> m_prefs_;
  std::vector<std::vector<int>> w_prefs_;
  std::vector<std::vector<int>> m_rank_;
  std::vector<std::vector<int>> w_rank_;
};

// partner_of_m[m] = w. Must be a bijection.
struct Matching {
  std::vector<int> partner_of_m;
  bool operator==(const Matching&) const = default;
};

void CheckMatching(const MatchingMarket& market, const Matching& matching);
std::vector<int> PartnersOfW(const Matching& matching);

struct DeferredAcceptanceRun {
  Matching matching;
  int proposals = 0;
};

// Proposal / tentative-hold / reject rounds. Free proposers are served in
// ascending index order unless `priority` (a permutation of proposer indices)
// gives a different service order.
DeferredAcceptanceRun RunDeferredAcceptance(const MatchingMarket& market,
                                            Side proposing,
                                            std::span<const int> priority = {});

Matching DeferredAcceptance(const MatchingMarket& market, Side proposing);

// Pairs (m, w) that strictly prefer each other to their partners, in
// ascending (m, w) order.
std::vector<std::pair<int, int>> BlockingPairs(const MatchingMarket& market,
                                               const Matching& matching);

// All stable matchings in lexicographic order of partner_of_m (n <= 8).
std::vector<Matching> EnumerateStable(const MatchingMarket& market);

}  // namespace stgames

#endif  // STGAMES_MATCHING_H_
