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

#ifndef STGAMES_COALITION_GAME_H_
#define STGAMES_COALITION_GAME_H_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace stgames {

// Agent i is bit i.
using Coalition = std::uint32_t;
using Allocation = std::vector<double>;

inline constexpr int kMaxCoalitionAgents = 20;
inline constexpr int kMaxNucleolusAgents = 12;
inline constexpr double kCoalitionTolerance = 1e-9;

// Transferable-utility game given by its characteristic function over all
// 2^N coalitions. v(empty) is always 0.
class CoalitionGame {
 public:
  explicit CoalitionGame(int num_agents);
  CoalitionGame(int num_agents, std::vector<double> values);

  int num_agents() const { return num_agents_; }
  Coalition grand() const { return (Coalition{1} << num_agents_) - 1; }
  std::size_t num_coalitions() const { return values_.size(); }

  double value(Coalition s) const;
  void set_value(Coalition s, double value);
  std::span<const double> values() const { return values_; }

 private:
  int num_agents_;
  std::vector<double> values_;
};

// "{1,3}" with 1-based agent numbers; "{}" for the empty coalition.
std::string CoalitionString(Coalition s);
int CoalitionSize(Coalition s);
bool Contains(Coalition s, int agent);

// Sum of r over every coalition, indexed by bitmask.
std::vector<double> CoalitionSums(int num_agents, std::span<const double> r);

struct PairWitness {
  Coalition first = 0;
  Coalition second = 0;
};

struct StructureCheck {
  bool holds = true;
  std::optional<PairWitness> witness;
};

// v(S u T) >= v(S) + v(T) for disjoint S, T; the witness is the first failing
// pair with S < T in bitmask order.
StructureCheck IsSuperadditive(const CoalitionGame& game);

// v(N) - sum_i v({i}).
double CooperativeSurplus(const CoalitionGame& game);

struct CoreCheck {
  bool in_core = true;
  bool efficiency_violated = false;
  std::optional<Coalition> violated;  // first blocking coalition
};

CoreCheck InCore(const CoalitionGame& game, std::span<const double> r);

struct CoreCertificate {
  bool nonempty = false;
  // Minimum of sum(r) subject to r(S) >= v(S) for every nonempty S.
  double min_total = 0.0;
  Allocation certificate;  // in the core when nonempty
};

CoreCertificate CoreNonempty(const CoalitionGame& game);

Allocation Shapley(const CoalitionGame& game);

// v(S) - r(S).
double Excess(const CoalitionGame& game, Coalition s, std::span<const double> r);

// Successive-LP nucleolus (N <= kMaxNucleolusAgents).
Allocation Nucleolus(const CoalitionGame& game);

// v(S) + v(T) <= v(S u T) + v(S n T) for all S, T. Checked through the
// equivalent increasing-marginal-contribution condition; the witness is the
// pair (S u {i}, S u {j}) of the first local violation.
StructureCheck IsConvex(const CoalitionGame& game);

// Supermodular game: v(S) = a|S|^2 + sum_{i in S} c_i + sum_{i<j in S} w_ij
// with a, c, w >= 0.
CoalitionGame RandomConvexGame(int num_agents, std::mt19937_64& rng);

// Values uniform in [low, high] for every nonempty coalition.
CoalitionGame RandomCoalitionGame(int num_agents, std::mt19937_64& rng,
                                  double low, double high);

}  // namespace stgames

#endif  // STGAMES_COALITION_GAME_H_
