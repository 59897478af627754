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

#include "stgames/coalition_game.h"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "stgames/errors.h"
#include "stgames/lp.h"

namespace stgames {
namespace {

void CheckAgentCount(int n, int limit) {
  if (n < 2) throw DomainError("a coalition game needs at least 2 agents");
  if (n > limit) {
    throw CapacityError(fmt::format("{} agents exceeds the limit of {}", n, limit));
  }
}

void CheckAllocation(const CoalitionGame& game, std::span<const double> r) {
  if (static_cast<int>(r.size()) != game.num_agents()) {
    throw DomainError(fmt::format("allocation has {} entries; game has {} agents",
                                  r.size(), game.num_agents()));
  }
  for (double x : r) {
    if (!std::isfinite(x)) throw DomainError("allocation entries must be finite");
  }
}

std::vector<double> Indicator(int n, Coalition s) {
  std::vector<double> row(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (Contains(s, i)) row[i] = 1.0;
  }
  return row;
}

// Row-echelon basis of the span of coalition indicator vectors.
class SpanTracker {
 public:
  explicit SpanTracker(int n) : n_(n) {}

  int rank() const { return static_cast<int>(rows_.size()); }

  bool Contains(Coalition s) const {
    std::vector<double> v = Indicator(n_, s);
    Reduce(v);
    return Norm(v) <= 1e-9;
  }

  // Returns false when s is already in the span.
  bool Add(Coalition s) {
    std::vector<double> v = Indicator(n_, s);
    Reduce(v);
    if (Norm(v) <= 1e-9) return false;
    int pivot = 0;
    for (int k = 1; k < n_; ++k) {
      if (std::abs(v[k]) > std::abs(v[pivot])) pivot = k;
    }
    const double scale = v[pivot];
    for (double& x : v) x /= scale;
    rows_.push_back(std::move(v));
    pivots_.push_back(pivot);
    return true;
  }

 private:
  void Reduce(std::vector<double>& v) const {
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const double factor = v[pivots_[r]];
      if (factor == 0.0) continue;
      for (int k = 0; k < n_; ++k) v[k] -= factor * rows_[r][k];
    }
  }
  static double Norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }

  int n_;
  std::vector<std::vector<double>> rows_;
  std::vector<int> pivots_;
};

// Appends the most violated candidates (violation > tolerance) to `working`,
// together with their complements. Returns how many rows were added.
int AddViolated(const std::vector<Coalition>& candidates,
                const std::vector<double>& violation, Coalition grand,
                std::vector<char>& in_working, std::vector<Coalition>& working,
                const std::vector<char>& eligible) {
  std::vector<std::pair<double, Coalition>> worst;
  for (Coalition s : candidates) {
    if (!in_working[s] && violation[s] > kCoalitionTolerance) {
      worst.emplace_back(violation[s], s);
    }
  }
  std::sort(worst.begin(), worst.end(), [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  });
  const std::size_t batch = 8 + 2 * static_cast<std::size_t>(std::bit_width(grand));
  int added = 0;
  for (std::size_t k = 0; k < worst.size() && k < batch; ++k) {
    for (Coalition s : {worst[k].second, grand ^ worst[k].second}) {
      if (s != 0 && s != grand && !in_working[s] && eligible[s]) {
        in_working[s] = 1;
        working.push_back(s);
        ++added;
      }
    }
  }
  return added;
}

LpSolution SolveOrThrow(const LinearProgram& lp, const char* what) {
  LpSolution s = SolveLp(lp);
  if (s.status != LpStatus::kOptimal) {
    throw ComputationError(
        fmt::format("{} LP ended with status {}", what, ToString(s.status)));
  }
  return s;
}

}  // namespace

CoalitionGame::CoalitionGame(int num_agents) : num_agents_(num_agents) {
  CheckAgentCount(num_agents, kMaxCoalitionAgents);
  values_.assign(std::size_t{1} << num_agents, 0.0);
}

CoalitionGame::CoalitionGame(int num_agents, std::vector<double> values)
    : num_agents_(num_agents), values_(std::move(values)) {
  CheckAgentCount(num_agents, kMaxCoalitionAgents);
  if (values_.size() != (std::size_t{1} << num_agents)) {
    throw DomainError(fmt::format("value table needs {} entries, got {}",
                                  std::size_t{1} << num_agents, values_.size()));
  }
  if (values_[0] != 0.0) throw DomainError("v(empty) must be 0");
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("coalition values must be finite");
  }
}

double CoalitionGame::value(Coalition s) const {
  if (s > grand()) throw DomainError(fmt::format("coalition {} out of range", s));
  return values_[s];
}

void CoalitionGame::set_value(Coalition s, double value) {
  if (s > grand()) throw DomainError(fmt::format("coalition {} out of range", s));
  if (s == 0 && value != 0.0) throw DomainError("v(empty) must be 0");
  if (!std::isfinite(value)) throw DomainError("coalition values must be finite");
  values_[s] = value;
}

std::string CoalitionString(Coalition s) {
  std::string out = "{";
  bool first = true;
  for (int i = 0; s >> i; ++i) {
    if (!Contains(s, i)) continue;
    if (!first) out += ",";
    out += std::to_string(i + 1);
    first = false;
  }
  return out + "}";
}

int CoalitionSize(Coalition s) { return std::popcount(s); }

bool Contains(Coalition s, int agent) { return (s >> agent) & 1U; }

std::vector<double> CoalitionSums(int num_agents, std::span<const double> r) {
  std::vector<double> sums(std::size_t{1} << num_agents, 0.0);
  for (Coalition s = 1; s < sums.size(); ++s) {
    const int low = std::countr_zero(s);
    sums[s] = sums[s & (s - 1)] + r[low];
  }
  return sums;
}

StructureCheck IsSuperadditive(const CoalitionGame& game) {
  const Coalition grand = game.grand();
  for (Coalition s = 1; s <= grand; ++s) {
    const Coalition rest = grand ^ s;
    // Ascending submasks of the complement.
    for (Coalition t = rest & (~rest + 1); t != 0; t = ((t | ~rest) + 1) & rest) {
      if (t <= s) continue;
      if (game.value(s | t) < game.value(s) + game.value(t) - kCoalitionTolerance) {
        return {false, PairWitness{s, t}};
      }
    }
  }
  return {};
}

double CooperativeSurplus(const CoalitionGame& game) {
  double singles = 0.0;
  for (int i = 0; i < game.num_agents(); ++i) singles += game.value(Coalition{1} << i);
  return game.value(game.grand()) - singles;
}

CoreCheck InCore(const CoalitionGame& game, std::span<const double> r) {
  CheckAllocation(game, r);
  const auto sums = CoalitionSums(game.num_agents(), r);
  CoreCheck check;
  if (std::abs(sums[game.grand()] - game.value(game.grand())) > kCoalitionTolerance) {
    check.in_core = false;
    check.efficiency_violated = true;
    return check;
  }
  for (Coalition s = 1; s <= game.grand(); ++s) {
    if (sums[s] < game.value(s) - kCoalitionTolerance) {
      check.in_core = false;
      check.violated = s;
      return check;
    }
  }
  return check;
}

CoreCertificate CoreNonempty(const CoalitionGame& game) {
  const int n = game.num_agents();
  const Coalition grand = game.grand();
  std::vector<char> in_working(grand + 1, 0);
  std::vector<char> eligible(grand + 1, 1);
  std::vector<Coalition> working;
  for (int i = 0; i < n; ++i) {
    working.push_back(Coalition{1} << i);
    in_working[Coalition{1} << i] = 1;
  }
  std::vector<Coalition> all(grand);
  for (Coalition s = 1; s <= grand; ++s) all[s - 1] = s;
  // The grand coalition is treated as an ordinary >= row here.
  working.push_back(grand);
  in_working[grand] = 1;

  while (true) {
    LinearProgram lp;
    lp.objective.assign(n, 1.0);
    lp.MakeFree();
    for (Coalition s : working) {
      lp.AddConstraint(Indicator(n, s), Relation::kGreaterEqual, game.value(s));
    }
    const LpSolution sol = SolveOrThrow(lp, "core");
    const auto sums = CoalitionSums(n, sol.x);
    std::vector<double> violation(grand + 1, 0.0);
    for (Coalition s = 1; s <= grand; ++s) violation[s] = game.value(s) - sums[s];
    if (AddViolated(all, violation, grand, in_working, working, eligible) == 0) {
      CoreCertificate result;
      result.min_total = sol.value;
      result.nonempty = sol.value <= game.value(grand) + kCoalitionTolerance;
      if (result.nonempty) result.certificate = sol.x;
      return result;
    }
  }
}

Allocation Shapley(const CoalitionGame& game) {
  const int n = game.num_agents();
  // Marginal contributions summed per coalition size, then weighted by
  // |S|!(N-|S|-1)!/N! = 1 / (N * C(N-1, |S|)).
  std::vector<std::vector<double>> by_size(n, std::vector<double>(n, 0.0));
  for (Coalition s = 0; s <= game.grand(); ++s) {
    const int size = CoalitionSize(s);
    if (size == n) continue;
    const double base = game.value(s);
    for (int i = 0; i < n; ++i) {
      if (Contains(s, i)) continue;
      by_size[i][size] += game.value(s | (Coalition{1} << i)) - base;
    }
  }
  std::vector<double> weight(n);
  double binom = 1.0;  // C(n-1, s)
  for (int s = 0; s < n; ++s) {
    weight[s] = 1.0 / (n * binom);
    binom = binom * (n - 1 - s) / (s + 1);
  }
  Allocation phi(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int s = 0; s < n; ++s) phi[i] += by_size[i][s] * weight[s];
  }
  return phi;
}

double Excess(const CoalitionGame& game, Coalition s, std::span<const double> r) {
  CheckAllocation(game, r);
  if (s == 0) throw DomainError("excess is undefined for the empty coalition");
  if (s > game.grand()) throw DomainError("coalition out of range");
  double total = 0.0;
  for (int i = 0; i < game.num_agents(); ++i) {
    if (Contains(s, i)) total += r[i];
  }
  return game.value(s) - total;
}

Allocation Nucleolus(const CoalitionGame& game) {
  const int n = game.num_agents();
  CheckAgentCount(n, kMaxNucleolusAgents);
  const Coalition grand = game.grand();

  SpanTracker span(n);
  span.Add(grand);
  std::vector<std::pair<Coalition, double>> fixed;  // (S, excess level)
  std::vector<char> active(grand + 1, 0);
  std::vector<Coalition> active_list;
  for (Coalition s = 1; s < grand; ++s) {
    active[s] = 1;
    active_list.push_back(s);
  }

  Allocation r;
  while (span.rank() < n) {
    // Seed rows: active singletons with their complements, which keep the
    // restricted program bounded.
    std::vector<char> in_working(grand + 1, 0);
    std::vector<Coalition> working;
    for (Coalition s : active_list) {
      if (CoalitionSize(s) == 1 || working.empty()) {
        for (Coalition c : {s, grand ^ s}) {
          if (active[c] && !in_working[c]) {
            in_working[c] = 1;
            working.push_back(c);
          }
        }
      }
    }

    LpSolution sol;
    while (true) {
      LinearProgram lp;
      lp.objective.assign(n + 1, 0.0);
      lp.objective[n] = 1.0;
      lp.MakeFree();
      std::vector<double> row = Indicator(n, grand);
      row.push_back(0.0);
      lp.AddConstraint(row, Relation::kEqual, game.value(grand));
      for (const auto& [s, level] : fixed) {
        row = Indicator(n, s);
        row.push_back(0.0);
        lp.AddConstraint(row, Relation::kEqual, game.value(s) - level);
      }
      for (Coalition s : working) {
        row = Indicator(n, s);
        row.push_back(1.0);
        lp.AddConstraint(row, Relation::kGreaterEqual, game.value(s));
      }
      sol = SolveOrThrow(lp, "nucleolus stage");
      const double level = sol.x[n];
      const auto sums = CoalitionSums(n, std::span<const double>(sol.x.data(), n));
      std::vector<double> violation(grand + 1, 0.0);
      for (Coalition s : active_list) violation[s] = game.value(s) - sums[s] - level;
      if (AddViolated(active_list, violation, grand, in_working, working, active) == 0) {
        break;
      }
    }

    const double level = sol.x[n];
    r.assign(sol.x.begin(), sol.x.begin() + n);
    const std::size_t first_row = 1 + fixed.size();
    std::vector<Coalition> binding;
    for (std::size_t k = 0; k < working.size(); ++k) {
      if (sol.duals[first_row + k] > kCoalitionTolerance) binding.push_back(working[k]);
    }
    if (binding.empty()) {
      const auto sums = CoalitionSums(n, r);
      for (Coalition s : active_list) {
        if (std::abs(game.value(s) - sums[s] - level) <= kCoalitionTolerance) {
          binding.push_back(s);
        }
      }
    }
    std::sort(binding.begin(), binding.end());
    bool progressed = false;
    for (Coalition s : binding) {
      if (span.Add(s)) {
        fixed.emplace_back(s, level);
        progressed = true;
      }
    }
    if (!progressed) {
      throw ComputationError("nucleolus stage fixed no new coalition");
    }
    std::vector<Coalition> remaining;
    for (Coalition s : active_list) {
      if (span.Contains(s)) {
        active[s] = 0;
      } else {
        remaining.push_back(s);
      }
    }
    active_list = std::move(remaining);
  }
  return r;
}

StructureCheck IsConvex(const CoalitionGame& game) {
  const int n = game.num_agents();
  for (Coalition s = 0; s <= game.grand(); ++s) {
    for (int i = 0; i < n; ++i) {
      if (Contains(s, i)) continue;
      const Coalition si = s | (Coalition{1} << i);
      for (int j = i + 1; j < n; ++j) {
        if (Contains(s, j)) continue;
        const Coalition sj = s | (Coalition{1} << j);
        if (game.value(si) + game.value(sj) >
            game.value(si | sj) + game.value(s) + kCoalitionTolerance) {
          return {false, PairWitness{si, sj}};
        }
      }
    }
  }
  return {};
}

CoalitionGame RandomConvexGame(int num_agents, std::mt19937_64& rng) {
  CheckAgentCount(num_agents, kMaxCoalitionAgents);
  std::uniform_real_distribution<double> quad(0.0, 0.5);
  std::uniform_real_distribution<double> linear(0.0, 1.0);
  std::uniform_real_distribution<double> pair(0.0, 0.2);
  const double a = quad(rng);
  std::vector<double> c(num_agents);
  for (double& x : c) x = linear(rng);
  std::vector<std::vector<double>> w(num_agents, std::vector<double>(num_agents, 0.0));
  for (int i = 0; i < num_agents; ++i) {
    for (int j = i + 1; j < num_agents; ++j) w[i][j] = pair(rng);
  }
  CoalitionGame game(num_agents);
  for (Coalition s = 1; s <= game.grand(); ++s) {
    const int size = CoalitionSize(s);
    double v = a * size * size;
    for (int i = 0; i < num_agents; ++i) {
      if (!Contains(s, i)) continue;
      v += c[i];
      for (int j = i + 1; j < num_agents; ++j) {
        if (Contains(s, j)) v += w[i][j];
      }
    }
    game.set_value(s, v);
  }
  return game;
}

CoalitionGame RandomCoalitionGame(int num_agents, std::mt19937_64& rng,
                                  double low, double high) {
  CoalitionGame game(num_agents);
  std::uniform_real_distribution<double> value(low, high);
  for (Coalition s = 1; s <= game.grand(); ++s) game.set_value(s, value(rng));
  return game;
}

}  // namespace stgames
