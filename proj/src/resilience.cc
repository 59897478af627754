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

#include "stgames/resilience.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "stgames/errors.h"

namespace stgames {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void CheckBoard(const MessageBoard& board) {
  for (const auto& row : board) {
    if (row.size() != board.size()) throw DomainError("message board must be square");
  }
}

std::vector<std::vector<int>> NeighborsOf(const ConsensusScenario& s) {
  const int n = static_cast<int>(s.initial.size());
  if (s.neighbors.empty()) return CompleteGraph(n);
  if (static_cast<int>(s.neighbors.size()) != n) {
    throw DomainError("neighbor lists must be given for every agent");
  }
  for (int i = 0; i < n; ++i) {
    for (int j : s.neighbors[i]) {
      if (j < 0 || j >= n || j == i) {
        throw DomainError(fmt::format("agent {} has invalid neighbor {}", i, j));
      }
    }
  }
  return s.neighbors;
}

MessageBoard Broadcast(const std::vector<double>& values,
                       const std::vector<std::vector<int>>& neighbors) {
  const std::size_t n = values.size();
  MessageBoard board(n, std::vector<std::optional<double>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (int j : neighbors[i]) board[i][j] = values[j];
  }
  return board;
}

double Diameter(const std::vector<double>& values, const std::vector<char>& honest) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!honest[i]) continue;
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
  }
  return hi >= lo ? hi - lo : 0.0;
}

std::optional<long> Recovery(const std::vector<double>& series, long end, double target,
                             bool inclusive) {
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (static_cast<long>(t) <= end) continue;
    if (series[t] < target || (inclusive && series[t] <= target)) return static_cast<long>(t);
  }
  return std::nullopt;
}

}  // namespace

const char* ToString(AttackKind kind) {
  switch (kind) {
    case AttackKind::kConstantInjection: return "constant-injection";
    case AttackKind::kSignFlip: return "sign-flip";
    case AttackKind::kReplay: return "replay";
    case AttackKind::kChannelDrop: return "channel-drop";
  }
  return "?";
}

std::optional<AttackKind> ParseAttackKind(const std::string& name) {
  for (AttackKind k : {AttackKind::kConstantInjection, AttackKind::kSignFlip,
                       AttackKind::kReplay, AttackKind::kChannelDrop}) {
    if (name == ToString(k)) return k;
  }
  return std::nullopt;
}

void AdversaryModel::Validate(int num_agents) const {
  for (int i : compromised) {
    if (i < 0 || i >= num_agents) {
      throw DomainError(fmt::format("compromised agent {} out of range", i));
    }
  }
  if (lag < 1) throw DomainError("replay lag must be at least 1");
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw DomainError(fmt::format("drop probability {} outside [0, 1]", probability));
  }
  if (!std::isfinite(value)) throw DomainError("injected value is not finite");
  if (start > end) throw DomainError("activation window is empty");
}

bool AdversaryModel::Compromised(int agent) const {
  return std::find(compromised.begin(), compromised.end(), agent) != compromised.end();
}

MessageBoard CorruptInformation(const AdversaryModel& adversary, const MessageBoard& honest,
                                long t, std::uint64_t seed,
                                std::span<const std::vector<double>> history) {
  CheckBoard(honest);
  const int n = static_cast<int>(honest.size());
  adversary.Validate(n);
  MessageBoard out = honest;
  if (adversary.compromised.empty() || !adversary.Active(t)) return out;

  std::optional<std::mt19937_64> rng;
  if (adversary.kind == AttackKind::kChannelDrop) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
    rng.emplace(seq);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || !out[i][j] || !adversary.Compromised(j)) continue;
      switch (adversary.kind) {
        case AttackKind::kConstantInjection:
          out[i][j] = adversary.value;
          break;
        case AttackKind::kSignFlip:
          out[i][j] = -*out[i][j];
          break;
        case AttackKind::kReplay: {
          const long past = t - adversary.lag;
          if (past >= 0 && past < static_cast<long>(history.size())) {
            if (static_cast<int>(history[past].size()) != n) {
              throw DomainError("replay history has the wrong width");
            }
            out[i][j] = history[past][j];
          }
          break;
        }
        case AttackKind::kChannelDrop: {
          const double u = static_cast<double>((*rng)() >> 11) * 0x1.0p-53;
          if (u < adversary.probability) out[i][j].reset();
          break;
        }
      }
    }
  }
  return out;
}

TrustMatrix::TrustMatrix(const std::vector<std::vector<int>>& neighbors) {
  const int n = static_cast<int>(neighbors.size());
  weights_.assign(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    const double w = 1.0 / (neighbors[i].size() + 1);
    weights_[i][i] = w;
    for (int j : neighbors[i]) weights_[i][j] = w;
  }
}

void TrustMatrix::set_row(int i, std::vector<double> row) {
  if (row.size() != weights_.at(i).size()) throw DomainError("trust row has the wrong width");
  weights_[i] = std::move(row);
}

double TrustMatrix::RowSumError() const {
  double worst = 0.0;
  for (const auto& row : weights_) {
    double total = 0.0;
    for (double w : row) total += w;
    worst = std::max(worst, std::abs(total - 1.0));
  }
  return worst;
}

TrustMatrix UpdateTrust(const TrustMatrix& trust,
                        const std::vector<std::vector<double>>& residuals, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw DomainError(fmt::format("trust learning rate {} outside [0, 1]", eta));
  }
  const int n = trust.size();
  if (static_cast<int>(residuals.size()) != n) throw DomainError("residual matrix size mismatch");
  TrustMatrix out = trust;
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(residuals[i].size()) != n) {
      throw DomainError("residual matrix size mismatch");
    }
    // Shift by the row's smallest residual so the best-trusted entry keeps a
    // factor of 1; the shift cancels in the renormalization.
    double low = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (trust.weight(i, j) <= 0.0 || std::isnan(residuals[i][j])) continue;
      if (residuals[i][j] < 0.0) {
        throw DomainError(fmt::format("negative residual on edge ({}, {})", i, j));
      }
      low = std::min(low, residuals[i][j]);
    }
    if (!std::isfinite(low)) continue;
    std::vector<double> row(n, 0.0);
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
      const double w = trust.weight(i, j);
      if (w <= 0.0) continue;
      const double r = std::isnan(residuals[i][j]) ? low : residuals[i][j];
      row[j] = w * std::exp(-eta * (r - low));
      total += row[j];
    }
    for (double& w : row) w /= total;
    out.set_row(i, std::move(row));
  }
  return out;
}

void ResilienceConfig::Validate() const {
  if (trim < 0) throw DomainError("trimming parameter must be nonnegative");
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw DomainError(fmt::format("trust learning rate {} outside [0, 1]", eta));
  }
  if (!(residual_scale > 0.0)) throw DomainError("residual scale must be positive");
}

std::vector<std::vector<int>> CompleteGraph(int n) {
  std::vector<std::vector<int>> g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j != i) g[i].push_back(j);
    }
  }
  return g;
}

ConsensusStep ResilientConsensusStep(const std::vector<double>& values,
                                     const MessageBoard& board,
                                     const std::vector<std::vector<int>>& neighbors,
                                     const TrustMatrix& trust, const ResilienceConfig& config) {
  config.Validate();
  CheckBoard(board);
  const int n = static_cast<int>(values.size());
  if (static_cast<int>(board.size()) != n || static_cast<int>(neighbors.size()) != n ||
      trust.size() != n) {
    throw DomainError("consensus inputs disagree on the agent count");
  }
  ConsensusStep out;
  out.values.resize(n);
  out.residuals.assign(n, std::vector<double>(n, kNaN));
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(neighbors[i].size()) <= 2 * config.trim) {
      throw DomainError(fmt::format("agent {} has {} neighbors; trimming {} per side needs more",
                                    i, neighbors[i].size(), config.trim));
    }
    std::vector<std::pair<double, int>> received;
    for (int j : neighbors[i]) {
      if (board[i][j]) received.emplace_back(*board[i][j], j);
    }
    std::vector<int> members{i};
    if (static_cast<int>(received.size()) > 2 * config.trim) {
      std::sort(received.begin(), received.end());
      for (std::size_t k = config.trim; k + config.trim < received.size(); ++k) {
        members.push_back(received[k].second);
      }
    }
    std::sort(members.begin(), members.end());
    auto value_of = [&](int j) { return j == i ? values[i] : *board[i][j]; };

    double scale = 0.0;
    for (int j : members) scale = std::max(scale, trust.weight(i, j));
    double num = 0.0, den = 0.0;
    for (int j : members) {
      const double w = scale > 0.0 ? trust.weight(i, j) / scale : 1.0;
      num += w * value_of(j);
      den += w;
    }
    const double aggregate = num / den;
    out.values[i] = aggregate;
    out.residuals[i][i] = std::abs(values[i] - aggregate) / config.residual_scale;
    for (int j : neighbors[i]) {
      if (board[i][j]) {
        out.residuals[i][j] = std::abs(*board[i][j] - aggregate) / config.residual_scale;
      }
    }
  }
  return out;
}

std::vector<std::vector<double>> NaiveConsensus(const ConsensusScenario& scenario, long steps) {
  if (steps < 0) throw DomainError("step count must be nonnegative");
  const std::vector<std::vector<int>> neighbors = NeighborsOf(scenario);
  const int n = static_cast<int>(scenario.initial.size());
  std::vector<std::vector<double>> out{scenario.initial};
  for (long t = 0; t < steps; ++t) {
    const std::vector<double>& x = out.back();
    std::vector<double> next(n);
    for (int i = 0; i < n; ++i) {
      std::vector<int> members = neighbors[i];
      members.push_back(i);
      std::sort(members.begin(), members.end());
      double sum = 0.0;
      for (int j : members) sum += x[j];
      next[i] = sum / static_cast<double>(members.size());
    }
    out.push_back(std::move(next));
  }
  return out;
}

namespace {

struct ConsensusPath {
  std::vector<std::vector<double>> values;
  TrustMatrix trust;
};

ConsensusPath Simulate(const ConsensusScenario& scenario,
                       const std::vector<std::vector<int>>& neighbors,
                       const AdversaryModel& adversary, const ResilienceConfig& config,
                       long steps, std::uint64_t seed) {
  ConsensusPath path{{scenario.initial}, TrustMatrix(neighbors)};
  for (long t = 0; t < steps; ++t) {
    const std::vector<double>& x = path.values.back();
    const MessageBoard board =
        CorruptInformation(adversary, Broadcast(x, neighbors), t, seed, path.values);
    ConsensusStep step = ResilientConsensusStep(x, board, neighbors, path.trust, config);
    if (config.eta > 0.0) path.trust = UpdateTrust(path.trust, step.residuals, config.eta);
    path.values.push_back(std::move(step.values));
  }
  return path;
}

}  // namespace

AdversarialConsensusRun RunAdversarialConsensus(const ConsensusScenario& scenario,
                                                const AdversaryModel& adversary,
                                                const ResilienceConfig& config, long steps,
                                                std::uint64_t seed) {
  const int n = static_cast<int>(scenario.initial.size());
  if (n < 1) throw DomainError("consensus scenario needs an agent");
  if (steps < 1) throw DomainError("step count must be at least 1");
  config.Validate();
  adversary.Validate(n);
  const std::vector<std::vector<int>> neighbors = NeighborsOf(scenario);

  AdversarialConsensusRun run;
  ConsensusPath attacked = Simulate(scenario, neighbors, adversary, config, steps, seed);
  ConsensusPath nominal = Simulate(scenario, neighbors, AdversaryModel{}, config, steps, seed);
  run.values = std::move(attacked.values);
  run.nominal = std::move(nominal.values);
  run.trust = std::move(attacked.trust);

  std::vector<char> honest(n, 1);
  for (int i : adversary.compromised) honest[i] = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int i = 0; i < n; ++i) {
    if (!honest[i]) continue;
    lo = std::min(lo, scenario.initial[i]);
    hi = std::max(hi, scenario.initial[i]);
  }
  const double slack = 1e-12 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
  ResilienceMetrics& m = run.metrics;
  for (std::size_t t = 0; t < run.values.size(); ++t) {
    m.diameter.push_back(Diameter(run.values[t], honest));
    for (int i = 0; i < n; ++i) {
      if (!honest[i]) continue;
      m.max_honest_deviation =
          std::max(m.max_honest_deviation, std::abs(run.values[t][i] - run.nominal[t][i]));
      if (run.values[t][i] < lo - slack || run.values[t][i] > hi + slack) {
        m.honest_in_hull = false;
      }
    }
  }
  const long end = adversary.compromised.empty() ? -1 : adversary.end;
  m.recovery_time = Recovery(m.diameter, end, 1e-3 * m.diameter[0], m.diameter[0] == 0.0);
  return run;
}

AdversarialLearningRun RunAdversarialLearning(const StrategicGame& game,
                                              std::vector<LearnerSpec> learners,
                                              const AdversaryModel& adversary, long steps,
                                              std::uint64_t seed,
                                              const std::vector<int>& signal_schedule) {
  const int n = game.num_agents();
  adversary.Validate(n);
  if (adversary.kind == AttackKind::kConstantInjection) {
    for (int j : adversary.compromised) {
      const double v = adversary.value;
      if (v != std::floor(v) || v < 0 || v >= game.num_actions(j)) {
        throw DomainError(fmt::format("injected action {} is not an action of {}", v,
                                      game.agent_name(j)));
      }
    }
  }
  if (steps < 1) throw DomainError("horizon must be at least 1");
  for (int c : signal_schedule) game.CheckSignal(c);

  AdversarialLearningRun run;
  run.nominal = RunDynamics(game, learners, steps, seed, signal_schedule);

  std::vector<std::vector<double>> history;  // true actions per step
  std::vector<std::vector<int>> last(n, std::vector<int>(n, 0));
  long cached_t = -1;
  MessageBoard board;
  const ObservationFilter filter = [&](long t, int receiver, const ActionProfile& actual) {
    if (t != cached_t) {
      MessageBoard honest(n, std::vector<std::optional<double>>(n));
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (i != j) honest[i][j] = actual[j];
        }
      }
      board = CorruptInformation(adversary, honest, t - 1, seed, history);
      history.emplace_back(actual.begin(), actual.end());
      cached_t = t;
    }
    ActionProfile seen = actual;
    for (int j = 0; j < n; ++j) {
      if (j == receiver) continue;
      const std::optional<double>& report = board[receiver][j];
      if (!report) {
        seen[j] = last[receiver][j];
        continue;
      }
      int a = static_cast<int>(*report);
      if (adversary.kind == AttackKind::kSignFlip && adversary.Compromised(j) &&
          adversary.Active(t - 1)) {
        a = game.num_actions(j) - 1 - actual[j];
      }
      seen[j] = a;
      last[receiver][j] = a;
    }
    return seen;
  };

  DynamicsEngine engine(game, std::move(learners), seed);
  run.trace.seed = seed;
  run.trace.steps.reserve(steps);
  for (long t = 0; t < steps; ++t) {
    const int signal =
        signal_schedule.empty() ? 0 : signal_schedule[t % signal_schedule.size()];
    run.trace.steps.push_back(engine.Step(signal, nullptr,
                                          adversary.compromised.empty() ? nullptr : &filter));
  }

  for (long t = 0; t < steps; ++t) {
    double gap = 0.0;
    for (int i = 0; i < n; ++i) {
      if (adversary.Compromised(i)) continue;
      for (int a = 0; a < game.num_actions(i); ++a) {
        gap = std::max(gap, std::abs(run.trace.steps[t].policy[i][a] -
                                     run.nominal.steps[t].policy[i][a]));
      }
    }
    run.deviation.push_back(gap);
    run.max_honest_deviation = std::max(run.max_honest_deviation, gap);
  }
  if (!adversary.compromised.empty()) {
    // Step t (1-based) sits at index t - 1; the window is in 0-based time.
    for (long t = 0; t < steps; ++t) {
      if (t > adversary.end && run.deviation[t] < 1e-3) {
        run.recovery_time = t;
        break;
      }
    }
  }
  return run;
}

}  // namespace stgames
