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
#include <chrono>
#include <cmath>

#include <fmt/core.h>

#include "scenario_payload.h"

namespace stgames {

namespace {

std::vector<std::string> AgentNames(const StrategicGame& game) {
  std::vector<std::string> names;
  for (int i = 0; i < game.num_agents(); ++i) names.push_back(game.agent_name(i));
  return names;
}

std::vector<std::string> ActionColumns(const StrategicGame& game, const std::string& prefix) {
  std::vector<std::string> cols;
  for (int i = 0; i < game.num_agents(); ++i) {
    for (int a = 0; a < game.num_actions(i); ++a) {
      cols.push_back(fmt::format("{}[{}:{}]", prefix, game.agent_name(i), game.action_label(i, a)));
    }
  }
  return cols;
}

std::vector<std::string> AgentColumns(const StrategicGame& game, const std::string& prefix) {
  std::vector<std::string> cols;
  for (const auto& name : AgentNames(game)) cols.push_back(fmt::format("{}[{}]", prefix, name));
  return cols;
}

std::vector<std::string> Concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

void AddMixed(Summary& s, const std::string& key, const StrategicGame& game,
              const MixedProfile& mixed) {
  for (int i = 0; i < game.num_agents(); ++i) {
    for (int a = 0; a < game.num_actions(i); ++a) {
      s.Add(fmt::format("{}[{}:{}]", key, game.agent_name(i), game.action_label(i, a)),
            Real(mixed[i][a]));
    }
  }
}

Value Optional(const std::optional<double>& v) { return v ? Real(*v) : Value(); }
Value Optional(const std::optional<long>& v) { return v ? Int(*v) : Value(); }

std::string CoalitionNames(Coalition s, const std::vector<std::string>& agents) {
  std::string out = "{";
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (!Contains(s, static_cast<int>(i))) continue;
    if (out.size() > 1) out += ",";
    out += agents[i];
  }
  return out + "}";
}

// ---------------------------------------------------------------------------

void RunCoop(const CoopPayload& p, RunRecord& r) {
  const CoalitionGame& g = *p.game;
  const int n = g.num_agents();
  Summary& s = r.summary;
  s.Add("num_agents", Int(n));
  s.Add("is_superadditive", Flag(IsSuperadditive(g).holds));
  s.Add("cooperative_surplus", Real(CooperativeSurplus(g)));
  const Allocation shapley = Shapley(g);
  s.Add("shapley", shapley, p.agents);
  s.Add("shapley_in_core", Flag(InCore(g, shapley).in_core));
  const CoreCertificate core = CoreNonempty(g);
  s.Add("core_nonempty", Flag(core.nonempty));
  s.Add("core_min_total", Real(core.min_total));
  std::optional<Allocation> nucleolus;
  if (n <= kMaxNucleolusAgents) {
    nucleolus = Nucleolus(g);
    s.Add("nucleolus", *nucleolus, p.agents);
  } else {
    r.warnings.push_back(
        fmt::format("nucleolus skipped: {} agents exceeds the limit of {}", n, kMaxNucleolusAgents));
  }
  s.Add("is_convex", Flag(IsConvex(g).holds));

  Table alloc{"allocations", {"agent", "shapley", "nucleolus", "core_certificate"}, {}};
  for (int i = 0; i < n; ++i) {
    alloc.AddRow({Text(p.agents[i]), Real(shapley[i]),
                  nucleolus ? Real((*nucleolus)[i]) : Value(),
                  core.nonempty ? Real(core.certificate[i]) : Value()});
  }
  r.tables.push_back(std::move(alloc));

  if (n <= kMaxNucleolusAgents) {
    Table coalitions{"coalitions", {"coalition", "size", "value", "shapley_excess"}, {}};
    for (Coalition c = 1; c <= g.grand(); ++c) {
      coalitions.AddRow({Text(CoalitionNames(c, p.agents)), Int(CoalitionSize(c)),
                         Real(g.value(c)), Real(Excess(g, c, shapley))});
    }
    r.tables.push_back(std::move(coalitions));
  }

  if (p.dynamics) {
    const auto history = CoalitionDynamics(Singletons(n), g);
    Table moves{"coalition_dynamics", {"move", "structure"}, {}};
    for (std::size_t k = 0; k < history.size(); ++k) {
      std::string text;
      for (Coalition c : history[k]) text += (text.empty() ? "" : " ") + CoalitionNames(c, p.agents);
      moves.AddRow({Int(static_cast<long long>(k)), Text(text)});
    }
    s.Add("final_structure", moves.rows.back()[1]);
    r.tables.push_back(std::move(moves));
  }
}

void RunMatch(const MatchPayload& p, RunRecord& r) {
  const MatchingMarket& market = *p.market;
  const int n = market.size();
  const DeferredAcceptanceRun run = RunDeferredAcceptance(market, p.proposing);
  const Matching& mu = run.matching;
  Summary& s = r.summary;
  s.Add("n", Int(n));
  s.Add("proposing", Text(p.proposing == Side::kM ? "M" : "W"));
  s.Add("proposals", Int(run.proposals));
  s.Add("blocking_pairs", Int(static_cast<long long>(BlockingPairs(market, mu).size())));
  long m_total = 0, w_total = 0;
  Table table{"matching", {"m", "w", "m_rank", "w_rank"}, {}};
  for (int m = 0; m < n; ++m) {
    const int w = mu.partner_of_m[m];
    const int mr = market.rank(Side::kM, m, w), wr = market.rank(Side::kW, w, m);
    m_total += mr;
    w_total += wr;
    table.AddRow({Text(p.m[m]), Text(p.w[w]), Int(mr), Int(wr)});
  }
  s.Add("m_rank_total", Int(m_total));
  s.Add("w_rank_total", Int(w_total));
  r.tables.push_back(std::move(table));

  if (p.enumerate) {
    const std::vector<Matching> stable = EnumerateStable(market);
    const std::vector<int> da_w = PartnersOfW(mu);
    bool optimal = true;
    Table all{"stable_matchings", {"index", "m", "w"}, {}};
    for (std::size_t k = 0; k < stable.size(); ++k) {
      const std::vector<int> other_w = PartnersOfW(stable[k]);
      for (int a = 0; a < n; ++a) {
        if (p.proposing == Side::kM) {
          optimal = optimal && !market.Prefers(Side::kM, a, stable[k].partner_of_m[a], mu.partner_of_m[a]);
        } else {
          optimal = optimal && !market.Prefers(Side::kW, a, other_w[a], da_w[a]);
        }
        all.AddRow({Int(static_cast<long long>(k)), Text(p.m[a]),
                    Text(p.w[stable[k].partner_of_m[a]])});
      }
    }
    s.Add("num_stable", Int(static_cast<long long>(stable.size())));
    s.Add("proposer_optimal", Flag(optimal));
    r.tables.push_back(std::move(all));
  }
}

void RunNash(const NashPayload& p, RunRecord& r) {
  const StrategicGame& g = *p.game;
  Table eq{"equilibria", Concat({"signal", "profile"}, AgentColumns(g, "payoff")), {}};
  eq.columns.push_back("welfare");
  Table welfare{"welfare",
                {"signal", "status", "optimal_welfare", "optimal_profile",
                 "worst_equilibrium_welfare", "worst_equilibrium", "ratio"},
                {}};
  for (int c = 0; c < g.num_signals(); ++c) {
    const std::string& label = g.signal_label(c);
    const auto equilibria = EnumeratePureNash(g, c);
    for (const ActionProfile& e : equilibria) {
      std::vector<Value> row{Text(label), Text(g.ProfileString(e))};
      double total = 0.0;
      for (double x : Payoff(g, e, c)) {
        row.push_back(Real(x));
        total += x;
      }
      row.push_back(Real(total));
      eq.AddRow(std::move(row));
    }
    const WelfareReport w = WelfareAndPoa(g, c);
    const bool has_eq = w.status != PoaStatus::kNoPureEquilibrium;
    const bool defined = w.status == PoaStatus::kDefined;
    welfare.AddRow({Text(label), Text(ToString(w.status)), Real(w.optimal_welfare),
                    Text(g.ProfileString(w.optimal_profile)),
                    has_eq ? Real(w.worst_equilibrium_welfare) : Value(),
                    has_eq ? Text(g.ProfileString(w.worst_equilibrium)) : Value(),
                    defined ? Real(w.ratio) : Value()});
    r.summary.Add(fmt::format("num_equilibria[{}]", label),
                  Int(static_cast<long long>(equilibria.size())));
    r.summary.Add(fmt::format("poa_status[{}]", label), Text(ToString(w.status)));
    r.summary.Add(fmt::format("poa[{}]", label), defined ? Real(w.ratio) : Value());
  }
  r.tables.push_back(std::move(eq));
  r.tables.push_back(std::move(welfare));
}

void RunLearn(const LearnPayload& p, std::uint64_t seed, RunRecord& r) {
  const StrategicGame& g = *p.game;
  const Trace trace = RunDynamics(g, p.learners, p.horizon, seed, p.signals, p.schedule);
  const Diagnostics d = Diagnose(trace, g, p.trace_stride);
  Table t{"trace",
          Concat(Concat(Concat({"t", "signal"}, AgentColumns(g, "action")), AgentColumns(g, "payoff")),
                 ActionColumns(g, "policy")),
          {}};
  t.columns.push_back("equilibrium_gap");
  std::size_t gap = 0;
  for (const StepRecord& step : trace.steps) {
    if (step.t % p.trace_stride != 0 && step.t != p.horizon) continue;
    std::vector<Value> row{Int(step.t), Text(g.signal_label(step.signal))};
    for (int i = 0; i < g.num_agents(); ++i) row.push_back(Text(g.action_label(i, step.actions[i])));
    for (double x : step.payoffs) row.push_back(Real(x));
    for (const auto& pi : step.policy) {
      for (double x : pi) row.push_back(Real(x));
    }
    row.push_back(Real(d.equilibrium_gap[gap++]));
    t.AddRow(std::move(row));
  }
  Table joint{"joint_frequency", {"profile", "frequency"}, {}};
  for (const auto& [profile, f] : d.joint_frequency) {
    joint.AddRow({Text(g.ProfileString(profile)), Real(f)});
  }

  const StepRecord& last = trace.steps.back();
  Summary& s = r.summary;
  s.Add("steps", Int(p.horizon));
  s.Add("regret", d.regret, AgentNames(g));
  AddMixed(s, "frequency", g, d.marginal_frequency);
  s.Add("final_equilibrium_gap", Real(d.equilibrium_gap.back()));
  s.Add("final_profile", Text(g.ProfileString(last.actions)));
  s.Add("final_profile_is_nash", Flag(IsNash(g, last.actions, last.signal).is_nash));
  r.tables.push_back(std::move(t));
  r.tables.push_back(std::move(joint));
}

void RunTwoTimescaleKind(const TwoTimescalePayload& p, std::uint64_t seed, RunRecord& r) {
  const StrategicGame& g = *p.game;
  TwoTimescaleOptions options;
  options.outer_steps = p.outer_steps;
  options.inner_steps = p.inner_steps;
  options.seed = seed;
  options.schedule = p.schedule;
  options.admissible = p.admissible ? &*p.admissible : nullptr;
  const TwoTimescaleTrace trace = RunTwoTimescale(
      g, p.learners, Coordinator(p.coordinator, p.candidates, p.controlled), options);
  Table epochs{"epochs", Concat({"epoch", "signal", "mean_welfare"}, AgentColumns(g, "mean_payoff")),
               {}};
  std::size_t best = 0;
  for (std::size_t k = 0; k < trace.epochs.size(); ++k) {
    const EpochDigest& e = trace.epochs[k];
    std::vector<Value> row{Int(static_cast<long long>(k + 1)), Text(g.signal_label(e.signal)),
                           Real(e.mean_welfare)};
    for (double x : e.mean_payoff) row.push_back(Real(x));
    epochs.AddRow(std::move(row));
    if (e.mean_welfare > trace.epochs[best].mean_welfare) best = k;
  }
  const EpochDigest& last = trace.epochs.back();
  Summary& s = r.summary;
  s.Add("epochs", Int(static_cast<long long>(trace.epochs.size())));
  s.Add("final_signal", Text(g.signal_label(last.signal)));
  s.Add("final_mean_welfare", Real(last.mean_welfare));
  s.Add("best_signal", Text(g.signal_label(trace.epochs[best].signal)));
  s.Add("best_mean_welfare", Real(trace.epochs[best].mean_welfare));
  AddMixed(s, "final_frequency", g, last.final_frequency);
  r.tables.push_back(std::move(epochs));
}

void RunStackelberg(const StackelbergPayload& p, RunRecord& r) {
  const StrategicGame& g = *p.game;
  const LeaderObjective objective = [&](int signal, const ActionProfile& x) {
    if (p.welfare) {
      double total = 0.0;
      for (double v : Payoff(g, x, signal)) total += v;
      return total;
    }
    const auto it = p.leader.find({signal, g.ProfileIndex(x)});
    return it == p.leader.end() ? 0.0 : it->second;
  };
  Table table{"candidates", {"selection", "signal", "defined", "num_equilibria", "value", "used"}, {}};
  for (FollowerSelection mode : p.modes) {
    const std::string name = mode == FollowerSelection::kOptimistic ? "optimistic" : "pessimistic";
    const StackelbergResult res = StackelbergSolve(objective, p.candidates, g, mode);
    r.summary.Add(name + ".solved", Flag(res.solved));
    r.summary.Add(name + ".signal", res.solved ? Text(g.signal_label(res.signal)) : Value());
    r.summary.Add(name + ".value", res.solved ? Real(res.value) : Value());
    r.summary.Add(name + ".equilibrium",
                  res.solved ? Text(g.ProfileString(res.equilibrium)) : Value());
    for (const StackelbergCandidate& c : res.candidates) {
      table.AddRow({Text(name), Text(g.signal_label(c.signal)), Flag(c.defined),
                    Int(static_cast<long long>(c.equilibria.size())),
                    c.defined ? Real(c.value) : Value(),
                    c.defined ? Text(g.ProfileString(c.used)) : Value()});
    }
    for (const auto& w : res.warnings) r.warnings.push_back(fmt::format("{}: {}", name, w));
  }
  r.tables.push_back(std::move(table));
}

std::string EdgeLabel(const CongestionNetwork& net, int e) {
  const Edge& edge = net.edges()[e];
  return fmt::format("{}->{}", edge.tail, edge.head);
}

double MaxEdgeGap(const FlowAssignment& a, const FlowAssignment& b) {
  double gap = 0.0;
  for (std::size_t e = 0; e < a.edge_flow.size(); ++e) {
    gap = std::max(gap, std::abs(a.edge_flow[e] - b.edge_flow[e]));
  }
  return gap;
}

void AnalyzeNetwork(const CongestionNetwork& net, const std::string& name, bool tolls,
                    const std::string& prefix, RunRecord& r, Table& paths, Table& edges) {
  const FlowAssignment eq = WardropEquilibrium(net);
  const FlowAssignment so = SystemOptimum(net);
  Summary& s = r.summary;
  s.Add(prefix + "equilibrium_per_unit_cost", Real(eq.per_unit_cost));
  s.Add(prefix + "equilibrium_total_cost", Real(eq.total_cost));
  s.Add(prefix + "optimum_total_cost", Real(so.total_cost));
  s.Add(prefix + "wardrop_gap", Real(WardropGap(eq)));
  const PoaResult poa = PriceOfAnarchy(net);
  s.Add(prefix + "poa", Optional(poa.ratio));
  std::vector<double> toll;
  std::optional<FlowAssignment> tolled;
  if (tolls) {
    toll = MarginalCostTolls(net);
    tolled = WardropEquilibrium(net, toll);
    s.Add(prefix + "tolled_per_unit_cost", Real(tolled->per_unit_cost));
    s.Add(prefix + "tolled_max_edge_gap", Real(MaxEdgeGap(*tolled, so)));
  }
  for (int k = 0; k < net.num_paths(); ++k) {
    paths.AddRow({Text(name), Text(net.PathLabel(k)), Real(eq.path_flow[k]), Real(so.path_flow[k]),
                  Real(eq.path_latency[k]), tolled ? Real(tolled->path_flow[k]) : Value()});
  }
  for (int e = 0; e < static_cast<int>(net.edges().size()); ++e) {
    edges.AddRow({Text(name), Int(e), Text(EdgeLabel(net, e)), Real(eq.edge_flow[e]),
                  Real(so.edge_flow[e]), tolls ? Real(toll[e]) : Value(),
                  tolled ? Real(tolled->edge_flow[e]) : Value()});
  }
}

void RunWardrop(const WardropPayload& p, RunRecord& r) {
  Table paths{"paths",
              {"network", "path", "equilibrium_flow", "optimum_flow", "equilibrium_latency",
               "tolled_flow"},
              {}};
  Table edges{"edges",
              {"network", "index", "edge", "equilibrium_flow", "optimum_flow", "toll",
               "tolled_flow"},
              {}};
  AnalyzeNetwork(*p.network, "base", p.marginal_tolls, "", r, paths, edges);
  if (p.shortcut) {
    const BraessResult braess = BraessDelta(*p.network, *p.shortcut);
    r.summary.Add("before", Real(braess.before));
    r.summary.Add("after", Real(braess.after));
    r.summary.Add("delta", Real(braess.delta));
    AnalyzeNetwork(p.network->WithEdge(*p.shortcut), "augmented", p.marginal_tolls, "augmented.",
                   r, paths, edges);
  }
  r.tables.push_back(std::move(paths));
  r.tables.push_back(std::move(edges));
}

void RunIncentive(const IncentivePayload& p, RunRecord& r) {
  const StrategicGame& g = *p.game;
  const PayoffRecord base = BaselineRecord(g, p.baseline);
  const IncentiveDesign d = DesignIncentive(g, p.target, base, p.budget, p.margin);
  Summary& s = r.summary;
  s.Add("status", Text(d.feasible ? "feasible" : "infeasible"));
  s.Add("per_period", d.feasible ? Real(d.per_period) : Value());
  s.Add("spent", d.feasible ? Real(d.spent) : Value());
  s.Add("transfer", d.transfer, AgentNames(g));
  s.Add("strict_agent", d.strict_agent ? Text(g.agent_name(*d.strict_agent)) : Value());
  if (d.feasible) {
    const Trajectory stay(p.baseline.size(), p.target);
    const BudgetReport budget = BudgetCheck(g, d.schedule, {p.target}, p.budget);
    s.Add("target_is_nash", Flag(IsNash(ModifiedPayoff(g, d.schedule), p.target.profile,
                                        p.target.signal).is_nash));
    s.Add("pareto_improving",
          Flag(IsParetoImproving(base, InducedRecord(g, d.schedule, stay), p.budget.discount)));
    s.Add("budget_feasible", Flag(budget.feasible));
  }
  Table t{"transfers", {"agent", "transfer", "target_payoff", "induced_payoff"}, {}};
  const std::vector<double> own = Payoff(g, p.target.profile, p.target.signal);
  for (int i = 0; i < g.num_agents(); ++i) {
    if (d.feasible) {
      t.AddRow({Text(g.agent_name(i)), Real(d.transfer[i]), Real(own[i]),
                Real(own[i] + d.transfer[i])});
    } else {
      t.AddRow({Text(g.agent_name(i)), Value(), Real(own[i]), Value()});
    }
  }
  r.tables.push_back(std::move(t));
}

void RunResilience(const ResiliencePayload& p, std::uint64_t seed, RunRecord& r) {
  Summary& s = r.summary;
  if (p.learning) {
    const StrategicGame& g = *p.game;
    const AdversarialLearningRun run =
        RunAdversarialLearning(g, p.learners, p.adversary, p.steps, seed, p.signals);
    s.Add("steps", Int(p.steps));
    s.Add("max_honest_deviation", Real(run.max_honest_deviation));
    s.Add("final_deviation", Real(run.deviation.back()));
    s.Add("recovery_time", Optional(run.recovery_time));
    Table t{"deviation", Concat({"t", "deviation"}, AgentColumns(g, "action")), {}};
    for (std::size_t k = 0; k < run.trace.steps.size(); ++k) {
      const StepRecord& step = run.trace.steps[k];
      std::vector<Value> row{Int(step.t), Real(run.deviation[k])};
      for (int i = 0; i < g.num_agents(); ++i) row.push_back(Text(g.action_label(i, step.actions[i])));
      t.AddRow(std::move(row));
    }
    r.tables.push_back(std::move(t));
    return;
  }
  const AdversarialConsensusRun run =
      RunAdversarialConsensus(p.consensus, p.adversary, p.defense, p.steps, seed);
  const int n = static_cast<int>(p.consensus.initial.size());
  s.Add("agents", Int(n));
  s.Add("steps", Int(p.steps));
  s.Add("honest_in_hull", Flag(run.metrics.honest_in_hull));
  s.Add("max_honest_deviation", Real(run.metrics.max_honest_deviation));
  s.Add("initial_diameter", Real(run.metrics.diameter.front()));
  s.Add("final_diameter", Real(run.metrics.diameter.back()));
  s.Add("recovery_time", Optional(run.metrics.recovery_time));
  s.Add("trust_row_sum_error", Real(run.trust.RowSumError()));
  Table t{"trace", {"t"}, {}};
  for (int i = 0; i < n; ++i) t.columns.push_back(fmt::format("x[{}]", i));
  t.columns.push_back("honest_diameter");
  for (std::size_t k = 0; k < run.values.size(); ++k) {
    std::vector<Value> row{Int(static_cast<long long>(k))};
    for (double x : run.values[k]) row.push_back(Real(x));
    row.push_back(Real(run.metrics.diameter[k]));
    t.AddRow(std::move(row));
  }
  Table trust{"trust", {"receiver", "sender", "weight"}, {}};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (run.trust.weight(i, j) != 0.0 || i == j) {
        trust.AddRow({Int(i), Int(j), Real(run.trust.weight(i, j))});
      }
    }
  }
  r.tables.push_back(std::move(t));
  r.tables.push_back(std::move(trust));
}

}  // namespace

RunRecord RunScenario(const ScenarioConfig& config) {
  if (!config.payload) throw ContractError("scenario config has no payload");
  const auto start = std::chrono::steady_clock::now();
  RunRecord r;
  r.kind = ToString(config.kind);
  r.config = config.canonical;
  r.digest = config.Digest();
  r.version = kToolVersion;
  r.warnings = config.warnings;
  const std::uint64_t seed = config.seed.value_or(0);
  try {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, CoopPayload>) RunCoop(p, r);
          if constexpr (std::is_same_v<T, MatchPayload>) RunMatch(p, r);
          if constexpr (std::is_same_v<T, NashPayload>) RunNash(p, r);
          if constexpr (std::is_same_v<T, LearnPayload>) RunLearn(p, seed, r);
          if constexpr (std::is_same_v<T, TwoTimescalePayload>) RunTwoTimescaleKind(p, seed, r);
          if constexpr (std::is_same_v<T, StackelbergPayload>) RunStackelberg(p, r);
          if constexpr (std::is_same_v<T, WardropPayload>) RunWardrop(p, r);
          if constexpr (std::is_same_v<T, IncentivePayload>) RunIncentive(p, r);
          if constexpr (std::is_same_v<T, ResiliencePayload>) RunResilience(p, seed, r);
        },
        config.payload->data);
  } catch (const CapacityError& e) {
    throw CapacityError(fmt::format("{} scenario: {}", r.kind, e.what()));
  } catch (const Error& e) {
    throw ComputationError(fmt::format("{} scenario: {}", r.kind, e.what()));
  }
  r.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace stgames
