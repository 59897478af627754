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

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <fmt/core.h>

#include "scenario_payload.h"
#include "stgames/templates.h"

namespace stgames {

namespace {

constexpr ScenarioKind kKinds[] = {
    ScenarioKind::kCoop,        ScenarioKind::kMatch,   ScenarioKind::kNash,
    ScenarioKind::kLearn,       ScenarioKind::kTwoTimescale, ScenarioKind::kStackelberg,
    ScenarioKind::kWardrop,     ScenarioKind::kIncentive,    ScenarioKind::kResilience,
};

}  // namespace

const char* ToString(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kCoop: return "coop";
    case ScenarioKind::kMatch: return "match";
    case ScenarioKind::kNash: return "nash";
    case ScenarioKind::kLearn: return "learn";
    case ScenarioKind::kTwoTimescale: return "two-timescale";
    case ScenarioKind::kStackelberg: return "stackelberg";
    case ScenarioKind::kWardrop: return "wardrop";
    case ScenarioKind::kIncentive: return "incentive";
    case ScenarioKind::kResilience: return "resilience";
  }
  return "?";
}

const char* VerbName(ScenarioKind kind) {
  return kind == ScenarioKind::kTwoTimescale ? "ttscale" : ToString(kind);
}

std::optional<ScenarioKind> ParseScenarioKind(const std::string& name) {
  for (ScenarioKind k : kKinds) {
    if (name == ToString(k)) return k;
  }
  return std::nullopt;
}

std::optional<ScenarioKind> ParseVerb(const std::string& verb) {
  for (ScenarioKind k : kKinds) {
    if (verb == VerbName(k)) return k;
  }
  return std::nullopt;
}

const std::vector<ScenarioKind>& AllScenarioKinds() {
  static const std::vector<ScenarioKind> kinds(std::begin(kKinds), std::end(kKinds));
  return kinds;
}

bool IsStochastic(ScenarioKind kind) {
  return kind == ScenarioKind::kLearn || kind == ScenarioKind::kTwoTimescale ||
         kind == ScenarioKind::kResilience;
}

namespace {

std::string Join(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += (out.empty() ? "" : "\n") + l;
  return out;
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> problems)
    : Error(Join(problems)), problems_(std::move(problems)) {}

namespace {

std::string LineOf(const YAML::Node& n) {
  if (!n.IsDefined()) return "";
  const YAML::Mark m = n.Mark();
  return m.line >= 0 ? fmt::format(" (line {})", m.line + 1) : "";
}

std::string Index(const std::string& path, std::size_t i) {
  return fmt::format("{}[{}]", path, i);
}

class Context {
 public:
  void Fail(const std::string& path, const YAML::Node& at, const std::string& message) {
    problems_.push_back(
        fmt::format("{}: {}{}", path.empty() ? "<document>" : path, message, LineOf(at)));
  }
  std::size_t mark() const { return problems_.size(); }
  bool Clean(std::size_t since) const { return problems_.size() == since; }
  void Check() const {
    if (!problems_.empty()) throw ScenarioError(problems_);
  }

  std::vector<std::string> warnings;

 private:
  std::vector<std::string> problems_;
};

// Capacity violations abort parsing with the key path attached.
[[noreturn]] void Capacity(const std::string& path, const CapacityError& e) {
  throw CapacityError(fmt::format("{}: {}", path, e.what()));
}

class MapReader {
 public:
  MapReader(Context& ctx, const YAML::Node& node, std::string path)
      : ctx_(ctx), node_(node), path_(std::move(path)), ok_(node.IsMap()) {
    if (!ok_) ctx_.Fail(path_, node_, "expected a mapping");
  }

  bool ok() const { return ok_; }
  const YAML::Node& node() const { return node_; }
  std::string Path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  std::optional<YAML::Node> Get(const std::string& key) {
    used_.insert(key);
    if (!ok_) return std::nullopt;
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (it->first.IsScalar() && it->first.Scalar() == key) return YAML::Node(it->second);
    }
    return std::nullopt;
  }

  std::optional<YAML::Node> Required(const std::string& key) {
    auto n = Get(key);
    if (!n && ok_) ctx_.Fail(Path(key), node_, "missing required key");
    return n;
  }

  // Marks keys as known without reading them (used on early exits).
  void Touch(std::initializer_list<const char*> keys) {
    for (const char* k : keys) used_.insert(k);
  }

  // Reports keys that were never requested, and duplicates.
  void Done() {
    if (!ok_) return;
    std::set<std::string> seen;
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!it->first.IsScalar()) {
        ctx_.Fail(path_, it->first, "keys must be scalars");
        continue;
      }
      const std::string key = it->first.Scalar();
      if (!seen.insert(key).second) {
        ctx_.Fail(Path(key), it->first, "duplicate key");
      } else if (!used_.count(key)) {
        ctx_.Fail(Path(key), it->first, "unknown key");
      }
    }
  }

 private:
  Context& ctx_;
  YAML::Node node_;
  std::string path_;
  bool ok_;
  std::set<std::string> used_;
};

bool Quoted(const YAML::Node& n) { return n.Tag() == "!"; }

std::optional<long long> ParseInteger(const std::string& s) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> ParseDouble(const std::string& s) {
  double v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool IsNullScalar(const std::string& s) { return s.empty() || s == "~" || s == "null"; }

double Real(Context& ctx, const YAML::Node& n, const std::string& path) {
  if (n.IsScalar() && !Quoted(n)) {
    if (auto v = ParseDouble(n.Scalar())) return *v;
  }
  ctx.Fail(path, n, "expected a finite number");
  return 0.0;
}

long long Integer(Context& ctx, const YAML::Node& n, const std::string& path) {
  if (n.IsScalar() && !Quoted(n)) {
    if (auto v = ParseInteger(n.Scalar())) return *v;
  }
  ctx.Fail(path, n, "expected an integer");
  return 0;
}

std::uint64_t Unsigned(Context& ctx, const YAML::Node& n, const std::string& path) {
  if (n.IsScalar() && !Quoted(n)) {
    const std::string& s = n.Scalar();
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && p == s.data() + s.size()) return v;
  }
  ctx.Fail(path, n, "expected an unsigned 64-bit integer");
  return 0;
}

bool Bool(Context& ctx, const YAML::Node& n, const std::string& path) {
  if (n.IsScalar() && !Quoted(n)) {
    if (n.Scalar() == "true") return true;
    if (n.Scalar() == "false") return false;
  }
  ctx.Fail(path, n, "expected true or false");
  return false;
}

std::string String(Context& ctx, const YAML::Node& n, const std::string& path) {
  if (n.IsScalar() && !(IsNullScalar(n.Scalar()) && !Quoted(n))) return n.Scalar();
  ctx.Fail(path, n, "expected a string");
  return {};
}

template <class F>
auto List(Context& ctx, const YAML::Node& n, const std::string& path, F item)
    -> std::vector<decltype(item(n, path))> {
  std::vector<decltype(item(n, path))> out;
  if (!n.IsSequence()) {
    ctx.Fail(path, n, "expected a list");
    return out;
  }
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(item(n[i], Index(path, i)));
  return out;
}

std::vector<double> Reals(Context& ctx, const YAML::Node& n, const std::string& path) {
  return List(ctx, n, path, [&](const YAML::Node& x, const std::string& p) {
    return Real(ctx, x, p);
  });
}

std::vector<std::string> Strings(Context& ctx, const YAML::Node& n, const std::string& path) {
  return List(ctx, n, path, [&](const YAML::Node& x, const std::string& p) {
    return String(ctx, x, p);
  });
}

// Index of `n` among `choices`, or -1 after recording an error.
int Choice(Context& ctx, const YAML::Node& n, const std::string& path,
           const std::vector<std::string>& choices) {
  const std::string s = String(ctx, n, path);
  for (std::size_t i = 0; i < choices.size(); ++i) {
    if (s == choices[i]) return static_cast<int>(i);
  }
  if (!s.empty()) {
    std::string list;
    for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
    ctx.Fail(path, n, fmt::format("unknown value '{}' (expected one of: {})", s, list));
  }
  return -1;
}

long PositiveCount(Context& ctx, const YAML::Node& n, const std::string& path,
                   const std::string& what) {
  const long long v = Integer(ctx, n, path);
  if (v < 1 && n.IsScalar() && ParseInteger(n.Scalar())) {
    ctx.Fail(path, n, fmt::format("{} must be at least 1", what));
  }
  return static_cast<long>(v);
}

void CheckUnique(Context& ctx, const std::vector<std::string>& names, const YAML::Node& n,
                 const std::string& path) {
  std::set<std::string> seen;
  for (const auto& s : names) {
    if (!seen.insert(s).second) ctx.Fail(path, n, fmt::format("duplicate name '{}'", s));
  }
}

nlohmann::json ToJson(const YAML::Node& n) {
  if (n.IsMap()) {
    nlohmann::json obj = nlohmann::json::object();
    for (auto it = n.begin(); it != n.end(); ++it) obj[it->first.Scalar()] = ToJson(it->second);
    return obj;
  }
  if (n.IsSequence()) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < n.size(); ++i) arr.push_back(ToJson(n[i]));
    return arr;
  }
  if (!n.IsScalar()) return nullptr;
  const std::string& s = n.Scalar();
  if (Quoted(n)) return s;
  if (IsNullScalar(s)) return nullptr;
  if (s == "true") return true;
  if (s == "false") return false;
  if (auto i = ParseInteger(s)) return *i;
  std::uint64_t u = 0;
  if (const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), u);
      ec == std::errc() && p == s.data() + s.size()) {
    return u;
  }
  if (auto d = ParseDouble(s)) return *d;
  return s;
}

// ---------------------------------------------------------------------------
// Shared sections.

std::optional<CongestionNetwork> ReadNetwork(Context& ctx, const YAML::Node& n,
                                             const std::string& path);

Edge ReadEdge(Context& ctx, const YAML::Node& n, const std::string& path) {
  MapReader r(ctx, n, path);
  Edge e;
  if (auto x = r.Required("from")) e.tail = String(ctx, *x, r.Path("from"));
  if (auto x = r.Required("to")) e.head = String(ctx, *x, r.Path("to"));
  if (auto x = r.Get("a")) e.a = Real(ctx, *x, r.Path("a"));
  if (auto x = r.Get("b")) e.b = Real(ctx, *x, r.Path("b"));
  r.Done();
  return e;
}

std::optional<CongestionNetwork> ReadNetwork(Context& ctx, const YAML::Node& n,
                                             const std::string& path) {
  const std::size_t mark = ctx.mark();
  MapReader r(ctx, n, path);
  std::string origin, destination;
  double demand = 1.0;
  std::vector<Edge> edges;
  if (auto x = r.Required("origin")) origin = String(ctx, *x, r.Path("origin"));
  if (auto x = r.Required("destination")) destination = String(ctx, *x, r.Path("destination"));
  if (auto x = r.Get("demand")) demand = Real(ctx, *x, r.Path("demand"));
  if (auto x = r.Required("edges")) {
    edges = List(ctx, *x, r.Path("edges"), [&](const YAML::Node& e, const std::string& p) {
      return ReadEdge(ctx, e, p);
    });
  }
  r.Done();
  if (!ctx.Clean(mark)) return std::nullopt;
  try {
    return CongestionNetwork(std::move(edges), origin, destination, demand);
  } catch (const CapacityError& e) {
    Capacity(path, e);
  } catch (const DomainError& e) {
    ctx.Fail(path, n, e.what());
  }
  return std::nullopt;
}

std::optional<StrategicGame> ReadAtomicRouting(Context& ctx, const YAML::Node& n,
                                               const std::string& path) {
  const std::size_t mark = ctx.mark();
  MapReader r(ctx, n, path);
  std::optional<CongestionNetwork> network;
  long agents = 1;
  std::vector<TollSignal> signals;
  if (auto x = r.Required("network")) network = ReadNetwork(ctx, *x, r.Path("network"));
  if (auto x = r.Required("agents")) agents = PositiveCount(ctx, *x, r.Path("agents"), "agents");
  if (auto x = r.Get("toll_signals")) {
    signals = List(ctx, *x, r.Path("toll_signals"), [&](const YAML::Node& s, const std::string& p) {
      MapReader t(ctx, s, p);
      TollSignal sig;
      if (auto y = t.Required("label")) sig.label = String(ctx, *y, t.Path("label"));
      if (auto y = t.Required("tolls")) sig.tolls = Reals(ctx, *y, t.Path("tolls"));
      t.Done();
      return sig;
    });
  }
  r.Done();
  if (!ctx.Clean(mark) || !network) return std::nullopt;
  try {
    return AtomicRoutingGame(*network, static_cast<int>(agents), signals);
  } catch (const CapacityError& e) {
    Capacity(path, e);
  } catch (const DomainError& e) {
    ctx.Fail(path, n, e.what());
  }
  return std::nullopt;
}

std::optional<StrategicGame> ReadGame(Context& ctx, const YAML::Node& n, const std::string& path) {
  const std::size_t mark = ctx.mark();
  MapReader r(ctx, n, path);
  if (!r.ok()) return std::nullopt;
  if (auto x = r.Get("atomic_routing")) {
    auto game = ReadAtomicRouting(ctx, *x, r.Path("atomic_routing"));
    r.Done();
    return game;
  }
  std::vector<std::string> agents, signals{"none"};
  std::vector<std::vector<std::string>> actions;
  if (auto x = r.Required("agents")) {
    agents = Strings(ctx, *x, r.Path("agents"));
    CheckUnique(ctx, agents, *x, r.Path("agents"));
  }
  if (auto x = r.Required("actions")) {
    actions = List(ctx, *x, r.Path("actions"), [&](const YAML::Node& a, const std::string& p) {
      auto labels = Strings(ctx, a, p);
      CheckUnique(ctx, labels, a, p);
      return labels;
    });
  }
  if (auto x = r.Get("signals")) {
    signals = Strings(ctx, *x, r.Path("signals"));
    CheckUnique(ctx, signals, *x, r.Path("signals"));
  }
  auto payoffs = r.Required("payoffs");
  r.Done();
  if (!ctx.Clean(mark)) return std::nullopt;

  std::optional<StrategicGame> game;
  try {
    game.emplace(agents, actions, signals);
  } catch (const CapacityError& e) {
    Capacity(path, e);
  } catch (const DomainError& e) {
    ctx.Fail(path, n, e.what());
    return std::nullopt;
  }
  if (!payoffs) return std::nullopt;
  const std::string ppath = r.Path("payoffs");
  if (!payoffs->IsSequence()) {
    ctx.Fail(ppath, *payoffs, "expected a list");
    return std::nullopt;
  }
  std::vector<char> filled(game->num_signals() * game->num_profiles(), 0);
  for (std::size_t k = 0; k < payoffs->size(); ++k) {
    const YAML::Node entry = (*payoffs)[k];
    const std::string epath = Index(ppath, k);
    const std::size_t before = ctx.mark();
    MapReader e(ctx, entry, epath);
    std::vector<std::string> labels;
    std::vector<double> values;
    int signal = 0;
    if (auto x = e.Required("profile")) labels = Strings(ctx, *x, e.Path("profile"));
    if (auto x = e.Required("values")) values = Reals(ctx, *x, e.Path("values"));
    if (auto x = e.Get("signal")) {
      const std::string label = String(ctx, *x, e.Path("signal"));
      const auto it = std::find(signals.begin(), signals.end(), label);
      if (it == signals.end()) {
        if (!label.empty()) ctx.Fail(e.Path("signal"), *x, fmt::format("unknown signal '{}'", label));
      } else {
        signal = static_cast<int>(it - signals.begin());
      }
    } else if (signals.size() > 1 && e.ok()) {
      ctx.Fail(e.Path("signal"), entry, "missing required key (the game has several signals)");
    }
    e.Done();
    if (!ctx.Clean(before)) continue;
    ActionProfile profile;
    try {
      profile = game->ParseProfile(labels);
    } catch (const DomainError& err) {
      ctx.Fail(e.Path("profile"), entry, err.what());
      continue;
    }
    if (values.size() != agents.size()) {
      ctx.Fail(e.Path("values"), entry,
               fmt::format("expected {} values, found {}", agents.size(), values.size()));
      continue;
    }
    const long idx = signal * game->num_profiles() + game->ProfileIndex(profile);
    if (filled[idx]) {
      ctx.Fail(epath, entry,
               fmt::format("duplicate payoffs for profile {} under signal {}",
                           game->ProfileString(profile), signals[signal]));
      continue;
    }
    filled[idx] = 1;
    game->SetPayoffs(signal, profile, values);
  }
  if (!ctx.Clean(mark)) return std::nullopt;
  const long missing = std::count(filled.begin(), filled.end(), 0);
  if (missing > 0) {
    const long first = std::find(filled.begin(), filled.end(), 0) - filled.begin();
    ctx.Fail(ppath, *payoffs,
             fmt::format("{} profile(s) have no payoffs; first is {} under signal {}", missing,
                         game->ProfileString(game->ProfileAt(first % game->num_profiles())),
                         signals[first / game->num_profiles()]));
    return std::nullopt;
  }
  return game;
}

RateSchedule ReadRate(Context& ctx, const YAML::Node& n, const std::string& path) {
  if (n.IsScalar()) return RateSchedule::Constant(Real(ctx, n, path));
  MapReader r(ctx, n, path);
  RateSchedule rate;
  if (r.ok() && r.node().size() != 1) {
    ctx.Fail(path, n, "expected exactly one of constant or harmonic");
  }
  if (auto x = r.Get("constant")) rate = RateSchedule::Constant(Real(ctx, *x, r.Path("constant")));
  if (auto x = r.Get("harmonic")) rate = RateSchedule::Harmonic(Real(ctx, *x, r.Path("harmonic")));
  r.Done();
  return rate;
}

LearnerSpec ReadLearner(Context& ctx, const YAML::Node& n, const std::string& path) {
  MapReader r(ctx, n, path);
  LearnerSpec spec;
  if (auto x = r.Required("kind")) {
    const std::string name = String(ctx, *x, r.Path("kind"));
    if (auto kind = ParseLearnerKind(name)) {
      spec.kind = *kind;
    } else if (!name.empty()) {
      ctx.Fail(r.Path("kind"), *x, fmt::format("unknown learner kind '{}'", name));
    }
  }
  if (auto x = r.Get("payoff_rate")) spec.payoff_rate = ReadRate(ctx, *x, r.Path("payoff_rate"));
  if (auto x = r.Get("policy_rate")) spec.policy_rate = ReadRate(ctx, *x, r.Path("policy_rate"));
  if (auto x = r.Get("temperature")) spec.temperature = Real(ctx, *x, r.Path("temperature"));
  if (auto x = r.Get("initial_policy")) {
    spec.initial_policy = Reals(ctx, *x, r.Path("initial_policy"));
  }
  if (auto x = r.Get("initial_estimate")) {
    spec.initial_estimate = Reals(ctx, *x, r.Path("initial_estimate"));
  }
  r.Done();
  return spec;
}

// `learners` (one per agent) or `learner` (shared by all agents).
std::vector<LearnerSpec> ReadLearners(Context& ctx, MapReader& root, const StrategicGame& game) {
  const std::size_t mark = ctx.mark();
  auto many = root.Get("learners");
  auto one = root.Get("learner");
  std::vector<LearnerSpec> learners;
  std::vector<std::string> paths;
  const int n = game.num_agents();
  if (many && one) {
    ctx.Fail(root.Path("learner"), *one, "give either learner or learners, not both");
    return {};
  }
  if (one) {
    const LearnerSpec spec = ReadLearner(ctx, *one, root.Path("learner"));
    learners.assign(n, spec);
    paths.assign(n, root.Path("learner"));
  } else if (many) {
    learners = List(ctx, *many, root.Path("learners"), [&](const YAML::Node& x, const std::string& p) {
      paths.push_back(p);
      return ReadLearner(ctx, x, p);
    });
    if (ctx.Clean(mark) && static_cast<int>(learners.size()) != n) {
      ctx.Fail(root.Path("learners"), *many,
               fmt::format("expected {} learners (one per agent), found {}", n, learners.size()));
    }
  } else {
    ctx.Fail(root.Path("learners"), root.node(), "missing required key");
  }
  if (!ctx.Clean(mark)) return {};
  for (int i = 0; i < n; ++i) {
    try {
      learners[i].Validate(game.num_actions(i));
    } catch (const DomainError& e) {
      ctx.Fail(paths[i], one ? *one : (*many)[i],
               fmt::format("agent '{}': {}", game.agent_name(i), e.what()));
    }
  }
  return learners;
}

UpdateSchedule ReadSchedule(Context& ctx, MapReader& root) {
  if (auto x = root.Get("schedule")) {
    if (Choice(ctx, *x, root.Path("schedule"), {"simultaneous", "round-robin"}) == 1) {
      return UpdateSchedule::kRoundRobin;
    }
  }
  return UpdateSchedule::kSimultaneous;
}

int SignalRef(Context& ctx, const StrategicGame& game, const YAML::Node& n,
              const std::string& path) {
  const std::string label = String(ctx, n, path);
  try {
    if (!label.empty()) return game.SignalIndex(label);
  } catch (const DomainError& e) {
    ctx.Fail(path, n, e.what());
  }
  return 0;
}

int AgentRef(Context& ctx, const StrategicGame& game, const YAML::Node& n,
             const std::string& path) {
  const std::string name = String(ctx, n, path);
  try {
    if (!name.empty()) return game.AgentIndex(name);
  } catch (const DomainError& e) {
    ctx.Fail(path, n, e.what());
  }
  return 0;
}

std::vector<int> SignalList(Context& ctx, const StrategicGame& game, const YAML::Node& n,
                            const std::string& path) {
  return List(ctx, n, path, [&](const YAML::Node& x, const std::string& p) {
    return SignalRef(ctx, game, x, p);
  });
}

TrajectoryStep ReadStep(Context& ctx, const StrategicGame& game, const YAML::Node& n,
                        const std::string& path) {
  MapReader r(ctx, n, path);
  TrajectoryStep step;
  if (auto x = r.Get("signal")) step.signal = SignalRef(ctx, game, *x, r.Path("signal"));
  if (auto x = r.Required("profile")) {
    const auto labels = Strings(ctx, *x, r.Path("profile"));
    try {
      step.profile = game.ParseProfile(labels);
    } catch (const DomainError& e) {
      ctx.Fail(r.Path("profile"), *x, e.what());
    }
  }
  r.Done();
  return step;
}

std::optional<StrategicGame> RequiredGame(Context& ctx, MapReader& root) {
  if (auto x = root.Required("game")) return ReadGame(ctx, *x, root.Path("game"));
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Kinds.

CoopPayload ReadCoop(Context& ctx, MapReader& root) {
  CoopPayload p;
  bool strict = false;
  if (auto x = root.Get("strict")) strict = Bool(ctx, *x, root.Path("strict"));
  if (auto x = root.Get("coalition_dynamics")) {
    p.dynamics = Bool(ctx, *x, root.Path("coalition_dynamics"));
  }
  auto agents = root.Required("agents");
  auto values = root.Required("values");
  if (!agents || !values) return p;
  p.agents = Strings(ctx, *agents, root.Path("agents"));
  CheckUnique(ctx, p.agents, *agents, root.Path("agents"));
  if (!ctx.Clean(0)) return p;
  const int n = static_cast<int>(p.agents.size());
  try {
    p.game.emplace(n);
  } catch (const CapacityError& e) {
    Capacity(root.Path("agents"), e);
  } catch (const DomainError& e) {
    ctx.Fail(root.Path("agents"), *agents, e.what());
    return p;
  }
  const std::string vpath = root.Path("values");
  std::vector<char> given(p.game->num_coalitions(), 0);
  given[0] = 1;
  const auto entries = List(ctx, *values, vpath, [&](const YAML::Node& e, const std::string& path) {
    MapReader r(ctx, e, path);
    Coalition s = 0;
    double v = 0.0;
    if (auto x = r.Required("coalition")) {
      const auto members = Strings(ctx, *x, r.Path("coalition"));
      for (const auto& m : members) {
        const auto it = std::find(p.agents.begin(), p.agents.end(), m);
        if (it == p.agents.end()) {
          if (!m.empty()) ctx.Fail(r.Path("coalition"), *x, fmt::format("unknown agent '{}'", m));
          continue;
        }
        const Coalition bit = Coalition{1} << (it - p.agents.begin());
        if (s & bit) ctx.Fail(r.Path("coalition"), *x, fmt::format("agent '{}' listed twice", m));
        s |= bit;
      }
      if (members.empty() && x->IsSequence()) {
        ctx.Fail(r.Path("coalition"), *x, "the empty coalition is fixed at 0");
      }
    }
    if (auto x = r.Required("value")) v = Real(ctx, *x, r.Path("value"));
    r.Done();
    return std::make_tuple(s, v, path, e);
  });
  for (const auto& [s, v, path, node] : entries) {
    if (s == 0) continue;
    if (given[s]) {
      ctx.Fail(path, node, fmt::format("coalition {} given twice", CoalitionString(s)));
      continue;
    }
    given[s] = 1;
    p.game->set_value(s, v);
  }
  if (!ctx.Clean(0)) return p;
  const long missing = std::count(given.begin(), given.end(), 0);
  if (missing > 0) {
    if (strict) {
      ctx.Fail(vpath, *values,
               fmt::format("{} coalition value(s) missing (strict mode)", missing));
    } else {
      ctx.warnings.push_back(
          fmt::format("{}: {} coalition value(s) missing, defaulted to 0", vpath, missing));
    }
  }
  return p;
}

MatchPayload ReadMatch(Context& ctx, MapReader& root) {
  MatchPayload p;
  if (auto x = root.Get("proposing")) {
    if (Choice(ctx, *x, root.Path("proposing"), {"M", "W"}) == 1) p.proposing = Side::kW;
  }
  if (auto x = root.Get("enumerate")) p.enumerate = Bool(ctx, *x, root.Path("enumerate"));
  auto market = root.Required("market");
  if (!market) return p;
  const std::size_t mark = ctx.mark();
  MapReader r(ctx, *market, root.Path("market"));
  struct PrefList {
    std::vector<std::string> names;
    YAML::Node node;
  };
  std::vector<PrefList> m_prefs, w_prefs;
  std::optional<YAML::Node> m_node, w_node;
  const auto names = [&](const char* key, std::vector<std::string>& out) {
    if (auto x = r.Required(key)) {
      out = Strings(ctx, *x, r.Path(key));
      CheckUnique(ctx, out, *x, r.Path(key));
    }
  };
  const auto prefs = [&](const char* key, std::vector<PrefList>& out,
                         std::optional<YAML::Node>& node) {
    if (auto x = r.Required(key)) {
      node = x;
      out = List(ctx, *x, r.Path(key), [&](const YAML::Node& l, const std::string& path) {
        return PrefList{Strings(ctx, l, path), l};
      });
    }
  };
  names("m", p.m);
  names("w", p.w);
  prefs("m_prefs", m_prefs, m_node);
  prefs("w_prefs", w_prefs, w_node);
  r.Done();
  if (!ctx.Clean(mark)) return p;
  const auto to_indices = [&](const std::vector<PrefList>& lists, const YAML::Node& node,
                              const std::vector<std::string>& own,
                              const std::vector<std::string>& other, const char* key) {
    std::vector<std::vector<int>> out;
    if (lists.size() != own.size()) {
      ctx.Fail(r.Path(key), node,
               fmt::format("expected {} preference lists, found {}", own.size(), lists.size()));
      return out;
    }
    for (std::size_t i = 0; i < lists.size(); ++i) {
      std::vector<int> row;
      for (const auto& name : lists[i].names) {
        const auto it = std::find(other.begin(), other.end(), name);
        if (it == other.end()) {
          ctx.Fail(Index(r.Path(key), i), lists[i].node, fmt::format("unknown agent '{}'", name));
        } else {
          row.push_back(static_cast<int>(it - other.begin()));
        }
      }
      out.push_back(row);
    }
    return out;
  };
  auto mi = to_indices(m_prefs, *m_node, p.m, p.w, "m_prefs");
  auto wi = to_indices(w_prefs, *w_node, p.w, p.m, "w_prefs");
  if (!ctx.Clean(mark)) return p;
  try {
    p.market.emplace(std::move(mi), std::move(wi));
  } catch (const DomainError& e) {
    ctx.Fail(root.Path("market"), *market, e.what());
    return p;
  }
  if (p.enumerate && p.market->size() > kMaxEnumerationSize) {
    throw CapacityError(fmt::format("{}: stable-set enumeration is limited to n <= {}",
                                    root.Path("enumerate"), kMaxEnumerationSize));
  }
  return p;
}

LearnPayload ReadLearn(Context& ctx, MapReader& root) {
  LearnPayload p;
  p.game = RequiredGame(ctx, root);
  if (auto x = root.Required("horizon")) p.horizon = PositiveCount(ctx, *x, root.Path("horizon"), "horizon");
  if (auto x = root.Get("trace_stride")) {
    p.trace_stride = PositiveCount(ctx, *x, root.Path("trace_stride"), "trace_stride");
  }
  p.schedule = ReadSchedule(ctx, root);
  if (!p.game) {
    root.Touch({"learners", "learner", "signals"});
    return p;
  }
  p.learners = ReadLearners(ctx, root, *p.game);
  if (auto x = root.Get("signals")) p.signals = SignalList(ctx, *p.game, *x, root.Path("signals"));
  return p;
}

TwoTimescalePayload ReadTwoTimescale(Context& ctx, MapReader& root) {
  TwoTimescalePayload p;
  p.game = RequiredGame(ctx, root);
  if (auto x = root.Required("outer_steps")) {
    p.outer_steps = PositiveCount(ctx, *x, root.Path("outer_steps"), "outer_steps");
  }
  if (auto x = root.Required("inner_steps")) {
    p.inner_steps = PositiveCount(ctx, *x, root.Path("inner_steps"), "inner_steps");
  }
  p.schedule = ReadSchedule(ctx, root);
  auto coordinator = root.Required("coordinator");
  auto admissible = root.Get("admissible");
  if (!p.game) {
    root.Touch({"learners", "learner"});
    return p;
  }
  const StrategicGame& game = *p.game;
  p.learners = ReadLearners(ctx, root, game);
  if (coordinator) {
    MapReader r(ctx, *coordinator, root.Path("coordinator"));
    if (auto x = r.Required("kind")) {
      switch (Choice(ctx, *x, r.Path("kind"), {"constant", "round-robin", "greedy"})) {
        case 0: p.coordinator = CoordinatorKind::kConstant; break;
        case 1: p.coordinator = CoordinatorKind::kRoundRobin; break;
        case 2: p.coordinator = CoordinatorKind::kGreedy; break;
        default: break;
      }
    }
    if (auto x = r.Get("candidates")) {
      p.candidates = SignalList(ctx, game, *x, r.Path("candidates"));
      if (p.candidates.empty() && x->IsSequence()) {
        ctx.Fail(r.Path("candidates"), *x, "at least one candidate signal is required");
      }
    } else {
      for (int c = 0; c < game.num_signals(); ++c) p.candidates.push_back(c);
    }
    if (auto x = r.Get("controlled")) {
      p.controlled = List(ctx, *x, r.Path("controlled"), [&](const YAML::Node& a, const std::string& path) {
        return AgentRef(ctx, game, a, path);
      });
    }
    r.Done();
  }
  if (admissible) {
    AdmissibleSetRule rule;
    const std::string apath = root.Path("admissible");
    const std::size_t mark = ctx.mark();
    List(ctx, *admissible, apath, [&](const YAML::Node& e, const std::string& path) {
      MapReader r(ctx, e, path);
      int signal = 0, agent = 0;
      std::vector<int> actions;
      if (auto x = r.Required("signal")) signal = SignalRef(ctx, game, *x, r.Path("signal"));
      if (auto x = r.Required("agent")) agent = AgentRef(ctx, game, *x, r.Path("agent"));
      if (auto x = r.Required("actions")) {
        const auto labels = Strings(ctx, *x, r.Path("actions"));
        const std::size_t before = ctx.mark();
        for (const auto& l : labels) {
          try {
            if (ctx.Clean(before)) actions.push_back(game.ActionIndex(agent, l));
          } catch (const DomainError& err) {
            ctx.Fail(r.Path("actions"), *x, err.what());
          }
        }
      }
      r.Done();
      if (!rule.allowed.emplace(std::make_pair(signal, agent), actions).second) {
        ctx.Fail(path, e, "duplicate (signal, agent) entry");
      }
      return 0;
    });
    if (ctx.Clean(mark)) {
      for (int c = 0; c < game.num_signals(); ++c) {
        try {
          ApplyAdmissibleSets(rule, game, c);
        } catch (const DomainError& e) {
          ctx.Fail(apath, *admissible, e.what());
          break;
        }
      }
      p.admissible = std::move(rule);
    }
  }
  return p;
}

StackelbergPayload ReadStackelberg(Context& ctx, MapReader& root) {
  StackelbergPayload p;
  p.game = RequiredGame(ctx, root);
  auto candidates = root.Get("candidates");
  auto leader = root.Required("leader");
  int mode = 2;
  if (auto x = root.Get("selection")) {
    mode = Choice(ctx, *x, root.Path("selection"), {"optimistic", "pessimistic", "both"});
  }
  if (mode == 0 || mode == 2) p.modes.push_back(FollowerSelection::kOptimistic);
  if (mode == 1 || mode == 2) p.modes.push_back(FollowerSelection::kPessimistic);
  if (!p.game) return p;
  const StrategicGame& game = *p.game;
  if (candidates) {
    p.candidates = SignalList(ctx, game, *candidates, root.Path("candidates"));
  } else {
    for (int c = 0; c < game.num_signals(); ++c) p.candidates.push_back(c);
  }
  if (!leader) return p;
  const std::string lpath = root.Path("leader");
  if (leader->IsScalar()) {
    if (Choice(ctx, *leader, lpath, {"welfare"}) == 0) p.welfare = true;
    return p;
  }
  MapReader r(ctx, *leader, lpath);
  if (auto x = r.Required("values")) {
    List(ctx, *x, r.Path("values"), [&](const YAML::Node& e, const std::string& path) {
      MapReader v(ctx, e, path);
      const std::size_t before = ctx.mark();
      int signal = 0;
      double value = 0.0;
      ActionProfile profile;
      if (auto y = v.Required("signal")) signal = SignalRef(ctx, game, *y, v.Path("signal"));
      if (auto y = v.Required("value")) value = Real(ctx, *y, v.Path("value"));
      if (auto y = v.Required("profile")) {
        const auto labels = Strings(ctx, *y, v.Path("profile"));
        try {
          if (ctx.Clean(before)) profile = game.ParseProfile(labels);
        } catch (const DomainError& err) {
          ctx.Fail(v.Path("profile"), *y, err.what());
        }
      }
      v.Done();
      if (ctx.Clean(before) &&
          !p.leader.emplace(std::make_pair(signal, game.ProfileIndex(profile)), value).second) {
        ctx.Fail(path, e, "duplicate leader value");
      }
      return 0;
    });
  }
  r.Done();
  const long total = static_cast<long>(p.candidates.size()) * game.num_profiles();
  long listed = 0;
  for (const auto& [key, value] : p.leader) {
    if (std::find(p.candidates.begin(), p.candidates.end(), key.first) != p.candidates.end()) {
      ++listed;
    }
  }
  if (listed < total) {
    ctx.warnings.push_back(fmt::format("{}: {} candidate profile value(s) missing, defaulted to 0",
                                       r.Path("values"), total - listed));
  }
  return p;
}

WardropPayload ReadWardrop(Context& ctx, MapReader& root) {
  WardropPayload p;
  if (auto x = root.Required("network")) p.network = ReadNetwork(ctx, *x, root.Path("network"));
  if (auto x = root.Get("shortcut")) p.shortcut = ReadEdge(ctx, *x, root.Path("shortcut"));
  if (auto x = root.Get("tolls")) {
    p.marginal_tolls = Choice(ctx, *x, root.Path("tolls"), {"none", "marginal-cost"}) == 1;
  }
  if (p.network && p.shortcut && ctx.Clean(0)) {
    try {
      p.network->WithEdge(*p.shortcut);
    } catch (const CapacityError& e) {
      Capacity(root.Path("shortcut"), e);
    } catch (const DomainError& e) {
      ctx.Fail(root.Path("shortcut"), root.node(), e.what());
    }
  }
  return p;
}

IncentivePayload ReadIncentive(Context& ctx, MapReader& root) {
  IncentivePayload p;
  p.game = RequiredGame(ctx, root);
  auto target = root.Required("target");
  auto baseline = root.Required("baseline");
  if (auto x = root.Get("margin")) {
    p.margin = Real(ctx, *x, root.Path("margin"));
    if (!(p.margin > 0.0) && x->IsScalar()) ctx.Fail(root.Path("margin"), *x, "must be positive");
  }
  if (auto x = root.Required("budget")) {
    const std::size_t mark = ctx.mark();
    MapReader r(ctx, *x, root.Path("budget"));
    if (auto y = r.Required("budget")) p.budget.budget = Real(ctx, *y, r.Path("budget"));
    if (auto y = r.Get("discount")) p.budget.discount = Real(ctx, *y, r.Path("discount"));
    if (auto y = r.Get("horizon")) p.budget.horizon = PositiveCount(ctx, *y, r.Path("horizon"), "horizon");
    r.Done();
    if (ctx.Clean(mark)) {
      try {
        p.budget.Validate();
      } catch (const DomainError& e) {
        ctx.Fail(root.Path("budget"), *x, e.what());
      }
    }
  }
  if (!p.game) return p;
  if (target) p.target = ReadStep(ctx, *p.game, *target, root.Path("target"));
  if (baseline) {
    p.baseline = List(ctx, *baseline, root.Path("baseline"), [&](const YAML::Node& e, const std::string& path) {
      return ReadStep(ctx, *p.game, e, path);
    });
    if (p.baseline.empty() && baseline->IsSequence()) {
      ctx.Fail(root.Path("baseline"), *baseline, "at least one baseline step is required");
    }
  }
  return p;
}

AdversaryModel ReadAdversary(Context& ctx, const YAML::Node& n, const std::string& path,
                             const StrategicGame* game, int num_agents) {
  const std::size_t mark = ctx.mark();
  MapReader r(ctx, n, path);
  AdversaryModel a;
  if (auto x = r.Required("compromised")) {
    a.compromised = List(ctx, *x, r.Path("compromised"), [&](const YAML::Node& e, const std::string& p) {
      if (game != nullptr && !(e.IsScalar() && ParseInteger(e.Scalar()))) {
        return AgentRef(ctx, *game, e, p);
      }
      return static_cast<int>(Integer(ctx, e, p));
    });
  }
  if (auto x = r.Get("kind")) {
    const std::string name = String(ctx, *x, r.Path("kind"));
    if (auto kind = ParseAttackKind(name)) {
      a.kind = *kind;
    } else if (!name.empty()) {
      ctx.Fail(r.Path("kind"), *x, fmt::format("unknown attack kind '{}'", name));
    }
  }
  if (auto x = r.Get("value")) a.value = Real(ctx, *x, r.Path("value"));
  if (auto x = r.Get("lag")) a.lag = static_cast<long>(Integer(ctx, *x, r.Path("lag")));
  if (auto x = r.Get("probability")) a.probability = Real(ctx, *x, r.Path("probability"));
  if (auto x = r.Get("start")) a.start = static_cast<long>(Integer(ctx, *x, r.Path("start")));
  if (auto x = r.Get("end")) a.end = static_cast<long>(Integer(ctx, *x, r.Path("end")));
  r.Done();
  if (ctx.Clean(mark)) {
    try {
      a.Validate(num_agents);
    } catch (const DomainError& e) {
      ctx.Fail(path, n, e.what());
    }
  }
  return a;
}

ResiliencePayload ReadResilience(Context& ctx, MapReader& root) {
  ResiliencePayload p;
  if (auto x = root.Required("base")) {
    p.learning = Choice(ctx, *x, root.Path("base"), {"consensus", "learning"}) == 1;
  }
  if (auto x = root.Required("steps")) p.steps = PositiveCount(ctx, *x, root.Path("steps"), "steps");
  auto adversary = root.Required("adversary");
  if (!ctx.Clean(0)) {
    root.Touch({"game", "learners", "learner", "signals", "initial", "neighbors", "defense"});
    return p;
  }
  if (p.learning) {
    p.game = RequiredGame(ctx, root);
    if (!p.game) return p;
    p.learners = ReadLearners(ctx, root, *p.game);
    if (auto x = root.Get("signals")) p.signals = SignalList(ctx, *p.game, *x, root.Path("signals"));
    if (adversary) {
      p.adversary = ReadAdversary(ctx, *adversary, root.Path("adversary"), &*p.game,
                                  p.game->num_agents());
    }
    return p;
  }
  if (auto x = root.Required("initial")) {
    p.consensus.initial = Reals(ctx, *x, root.Path("initial"));
    if (p.consensus.initial.size() < 2 && x->IsSequence()) {
      ctx.Fail(root.Path("initial"), *x, "at least two agents are required");
    }
  }
  const int n = static_cast<int>(p.consensus.initial.size());
  if (auto x = root.Get("neighbors")) {
    p.consensus.neighbors = List(ctx, *x, root.Path("neighbors"), [&](const YAML::Node& l, const std::string& path) {
      return List(ctx, l, path, [&](const YAML::Node& e, const std::string& q) {
        const long long j = Integer(ctx, e, q);
        if (e.IsScalar() && ParseInteger(e.Scalar()) && (j < 0 || j >= n)) {
          ctx.Fail(q, e, fmt::format("agent index {} out of range", j));
        }
        return static_cast<int>(j);
      });
    });
    if (static_cast<int>(p.consensus.neighbors.size()) != n && x->IsSequence()) {
      ctx.Fail(root.Path("neighbors"), *x, fmt::format("expected {} neighbor lists", n));
    }
  }
  if (auto x = root.Get("defense")) {
    const std::size_t mark = ctx.mark();
    MapReader r(ctx, *x, root.Path("defense"));
    if (auto y = r.Get("trim")) p.defense.trim = static_cast<int>(Integer(ctx, *y, r.Path("trim")));
    if (auto y = r.Get("eta")) p.defense.eta = Real(ctx, *y, r.Path("eta"));
    if (auto y = r.Get("residual_scale")) {
      p.defense.residual_scale = Real(ctx, *y, r.Path("residual_scale"));
    }
    r.Done();
    if (ctx.Clean(mark)) {
      try {
        p.defense.Validate();
      } catch (const DomainError& e) {
        ctx.Fail(root.Path("defense"), *x, e.what());
      }
    }
  }
  if (adversary) p.adversary = ReadAdversary(ctx, *adversary, root.Path("adversary"), nullptr, n);
  return p;
}

}  // namespace

ScenarioConfig ParseScenario(std::string_view text, std::optional<std::uint64_t> seed_override) {
  YAML::Node doc;
  try {
    doc = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ScenarioError({fmt::format("syntax error: {} (line {})", e.msg, e.mark.line + 1)});
  }
  Context ctx;
  if (!doc.IsDefined() || doc.IsNull()) {
    ctx.Fail("", doc, "empty document");
    ctx.Check();
  }
  MapReader root(ctx, doc, "");
  ctx.Check();

  ScenarioConfig config;
  const auto kind_node = root.Required("kind");
  ctx.Check();
  const std::string kind_name = String(ctx, *kind_node, "kind");
  ctx.Check();
  const auto kind = ParseScenarioKind(kind_name);
  if (!kind) {
    std::string list;
    for (ScenarioKind k : AllScenarioKinds()) list += (list.empty() ? "" : ", ") + std::string(ToString(k));
    ctx.Fail("kind", *kind_node,
             fmt::format("unknown scenario kind '{}' (expected one of: {})", kind_name, list));
    ctx.Check();
  }
  config.kind = *kind;
  root.Get("description");
  if (auto x = root.Get("seed")) {
    const std::uint64_t seed = Unsigned(ctx, *x, "seed");
    config.seed = seed_override ? *seed_override : seed;
  } else if (seed_override) {
    config.seed = seed_override;
  } else if (IsStochastic(config.kind)) {
    ctx.Fail("seed", doc, fmt::format("{} scenarios need a seed", ToString(config.kind)));
  }

  auto payload = std::make_shared<ScenarioPayload>();
  switch (config.kind) {
    case ScenarioKind::kCoop: payload->data = ReadCoop(ctx, root); break;
    case ScenarioKind::kMatch: payload->data = ReadMatch(ctx, root); break;
    case ScenarioKind::kNash: payload->data = NashPayload{RequiredGame(ctx, root)}; break;
    case ScenarioKind::kLearn: payload->data = ReadLearn(ctx, root); break;
    case ScenarioKind::kTwoTimescale: payload->data = ReadTwoTimescale(ctx, root); break;
    case ScenarioKind::kStackelberg: payload->data = ReadStackelberg(ctx, root); break;
    case ScenarioKind::kWardrop: payload->data = ReadWardrop(ctx, root); break;
    case ScenarioKind::kIncentive: payload->data = ReadIncentive(ctx, root); break;
    case ScenarioKind::kResilience: payload->data = ReadResilience(ctx, root); break;
  }
  root.Done();
  ctx.Check();

  config.canonical = ToJson(doc);
  if (config.seed) config.canonical["seed"] = *config.seed;
  config.warnings = std::move(ctx.warnings);
  config.payload = std::move(payload);
  return config;
}

ScenarioConfig LoadScenario(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError({fmt::format("{}: cannot open file", path)});
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return ParseScenario(text.str(), seed_override);
  } catch (const ScenarioError& e) {
    std::vector<std::string> problems;
    for (const auto& p : e.problems()) problems.push_back(fmt::format("{}: {}", path, p));
    throw ScenarioError(std::move(problems));
  } catch (const CapacityError& e) {
    throw CapacityError(fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace stgames
