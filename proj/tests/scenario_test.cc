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
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "stgames/errors.h"
#include "stgames/record.h"
#include "stgames/scenario.h"

namespace stgames {
namespace {

namespace fs = std::filesystem;

const fs::path kFixtures = STGAMES_FIXTURE_DIR;

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<fs::path> Fixtures(const std::string& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(kFixtures / dir)) {
    if (e.path().extension() == ".yaml") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

RunRecord RunFixture(const std::string& name, std::optional<std::uint64_t> seed = std::nullopt) {
  return RunScenario(ParseScenario(Slurp(kFixtures / "golden" / name), seed));
}

std::string AllJsonLines(const RunRecord& r) {
  std::string out = JsonLinesText(r.summary.table());
  for (const Table& t : r.tables) out += "--" + t.name + "\n" + JsonLinesText(t);
  return out;
}

fs::path TempDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("stgames_scenario_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST_CASE("coop fixture reproduces the three-agent example") {
  const ScenarioConfig config = ParseScenario(Slurp(kFixtures / "golden/coop_three_agents.yaml"));
  CHECK(config.kind == ScenarioKind::kCoop);
  CHECK(config.warnings.empty());
  CHECK_FALSE(config.seed.has_value());
  const RunRecord r = RunScenario(config);
  const Summary& s = r.summary;
  for (const char* agent : {"a", "b", "c"}) {
    CHECK(std::abs(s.Real(std::string("shapley[") + agent + "]") - 1.0 / 3.0) < 1e-15);
    CHECK(std::abs(s.Real(std::string("nucleolus[") + agent + "]") - 1.0 / 3.0) < 1e-6);
  }
  CHECK(*s.Find("core_nonempty") == Flag(true));
  CHECK(*s.Find("shapley_in_core") == Flag(true));
  CHECK(*s.Find("is_superadditive") == Flag(true));
  CHECK(*s.Find("is_convex") == Flag(true));
  CHECK(s.Real("cooperative_surplus") == doctest::Approx(1.0));
  CHECK(r.table("coalitions").rows.size() == 7);
  CHECK(r.kind == "coop");
  CHECK(r.version == kToolVersion);
}

TEST_CASE("sparse coop values default to zero with a warning") {
  const ScenarioConfig config =
      ParseScenario(Slurp(kFixtures / "golden/coop_sparse_majority.yaml"));
  REQUIRE(config.warnings.size() == 1);
  CHECK(config.warnings[0].find("3 coalition value(s) missing") != std::string::npos);
  const RunRecord r = RunScenario(config);
  CHECK(*r.summary.Find("core_nonempty") == Flag(false));
  CHECK(r.summary.Real("core_min_total") == doctest::Approx(1.5));
}

TEST_CASE("module fixtures") {
  const RunRecord braess = RunFixture("wardrop_braess.yaml");
  CHECK(std::abs(braess.summary.Real("before") - 1.5) < 1e-9);
  CHECK(std::abs(braess.summary.Real("after") - 2.0) < 1e-9);
  CHECK(std::abs(braess.summary.Real("delta") - 0.5) < 1e-9);
  CHECK(std::abs(braess.summary.Real("augmented.tolled_per_unit_cost") - 1.5) < 1e-6);
  CHECK(braess.summary.Real("augmented.tolled_max_edge_gap") < 1e-6);

  const RunRecord pigou = RunFixture("wardrop_pigou.yaml");
  CHECK(std::abs(pigou.summary.Real("poa") - 4.0 / 3.0) < 1e-9);

  const RunRecord pd = RunFixture("incentive_prisoners_dilemma.yaml");
  CHECK(*pd.summary.Find("status") == Text("feasible"));
  CHECK(std::abs(pd.summary.Real("per_period") - 4.0) < 1e-6);
  CHECK(*pd.summary.Find("target_is_nash") == Flag(true));
  CHECK(*pd.summary.Find("pareto_improving") == Flag(true));
  CHECK(*pd.summary.Find("budget_feasible") == Flag(true));
  const RunRecord tight = RunFixture("incentive_tight_budget.yaml");
  CHECK(*tight.summary.Find("status") == Text("infeasible"));
  CHECK(*tight.summary.Find("per_period") == Value());

  const RunRecord leader = RunFixture("stackelberg_two_candidates.yaml");
  CHECK(leader.summary.Real("optimistic.value") == 5.0);
  CHECK(leader.summary.Real("pessimistic.value") == 3.0);

  const RunRecord nash = RunFixture("nash_prisoners_dilemma.yaml");
  CHECK(nash.summary.Real("num_equilibria[none]") == 1.0);
  CHECK(nash.summary.Real("poa[none]") == doctest::Approx(3.0));

  const RunRecord match = RunFixture("match_three.yaml");
  CHECK(match.summary.Real("blocking_pairs") == 0.0);
  CHECK(*match.summary.Find("proposer_optimal") == Flag(true));

  const RunRecord consensus = RunFixture("resilience_consensus_injection.yaml");
  CHECK(*consensus.summary.Find("honest_in_hull") == Flag(true));

  const RunRecord br = RunFixture("learn_best_response_routing.yaml");
  CHECK(*br.summary.Find("final_profile_is_nash") == Flag(true));
}

TEST_CASE("schema errors") {
  CHECK_THROWS_AS(ParseScenario(""), ScenarioError);
  CHECK_THROWS_AS(ParseScenario("# nothing here\n"), ScenarioError);
  CHECK_THROWS_AS(ParseScenario("[1, 2]"), ScenarioError);
  CHECK_THROWS_WITH_AS(ParseScenario("kind: nash\ngame: {agents: [a], actions: [[x]], "
                                     "payoffs: [{profile: [x], values: [1]}]}\nextra: 1\n"),
                       "extra: unknown key (line 3)", ScenarioError);
  try {
    ParseScenario(Slurp(kFixtures / "invalid/unknown_learner_kind.yaml"));
    FAIL("expected a schema error");
  } catch (const ScenarioError& e) {
    REQUIRE(e.problems().size() == 1);
    CHECK(e.problems()[0].rfind("learners[1].kind:", 0) == 0);
    CHECK(e.problems()[0].find("gradient-play") != std::string::npos);
  }
  try {
    ParseScenario(Slurp(kFixtures / "invalid/learn_zero_horizon.yaml"));
    FAIL("expected a schema error");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find("horizon must be at least 1") != std::string::npos);
  }
  // Quoted numbers are strings.
  CHECK_THROWS_AS(ParseScenario("kind: wardrop\nnetwork: {origin: s, destination: t, demand: '1', "
                                "edges: [{from: s, to: t}]}\n"),
                  ScenarioError);
}

// Every invalid fixture fails with the message frozen next to it.
TEST_CASE("invalid fixtures fail with stable messages") {
  const auto fixtures = Fixtures("invalid");
  CHECK(fixtures.size() >= 10);
  for (const fs::path& path : fixtures) {
    CAPTURE(path.filename().string());
    std::istringstream expected_file(Slurp(fs::path(path).replace_extension(".err")));
    std::vector<std::string> expected;
    for (std::string line; std::getline(expected_file, line);) {
      if (!line.empty() && line[0] != '#') expected.push_back(line);
    }
    REQUIRE(expected.size() >= 2);
    const std::string kind = expected.front();
    expected.erase(expected.begin());
    std::string expected_text;
    for (const auto& l : expected) expected_text += (expected_text.empty() ? "" : "\n") + l;
    try {
      ParseScenario(Slurp(path));
      FAIL("parsed without error");
    } catch (const ScenarioError& e) {
      CHECK(kind == "schema");
      CHECK(e.problems() == expected);
    } catch (const CapacityError& e) {
      CHECK(kind == "capacity");
      CHECK(std::string(e.what()) == expected_text);
    }
  }
}

TEST_CASE("golden fixtures parse and run deterministically") {
  const auto fixtures = Fixtures("golden");
  CHECK(fixtures.size() >= 9);
  std::set<std::string> kinds;
  for (const fs::path& path : fixtures) {
    CAPTURE(path.filename().string());
    const std::string text = Slurp(path);
    const ScenarioConfig a = ParseScenario(text);
    const ScenarioConfig b = ParseScenario(text);
    CHECK(a.Digest() == b.Digest());
    const RunRecord ra = RunScenario(a);
    const RunRecord rb = RunScenario(b);
    CHECK(AllJsonLines(ra) == AllJsonLines(rb));
    kinds.insert(ra.kind);
  }
  CHECK(kinds.size() == AllScenarioKinds().size());
}

TEST_CASE("seed handling") {
  const std::string text = Slurp(kFixtures / "golden/learn_fictitious_pennies.yaml");
  const ScenarioConfig base = ParseScenario(text);
  CHECK(base.seed == 11u);
  const ScenarioConfig same = ParseScenario(text, 11);
  CHECK(same.Digest() == base.Digest());
  const ScenarioConfig other = ParseScenario(text, 12);
  CHECK(other.seed == 12u);
  CHECK(other.Digest() != base.Digest());
  CHECK(other.canonical["seed"] == 12u);

  // FP is deterministic apart from its first sampled move, so compare the
  // smoothed learner instead.
  const std::string smooth =
      "kind: learn\nseed: 1\nhorizon: 50\nlearner: {kind: smoothed-best-response, temperature: 0.5}\n"
      "game: {agents: [a, b], actions: [[x, y], [x, y]], payoffs: [\n"
      "  {profile: [x, x], values: [1, 0]}, {profile: [x, y], values: [0, 1]},\n"
      "  {profile: [y, x], values: [0, 1]}, {profile: [y, y], values: [1, 0]}]}\n";
  const auto run = [&](std::uint64_t seed) {
    return AllJsonLines(RunScenario(ParseScenario(smooth, seed)));
  };
  CHECK(run(4) == run(4));
  CHECK(run(4) != run(5));

  const std::string no_seed = "kind: learn\nhorizon: 5\nlearner: {kind: replicator}\n"
                              "game: {agents: [a], actions: [[x, y]], payoffs: [\n"
                              "  {profile: [x], values: [1]}, {profile: [y], values: [0]}]}\n";
  CHECK_THROWS_WITH_AS(ParseScenario(no_seed), "seed: learn scenarios need a seed (line 1)",
                       ScenarioError);
  CHECK(ParseScenario(no_seed, 3).seed == 3u);
}

TEST_CASE("digest ignores key order and formatting") {
  const std::string a =
      "kind: wardrop\nnetwork:\n  origin: s\n  destination: t\n  edges:\n"
      "    - {from: s, to: t, a: 1, b: 0}\n    - {from: s, to: t, a: 0, b: 1}\n";
  const std::string b =
      "network: {edges: [{b: 0, a: 1, to: t, from: s}, {to: t, from: s, b: 1, a: 0}],\n"
      "          destination: t, origin: s}\n# comment\nkind: wardrop\n";
  const std::string c =
      "kind: wardrop\nnetwork:\n  origin: s\n  destination: t\n  edges:\n"
      "    - {from: s, to: t, a: 0, b: 1}\n    - {from: s, to: t, a: 1, b: 0}\n";
  CHECK(ParseScenario(a).Digest() == ParseScenario(b).Digest());
  CHECK(ParseScenario(a).Digest() != ParseScenario(c).Digest());
  CHECK(ParseScenario(a).Digest().size() == 64);
  CHECK(Sha256Hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("csv and json-lines formatting") {
  Table empty{"trace", {"t", "value"}, {}};
  CHECK(CsvText(empty) == "t,value\n");
  CHECK(JsonLinesText(empty).empty());

  Table t{"mixed", {"name", "x", "n", "ok", "missing"}, {}};
  t.AddRow({Text("a,\"b\""), Real(0.1), Int(-3), Flag(true), Value()});
  t.AddRow({Text("plain"), Real(2.0), Int(0), Flag(false), Real(1.0 / 3.0)});
  CHECK(CsvText(t) ==
        "name,x,n,ok,missing\n\"a,\"\"b\"\"\",0.10000000000000001,-3,true,\n"
        "plain,2.0,0,false,0.33333333333333331\n");
  CHECK(JsonLinesText(t) ==
        "{\"name\":\"a,\\\"b\\\"\",\"x\":0.10000000000000001,\"n\":-3,\"ok\":true,\"missing\":null}\n"
        "{\"name\":\"plain\",\"x\":2.0,\"n\":0,\"ok\":false,\"missing\":0.33333333333333331}\n");
  CHECK(ParseJsonLines(JsonLinesText(t), "mixed") == t);
  CHECK_THROWS_AS(t.AddRow({Int(1)}), ContractError);

  CHECK(ParseExportFormat("csv") == ExportFormat::kCsv);
  CHECK(ParseExportFormat("jsonl") == ExportFormat::kJsonLines);
  CHECK_THROWS_AS(ParseExportFormat("xml"), DomainError);
  CHECK(FormatReal(1e300) == "1.0000000000000001e+300");
  CHECK(FormatReal(-0.5) == "-0.5");
}

TEST_CASE("json-lines round trip reproduces every golden table") {
  for (const fs::path& path : Fixtures("golden")) {
    CAPTURE(path.filename().string());
    const RunRecord r = RunScenario(ParseScenario(Slurp(path)));
    CHECK(ParseJsonLines(JsonLinesText(r.summary.table()), "summary") == r.summary.table());
    for (const Table& t : r.tables) {
      if (t.rows.empty()) continue;
      CHECK(ParseJsonLines(JsonLinesText(t), t.name) == t);
    }
  }
}

TEST_CASE("export writes the summary, tables and meta") {
  const RunRecord r = RunFixture("coop_three_agents.yaml");
  const fs::path dir = TempDir("export");
  const auto files = Export(r, ExportFormat::kJsonLines, dir);
  CHECK(files.size() == 2 + r.tables.size());
  const Table summary = ParseJsonLines(Slurp(dir / "summary.jsonl"), "summary");
  CHECK(summary == r.summary.table());
  const auto meta = nlohmann::json::parse(Slurp(dir / "meta.json"));
  CHECK(meta["digest"] == r.digest);
  CHECK(ConfigDigest(meta["config"]) == r.digest);
  CHECK(meta["version"] == kToolVersion);

  Export(r, ExportFormat::kCsv, dir);
  const std::string csv = Slurp(dir / "allocations.csv");
  CHECK(csv.rfind("agent,shapley,nucleolus,core_certificate\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);

  const fs::path blocker = dir / "not_a_dir";
  std::ofstream(blocker) << "x";
  CHECK_THROWS_WITH_AS(Export(r, ExportFormat::kCsv, blocker / "sub"),
                       doctest::Contains("not_a_dir"), ComputationError);
  fs::remove_all(dir);
}

TEST_CASE("module failures carry scenario context") {
  const ScenarioConfig config =
      ParseScenario(Slurp(kFixtures / "runtime/resilience_trim_too_large.yaml"));
  CHECK_THROWS_WITH_AS(RunScenario(config), doctest::Contains("resilience scenario: "),
                       ComputationError);
}

TEST_CASE("scenario kind names") {
  for (ScenarioKind k : AllScenarioKinds()) {
    CHECK(ParseScenarioKind(ToString(k)) == k);
    CHECK(ParseVerb(VerbName(k)) == k);
  }
  CHECK(ParseVerb("ttscale") == ScenarioKind::kTwoTimescale);
  CHECK_FALSE(ParseScenarioKind("ttscale").has_value());
  CHECK(IsStochastic(ScenarioKind::kLearn));
  CHECK_FALSE(IsStochastic(ScenarioKind::kWardrop));
}

}  // namespace
}  // namespace stgames
