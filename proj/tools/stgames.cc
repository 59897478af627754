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

// stgames: run scenario configs and export their records.
//
//   stgames <verb> --config a.yaml [b.yaml ...] [--seed N] [--out DIR]
//                  [--format csv|jsonl] [--jobs K]
//
// Verbs are the scenario kinds (coop, match, nash, learn, ttscale,
// stackelberg, wardrop, incentive, resilience), plus `run` for any kind and
// `validate` to parse without running. Exit codes: 0 success, 1 usage or
// schema error, 2 computation error, 3 capacity error.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <fmt/core.h>

#include "CLI11.hpp"
#include "stgames/errors.h"
#include "stgames/record.h"
#include "stgames/scenario.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitComputation = 2;
constexpr int kExitCapacity = 3;

struct Job {
  std::string path;
  std::filesystem::path out;
  int code = kExitOk;
  std::string stdout_text;
  std::string stderr_text;
};

std::string CellText(const stgames::Value& v) {
  struct {
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(long long i) const { return std::to_string(i); }
    std::string operator()(double d) const { return stgames::FormatReal(d); }
    std::string operator()(const std::string& s) const { return s; }
  } visitor;
  return std::visit(visitor, v);
}

void Execute(Job& job, std::optional<stgames::ScenarioKind> verb, bool validate_only,
             std::optional<std::uint64_t> seed, stgames::ExportFormat format) {
  try {
    const stgames::ScenarioConfig config = stgames::LoadScenario(job.path, seed);
    if (verb && config.kind != *verb) {
      job.stderr_text += fmt::format("{}: config kind is '{}', but the verb is '{}'\n", job.path,
                                     stgames::ToString(config.kind), stgames::VerbName(*verb));
      job.code = kExitUsage;
      return;
    }
    for (const auto& w : config.warnings) job.stderr_text += fmt::format("warning: {}: {}\n", job.path, w);
    if (validate_only) {
      job.stdout_text += fmt::format("{}: ok ({}, digest {})\n", job.path,
                                     stgames::ToString(config.kind), config.Digest());
      return;
    }
    const stgames::RunRecord record = stgames::RunScenario(config);
    for (std::size_t k = config.warnings.size(); k < record.warnings.size(); ++k) {
      job.stderr_text += fmt::format("warning: {}: {}\n", job.path, record.warnings[k]);
    }
    const auto files = stgames::Export(record, format, job.out);
    job.stdout_text += fmt::format("# {} ({}) digest {} -> {}\n", job.path, record.kind,
                                   record.digest, job.out.string());
    for (const auto& row : record.summary.table().rows) {
      job.stdout_text += fmt::format("{} = {}\n", CellText(row[0]), CellText(row[1]));
    }
  } catch (const stgames::ScenarioError& e) {
    job.stderr_text += fmt::format("error: {}\n", e.what());
    job.code = kExitUsage;
  } catch (const stgames::CapacityError& e) {
    job.stderr_text += fmt::format("capacity error: {}\n", e.what());
    job.code = kExitCapacity;
  } catch (const stgames::Error& e) {
    job.stderr_text += fmt::format("computation error: {}: {}\n", job.path, e.what());
    job.code = kExitComputation;
  } catch (const std::exception& e) {
    job.stderr_text += fmt::format("computation error: {}: {}\n", job.path, e.what());
    job.code = kExitComputation;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Run strategic and cooperative game scenarios."};
  app.set_version_flag("--version", std::string(stgames::kToolVersion));
  app.require_subcommand(1);

  std::vector<std::string> configs;
  std::optional<std::uint64_t> seed;
  std::string out = "stgames-out";
  std::string format_tag = "jsonl";
  unsigned jobs = 1;

  std::vector<std::string> verbs;
  for (stgames::ScenarioKind k : stgames::AllScenarioKinds()) verbs.push_back(stgames::VerbName(k));
  verbs.push_back("run");
  verbs.push_back("validate");
  for (const std::string& verb : verbs) {
    CLI::App* sub = app.add_subcommand(
        verb, verb == "run"        ? "Run a scenario of any kind"
              : verb == "validate" ? "Parse and validate configs without running"
                                   : std::string(verb == "incentive" ? "Run an " : "Run a ") + verb + " scenario");
    sub->add_option("--config,-c", configs, "Scenario file(s)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override the config seed");
    if (verb != "validate") {
      sub->add_option("--out,-o", out, "Output directory")->capture_default_str();
      sub->add_option("--format,-f", format_tag, "csv or jsonl")->capture_default_str();
      sub->add_option("--jobs,-j", jobs, "Configs run concurrently")
          ->check(CLI::Range(1u, 256u))
          ->capture_default_str();
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const std::string verb = app.get_subcommands().front()->get_name();
  const bool validate_only = verb == "validate";
  const std::optional<stgames::ScenarioKind> kind = stgames::ParseVerb(verb);

  stgames::ExportFormat format = stgames::ExportFormat::kJsonLines;
  try {
    format = stgames::ParseExportFormat(format_tag);
  } catch (const stgames::DomainError& e) {
    fmt::print(stderr, "error: --format: {}\n", e.what());
    return kExitUsage;
  }

  std::vector<Job> work(configs.size());
  for (std::size_t k = 0; k < configs.size(); ++k) {
    work[k].path = configs[k];
    work[k].out = configs.size() == 1
                      ? std::filesystem::path(out)
                      : std::filesystem::path(out) / std::filesystem::path(configs[k]).stem();
  }
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k; (k = next++) < work.size();) {
      Execute(work[k], kind, validate_only, seed, format);
    }
  };
  std::vector<std::thread> threads;
  const unsigned count = std::min<unsigned>(jobs, static_cast<unsigned>(work.size()));
  for (unsigned t = 1; t < count; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  int code = kExitOk;
  for (const Job& job : work) {
    fmt::print(stdout, "{}", job.stdout_text);
    fmt::print(stderr, "{}", job.stderr_text);
    code = std::max(code, job.code);
  }
  return code;
}
