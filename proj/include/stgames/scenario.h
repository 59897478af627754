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

#ifndef STGAMES_SCENARIO_H_
#define STGAMES_SCENARIO_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "stgames/errors.h"
#include "stgames/record.h"

namespace stgames {

#ifndef STGAMES_VERSION
#define STGAMES_VERSION "0.0.0"
#endif
inline constexpr const char* kToolVersion = STGAMES_VERSION;

enum class ScenarioKind {
  kCoop,
  kMatch,
  kNash,
  kLearn,
  kTwoTimescale,
  kStackelberg,
  kWardrop,
  kIncentive,
  kResilience,
};

const char* ToString(ScenarioKind kind);  // value of the `kind` key
const char* VerbName(ScenarioKind kind);  // CLI verb
std::optional<ScenarioKind> ParseScenarioKind(const std::string& name);
std::optional<ScenarioKind> ParseVerb(const std::string& verb);
const std::vector<ScenarioKind>& AllScenarioKinds();
bool IsStochastic(ScenarioKind kind);

// Syntax or schema violations, one message per problem:
// "<key path>: <message> (line N)".
class ScenarioError : public Error {
 public:
  explicit ScenarioError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct ScenarioPayload;

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::kCoop;
  std::optional<std::uint64_t> seed;  // effective seed
  nlohmann::json canonical;           // document as data, seed included
  std::vector<std::string> warnings;
  std::shared_ptr<const ScenarioPayload> payload;

  std::string Digest() const { return ConfigDigest(canonical); }
};

// Strict parse: unknown keys are errors. Missing coalition values in coop
// documents default to 0 with a warning unless `strict: true` is set.
// Throws ScenarioError, or CapacityError for size limits.
ScenarioConfig ParseScenario(std::string_view text,
                             std::optional<std::uint64_t> seed_override = std::nullopt);
ScenarioConfig LoadScenario(const std::string& path,
                            std::optional<std::uint64_t> seed_override = std::nullopt);

// Module failures are rethrown with the scenario kind prepended, keeping the
// error class.
RunRecord RunScenario(const ScenarioConfig& config);

}  // namespace stgames

#endif  // STGAMES_SCENARIO_H_
