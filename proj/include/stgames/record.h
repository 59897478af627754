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

#ifndef STGAMES_RECORD_H_
#define STGAMES_RECORD_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace stgames {

// A table cell. Null stands for an absent value (and for non-finite doubles
// once written out).
using Value = std::variant<std::monostate, bool, long long, double, std::string>;

inline Value Int(long long v) { return Value(v); }
inline Value Real(double v) { return Value(v); }
inline Value Text(std::string v) { return Value(std::move(v)); }
inline Value Flag(bool v) { return Value(v); }

std::string FormatReal(double v);  // %.17g, always with a '.' or exponent

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;

  void AddRow(std::vector<Value> row);
  bool operator==(const Table&) const = default;
};

// Ordered metric/value pairs.
class Summary {
 public:
  void Add(std::string key, Value value);
  void Add(const std::string& key, const std::vector<double>& values,
           const std::vector<std::string>& labels);
  const Value* Find(std::string_view key) const;
  double Real(std::string_view key) const;  // throws if absent or not numeric
  const Table& table() const { return table_; }
  Table& table() { return table_; }

 private:
  Table table_{"summary", {"metric", "value"}, {}};
};

struct RunRecord {
  std::string kind;
  std::string digest;
  nlohmann::json config;  // canonical, with the effective seed
  Summary summary;
  std::vector<Table> tables;
  std::vector<std::string> warnings;
  std::string version;
  double wall_clock_seconds = 0.0;

  const Table& table(std::string_view name) const;
};

// Sorted-key serialization used for hashing.
std::string CanonicalText(const nlohmann::json& config);
std::string ConfigDigest(const nlohmann::json& config);  // SHA-256, hex
std::string Sha256Hex(std::string_view data);

enum class ExportFormat { kCsv, kJsonLines };
ExportFormat ParseExportFormat(const std::string& tag);  // throws DomainError
const char* Extension(ExportFormat format);

std::string CsvText(const Table& table);
std::string JsonLinesText(const Table& table);
Table ParseJsonLines(std::string_view text, std::string name);

// Writes summary.<ext>, one <table>.<ext> per trace table, and meta.json.
// Returns the files written.
std::vector<std::filesystem::path> Export(const RunRecord& record, ExportFormat format,
                                          const std::filesystem::path& directory);

}  // namespace stgames

#endif  // STGAMES_RECORD_H_
