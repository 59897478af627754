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

#include "stgames/record.h"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "stgames/errors.h"

namespace stgames {

std::string FormatReal(double v) {
  std::string s = fmt::format("{:.17g}", v);
  if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

void Table::AddRow(std::vector<Value> row) {
  if (row.size() != columns.size()) {
    throw ContractError(fmt::format("table {}: row has {} cells, expected {}", name,
                                    row.size(), columns.size()));
  }
  rows.push_back(std::move(row));
}

void Summary::Add(std::string key, Value value) {
  table_.AddRow({Value(std::move(key)), std::move(value)});
}

void Summary::Add(const std::string& key, const std::vector<double>& values,
                  const std::vector<std::string>& labels) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    Add(fmt::format("{}[{}]", key, i < labels.size() ? labels[i] : std::to_string(i)),
        Value(values[i]));
  }
}

const Value* Summary::Find(std::string_view key) const {
  for (const auto& row : table_.rows) {
    if (std::get<std::string>(row[0]) == key) return &row[1];
  }
  return nullptr;
}

double Summary::Real(std::string_view key) const {
  const Value* v = Find(key);
  if (v == nullptr) throw DomainError(fmt::format("summary has no metric {}", key));
  if (const double* d = std::get_if<double>(v)) return *d;
  if (const long long* i = std::get_if<long long>(v)) return static_cast<double>(*i);
  throw DomainError(fmt::format("summary metric {} is not numeric", key));
}

const Table& RunRecord::table(std::string_view name) const {
  for (const Table& t : tables) {
    if (t.name == name) return t;
  }
  throw DomainError(fmt::format("record has no table {}", name));
}

std::string CanonicalText(const nlohmann::json& config) { return config.dump(); }

std::string Sha256Hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw ComputationError("SHA-256 failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::string ConfigDigest(const nlohmann::json& config) {
  return Sha256Hex(CanonicalText(config));
}

ExportFormat ParseExportFormat(const std::string& tag) {
  if (tag == "csv") return ExportFormat::kCsv;
  if (tag == "jsonl" || tag == "json-lines") return ExportFormat::kJsonLines;
  throw DomainError(fmt::format("unsupported format '{}' (expected csv or jsonl)", tag));
}

const char* Extension(ExportFormat format) {
  return format == ExportFormat::kCsv ? "csv" : "jsonl";
}

namespace {

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string CsvCell(const Value& v) {
  struct {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(long long i) const { return std::to_string(i); }
    std::string operator()(double d) const { return std::isfinite(d) ? FormatReal(d) : ""; }
    std::string operator()(const std::string& s) const { return CsvField(s); }
  } visitor;
  return std::visit(visitor, v);
}

std::string JsonCell(const Value& v) {
  struct {
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(long long i) const { return std::to_string(i); }
    std::string operator()(double d) const { return std::isfinite(d) ? FormatReal(d) : "null"; }
    std::string operator()(const std::string& s) const { return nlohmann::json(s).dump(); }
  } visitor;
  return std::visit(visitor, v);
}

Value FromJson(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::boolean: return Value(j.get<bool>());
    case nlohmann::json::value_t::number_integer: return Value(j.get<long long>());
    case nlohmann::json::value_t::number_unsigned:
      return Value(static_cast<long long>(j.get<unsigned long long>()));
    case nlohmann::json::value_t::number_float: return Value(j.get<double>());
    case nlohmann::json::value_t::string: return Value(j.get<std::string>());
    case nlohmann::json::value_t::null: return Value();
    default: throw DomainError("nested values are not table cells");
  }
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ComputationError(fmt::format("cannot open {} for writing", path.string()));
  out << text;
  out.close();
  if (!out) throw ComputationError(fmt::format("write to {} failed", path.string()));
}

}  // namespace

std::string CsvText(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += CsvField(table.columns[c]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += CsvCell(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string JsonLinesText(const Table& table) {
  std::string out;
  for (const auto& row : table.rows) {
    out += '{';
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += nlohmann::json(table.columns[c]).dump();
      out += ':';
      out += JsonCell(row[c]);
    }
    out += "}\n";
  }
  return out;
}

Table ParseJsonLines(std::string_view text, std::string name) {
  Table table{std::move(name), {}, {}};
  std::istringstream in{std::string(text)};
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DomainError(fmt::format("line {}: {}", number, e.what()));
    }
    if (!j.is_object()) throw DomainError(fmt::format("line {}: not an object", number));
    std::vector<std::string> columns;
    std::vector<Value> row;
    for (const auto& [key, value] : j.items()) {
      columns.push_back(key);
      row.push_back(FromJson(value));
    }
    if (table.rows.empty()) {
      table.columns = columns;
    } else if (columns != table.columns) {
      throw DomainError(fmt::format("line {}: columns differ from the first line", number));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<std::filesystem::path> Export(const RunRecord& record, ExportFormat format,
                                          const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) {
    throw ComputationError(
        fmt::format("cannot create output directory {}: {}", directory.string(), ec.message()));
  }
  const auto text = [format](const Table& t) {
    return format == ExportFormat::kCsv ? CsvText(t) : JsonLinesText(t);
  };
  std::vector<std::filesystem::path> written;
  const auto write = [&](const std::string& stem, const std::string& body) {
    const auto path = directory / fmt::format("{}.{}", stem, Extension(format));
    WriteFile(path, body);
    written.push_back(path);
  };
  write("summary", text(record.summary.table()));
  for (const Table& t : record.tables) write(t.name, text(t));

  nlohmann::ordered_json meta;
  meta["kind"] = record.kind;
  meta["digest"] = record.digest;
  meta["config"] = record.config;
  meta["warnings"] = record.warnings;
  meta["tables"] = nlohmann::json::array();
  for (const Table& t : record.tables) meta["tables"].push_back(t.name);
  meta["version"] = record.version;
  meta["wall_clock_seconds"] = record.wall_clock_seconds;
  const auto meta_path = directory / "meta.json";
  WriteFile(meta_path, meta.dump(2) + "\n");
  written.push_back(meta_path);
  return written;
}

}  // namespace stgames
