// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Record documents: one JSON object
//   {"schema_version": 1, "N": <int>, "batch_size": <int>, "positives": [<ascending ints>]}
// schema_version and batch_size may be omitted (1 and 0). Unknown fields are
// rejected.

#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tarstop/errors.hpp"
#include "tarstop/record.hpp"

namespace tarstop {

inline constexpr int kRecordSchemaVersion = 1;

namespace detail {

inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

inline std::size_t line_of_field(std::string_view text, const std::string& field) {
  const auto pos = text.find("\"" + field + "\"");
  return pos == std::string_view::npos ? 0 : line_of_offset(text, pos);
}

[[noreturn]] inline void field_error(std::string_view text, const std::string& field,
                                     const std::string& msg) {
  const auto line = line_of_field(text, field);
  throw ParseError("record line " + std::to_string(line) + ", field '" + field + "': " + msg, line,
                   field);
}

inline std::uint64_t read_count(std::string_view text, const nlohmann::json& v,
                                const std::string& field) {
  if (!v.is_number_integer()) field_error(text, field, "expected an integer");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const auto s = v.get<std::int64_t>();
  if (s < 0) field_error(text, field, "expected a non-negative integer");
  return static_cast<std::uint64_t>(s);
}

}  // namespace detail

inline RankRecord parse_record(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto line = detail::line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("record line " + std::to_string(line) + ": malformed JSON: " + e.what(), line,
                     "");
  }
  if (!doc.is_object()) throw ParseError("record must be a JSON object", 1, "");

  for (const auto& [key, _] : doc.items()) {
    if (key != "schema_version" && key != "N" && key != "batch_size" && key != "positives") {
      detail::field_error(text, key, "unknown field");
    }
  }
  if (doc.contains("schema_version")) {
    const auto v = detail::read_count(text, doc["schema_version"], "schema_version");
    if (v != kRecordSchemaVersion) {
      detail::field_error(text, "schema_version", "unsupported version " + std::to_string(v));
    }
  }
  if (!doc.contains("N")) throw ParseError("record is missing required field 'N'", 0, "N");
  if (!doc.contains("positives")) {
    throw ParseError("record is missing required field 'positives'", 0, "positives");
  }
  const auto N = detail::read_count(text, doc["N"], "N");
  if (N == 0) detail::field_error(text, "N", "must be positive");
  const auto batch =
      doc.contains("batch_size") ? detail::read_count(text, doc["batch_size"], "batch_size") : 0;

  const auto& arr = doc["positives"];
  if (!arr.is_array()) detail::field_error(text, "positives", "expected an array");
  if (arr.empty()) detail::field_error(text, "positives", "must list at least one rank");
  std::vector<std::uint64_t> ranks;
  ranks.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string where = "positives[" + std::to_string(i) + "]";
    const auto rank = detail::read_count(text, arr[i], "positives");
    if (rank < 1 || rank > N) {
      detail::field_error(text, "positives",
                          where + " = " + std::to_string(rank) + " outside [1, N]");
    }
    if (!ranks.empty() && rank == ranks.back()) {
      detail::field_error(text, "positives", where + ": duplicate rank " + std::to_string(rank));
    }
    if (!ranks.empty() && rank < ranks.back()) {
      detail::field_error(text, "positives", where + ": ranks must be ascending");
    }
    ranks.push_back(rank);
  }
  return RankRecord(N, std::move(ranks), batch);
}

inline RankRecord read_record_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open record file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_record(buf.str());
}

inline std::string format_record(const RankRecord& record) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kRecordSchemaVersion;
  doc["N"] = record.collection_size();
  doc["batch_size"] = record.batch_size();
  doc["positives"] = std::vector<std::uint64_t>(record.positive_ranks().begin(),
                                                record.positive_ranks().end());
  return doc.dump() + "\n";
}

}  // namespace tarstop
