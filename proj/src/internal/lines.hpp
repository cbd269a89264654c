// Copyright 2026 The ZSC Authors.
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

#pragma once

// Line-oriented file helpers shared by the record readers and writers.

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "zsc/error.hpp"

namespace zsc::internal {

using ordered_json = nlohmann::ordered_json;

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string(), path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw Error(ErrorCode::kIoError, "read failed on " + path.string(), path.string());
  return lines;
}

// Each line is written whole, followed by '\n', and the stream is flushed
// before returning.
inline void write_lines(const std::filesystem::path& path,
                        std::span<const std::string> lines, bool append) {
  std::ofstream out(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string(), path.string());
  for (const auto& line : lines) {
    out << line << '\n';
  }
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed on " + path.string(), path.string());
}

inline bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos;
}

inline ordered_json parse_object(std::string_view line, std::size_t line_number) {
  ordered_json j = ordered_json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kMalformedLine,
                "line " + std::to_string(line_number) + " is not a JSON object", {},
                line_number);
  }
  return j;
}

template <typename T>
T required_field(const ordered_json& j, const char* key, std::size_t line_number) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(ErrorCode::kMalformedLine,
                "line " + std::to_string(line_number) + " lacks field '" + key + "'", {},
                line_number);
  }
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::kMalformedLine,
                "line " + std::to_string(line_number) + " has a bad '" + key + "' field",
                {}, line_number);
  }
}

}  // namespace zsc::internal
