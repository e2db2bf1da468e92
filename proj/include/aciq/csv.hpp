/**
 * Copyright 2026 The aciq-toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "aciq/error.hpp"

// CSV output: RFC 4180 quoting, '.' decimal separator, LF line endings.

namespace aciq {

/// Shortest decimal text that parses back to the same double.
inline std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, decimals);
  return std::string(buf, res.ptr);
}

inline std::string csv_field(std::string_view field) {
  const bool quote = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!quote) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : columns_(header.size()) { add_row(header); }

  void add_row(const std::vector<std::string>& row) {
    detail::require(row.size() == columns_, "csv row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) text_.push_back(',');
      text_ += csv_field(row[i]);
    }
    text_.push_back('\n');
  }

  const std::string& str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

}  // namespace aciq
