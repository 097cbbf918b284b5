/*
 * Copyright 2026 The AdaMEL Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ADAMEL_CSV_HPP
#define ADAMEL_CSV_HPP

#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace adamel::csv {

// Minimal RFC 4180 reader: comma separator, double-quote quoting, quotes
// escaped by doubling, newlines allowed inside quoted fields.
inline std::vector<std::vector<std::string>> parse(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool row_started = false;

  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < n && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
        } else {
          quoted = false;
          ++i;
        }
      } else {
        field.push_back(c);
        ++i;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        row_started = true;
        ++i;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        row_started = true;
        ++i;
        break;
      case '\r':
        ++i;
        break;
      case '\n':
        if (row_started || !field.empty() || !row.empty()) {
          row.push_back(std::move(field));
          field.clear();
          rows.push_back(std::move(row));
          row.clear();
          row_started = false;
        }
        ++i;
        break;
      default:
        field.push_back(c);
        row_started = true;
        ++i;
    }
  }
  if (quoted) throw std::runtime_error("csv: unterminated quoted field");
  if (row_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string quote_field(std::string_view f) {
  const bool needs = f.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs) return std::string(f);
  std::string out;
  out.reserve(f.size() + 2);
  out.push_back('"');
  for (char c : f) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << quote_field(fields[i]);
  }
  os << '\n';
}

}  // namespace adamel::csv

#endif  // ADAMEL_CSV_HPP
