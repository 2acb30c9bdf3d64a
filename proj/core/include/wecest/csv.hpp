// Copyright 2026 The wecest Authors.
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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace wecest::csv {

/// Numeric CSV with a mandatory header row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;  // 1-based source line of each row

  /// Index of `name` in the header; throws ParseError if absent.
  std::size_t column(std::string_view name) const;
  std::vector<double> column_values(std::string_view name) const;
};

/// Reads a numeric CSV. Lines starting with `#` and blank lines are skipped;
/// trailing whitespace is tolerated. Every row must have as many fields as
/// the header. Throws IoError if the file cannot be opened.
Table read(const std::filesystem::path& path);
Table parse(std::istream& in);

/// Throws ParseError describing the mismatch if `table.header != expected`.
void require_header(const Table& table, const std::vector<std::string>& expected);

/// Round-trip formatting of a double ("%.17g").
std::string format(double value);

/// Writes `header` then one line per row. Throws IoError on failure.
void write(const std::filesystem::path& path, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows);
/// Same, for pre-formatted (possibly non-numeric) fields.
void write(const std::filesystem::path& path, const std::vector<std::string>& header,
           const std::vector<std::vector<std::string>>& rows);

/// Fields are trimmed of surrounding whitespace.
std::vector<std::string> split(std::string_view line, char sep = ',');
std::string_view trim(std::string_view s);

}  // namespace wecest::csv
