// Copyright 2026 The rftgp Authors
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

#ifndef RFTGP_CSV_HPP_
#define RFTGP_CSV_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace rftgp {

/// Shortest-form decimal with up to 17 significant digits; parses back to
/// the identical double.
std::string format_double(double value);

/// Strict parse: the whole token must be a number. Throws Error(kIo).
double parse_double(std::string_view token);

std::vector<std::string> split(std::string_view line, char delimiter = ',');

std::string trim(std::string_view text);

std::string join_doubles(const std::vector<double>& values);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

/// Numeric CSV with a single header row. Columns are returned by header name
/// order. Blank lines and lines starting with '#' are skipped.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  const std::vector<double>& column(const std::string& name) const;
  std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
};

CsvTable parse_csv_table(const std::string& text, const std::string& origin);
CsvTable read_csv_table(const std::string& path);

}  // namespace rftgp

#endif  // RFTGP_CSV_HPP_
