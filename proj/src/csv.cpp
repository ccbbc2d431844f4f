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

#include "rftgp/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rftgp/error.hpp"

namespace rftgp {

std::string format_double(double value) {
  char buffer[64];
  auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double parse_double(std::string_view token) {
  std::string trimmed = trim(token);
  double value = 0.0;
  const char* begin = trimmed.data();
  const char* end = begin + trimmed.size();
  if (!trimmed.empty() && *begin == '+') ++begin;
  auto result = std::from_chars(begin, end, value);
  if (trimmed.empty() || result.ec != std::errc() || result.ptr != end) {
    throw Error(ErrorCode::kIo, "not a number: '" + trimmed + "'");
  }
  return value;
}

std::vector<std::string> split(std::string_view line, char delimiter) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(line.substr(start));
      break;
    }
    parts.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::string trim(std::string_view text) {
  const char* ws = " \t\r\n";
  std::size_t first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  std::size_t last = text.find_last_not_of(ws);
  return std::string(text.substr(first, last - first + 1));
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path + "'");
  out << contents;
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path + "'");
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return columns[i];
  }
  throw Error(ErrorCode::kIo, "missing CSV column '" + name + "'");
}

CsvTable parse_csv_table(const std::string& text, const std::string& origin) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string content = trim(line);
    if (content.empty() || content[0] == '#') continue;
    auto fields = split(content);
    if (table.header.empty()) {
      for (auto& f : fields) table.header.push_back(trim(f));
      table.columns.resize(table.header.size());
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw Error(ErrorCode::kIo, origin + ":" + std::to_string(line_no) +
                                      ": expected " +
                                      std::to_string(table.header.size()) +
                                      " fields");
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      table.columns[i].push_back(parse_double(fields[i]));
    }
  }
  if (table.header.empty()) {
    throw Error(ErrorCode::kIo, origin + ": missing CSV header");
  }
  return table;
}

CsvTable read_csv_table(const std::string& path) {
  return parse_csv_table(read_text_file(path), path);
}

}  // namespace rftgp
