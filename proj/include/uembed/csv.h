// Copyright 2026 The uembed Authors.
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

#ifndef UEMBED_CSV_H_
#define UEMBED_CSV_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace uembed {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

// Shortest decimal that round-trips; "inf", "-inf", "nan" for non-finite.
std::string format_number(double v);

// Quotes a field when it contains a comma, quote, CR or LF.
std::string csv_escape(const std::string& field);

// LF line endings, header first. Throws on row width mismatch.
void write_csv(std::ostream& os, const CsvTable& t);
void write_csv(const std::string& path, const CsvTable& t);

// Minimal RFC 4180 reader (quoted fields, doubled quotes, LF or CRLF).
CsvTable read_csv(std::istream& is);
CsvTable read_csv(const std::string& path);

}  // namespace uembed

#endif  // UEMBED_CSV_H_
