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


#include <cmath>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "uembed/csv.h"

using namespace uembed;

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e22, 0.0, 123456789.125}) {
    const std::string s = format_number(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("csv quoting") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("csv write and read") {
  CsvTable t;
  t.header = {"name", "value"};
  t.add_row({"a,b", "1"});
  t.add_row({"q\"uote", "2.5"});
  t.add_row({"multi\nline", ""});
  std::stringstream ss;
  write_csv(ss, t);
  const std::string text = ss.str();
  CHECK(text.rfind("name,value\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  CsvTable back = read_csv(ss);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);

  std::stringstream crlf("x,y\r\n1,2\r\n");
  CsvTable c = read_csv(crlf);
  CHECK(c.header == std::vector<std::string>{"x", "y"});
  CHECK(c.rows == std::vector<std::vector<std::string>>{{"1", "2"}});

  CsvTable bad;
  bad.header = {"a", "b"};
  bad.add_row({"1"});
  std::stringstream out;
  CHECK_THROWS(write_csv(out, bad));
}
