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

#ifndef UEMBED_ERROR_H_
#define UEMBED_ERROR_H_

#include <stdexcept>
#include <string>

namespace uembed {

// Precondition violations: bad dimensions, non-finite input, out-of-range
// parameters.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A requested spectral tolerance needs more coefficients than the cap allows.
class ToleranceUnreachable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A distance map is not monotone where inversion needs it to be.
class NonMonotoneModel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary file decoding failures (bad magic, version, truncation).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration parse/validation failures. `line` is 1-based, 0 when the
// error is not tied to a specific line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace uembed

#endif  // UEMBED_ERROR_H_
