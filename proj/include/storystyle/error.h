// Copyright 2026 The storystyle Authors.
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

#ifndef STORYSTYLE_ERROR_H_
#define STORYSTYLE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace storystyle {

// Base class for every error raised by the toolkit. The CLI maps the
// concrete subclasses onto exit codes (see tools/storystyle_main.cc).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data violates a documented format or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A text file failed to parse. `line()` is 1-based; 0 when unknown.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& message)
      : ValidationError(source + ":" + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A required input (file, directory, label) is absent.
class MissingInputError : public Error {
 public:
  using Error::Error;
};

// Filesystem read/write failure.
class IoError : public Error {
 public:
  using Error::Error;
};

// Non-finite values or a degenerate numeric state.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Remote classifier unreachable after all retries.
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace storystyle

#endif  // STORYSTYLE_ERROR_H_
