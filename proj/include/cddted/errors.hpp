// Copyright 2026 The cddted Authors
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

#ifndef CDDTED_ERRORS_HPP_
#define CDDTED_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace cddted {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two token sequences produced by different tokenizers were compared.
class TokenizerMismatchError : public Error {
 public:
  using Error::Error;
};

class InsufficientSamplesError : public Error {
 public:
  using Error::Error;
};

// A field required by the operation is absent (greedy text, reference,
// pass flags, log-probabilities, ...).
class MissingFieldError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed input file or configuration. `line` is 1-based, 0 when the
// error is not tied to a line.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& message, std::size_t line = 0,
                  std::string field = {})
      : Error(line ? "line " + std::to_string(line) + ": " + message
                   : message),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// Transport or HTTP failure that survived all retries.
class SamplingError : public Error {
 public:
  using Error::Error;
};

}  // namespace cddted

#endif  // CDDTED_ERRORS_HPP_
