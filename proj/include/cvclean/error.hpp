// Copyright 2026 The cvclean Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cvclean {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (missing column, bad number, wrong dimension).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A data row that cannot be parsed. Carries the 1-based line number.
class RowError : public FormatError {
 public:
  RowError(std::size_t line, const std::string& what)
      : FormatError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The same identifier appears twice where it must be unique.
class DuplicationError : public Error {
 public:
  using Error::Error;
};

/// A caller violated an operation's precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Numerically degenerate input, e.g. a zero-norm vector.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

/// Inputs that disagree with each other (unknown ids, missing decisions).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Perfectly separable logistic data: the maximum-likelihood estimate
/// does not exist.
class SeparationError : public Error {
 public:
  using Error::Error;
};

class UndefinedCrossoverError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

}  // namespace cvclean
