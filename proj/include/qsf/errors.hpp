// Copyright 2026 The qsf Authors
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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qsf {

/** Base class of every error raised by the library. */
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** Operand shapes do not fit together. */
class DimensionError : public Error {
 public:
  using Error::Error;
};

/** A matrix or state violates its declared structure (unitary, hermitian, normalized, ...). */
class ValidationError : public Error {
 public:
  using Error::Error;
};

/** Malformed textual input. `position()` is a 0-based character offset, or a line for documents. */
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/** An iterative solver ran out of iterations. Carries the last residual norms it saw. */
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

/** Two independent computations of the same quantity disagree. */
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace qsf
