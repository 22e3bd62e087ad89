// Copyright 2026 The netnl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace netnl {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes are incompatible, or a size cap was exceeded by a product.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An input violates a documented precondition (non-Hermitian, non-dichotomic, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A behavior does not have the shape an operation requires.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed its configured cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// The simplex solver failed numerically.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Malformed document.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed document whose content violates an invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Conditioning on an outcome of (numerically) zero probability.
class UndefinedConditionalError : public Error {
 public:
  using Error::Error;
};

/// A party's marginal depends on another party's input beyond tolerance.
class NoSignalingViolation : public Error {
 public:
  using Error::Error;
};

/// A model construction's premise fails for the given behavior.
class InapplicableError : public Error {
 public:
  using Error::Error;
};

/// A wiring program is invalid (terminal reuse, bad reference, out-of-range value).
class ProgramError : public Error {
 public:
  using Error::Error;
};

}  // namespace netnl
