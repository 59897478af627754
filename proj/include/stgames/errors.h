// Copyright 2026 The stgames Authors
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

#ifndef STGAMES_ERRORS_H_
#define STGAMES_ERRORS_H_

#include <stdexcept>
#include <string>

namespace stgames {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument: unknown label, out-of-range rate, malformed partition.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Input exceeds a desk-scale limit (agent count, grid size, path count).
class CapacityError : public Error {
 public:
  using Error::Error;
};

// The simplex pivot budget was exhausted.
class IterationLimitError : public CapacityError {
 public:
  using CapacityError::CapacityError;
};

// A numerical routine failed to reach its target (e.g. descent stalled).
class ComputationError : public Error {
 public:
  using Error::Error;
};

// A pluggable rule broke its output contract (e.g. a coordinator emitted a
// signal outside its candidate set).
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace stgames

#endif  // STGAMES_ERRORS_H_
