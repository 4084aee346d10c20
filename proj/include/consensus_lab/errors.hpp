// Copyright 2026 The Consensus Lab Authors
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

namespace consensus_lab {

// Non-finite or out-of-domain numeric input.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Caller passed an invalid argument (dt <= 0, empty list, bad index, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A parameter set violates a configuration invariant.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Integration left the bounded region (|z| > 1e6) or produced NaN.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation called in a state that does not allow it.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A statistical test is undefined for the given data.
class UndefinedTestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace consensus_lab
