// Copyright 2026 The Prevalence Authors
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

#include <stdexcept>
#include <string>

namespace prevalence {

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside the domain of the operation (for example x outside
/// [0, 1], a non-positive beta shape or k > n).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A probability mass underflowed to zero where a positive value is required.
/// Raised when a Monte Carlo sample or a whole posterior grid carries no
/// usable likelihood mass.
class VanishingMassError : public Error {
 public:
  using Error::Error;
};

/// The u < v rejection loop exhausted its per-sample budget.
class RejectionBudgetError : public Error {
 public:
  using Error::Error;
};

/// Rescaling a posterior would push non-negligible mass beyond theta = 1.
class SupportOverflowError : public Error {
 public:
  using Error::Error;
};

/// Point estimates of the test characteristics describe an unusable test
/// (estimated sensitivity not above the estimated false-positive rate).
class DegenerateTestError : public Error {
 public:
  using Error::Error;
};

}  // namespace prevalence
