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

#include <array>
#include <cstdint>

#include "prevalence/numerics.hpp"

namespace prevalence {

/// xoshiro256** generator, state expanded from a 64-bit seed by splitmix64.
/// The sample stream is a pure function of the seed. Not thread-safe; give
/// each thread its own, distinctly seeded instance.
class RngState {
 public:
  using result_type = std::uint64_t;

  explicit RngState(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next();
  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();

  /// Standard normal (Marsaglia polar method).
  double normal();

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// ln of a Gamma(shape, 1) variate (Marsaglia-Tsang; shape < 1 via the
/// U^(1/shape) boost). Returned on the log scale so tiny shapes do not
/// underflow.
double sample_log_gamma(RngState& rng, double shape);

/// Beta(a, b) variate as X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b).
double sample_beta(RngState& rng, const ShapePair& p);

}  // namespace prevalence
