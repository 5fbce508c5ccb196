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

#include <cmath>
#include <cstdint>
#include <limits>

namespace prevalence::detail {

// ln[p^k (1 - p)^(n - k)] with the 0 * ln 0 = 0 convention, so k = 0 and
// k = n stay finite at the boundary.
class BinomialKernel {
 public:
  BinomialKernel(std::int64_t k, std::int64_t n)
      : k_(static_cast<double>(k)), rest_(static_cast<double>(n - k)) {}

  double operator()(double p) const {
    double result = 0.0;
    if (k_ > 0.0) result += k_ * std::log(p);
    if (rest_ > 0.0) result += rest_ * std::log1p(-p);
    return result;
  }

 private:
  double k_;
  double rest_;
};

}  // namespace prevalence::detail
