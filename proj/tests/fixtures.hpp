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

// Shared inputs and comparison helpers for the test binaries.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "prevalence/inference.hpp"

namespace prevalence::fixture {

// Santa Clara County serology survey, April 2020: 50 positives of 3330,
// 2 false positives among 401 known negatives, 103 of 122 known positives.
inline constexpr SurveyCounts kSantaClara{50, 3330};
inline constexpr CalibrationCounts kSantaClaraCal{2, 401, 103, 122};
// Population-adjusted positives over raw positives.
inline constexpr double kSantaClaraReweight = 94.0 / 50.0;

inline double grid_mean(const PosteriorGrid& grid) {
  double sum = 0.0;
  for (double d : grid.densities) sum += d;
  return sum / static_cast<double>(grid.densities.size());
}

// Sup-norm relative error of `got` against `want` over the points where
// `want` exceeds `floor` times its maximum.
inline double sup_relative_error(const std::vector<double>& got, const std::vector<double>& want,
                                 double floor = 1e-3) {
  const double top = *std::max_element(want.begin(), want.end());
  double worst = 0.0;
  for (std::size_t j = 0; j < want.size(); ++j) {
    if (want[j] > floor * top) worst = std::max(worst, std::abs(got[j] - want[j]) / want[j]);
  }
  return worst;
}

// Grid density of Beta(k + 1, n - k + 1), normalized like PosteriorGrid.
inline std::vector<double> beta_grid_log(std::int64_t k, std::int64_t n, std::int64_t grid_m) {
  std::vector<double> log_values;
  for (std::int64_t j = 0; j <= grid_m; ++j) {
    const double theta = static_cast<double>(j) / static_cast<double>(grid_m);
    double lv = 0.0;
    if (k > 0) lv += static_cast<double>(k) * std::log(theta);
    if (n - k > 0) lv += static_cast<double>(n - k) * std::log1p(-theta);
    log_values.push_back(lv);
  }
  return log_values;
}

}  // namespace prevalence::fixture
