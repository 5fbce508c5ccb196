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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "prevalence/detail/kernel.hpp"
#include "prevalence/errors.hpp"
#include "prevalence/inference.hpp"

namespace prevalence {

void SurveyCounts::validate() const {
  if (n <= 0) throw DomainError("survey.n > 0 violated");
  if (k < 0) throw DomainError("survey.k ≥ 0 violated");
  if (k > n) throw DomainError("survey.k ≤ survey.n violated");
}

ShapePair SurveyCounts::likelihood_shapes() const {
  return {static_cast<double>(k) + 1.0, static_cast<double>(n - k) + 1.0};
}

void CalibrationCounts::validate() const {
  if (n_u <= 0) throw DomainError("calibration.n_u > 0 violated");
  if (k_u < 0 || k_u > n_u) throw DomainError("0 ≤ calibration.k_u ≤ calibration.n_u violated");
  if (n_v <= 0) throw DomainError("calibration.n_v > 0 violated");
  if (k_v < 0 || k_v > n_v) throw DomainError("0 ≤ calibration.k_v ≤ calibration.n_v violated");
}

void TestCharacteristics::validate() const {
  if (!(u >= 0.0 && u < v && v <= 1.0)) {
    throw DomainError("0 ≤ u < v ≤ 1 violated (u=" + std::to_string(u) +
                      ", v=" + std::to_string(v) + ")");
  }
}

void McConfig::validate() const {
  if (n_samples < 1) throw DomainError("mc.samples ≥ 1 violated");
  if (grid_m < 1) throw DomainError("mc.grid ≥ 1 violated");
  if (max_rejection_iters < 1) throw DomainError("mc.max_rejection_iters ≥ 1 violated");
}

double positive_rate(double theta, const TestCharacteristics& chars) {
  return chars.u + theta * (chars.v - chars.u);
}

PosteriorGrid normalize(std::vector<double> densities) {
  double sum = 0.0;
  for (double d : densities) {
    if (!(d >= 0.0)) throw DomainError("densities must be nonnegative");
    sum += d;
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw VanishingMassError("posterior grid carries no positive mass");
  }
  const double mean = sum / static_cast<double>(densities.size());
  for (double& d : densities) d /= mean;
  return {static_cast<std::int64_t>(densities.size()) - 1, std::move(densities)};
}

PosteriorGrid normalize_log(std::span<const double> log_densities) {
  if (log_densities.empty()) throw DomainError("empty density grid");
  const double top = *std::max_element(log_densities.begin(), log_densities.end());
  if (!std::isfinite(top)) throw VanishingMassError("posterior grid carries no positive mass");
  std::vector<double> densities(log_densities.size());
  std::transform(log_densities.begin(), log_densities.end(), densities.begin(),
                 [top](double ld) { return std::exp(ld - top); });
  return normalize(std::move(densities));
}

PosteriorGrid posterior_known_grid(const SurveyCounts& survey, const TestCharacteristics& chars,
                                   std::int64_t grid_m) {
  survey.validate();
  chars.validate();
  if (grid_m < 1) throw DomainError("grid_m ≥ 1 violated");
  const ShapePair shapes = survey.likelihood_shapes();
  // ln[(v - u) / (B(v) - B(u))], the exact normalizer of the theta density.
  const double log_norm =
      std::log(chars.v - chars.u) - log_stable_inc_beta_diff(chars.u, chars.v, shapes);
  const detail::BinomialKernel kernel(survey.k, survey.n);
  std::vector<double> log_density(static_cast<std::size_t>(grid_m) + 1);
  for (std::int64_t j = 0; j <= grid_m; ++j) {
    const double theta = static_cast<double>(j) / static_cast<double>(grid_m);
    log_density[j] = log_norm + kernel(positive_rate(theta, chars));
  }
  return normalize_log(log_density);
}

std::pair<ShapePair, ShapePair> calibration_posterior(const CalibrationCounts& cal,
                                                      const PriorSet& priors) {
  cal.validate();
  const auto fp = static_cast<double>(cal.k_u);
  const auto tn = static_cast<double>(cal.n_u - cal.k_u);
  const auto tp = static_cast<double>(cal.k_v);
  const auto fn = static_cast<double>(cal.n_v - cal.k_v);
  return {ShapePair(fp + priors.prior_u.a(), tn + priors.prior_u.b()),
          ShapePair(tp + priors.prior_v.a(), fn + priors.prior_v.b())};
}

}  // namespace prevalence
