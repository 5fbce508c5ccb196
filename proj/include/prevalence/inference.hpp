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

// Posterior prevalence from an imperfect test.
//
// Notation: theta is the prevalence, u the false-positive rate
// (1 - specificity) and v the sensitivity. A survey observes k positives out
// of n subjects; calibration observes k_u false positives among n_u known
// negatives and k_v true positives among n_v known positives.

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "prevalence/numerics.hpp"
#include "prevalence/random.hpp"

namespace prevalence {

struct SurveyCounts {
  std::int64_t k = 0;
  std::int64_t n = 0;

  /// Throws DomainError unless 0 <= k <= n and n > 0.
  void validate() const;
  ShapePair likelihood_shapes() const;  // (k + 1, n - k + 1)
};

struct CalibrationCounts {
  std::int64_t k_u = 0;
  std::int64_t n_u = 0;
  std::int64_t k_v = 0;
  std::int64_t n_v = 0;

  void validate() const;
};

struct PriorSet {
  ShapePair prior_u{1.0, 1.0};
  ShapePair prior_v{1.0, 1.0};
};

struct TestCharacteristics {
  double u = 0.0;  // false-positive rate
  double v = 1.0;  // sensitivity

  /// Throws DomainError unless 0 <= u < v <= 1.
  void validate() const;
};

struct McConfig {
  std::int64_t n_samples = 10000;
  std::int64_t grid_m = 10000;
  std::uint64_t seed = 1;
  std::int64_t max_rejection_iters = 1000000;
  // Worker threads for the density loop; the result does not depend on it.
  unsigned threads = 1;

  void validate() const;
};

/// One Monte Carlo draw of the test characteristics with its cached weight
/// ln[(v - u) / (B(v; k+1, n-k+1) - B(u; k+1, n-k+1))].
struct McSample {
  double u = 0.0;
  double v = 0.0;
  double log_d = 0.0;
};

struct SampleSet {
  std::vector<McSample> samples;
  std::int64_t rejections = 0;

  /// Fraction of candidate (u, v) pairs rejected for u >= v.
  double rejection_rate() const;
};

/// Density values p_j at theta_j = j / M, j = 0..M, normalized so the
/// rectangle-rule mean (1 / (M + 1)) sum p_j is 1.
struct PosteriorGrid {
  std::int64_t grid_m = 0;
  std::vector<double> densities;

  double theta(std::int64_t j) const {
    return static_cast<double>(j) / static_cast<double>(grid_m);
  }
};

struct PosteriorSummary {
  double mean = 0.0;
  double median = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double level = 0.95;
};

/// Rogan-Gladen point estimate with a first-order (delta method) standard
/// error and a symmetric normal interval.
struct DeltaResult {
  double point = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Infected counts rounded to the nearest thousand, plus the unrounded
/// products.
struct InfectedCounts {
  std::int64_t low = 0;
  std::int64_t median = 0;
  std::int64_t high = 0;
  double raw_low = 0.0;
  double raw_median = 0.0;
  double raw_high = 0.0;
};

/// u + theta (v - u): probability that a random subject tests positive.
double positive_rate(double theta, const TestCharacteristics& chars);

/// Grid posterior of theta when u and v are known exactly.
PosteriorGrid posterior_known_grid(const SurveyCounts& survey, const TestCharacteristics& chars,
                                   std::int64_t grid_m);

/// Conjugate beta posteriors of u and v given the calibration counts:
/// ((k_u + alpha_u, n_u - k_u + beta_u), (k_v + alpha_v, n_v - k_v + beta_v)).
std::pair<ShapePair, ShapePair> calibration_posterior(const CalibrationCounts& cal,
                                                      const PriorSet& priors);

/// Draws config.n_samples pairs u ~ post_u, v ~ post_v, redrawing both
/// whenever u >= v, and caches each pair's weight. Throws
/// RejectionBudgetError if a single pair needs more than
/// config.max_rejection_iters consecutive redraws.
SampleSet draw_uv_samples(RngState& rng, const ShapePair& post_u, const ShapePair& post_v,
                          const SurveyCounts& survey, const McConfig& config);

/// Monte Carlo posterior from pre-drawn samples: for each theta_j the mean
/// over samples of d_i * Beta_p(u_i + theta_j (v_i - u_i)), accumulated in
/// log space, then normalized.
PosteriorGrid ppp_posterior_from_samples(std::span<const McSample> samples,
                                         const SurveyCounts& survey, std::int64_t grid_m,
                                         unsigned threads = 1);

/// Full Monte Carlo pipeline: calibration posteriors, sampling with
/// RngState(config.seed), density estimation and normalization.
PosteriorGrid ppp_posterior(const SurveyCounts& survey, const CalibrationCounts& cal,
                            const PriorSet& priors, const McConfig& config);

/// Deterministic oracle: composite Gauss-Legendre over {u < v} of the
/// marginal integrand, quad_points nodes per axis (at least 200).
PosteriorGrid quadrature_posterior(const SurveyCounts& survey, const CalibrationCounts& cal,
                                   const PriorSet& priors, std::int64_t grid_m,
                                   int quad_points);

/// Scales densities so their mean is 1. Throws VanishingMassError when no
/// entry is positive.
PosteriorGrid normalize(std::vector<double> densities);

/// Normalizes log densities after shifting by their maximum.
PosteriorGrid normalize_log(std::span<const double> log_densities);

/// Mean, median and equal-tailed credible interval from the trapezoid CDF
/// of the grid; theta values are multiplied by support_scale.
PosteriorSummary summarize(const PosteriorGrid& grid, double level = 0.95,
                           double support_scale = 1.0);

/// Quantile of the trapezoid CDF with linear interpolation between nodes.
double grid_quantile(const PosteriorGrid& grid, double probability);

/// Density of factor * theta resampled onto the same grid. Throws
/// SupportOverflowError when more than 1e-6 of the mass would land above 1.
PosteriorGrid reweight(const PosteriorGrid& grid, double factor);

InfectedCounts to_counts(const PosteriorSummary& summary, std::int64_t population);

DeltaResult delta_baseline(const SurveyCounts& survey, const CalibrationCounts& cal,
                           double level = 0.95);

}  // namespace prevalence
