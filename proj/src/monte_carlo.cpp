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
#include <string>
#include <thread>
#include <vector>

#include "prevalence/detail/kernel.hpp"
#include "prevalence/errors.hpp"
#include "prevalence/inference.hpp"

namespace prevalence {

double SampleSet::rejection_rate() const {
  const auto accepted = static_cast<double>(samples.size());
  const auto rejected = static_cast<double>(rejections);
  if (accepted + rejected == 0.0) return 0.0;
  return rejected / (accepted + rejected);
}

SampleSet draw_uv_samples(RngState& rng, const ShapePair& post_u, const ShapePair& post_v,
                          const SurveyCounts& survey, const McConfig& config) {
  survey.validate();
  config.validate();
  const ShapePair shapes = survey.likelihood_shapes();
  SampleSet out;
  out.samples.reserve(static_cast<std::size_t>(config.n_samples));
  for (std::int64_t i = 0; i < config.n_samples; ++i) {
    double u = 0.0;
    double v = 0.0;
    std::int64_t consecutive = 0;
    for (;;) {
      u = sample_beta(rng, post_u);
      v = sample_beta(rng, post_v);
      if (u < v) break;
      ++out.rejections;
      if (++consecutive > config.max_rejection_iters) {
        throw RejectionBudgetError("no u < v pair after " +
                                   std::to_string(config.max_rejection_iters) +
                                   " consecutive draws; calibration posteriors barely overlap "
                                   "the usable region");
      }
    }
    const double log_d = std::log(v - u) - log_stable_inc_beta_diff(u, v, shapes);
    if (!std::isfinite(log_d)) {
      throw VanishingMassError("sample (u=" + std::to_string(u) + ", v=" + std::to_string(v) +
                               ") carries no likelihood mass");
    }
    out.samples.push_back({u, v, log_d});
  }
  return out;
}

PosteriorGrid ppp_posterior_from_samples(std::span<const McSample> samples,
                                         const SurveyCounts& survey, std::int64_t grid_m,
                                         unsigned threads) {
  survey.validate();
  if (samples.empty()) throw DomainError("at least one Monte Carlo sample is required");
  if (grid_m < 1) throw DomainError("grid_m ≥ 1 violated");
  const detail::BinomialKernel kernel(survey.k, survey.n);
  const double log_beta_norm = log_complete_beta(survey.likelihood_shapes());
  std::vector<double> log_density(static_cast<std::size_t>(grid_m) + 1);

  // Each j reads the same immutable samples and sums in sample order, so
  // the partition over threads cannot change the result.
  auto fill = [&](std::int64_t begin, std::int64_t end) {
    std::vector<double> terms(samples.size());
    for (std::int64_t j = begin; j < end; ++j) {
      const double theta = static_cast<double>(j) / static_cast<double>(grid_m);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const McSample& s = samples[i];
        terms[i] = s.log_d + kernel(s.u + theta * (s.v - s.u));
      }
      log_density[j] = log_mean_exp(terms) - log_beta_norm;
    }
  };

  const std::int64_t points = grid_m + 1;
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, points));
  if (workers <= 1) {
    fill(0, points);
  } else {
    std::vector<std::jthread> pool;
    const std::int64_t chunk = (points + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::int64_t begin = w * chunk;
      const std::int64_t end = std::min(points, begin + chunk);
      if (begin < end) pool.emplace_back(fill, begin, end);
    }
  }
  return normalize_log(log_density);
}

PosteriorGrid ppp_posterior(const SurveyCounts& survey, const CalibrationCounts& cal,
                            const PriorSet& priors, const McConfig& config) {
  const auto [post_u, post_v] = calibration_posterior(cal, priors);
  RngState rng(config.seed);
  const SampleSet draws = draw_uv_samples(rng, post_u, post_v, survey, config);
  return ppp_posterior_from_samples(draws.samples, survey, config.grid_m, config.threads);
}

}  // namespace prevalence
