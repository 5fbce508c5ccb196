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
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "prevalence/errors.hpp"
#include "prevalence/inference.hpp"

namespace prevalence {

namespace {

constexpr double kOverflowTolerance = 1e-6;

void check_grid(const PosteriorGrid& grid) {
  if (grid.grid_m < 1 || grid.densities.size() != static_cast<std::size_t>(grid.grid_m) + 1) {
    throw DomainError("posterior grid must hold grid_m + 1 densities");
  }
}

// cdf[j] = trapezoid integral of the density over [0, theta_j].
std::vector<double> trapezoid_cdf(const PosteriorGrid& grid) {
  const double h = 1.0 / static_cast<double>(grid.grid_m);
  std::vector<double> cdf(grid.densities.size(), 0.0);
  for (std::size_t j = 1; j < cdf.size(); ++j) {
    cdf[j] = cdf[j - 1] + 0.5 * h * (grid.densities[j - 1] + grid.densities[j]);
  }
  return cdf;
}

double quantile_from_cdf(const PosteriorGrid& grid, const std::vector<double>& cdf,
                         double probability) {
  const double target = probability * cdf.back();
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
  if (it == cdf.begin()) return 0.0;
  if (it == cdf.end()) return 1.0;
  const auto j = static_cast<std::int64_t>(it - cdf.begin());
  const double step = cdf[j] - cdf[j - 1];
  const double frac = step > 0.0 ? (target - cdf[j - 1]) / step : 0.0;
  return (static_cast<double>(j - 1) + frac) / static_cast<double>(grid.grid_m);
}

// Linear interpolation of the grid density at x; zero outside [0, 1].
double interpolate(const PosteriorGrid& grid, double x) {
  if (x < 0.0 || x > 1.0) return 0.0;
  const double pos = x * static_cast<double>(grid.grid_m);
  const auto j = std::min(static_cast<std::int64_t>(pos), grid.grid_m - 1);
  const double frac = pos - static_cast<double>(j);
  return grid.densities[j] * (1.0 - frac) + grid.densities[j + 1] * frac;
}

}  // namespace

double grid_quantile(const PosteriorGrid& grid, double probability) {
  check_grid(grid);
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw DomainError("quantile probability must lie in [0, 1]");
  }
  return quantile_from_cdf(grid, trapezoid_cdf(grid), probability);
}

PosteriorSummary summarize(const PosteriorGrid& grid, double level, double support_scale) {
  check_grid(grid);
  if (!(level > 0.0 && level < 1.0)) throw DomainError("0 < level < 1 violated");
  if (!(support_scale > 0.0)) throw DomainError("support_scale > 0 violated");
  const std::vector<double> cdf = trapezoid_cdf(grid);
  if (!(cdf.back() > 0.0)) throw VanishingMassError("posterior grid carries no positive mass");

  const double h = 1.0 / static_cast<double>(grid.grid_m);
  double first_moment = 0.0;
  for (std::int64_t j = 1; j <= grid.grid_m; ++j) {
    first_moment += 0.5 * h *
                    (grid.theta(j - 1) * grid.densities[j - 1] + grid.theta(j) * grid.densities[j]);
  }

  PosteriorSummary s;
  s.level = level;
  s.mean = support_scale * first_moment / cdf.back();
  s.median = support_scale * quantile_from_cdf(grid, cdf, 0.5);
  s.ci_low = support_scale * quantile_from_cdf(grid, cdf, 0.5 * (1.0 - level));
  s.ci_high = support_scale * quantile_from_cdf(grid, cdf, 0.5 * (1.0 + level));
  return s;
}

PosteriorGrid reweight(const PosteriorGrid& grid, double factor) {
  check_grid(grid);
  if (!(factor > 0.0) || !std::isfinite(factor)) throw DomainError("reweight factor > 0 violated");
  if (factor == 1.0) return grid;
  if (factor > 1.0) {
    const std::vector<double> cdf = trapezoid_cdf(grid);
    // Mass above 1 / factor, with the partial cell taken linearly.
    const double cut = static_cast<double>(grid.grid_m) / factor;
    const auto j = static_cast<std::int64_t>(cut);
    const double frac = cut - static_cast<double>(j);
    const double below =
        j >= grid.grid_m ? cdf.back() : cdf[j] + frac * (cdf[j + 1] - cdf[j]);
    const double overflow = (cdf.back() - below) / cdf.back();
    if (overflow > kOverflowTolerance) {
      throw SupportOverflowError("reweighting by " + std::to_string(factor) + " moves " +
                                 std::to_string(overflow) +
                                 " of the posterior mass above prevalence 1");
    }
  }
  std::vector<double> scaled(grid.densities.size());
  for (std::int64_t j = 0; j <= grid.grid_m; ++j) {
    scaled[j] = interpolate(grid, grid.theta(j) / factor) / factor;
  }
  return normalize(std::move(scaled));
}

InfectedCounts to_counts(const PosteriorSummary& summary, std::int64_t population) {
  if (population <= 0) throw DomainError("population > 0 violated");
  const auto pop = static_cast<double>(population);
  auto round_thousand = [](double x) { return std::llround(x / 1000.0) * 1000; };
  InfectedCounts c;
  c.raw_low = summary.ci_low * pop;
  c.raw_median = summary.median * pop;
  c.raw_high = summary.ci_high * pop;
  c.low = round_thousand(c.raw_low);
  c.median = round_thousand(c.raw_median);
  c.high = round_thousand(c.raw_high);
  return c;
}

DeltaResult delta_baseline(const SurveyCounts& survey, const CalibrationCounts& cal,
                           double level) {
  survey.validate();
  cal.validate();
  if (!(level > 0.0 && level < 1.0)) throw DomainError("0 < level < 1 violated");
  const double p_hat = static_cast<double>(survey.k) / static_cast<double>(survey.n);
  const double u_hat = static_cast<double>(cal.k_u) / static_cast<double>(cal.n_u);
  const double v_hat = static_cast<double>(cal.k_v) / static_cast<double>(cal.n_v);
  const double gap = v_hat - u_hat;
  if (!(gap > 0.0)) {
    throw DegenerateTestError("estimated sensitivity " + std::to_string(v_hat) +
                              " does not exceed estimated false-positive rate " +
                              std::to_string(u_hat));
  }
  const double theta = (p_hat - u_hat) / gap;
  const double variance =
      (p_hat * (1.0 - p_hat) / static_cast<double>(survey.n) +
       (1.0 - theta) * (1.0 - theta) * u_hat * (1.0 - u_hat) / static_cast<double>(cal.n_u) +
       theta * theta * v_hat * (1.0 - v_hat) / static_cast<double>(cal.n_v)) /
      (gap * gap);
  const double z = boost::math::quantile(boost::math::normal(), 0.5 * (1.0 + level));
  DeltaResult r;
  r.point = theta;
  r.se = std::sqrt(variance);
  r.ci_low = theta - z * r.se;
  r.ci_high = theta + z * r.se;
  return r;
}

}  // namespace prevalence
