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
#include <vector>

#include "prevalence/detail/gauss_legendre.hpp"
#include "prevalence/detail/kernel.hpp"
#include "prevalence/errors.hpp"
#include "prevalence/inference.hpp"

namespace prevalence {

namespace {

constexpr int kOrder = 16;
constexpr double kTailMass = 1e-15;

struct Node {
  double x;
  double log_weight;  // ln(quadrature weight * beta density)
};

// Smallest x with I_x >= probability (probability <= 1/2), or largest x
// with 1 - I_x >= probability when upper is set. Bisection is plenty for an
// oracle.
double tail_quantile(const ShapePair& p, double probability, bool upper) {
  const double target = std::log(probability);
  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-17; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (!upper) {
      (log_regularized_inc_beta(mid, p) < target ? lo : hi) = mid;
    } else {
      (log_regularized_inc_beta_upper(mid, p) < target ? hi : lo) = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Panel edges covering the effective support: half spaced uniformly, half at
// equal-probability quantiles, so both the bulk and the tails are resolved.
std::vector<double> panel_edges(const ShapePair& p, int panels_each) {
  const double lo = tail_quantile(p, kTailMass, false);
  const double hi = tail_quantile(p, kTailMass, true);
  std::vector<double> edges;
  for (int i = 0; i <= panels_each; ++i) {
    edges.push_back(lo + (hi - lo) * i / panels_each);
  }
  for (int i = 1; i < panels_each; ++i) {
    const double prob = static_cast<double>(i) / panels_each;
    edges.push_back(prob <= 0.5 ? tail_quantile(p, prob, false)
                                : tail_quantile(p, 1.0 - prob, true));
  }
  std::sort(edges.begin(), edges.end());
  std::vector<double> unique;
  for (double e : edges) {
    if (e < lo || e > hi) continue;
    if (unique.empty() || e - unique.back() > 1e-12 * (hi - lo)) unique.push_back(e);
  }
  return unique;
}

void append_nodes(std::vector<Node>& out, double a, double b, const ShapePair& density) {
  const auto& rule = detail::GaussLegendre<kOrder>::get();
  const double half = 0.5 * (b - a);
  if (!(half > 0.0)) return;
  for (int i = 0; i < kOrder; ++i) {
    const double x = a + half * (1.0 + rule.nodes[i]);
    const double log_pdf = beta_log_pdf(x, density);
    if (std::isfinite(log_pdf)) out.push_back({x, std::log(half * rule.weights[i]) + log_pdf});
  }
}

struct Pair {
  double u;
  double width;  // v - u
  double log_weight;
};

}  // namespace

PosteriorGrid quadrature_posterior(const SurveyCounts& survey, const CalibrationCounts& cal,
                                   const PriorSet& priors, std::int64_t grid_m,
                                   int quad_points) {
  survey.validate();
  if (quad_points < 200) throw DomainError("quad_points ≥ 200 violated");
  if (grid_m < 1) throw DomainError("grid_m ≥ 1 violated");
  const auto [post_u, post_v] = calibration_posterior(cal, priors);
  const ShapePair shapes = survey.likelihood_shapes();
  const int panels_each = (quad_points + 2 * kOrder - 1) / (2 * kOrder);

  const std::vector<double> u_edges = panel_edges(post_u, panels_each);
  const std::vector<double> v_edges = panel_edges(post_v, panels_each);

  std::vector<Node> v_nodes;
  for (std::size_t i = 0; i + 1 < v_edges.size(); ++i) {
    append_nodes(v_nodes, v_edges[i], v_edges[i + 1], post_v);
  }

  std::vector<Pair> pairs;
  std::vector<Node> u_nodes;
  for (const Node& vn : v_nodes) {
    // Inner integral over u in [support start, v).
    u_nodes.clear();
    for (std::size_t i = 0; i + 1 < u_edges.size() && u_edges[i] < vn.x; ++i) {
      append_nodes(u_nodes, u_edges[i], std::min(u_edges[i + 1], vn.x), post_u);
    }
    for (const Node& un : u_nodes) {
      if (!(un.x < vn.x)) continue;
      const double width = vn.x - un.x;
      const double log_d = std::log(width) - log_stable_inc_beta_diff(un.x, vn.x, shapes);
      pairs.push_back({un.x, width, vn.log_weight + un.log_weight + log_d});
    }
  }
  if (pairs.empty()) throw VanishingMassError("calibration posteriors leave no mass with u < v");

  const detail::BinomialKernel kernel(survey.k, survey.n);
  std::vector<double> log_density(static_cast<std::size_t>(grid_m) + 1);
  std::vector<double> terms(pairs.size());
  for (std::int64_t j = 0; j <= grid_m; ++j) {
    const double theta = static_cast<double>(j) / static_cast<double>(grid_m);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      terms[i] = pairs[i].log_weight + kernel(pairs[i].u + theta * pairs[i].width);
    }
    log_density[j] = log_mean_exp(terms);
  }
  return normalize_log(log_density);
}

}  // namespace prevalence
