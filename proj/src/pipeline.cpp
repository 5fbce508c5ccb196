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

#include "prevalence/pipeline.hpp"

#include <chrono>
#include <cmath>

#include "prevalence/errors.hpp"

namespace prevalence {

PriorSet PriorInputs::to_prior_set() const {
  return {ShapePair(alpha_u, beta_u), ShapePair(alpha_v, beta_v)};
}

std::vector<Violation> check(const RunSpec& spec) {
  std::vector<Violation> out;
  auto require = [&out](bool ok, const char* field, const char* constraint) {
    if (!ok) out.push_back({field, constraint});
  };
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };

  const auto& s = spec.survey;
  require(s.n > 0, "survey.n", "survey.n > 0");
  require(s.k >= 0, "survey.k", "survey.k ≥ 0");
  require(s.k <= s.n, "survey.k", "survey.k ≤ survey.n");

  const auto& c = spec.calibration;
  require(c.n_u > 0, "calibration.n_u", "calibration.n_u > 0");
  require(c.k_u >= 0, "calibration.k_u", "calibration.k_u ≥ 0");
  require(c.k_u <= c.n_u, "calibration.k_u", "calibration.k_u ≤ calibration.n_u");
  require(c.n_v > 0, "calibration.n_v", "calibration.n_v > 0");
  require(c.k_v >= 0, "calibration.k_v", "calibration.k_v ≥ 0");
  require(c.k_v <= c.n_v, "calibration.k_v", "calibration.k_v ≤ calibration.n_v");

  const auto& p = spec.priors;
  require(positive(p.alpha_u), "priors.alpha_u", "priors.alpha_u > 0");
  require(positive(p.beta_u), "priors.beta_u", "priors.beta_u > 0");
  require(positive(p.alpha_v), "priors.alpha_v", "priors.alpha_v > 0");
  require(positive(p.beta_v), "priors.beta_v", "priors.beta_v > 0");

  require(spec.mc.n_samples >= 1, "mc.samples", "mc.samples ≥ 1");
  require(spec.mc.grid_m >= 1, "mc.grid", "mc.grid ≥ 1");
  require(spec.mc.max_rejection_iters >= 1, "mc.max_rejection_iters",
          "mc.max_rejection_iters ≥ 1");
  require(spec.level > 0.0 && spec.level < 1.0, "level", "0 < level < 1");
  if (spec.reweight) require(positive(*spec.reweight), "reweight", "reweight > 0");
  if (spec.population) require(*spec.population > 0, "population", "population > 0");
  if (spec.oracle) require(spec.quad_points >= 200, "quad_points", "quad_points ≥ 200");
  return out;
}

DeltaResult scale_delta(const DeltaResult& delta, double factor) {
  return {delta.point * factor, delta.se * factor, delta.ci_low * factor,
          delta.ci_high * factor};
}

ScenarioResult run_scenario(const RunSpec& spec, std::string name) {
  if (const auto violations = check(spec); !violations.empty()) {
    throw DomainError(violations.front().constraint + " violated");
  }
  const auto start = std::chrono::steady_clock::now();
  const PriorSet priors = spec.priors.to_prior_set();

  ScenarioResult r;
  r.name = std::move(name);
  r.spec = spec;
  r.diagnostics.seed = spec.mc.seed;
  r.diagnostics.grid_m = spec.mc.grid_m;
  if (spec.oracle) {
    r.grid = quadrature_posterior(spec.survey, spec.calibration, priors, spec.mc.grid_m,
                                  spec.quad_points);
    r.diagnostics.method = "quadrature";
  } else {
    const auto [post_u, post_v] = calibration_posterior(spec.calibration, priors);
    RngState rng(spec.mc.seed);
    const SampleSet draws = draw_uv_samples(rng, post_u, post_v, spec.survey, spec.mc);
    r.grid = ppp_posterior_from_samples(draws.samples, spec.survey, spec.mc.grid_m,
                                        spec.mc.threads);
    r.diagnostics.method = "ppp";
    r.diagnostics.rejection_rate = draws.rejection_rate();
    r.diagnostics.n_samples = spec.mc.n_samples;
  }

  const double factor = spec.reweight.value_or(1.0);
  if (spec.reweight) r.grid = reweight(r.grid, factor);
  r.summary = summarize(r.grid, spec.level);
  try {
    r.delta = scale_delta(delta_baseline(spec.survey, spec.calibration, spec.level), factor);
  } catch (const DegenerateTestError&) {
    r.delta.reset();
  }
  if (spec.population) r.counts = to_counts(r.summary, *spec.population);

  r.diagnostics.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

nlohmann::json inputs_to_json(const RunSpec& spec) {
  nlohmann::json j;
  j["survey"] = {{"k", spec.survey.k}, {"n", spec.survey.n}};
  j["calibration"] = {{"k_u", spec.calibration.k_u},
                      {"n_u", spec.calibration.n_u},
                      {"k_v", spec.calibration.k_v},
                      {"n_v", spec.calibration.n_v}};
  j["priors"] = {{"alpha_u", spec.priors.alpha_u},
                 {"beta_u", spec.priors.beta_u},
                 {"alpha_v", spec.priors.alpha_v},
                 {"beta_v", spec.priors.beta_v}};
  j["mc"] = {{"samples", spec.mc.n_samples},
             {"grid", spec.mc.grid_m},
             {"seed", spec.mc.seed},
             {"method", spec.oracle ? "quadrature" : "ppp"}};
  j["reweight"] = spec.reweight ? nlohmann::json(*spec.reweight) : nlohmann::json(nullptr);
  j["population"] =
      spec.population ? nlohmann::json(*spec.population) : nlohmann::json(nullptr);
  j["level"] = spec.level;
  return j;
}

nlohmann::json summary_to_json(const PosteriorSummary& s) {
  return {{"mean", s.mean},
          {"median", s.median},
          {"ci_low", s.ci_low},
          {"ci_high", s.ci_high},
          {"level", s.level}};
}

nlohmann::json to_json(const ScenarioResult& r) {
  nlohmann::json j = inputs_to_json(r.spec);
  j["grid"] = {{"m", r.grid.grid_m}, {"densities", r.grid.densities}};
  j["summary"] = summary_to_json(r.summary);
  if (r.delta) {
    j["delta"] = {{"point", r.delta->point},
                  {"se", r.delta->se},
                  {"ci_low", r.delta->ci_low},
                  {"ci_high", r.delta->ci_high}};
  } else {
    j["delta"] = nullptr;
  }
  if (r.counts) {
    j["counts"] = {{"low", r.counts->low},
                   {"median", r.counts->median},
                   {"high", r.counts->high},
                   {"raw_low", r.counts->raw_low},
                   {"raw_median", r.counts->raw_median},
                   {"raw_high", r.counts->raw_high}};
  } else {
    j["counts"] = nullptr;
  }
  j["diagnostics"] = {{"rejection_rate", r.diagnostics.rejection_rate},
                      {"runtime_ms", r.diagnostics.runtime_ms},
                      {"seed", r.diagnostics.seed}};
  return j;
}

}  // namespace prevalence
