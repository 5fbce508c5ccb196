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

// End-to-end estimate shared by the CLI and the HTTP service, so that both
// front ends produce identical numbers for identical inputs.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "prevalence/inference.hpp"

namespace prevalence {

/// Raw prior shapes; kept unvalidated so that violations can be reported
/// field by field before any ShapePair is constructed.
struct PriorInputs {
  double alpha_u = 1.0;
  double beta_u = 1.0;
  double alpha_v = 1.0;
  double beta_v = 1.0;

  PriorSet to_prior_set() const;
};

struct RunSpec {
  SurveyCounts survey;
  CalibrationCounts calibration;
  PriorInputs priors;
  McConfig mc;
  std::optional<double> reweight;
  std::optional<std::int64_t> population;
  double level = 0.95;
  bool oracle = false;  // quadrature instead of Monte Carlo
  int quad_points = 200;
};

struct Violation {
  std::string field;
  std::string constraint;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Every violated input invariant, in a stable order. Empty when valid.
std::vector<Violation> check(const RunSpec& spec);

struct Diagnostics {
  double rejection_rate = 0.0;
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;
  std::int64_t n_samples = 0;
  std::int64_t grid_m = 0;
  std::string method;
};

struct ScenarioResult {
  std::string name;
  RunSpec spec;
  PosteriorGrid grid;  // after reweighting, if requested
  PosteriorSummary summary;
  std::optional<DeltaResult> delta;  // absent when the point estimates are degenerate
  std::optional<InfectedCounts> counts;
  Diagnostics diagnostics;
};

/// Runs the estimate described by spec. Throws DomainError on invalid
/// input, and VanishingMassError, RejectionBudgetError or
/// SupportOverflowError when the computation cannot produce a posterior.
ScenarioResult run_scenario(const RunSpec& spec, std::string name = "default");

/// Delta baseline on the same prevalence scale as the posterior summary.
DeltaResult scale_delta(const DeltaResult& delta, double factor);

nlohmann::json inputs_to_json(const RunSpec& spec);
nlohmann::json summary_to_json(const PosteriorSummary& summary);

/// Full record with every grid point: survey, calibration, priors, mc,
/// grid{m, densities}, summary, delta, counts, diagnostics.
nlohmann::json to_json(const ScenarioResult& result);

}  // namespace prevalence
