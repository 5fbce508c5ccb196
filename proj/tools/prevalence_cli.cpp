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

// prevalence: posterior prevalence density from an imperfect test.
//
// Exit status: 0 success, 2 invalid arguments, 3 the posterior could not be
// computed (vanishing mass, rejection budget, support overflow).

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "prevalence/errors.hpp"
#include "prevalence/pipeline.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitComputation = 3;

void append_number(std::string& out, double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  out.append(buf, res.ptr);
}

std::string density_csv(const prevalence::PosteriorGrid& grid) {
  std::string out = "theta,density\n";
  out.reserve(out.size() + grid.densities.size() * 32);
  for (std::int64_t j = 0; j <= grid.grid_m; ++j) {
    append_number(out, grid.theta(j));
    out.push_back(',');
    append_number(out, grid.densities[j]);
    out.push_back('\n');
  }
  return out;
}

std::string percent_bps(double fraction) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f%% (%.0f bps)", 100.0 * fraction, 10000.0 * fraction);
  return buf;
}

// Human-readable report; prevalence in percent and basis points.
std::string text_report(const prevalence::ScenarioResult& r) {
  std::ostringstream os;
  const auto& s = r.summary;
  os << "median " << percent_bps(s.median) << ", mean " << percent_bps(s.mean) << "\n"
     << static_cast<int>(s.level * 100.0 + 0.5) << "% CI " << percent_bps(s.ci_low) << " -- "
     << percent_bps(s.ci_high) << "\n";
  if (r.delta) {
    os << "delta method " << percent_bps(r.delta->point) << ", CI " << percent_bps(r.delta->ci_low)
       << " -- " << percent_bps(r.delta->ci_high) << "\n";
  } else {
    os << "delta method unavailable (estimated sensitivity <= false-positive rate)\n";
  }
  if (r.counts) {
    os << "infected " << r.counts->low << " -- " << r.counts->high << " (median "
       << r.counts->median << ")\n";
  }
  os << "method " << r.diagnostics.method << ", M " << r.diagnostics.grid_m;
  if (r.diagnostics.method == "ppp") {
    os << ", N " << r.diagnostics.n_samples << ", seed " << r.diagnostics.seed
       << ", rejection rate " << r.diagnostics.rejection_rate;
  }
  os << ", " << static_cast<long long>(r.diagnostics.runtime_ms) << " ms\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Posterior prevalence density from an imperfect diagnostic test"};
  prevalence::RunSpec spec;
  std::optional<double> reweight;
  std::optional<std::int64_t> population;
  std::string format = "json";
  std::string out_path;

  app.add_option("--k", spec.survey.k, "positive survey tests")->required();
  app.add_option("--n", spec.survey.n, "subjects tested")->required();
  app.add_option("--ku", spec.calibration.k_u, "false positives among known negatives")
      ->required();
  app.add_option("--nu", spec.calibration.n_u, "known negative samples")->required();
  app.add_option("--kv", spec.calibration.k_v, "true positives among known positives")
      ->required();
  app.add_option("--nv", spec.calibration.n_v, "known positive samples")->required();
  app.add_option("--alpha-u", spec.priors.alpha_u, "beta prior on the false-positive rate")
      ->capture_default_str();
  app.add_option("--beta-u", spec.priors.beta_u)->capture_default_str();
  app.add_option("--alpha-v", spec.priors.alpha_v, "beta prior on the sensitivity")
      ->capture_default_str();
  app.add_option("--beta-v", spec.priors.beta_v)->capture_default_str();
  app.add_option("--samples", spec.mc.n_samples, "Monte Carlo sample size N")
      ->capture_default_str();
  app.add_option("--grid", spec.mc.grid_m, "grid size M (M + 1 points)")->capture_default_str();
  app.add_option("--seed", spec.mc.seed, "random seed")->capture_default_str();
  app.add_option("--reweight", reweight, "rescale prevalence by this factor");
  app.add_option("--population", population, "population size for infected counts");
  app.add_option("--level", spec.level, "credible level")->capture_default_str();
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--out", out_path, "output file (default stdout)");
  app.add_flag("--oracle", spec.oracle, "deterministic quadrature instead of Monte Carlo");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }
  spec.reweight = reweight;
  spec.population = population;

  if (const auto violations = prevalence::check(spec); !violations.empty()) {
    for (const auto& v : violations) std::cerr << "error: " << v.constraint << " violated\n";
    return kExitInvalid;
  }

  prevalence::ScenarioResult result;
  try {
    result = prevalence::run_scenario(spec);
  } catch (const prevalence::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const prevalence::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }

  std::string payload;
  if (format == "csv") {
    payload = density_csv(result.grid);
    std::cerr << text_report(result);
  } else {
    payload = prevalence::to_json(result).dump(2) + "\n";
  }

  if (out_path.empty()) {
    std::cout << payload;
    std::cout.flush();
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << payload;
    if (!out) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 1;
    }
  }
  return 0;
}
