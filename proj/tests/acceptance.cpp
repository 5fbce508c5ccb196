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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <json.hpp>

#include "command.hpp"
#include "fixtures.hpp"
#include "golden.hpp"
#include "oracles.hpp"
#include "prevalence/errors.hpp"
#include "prevalence/inference.hpp"
#include "prevalence/pipeline.hpp"
#include "prevalence/service.hpp"

namespace prevalence {
namespace {

using nlohmann::json;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

RunSpec santa_clara_spec() {
  RunSpec spec;
  spec.survey = fixture::kSantaClara;
  spec.calibration = fixture::kSantaClaraCal;
  spec.reweight = fixture::kSantaClaraReweight;
  return spec;
}

Verdict reproduce(RunSpec spec, double median, double low, double high, double budget_s) {
  const auto start = std::chrono::steady_clock::now();
  const ScenarioResult r = run_scenario(spec);
  const double elapsed = seconds_since(start);
  const auto& s = r.summary;
  const bool pass = std::abs(s.median - median) <= 0.0020 && std::abs(s.ci_low - low) <= 0.0030 &&
                    std::abs(s.ci_high - high) <= 0.0030 && elapsed < budget_s;
  return {pass, fmt("median %.3f%% CI [%.3f%%, %.3f%%] (target %.2f%% [%.2f%%, %.2f%%]), %.1f s",
                    100 * s.median, 100 * s.ci_low, 100 * s.ci_high, 100 * median, 100 * low,
                    100 * high, elapsed)};
}

Verdict santa_clara_uniform() { return reproduce(santa_clara_spec(), 0.0189, 0.0009, 0.0351, 10.0); }

Verdict santa_clara_informative() {
  RunSpec spec = santa_clara_spec();
  spec.priors.beta_u = 99.0;
  return reproduce(spec, 0.0217, 0.0027, 0.0363, 10.0);
}

Verdict bimodality() {
  const PosteriorGrid g =
      ppp_posterior(fixture::kSantaClara, fixture::kSantaClaraCal, {}, McConfig{});
  const auto& p = g.densities;
  // A dip below p_0 within 0.5% prevalence, then an interior local maximum.
  std::int64_t dip = -1;
  for (std::int64_t j = 1; j < g.grid_m && g.theta(j) < 0.005; ++j) {
    if (p[j] < p[0] && p[j] <= p[j - 1] && p[j] <= p[j + 1]) {
      dip = j;
      break;
    }
  }
  std::int64_t peak = -1;
  for (std::int64_t j = std::max<std::int64_t>(dip, 1); dip > 0 && j < g.grid_m; ++j) {
    if (p[j] >= p[j - 1] && p[j] > p[j + 1]) {
      peak = j;
      break;
    }
  }
  return {dip > 0 && peak > dip,
          fmt("p(0)=%.2f, local min %.2f at theta=%.4f, local max %.2f at theta=%.4f", p[0],
              dip > 0 ? p[dip] : NAN, dip > 0 ? g.theta(dip) : NAN, peak > 0 ? p[peak] : NAN,
              peak > 0 ? g.theta(peak) : NAN)};
}

Verdict oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  constexpr std::int64_t kGrid = 2000;
  McConfig mc;
  mc.n_samples = 100000;
  mc.grid_m = kGrid;
  std::vector<double> mean(kGrid + 1, 0.0);
  for (std::uint64_t seed : {1, 2, 3}) {
    mc.seed = seed;
    const PosteriorGrid g = ppp_posterior(fixture::kSantaClara, fixture::kSantaClaraCal, {}, mc);
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += g.densities[j] / 3.0;
  }
  const PosteriorGrid quad =
      quadrature_posterior(fixture::kSantaClara, fixture::kSantaClaraCal, {}, kGrid, 200);
  const double err = fixture::sup_relative_error(mean, quad.densities);
  const double elapsed = seconds_since(start);
  return {err < 0.02 && elapsed < 60.0,
          fmt("sup relative error %.3f%% where density > 1e-3 max (limit 2%%), %.1f s", 100 * err,
              elapsed)};
}

Verdict closed_form_reductions() {
  std::mt19937_64 gen(20200417);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::int64_t n = std::uniform_int_distribution<std::int64_t>(1, 500)(gen);
    const std::int64_t k = std::uniform_int_distribution<std::int64_t>(0, n)(gen);
    const std::vector<double> want = oracle::grid_normalize(fixture::beta_grid_log(k, n, 1000));
    const PosteriorGrid got = posterior_known_grid({k, n}, {0.0, 1.0}, 1000);
    for (std::size_t j = 0; j < want.size(); ++j) {
      if (want[j] > 1e-290) worst = std::max(worst, std::abs(got.densities[j] / want[j] - 1.0));
    }
  }
  McConfig mc;
  mc.grid_m = 1000;
  const PosteriorGrid ppp = ppp_posterior({5, 10}, {0, 1000000, 1000000, 1000000}, {}, mc);
  const PosteriorGrid known = posterior_known_grid({5, 10}, {0.0, 1.0}, mc.grid_m);
  const double degenerate = fixture::sup_relative_error(ppp.densities, known.densities);
  return {worst < 1e-9 && degenerate < 0.01,
          fmt("perfect test vs Beta(k+1, n-k+1): max relative %.2e (limit 1e-9); near-perfect "
              "calibration vs Beta(6,6): sup relative %.3f%% (limit 1%%)",
              worst, 100 * degenerate)};
}

Verdict convergence() {
  constexpr std::int64_t kGrid = 1000;
  const PosteriorGrid quad =
      quadrature_posterior(fixture::kSantaClara, fixture::kSantaClaraCal, {}, kGrid, 200);
  struct Errors {
    double absolute;
    double relative;
  };
  auto error = [&](std::int64_t n, std::uint64_t seed) {
    McConfig mc;
    mc.n_samples = n;
    mc.grid_m = kGrid;
    mc.seed = seed;
    const PosteriorGrid g = ppp_posterior(fixture::kSantaClara, fixture::kSantaClaraCal, {}, mc);
    double absolute = 0.0;
    for (std::size_t j = 0; j < g.densities.size(); ++j) {
      absolute = std::max(absolute, std::abs(g.densities[j] - quad.densities[j]));
    }
    return Errors{absolute, fixture::sup_relative_error(g.densities, quad.densities)};
  };
  auto median = [](std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return 0.5 * (xs[xs.size() / 2 - 1] + xs[xs.size() / 2]);
  };
  std::vector<double> ratios;
  std::vector<double> tail_ratios;
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const Errors coarse = error(10000, s);
    const Errors fine = error(40000, 1000 + s);
    ratios.push_back(coarse.absolute / fine.absolute);
    tail_ratios.push_back(coarse.relative / fine.relative);
  }
  const double factor = median(ratios);
  return {factor >= 1.5 && factor <= 2.7,
          fmt("median sup-norm error ratio N=1e4 / N=4e4 over 10 seeds %.2f (range %.2f..%.2f; "
              "limit [1.5, 2.7]); relative error above 1e-3 of max: median ratio %.2f",
              factor, *std::min_element(ratios.begin(), ratios.end()),
              *std::max_element(ratios.begin(), ratios.end()), median(tail_ratios))};
}

Verdict special_functions() {
  std::mt19937_64 gen(51);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::log(lo) + unit(gen) * (std::log(hi) - std::log(lo)));
  };

  double reflection = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ShapePair p(log_uniform(0.1, 1e5), log_uniform(0.1, 1e5));
    double x = unit(gen);
    if (i % 2 == 0) x = std::clamp(p.mean() + (x - 0.5) * 8.0 * std::sqrt(p.variance()), 0.0, 1.0);
    // Keep 1 - x exact.
    x = std::ldexp(std::round(std::ldexp(x, 53)), -53);
    reflection = std::max(
        reflection, std::abs(regularized_inc_beta(x, p) + regularized_inc_beta(1.0 - x, p.flipped()) - 1.0));
  }

  double additivity = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ShapePair p(log_uniform(0.3, 3281.0), log_uniform(0.3, 3281.0));
    std::array<double, 3> t{};
    for (double& x : t) {
      x = std::clamp(p.mean() + (unit(gen) - 0.5) * 10.0 * std::sqrt(p.variance()), 0.0, 1.0);
    }
    std::sort(t.begin(), t.end());
    if (!(t[0] < t[1] && t[1] < t[2])) continue;
    const double whole = log_stable_inc_beta_diff(t[0], t[2], p);
    const double left = log_stable_inc_beta_diff(t[0], t[1], p);
    const double right = log_stable_inc_beta_diff(t[1], t[2], p);
    const double top = std::max(left, right);
    additivity = std::max(
        additivity, std::abs(top + std::log(std::exp(left - top) + std::exp(right - top)) - whole));
  }

  double binomial = 0.0;
  for (int i = 0; i < 30; ++i) {
    const int a = std::uniform_int_distribution<int>(1, 60)(gen);
    const int b = std::uniform_int_distribution<int>(1, 60)(gen);
    const double x = unit(gen);
    const int m = a + b - 1;
    oracle::Big tail = 0;
    for (int j = a; j <= m; ++j) {
      tail += boost::math::binomial_coefficient<oracle::Big>(m, j) * pow(oracle::Big(x), j) *
              pow(1 - oracle::Big(x), m - j);
    }
    binomial = std::max(binomial, std::abs(regularized_inc_beta(x, {double(a), double(b)}) -
                                           static_cast<double>(tail)));
  }

  double density = 0.0;
  for (int i = 0; i < 10; ++i) {
    const ShapePair p(log_uniform(1.0, 1e3), log_uniform(1.0, 1e3));
    double sum = 0.0;
    for (int j = 0; j < 100000; ++j) sum += std::exp(beta_log_pdf((j + 0.5) / 100000, p));
    density = std::max(density, std::abs(sum / 100000 - 1.0));
  }

  // Stable differences against extended-precision quadrature. The interval
  // endpoints are drawn as quantiles so that each case carries real mass.
  double diff = 0.0;
  for (int i = 0; i < 100; ++i) {
    double a = log_uniform(1.0, 3281.0);
    double b = log_uniform(1.0, 51.0);
    if (i == 0) a = 3281.0, b = 51.0;
    if (i % 2 == 1) std::swap(a, b);
    double pu = unit(gen);
    double pv = unit(gen);
    if (pu > pv) std::swap(pu, pv);
    if (i % 4 == 3) pv = std::min(1.0, pu + 1e-4 * unit(gen));
    const double u = boost::math::ibeta_inv(a, b, pu);
    const double v = boost::math::ibeta_inv(a, b, pv);
    if (!(u < v)) continue;
    const double want = oracle::log_inc_beta_diff(u, v, a, b);
    diff = std::max(diff, std::abs(std::expm1(log_stable_inc_beta_diff(u, v, {a, b}) - want)));
  }

  const bool pass = reflection <= 1e-12 && additivity <= 1e-9 && binomial <= 1e-13 &&
                    density <= 1e-4 && diff <= 1e-8;
  return {pass, fmt("reflection %.1e (1e-12), additivity %.1e (1e-9), binomial tail %.1e, "
                    "density integral %.1e (1e-4), stable difference vs oracle %.1e (1e-8)",
                    reflection, additivity, binomial, density, diff)};
}

Verdict delta_point() {
  const DeltaResult d = delta_baseline(fixture::kSantaClara, fixture::kSantaClaraCal);
  return {std::abs(d.point - 0.011948) <= 1e-6,
          fmt("point %.7f (target 0.011948 +- 1e-6), 95%% CI [%.5f, %.5f]", d.point, d.ci_low,
              d.ci_high)};
}

Verdict determinism_and_format() {
  const std::string args =
      "--k 50 --n 3330 --ku 2 --nu 401 --kv 103 --nv 122 --samples 10000 --grid 10000 --seed 1 "
      "--reweight 1.88 --level 0.95";
  const auto csv1 = command::run_cli(args + " --format csv");
  const auto csv2 = command::run_cli(args + " --format csv");
  const auto json1 = command::run_cli(args + " --format json");
  const auto json2 = command::run_cli(args + " --format json");
  const bool bytes = csv1.exit_code == 0 && json1.exit_code == 0 && csv1.out == csv2.out &&
                     golden::mask_runtime(json1.out) == golden::mask_runtime(json2.out);

  const auto gcsv = command::run_cli(golden::kCsvArgs);
  const auto gjson = command::run_cli(golden::kJsonArgs);
  const std::string csv_diff =
      golden::csv_mismatch(gcsv.out, command::slurp(golden::path("oracle_small.csv")));
  const std::string json_diff = golden::json_mismatch(
      json::parse(gjson.out), json::parse(command::slurp(golden::path("ppp_small.json"))));

  json body = {{"survey", {{"k", 50}, {"n", 3330}}},
               {"calibration", {{"k_u", 2}, {"n_u", 401}, {"k_v", 103}, {"n_v", 122}}},
               {"mc", {{"samples", 10000}, {"grid", 10000}, {"seed", 1}}},
               {"reweight", 1.88},
               {"level", 0.95}};
  const HttpReply reply = handle_posterior(body.dump());
  const json service = json::parse(reply.body)["scenarios"][0]["summary"];
  const json cli = json::parse(json1.out)["summary"];
  const bool same = reply.status == 200 && service == cli;

  return {bytes && csv_diff.empty() && json_diff.empty() && same,
          fmt("byte-identical reruns %s; golden csv %s, json %s; service summary %s CLI summary",
              bytes ? "yes" : "NO", csv_diff.empty() ? "ok" : csv_diff.c_str(),
              json_diff.empty() ? "ok" : json_diff.c_str(), same ? "equals" : "DIFFERS from")};
}

}  // namespace
}  // namespace prevalence

int main() {
  using namespace prevalence;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"santa-clara-uniform-prior", santa_clara_uniform},
      {"santa-clara-informative-prior", santa_clara_informative},
      {"bimodality", bimodality},
      {"oracle-equivalence", oracle_equivalence},
      {"closed-form-reductions", closed_form_reductions},
      {"monte-carlo-convergence", convergence},
      {"special-functions", special_functions},
      {"delta-baseline", delta_point},
      {"determinism-and-format", determinism_and_format},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
