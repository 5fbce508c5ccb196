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

#include "prevalence/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "prevalence/detail/gauss_legendre.hpp"
#include "prevalence/errors.hpp"

namespace prevalence {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLnSqrt2Pi = 0.918938533204672741780329736406;  // ln sqrt(2 pi)

// Below this shape the plain lgamma expression is used.
constexpr double kStirlingMin = 10.0;

// A subtraction A - B with B / A above this ratio is replaced by direct
// integration of the density.
constexpr double kCancellationRatio = 0.9;

constexpr int kMaxContinuedFractionTerms = 200000;

// lgamma(x) - [(x - 1/2) ln x - x + ln sqrt(2 pi)] for x >= 10.
double stirling_correction(double x) {
  static constexpr std::array<double, 8> kCoef = {
      1.0 / 12.0,           -1.0 / 360.0,  1.0 / 1260.0, -1.0 / 1680.0,
      1.0 / 1188.0,         -691.0 / 360360.0,
      1.0 / 156.0,          -3617.0 / 122400.0};
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double sum = 0.0;
  for (int i = static_cast<int>(kCoef.size()) - 1; i >= 0; --i) sum = sum * inv2 + kCoef[i];
  return sum * inv;
}

// t - ln(1 + t) for t > -1, without cancellation near 0.
double rlog1(double t) {
  if (std::abs(t) > 0.25) return t - std::log1p(t);
  double term = t * t;
  double sum = 0.0;
  for (int k = 2; k < 60; ++k) {
    const double contrib = term / k;
    sum += (k % 2 == 0) ? contrib : -contrib;
    if (std::abs(contrib) < 1e-18 * std::abs(sum)) break;
    term *= t;
  }
  return sum;
}

void check_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 1], got " + std::to_string(x));
  }
}

// Continued fraction for I_x(a, b) (modified Lentz), such that
// I_x(a, b) = x^a (1 - x)^b / (a B(a, b)) * cf. Converges fast for
// x < (a + 1) / (a + b + 2).
double inc_beta_continued_fraction(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxContinuedFractionTerms; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

struct Tails {
  double lower;
  double upper;
  double log_lower;
  double log_upper;
};

// Both tails of I_x(a, b); the one on the near side of the split point is
// evaluated directly, the other as its complement.
Tails tails(double x, const ShapePair& p) {
  check_unit_interval(x, "x");
  if (x == 0.0) return {0.0, 1.0, -kInf, 0.0};
  if (x == 1.0) return {1.0, 0.0, 0.0, -kInf};
  const double a = p.a();
  const double b = p.b();
  const double split = (a + 1.0) / (a + b + 2.0);
  if (x < split) {
    const double log_lower = log_beta_power_terms(x, p) +
                             std::log(inc_beta_continued_fraction(x, a, b) / a);
    const double lower = std::exp(log_lower);
    return {lower, -std::expm1(log_lower), log_lower, std::log1p(-lower)};
  }
  const double y = 1.0 - x;
  const double log_upper = log_beta_power_terms(y, p.flipped()) +
                           std::log(inc_beta_continued_fraction(y, b, a) / b);
  const double upper = std::exp(log_upper);
  return {-std::expm1(log_upper), upper, std::log1p(-upper), log_upper};
}

// ln of the integral of the Beta(a, b) density over [u, v], by composite
// Gauss-Legendre. Only used on intervals narrow relative to the local
// density scale.
double log_integrate_density(double u, double v, const ShapePair& p) {
  constexpr int kPanels = 8;
  constexpr int kOrder = 16;
  const auto& rule = detail::GaussLegendre<kOrder>::get();
  std::array<double, kPanels * kOrder> log_f{};
  std::array<double, kPanels * kOrder> weight{};
  const double width = (v - u) / kPanels;
  double ref = -kInf;
  for (int panel = 0; panel < kPanels; ++panel) {
    const double lo = u + panel * width;
    const double half = 0.5 * width;
    for (int i = 0; i < kOrder; ++i) {
      const double t = lo + half * (1.0 + rule.nodes[i]);
      const int idx = panel * kOrder + i;
      log_f[idx] = beta_log_pdf(t, p);
      weight[idx] = half * rule.weights[i];
      ref = std::max(ref, log_f[idx]);
    }
  }
  if (ref == -kInf) return -kInf;
  double sum = 0.0;
  for (std::size_t i = 0; i < log_f.size(); ++i) sum += weight[i] * std::exp(log_f[i] - ref);
  return ref + std::log(sum);
}

}  // namespace

ShapePair::ShapePair(double a, double b) : a_(a), b_(b) {
  if (!(std::isfinite(a) && a > 0.0) || !(std::isfinite(b) && b > 0.0)) {
    throw DomainError("beta shapes must be finite and positive, got (" + std::to_string(a) +
                      ", " + std::to_string(b) + ")");
  }
}

double ShapePair::variance() const {
  const double s = a_ + b_;
  return a_ * b_ / (s * s * (s + 1.0));
}

double log_complete_beta(const ShapePair& shapes) {
  const double p = std::min(shapes.a(), shapes.b());
  const double q = std::max(shapes.a(), shapes.b());
  const double s = p + q;
  if (p >= kStirlingMin) {
    const double corr = stirling_correction(p) + stirling_correction(q) - stirling_correction(s);
    return -0.5 * std::log(q) + kLnSqrt2Pi + corr + (p - 0.5) * std::log(p / s) +
           q * std::log1p(-p / s);
  }
  if (q >= kStirlingMin) {
    const double corr = stirling_correction(q) - stirling_correction(s);
    return std::lgamma(p) + corr + p - p * std::log(s) + (q - 0.5) * std::log1p(-p / s);
  }
  return std::lgamma(p) + std::lgamma(q) - std::lgamma(s);
}

double log_beta_power_terms(double x, const ShapePair& p) {
  const double a = p.a();
  const double b = p.b();
  if (a >= kStirlingMin && b >= kStirlingMin) {
    // a ln(x/x0) + b ln(y/y0) = -a rlog1(x/x0 - 1) - b rlog1(y/y0 - 1), the
    // linear terms cancelling exactly.
    const double s = a + b;
    const double x0 = a / s;
    const double y0 = b / s;
    const double y = 1.0 - x;
    const double t1 = (x - x0) / x0;
    const double t2 = (y - y0) / y0;
    const double corr = stirling_correction(a) + stirling_correction(b) - stirling_correction(s);
    return -a * rlog1(t1) - b * rlog1(t2) +
           0.5 * (std::log(a) + std::log(b) - std::log(s)) - kLnSqrt2Pi - corr;
  }
  return a * std::log(x) + b * std::log1p(-x) - log_complete_beta(p);
}

double regularized_inc_beta(double x, const ShapePair& p) {
  const Tails t = tails(x, p);
  return t.lower;
}

double log_regularized_inc_beta(double x, const ShapePair& p) { return tails(x, p).log_lower; }

double log_regularized_inc_beta_upper(double x, const ShapePair& p) {
  return tails(x, p).log_upper;
}

double log_stable_inc_beta_diff(double u, double v, const ShapePair& p) {
  check_unit_interval(u, "u");
  check_unit_interval(v, "v");
  if (!(u < v)) {
    throw DomainError("incomplete beta difference requires u < v, got u=" + std::to_string(u) +
                      " v=" + std::to_string(v));
  }
  const Tails tu = tails(u, p);
  const Tails tv = tails(v, p);
  double log_regularized = 0.0;
  if (tu.lower >= 0.5) {
    // Both above the median: B(1 - u; b, a) - B(1 - v; b, a).
    const double ratio = std::exp(tv.log_upper - tu.log_upper);
    if (ratio > kCancellationRatio) return log_integrate_density(u, v, p) + log_complete_beta(p);
    log_regularized = tu.log_upper + std::log1p(-ratio);
  } else if (tv.lower <= 0.5) {
    const double ratio = std::exp(tu.log_lower - tv.log_lower);
    if (ratio > kCancellationRatio) return log_integrate_density(u, v, p) + log_complete_beta(p);
    log_regularized = tv.log_lower + std::log1p(-ratio);
  } else {
    const double outer = tu.lower + tv.upper;
    if (outer > kCancellationRatio) return log_integrate_density(u, v, p) + log_complete_beta(p);
    log_regularized = std::log1p(-outer);
  }
  return log_regularized + log_complete_beta(p);
}

double stable_inc_beta_diff(double u, double v, const ShapePair& p) {
  const double value = std::exp(log_stable_inc_beta_diff(u, v, p));
  if (!(value > 0.0)) {
    throw VanishingMassError("incomplete beta difference underflows on [" + std::to_string(u) +
                             ", " + std::to_string(v) + "]");
  }
  return value;
}

double beta_log_pdf(double x, const ShapePair& p) {
  check_unit_interval(x, "x");
  const double a = p.a();
  const double b = p.b();
  if (x == 0.0 || x == 1.0) {
    const double shape = (x == 0.0) ? a : b;
    if (shape > 1.0) return -kInf;
    if (shape < 1.0) return kInf;
    // Density at the endpoint is 1 / B(a, b) when the other factor is 1.
    return -log_complete_beta(p);
  }
  return log_beta_power_terms(x, p) - std::log(x) - std::log1p(-x);
}

double log_mean_exp(std::span<const double> values) {
  if (values.empty()) throw DomainError("log_mean_exp requires a nonempty sequence");
  const double top = *std::max_element(values.begin(), values.end());
  if (top == -kInf || top == kInf) return top;
  double sum = 0.0;
  for (double value : values) sum += std::exp(value - top);
  return top + (std::log(sum) - std::log(static_cast<double>(values.size())));
}

}  // namespace prevalence
