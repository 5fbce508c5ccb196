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

#pragma once

#include <span>

namespace prevalence {

/// Shape parameters (a, b) of a beta distribution or incomplete beta
/// function. Both shapes are finite and strictly positive; the constructor
/// throws DomainError otherwise.
class ShapePair {
 public:
  ShapePair(double a, double b);

  double a() const { return a_; }
  double b() const { return b_; }

  /// (b, a), the shapes of the reflected variable 1 - X.
  ShapePair flipped() const { return {b_, a_}; }

  double mean() const { return a_ / (a_ + b_); }
  double variance() const;

  friend bool operator==(const ShapePair&, const ShapePair&) = default;

 private:
  double a_;
  double b_;
};

/// ln B(a, b). Accurate for shapes up to ~1e7; large shapes use a Stirling
/// remainder so that the three log-gamma terms do not cancel.
double log_complete_beta(const ShapePair& p);

/// I_x(a, b) = B(x; a, b) / B(a, b), by continued fraction with the
/// symmetry split at x = (a + 1) / (a + b + 2).
double regularized_inc_beta(double x, const ShapePair& p);

/// ln I_x(a, b) and ln(1 - I_x(a, b)); both accurate in their own tail.
double log_regularized_inc_beta(double x, const ShapePair& p);
double log_regularized_inc_beta_upper(double x, const ShapePair& p);

/// ln[B(v; a, b) - B(u; a, b)] for 0 <= u < v <= 1 (unregularized).
///
/// Both arguments above the median: the difference is taken between the
/// upper tails, B(1 - u; b, a) - B(1 - v; b, a), which are small where the
/// lower tails are indistinguishable from B(a, b). Both below: between the
/// lower tails. Straddling: the complement of the two outer tails. When the
/// subtraction would cancel more than one decimal digit the interval is
/// integrated directly instead.
double log_stable_inc_beta_diff(double u, double v, const ShapePair& p);

/// exp(log_stable_inc_beta_diff). Throws VanishingMassError if the result
/// underflows to zero.
double stable_inc_beta_diff(double u, double v, const ShapePair& p);

/// ln of the Beta(a, b) density at x in [0, 1]; -inf where the density
/// vanishes, +inf at an integrable endpoint singularity (shape < 1).
double beta_log_pdf(double x, const ShapePair& p);

/// a ln x + b ln(1 - x) - ln B(a, b) for x in (0, 1), evaluated without the
/// large cancellation between the three terms when a and b are large.
double log_beta_power_terms(double x, const ShapePair& p);

/// ln((1/N) sum exp(values)). -inf entries are allowed; an all -inf input
/// returns -inf. Throws DomainError on an empty input.
double log_mean_exp(std::span<const double> values);

}  // namespace prevalence
