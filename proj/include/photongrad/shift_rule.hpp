/*
 * Copyright 2026 The photongrad authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PHOTONGRAD_SHIFT_RULE_HPP
#define PHOTONGRAD_SHIFT_RULE_HPP

#include <string>
#include <vector>

#include <json.hpp>

namespace photongrad {

/// A photonic parameter-shift rule for photon bound n: evaluation angles
/// θ_p and real coefficients c_p with Σ_p c_p e^{ijθ_p} = ij for every
/// integer j in [-n, n]. Differentiates any trigonometric polynomial of
/// degree ≤ n exactly: ∂f(θ) = Σ_p c_p f(θ + θ_p).
struct ShiftRule {
    int photon_bound = 0;
    std::vector<double> angles;
    std::vector<double> coefficients;

    std::size_t evaluation_count() const { return angles.size(); }
    double sum_abs_coefficients() const;

    /// Max residual of the coefficient system over j in [-n, n].
    double max_residual() const;

    nlohmann::json to_json() const;  // {n, angles: [...], coefficients: [...]}
};

/// Canonical rule: P = 2n evaluations at θ_p = 2πp/(2n+1); coefficients are
/// the inverse DFT of i(0,1,...,n,-n,...,-1)ᵀ (c_0 = 0 discarded), which
/// reduces to c_p = (-1)^{p+1} / (2 sin(πp/(2n+1))). Real and antisymmetric:
/// c_{2n+1-p} = -c_p. For n = 0 the gradient vanishes identically and the
/// rule is empty.
ShiftRule canonical_shift_rule(int photon_bound);

/// Rule with caller-chosen angles: minimum-norm least-squares solution of
/// the coefficient system. Throws (reporting the residual achieved) when the
/// angle set cannot satisfy the system to 1e-9, e.g. fewer than 2n angles.
ShiftRule general_shift_rule(int photon_bound, const std::vector<double>& angles);

/// Hoeffding sample counts for one gradient estimate: target additive error
/// ε, finite-difference stepsize Δ, failure probability Λ and observable
/// bound λ. N_FD = -8λ²ln(Λ/2)/(ε²Δ²), N_PSR = -2λ²(Σ|c_p|)²ln(Λ/2)/ε²,
/// ratio N_FD/N_PSR = 4/((Σ|c_p|)²Δ²).
struct HoeffdingReport {
    int photon_bound = 0;
    double epsilon = 0.0;
    double fd_stepsize = 0.0;
    double failure_prob = 0.0;
    double lambda = 0.0;
    double sum_abs_coefficients = 0.0;
    double n_psr = 0.0;
    double n_fd = 0.0;
    double ratio = 0.0;

    nlohmann::json to_json() const;
    static std::string csv_header();
    std::string csv_row() const;
};

HoeffdingReport hoeffding_report(int photon_bound, double epsilon, double fd_stepsize,
                                 double failure_prob, double lambda);

/// Table of (n, (Σ|c_p|)²) for n = 1..n_max plus the exponent α of a
/// log-log least-squares fit over the window [fit_from, fit_to]
/// (defaults to the full table).
struct ScalingTable {
    std::vector<int> n;
    std::vector<double> sum_abs;
    std::vector<double> sum_abs_sq;
    int fit_from = 1;
    int fit_to = 1;
    double alpha = 0.0;
    double log_prefactor = 0.0;
};

ScalingTable coefficient_norm_scaling(int n_max, int fit_from = 1, int fit_to = 0);

}  // namespace photongrad

#endif
