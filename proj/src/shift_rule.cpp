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

#include "photongrad/shift_rule.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "photongrad/tolerances.hpp"

namespace photongrad {

namespace {
constexpr int kMaxRuleBound = 100000;  // trigonometry only; no Fock space involved
}

double ShiftRule::sum_abs_coefficients() const {
    double s = 0.0;
    for (double c : coefficients) s += std::abs(c);
    return s;
}

double ShiftRule::max_residual() const {
    const int n = photon_bound;
    double worst = 0.0;
    for (int j = -n; j <= n; ++j) {
        std::complex<double> lhs{0.0, 0.0};
        for (std::size_t p = 0; p < angles.size(); ++p) {
            lhs += coefficients[p] *
                   std::exp(std::complex<double>(0.0, j * angles[p]));
        }
        worst = std::max(worst, std::abs(lhs - std::complex<double>(0.0, j)));
    }
    return worst;
}

nlohmann::json ShiftRule::to_json() const {
    return {{"n", photon_bound}, {"angles", angles}, {"coefficients", coefficients}};
}

ShiftRule canonical_shift_rule(int photon_bound) {
    if (photon_bound < 0)
        throw std::invalid_argument("canonical_shift_rule: photon bound must be >= 0");
    if (photon_bound > kMaxRuleBound)
        throw std::invalid_argument("canonical_shift_rule: photon bound exceeds cap");

    ShiftRule rule;
    rule.photon_bound = photon_bound;
    if (photon_bound == 0) return rule;  // derivative identically zero

    const int n = photon_bound;
    const int period = 2 * n + 1;
    rule.angles.resize(static_cast<std::size_t>(2 * n));
    rule.coefficients.resize(static_cast<std::size_t>(2 * n));
    for (int p = 1; p <= 2 * n; ++p)
        rule.angles[static_cast<std::size_t>(p - 1)] =
            2.0 * std::numbers::pi * p / period;
    // Mirror the first half so antisymmetry c_{2n+1-p} = -c_p is exact.
    for (int p = 1; p <= n; ++p) {
        const double c = ((p % 2) ? 1.0 : -1.0) /
                         (2.0 * std::sin(std::numbers::pi * p / period));
        rule.coefficients[static_cast<std::size_t>(p - 1)] = c;
        rule.coefficients[static_cast<std::size_t>(2 * n - p)] = -c;
    }
    return rule;
}

ShiftRule general_shift_rule(int photon_bound, const std::vector<double>& angles) {
    if (photon_bound < 1)
        throw std::invalid_argument("general_shift_rule: photon bound must be >= 1");
    if (angles.empty())
        throw std::invalid_argument("general_shift_rule: empty angle set");

    const int n = photon_bound;
    const int p_count = static_cast<int>(angles.size());

    // Real form of the system: Σ_p cos(jθ_p) c_p = 0 and Σ_p sin(jθ_p) c_p = j
    // for j = 0..n (the j = 0 sine row is trivial; negative j rows are the
    // conjugates of positive ones for real coefficients).
    Eigen::MatrixXd a(2 * n + 1, p_count);
    Eigen::VectorXd b(2 * n + 1);
    int row = 0;
    for (int j = 0; j <= n; ++j) {
        for (int p = 0; p < p_count; ++p)
            a(row, p) = std::cos(j * angles[static_cast<std::size_t>(p)]);
        b(row) = 0.0;
        ++row;
        if (j == 0) continue;
        for (int p = 0; p < p_count; ++p)
            a(row, p) = std::sin(j * angles[static_cast<std::size_t>(p)]);
        b(row) = j;
        ++row;
    }

    // Minimum-norm least squares.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    const Eigen::VectorXd c = cod.solve(b);

    ShiftRule rule;
    rule.photon_bound = n;
    rule.angles = angles;
    rule.coefficients.assign(c.data(), c.data() + c.size());
    const double residual = rule.max_residual();
    if (residual > kRuleResidualTol) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "general_shift_rule: angle set cannot satisfy the coefficient "
                      "system (residual achieved %.3e, need < %.0e)",
                      residual, kRuleResidualTol);
        throw std::runtime_error(msg);
    }
    return rule;
}

nlohmann::json HoeffdingReport::to_json() const {
    return {{"n", photon_bound},
            {"epsilon", epsilon},
            {"fd_stepsize", fd_stepsize},
            {"failure_prob", failure_prob},
            {"lambda", lambda},
            {"sum_abs_coefficients", sum_abs_coefficients},
            {"n_psr", n_psr},
            {"n_fd", n_fd},
            {"ratio", ratio}};
}

std::string HoeffdingReport::csv_header() {
    return "n,epsilon,fd_stepsize,failure_prob,lambda,sum_abs_coefficients,n_psr,n_fd,ratio";
}

std::string HoeffdingReport::csv_row() const {
    char buf[320];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                  photon_bound, epsilon, fd_stepsize, failure_prob, lambda,
                  sum_abs_coefficients, n_psr, n_fd, ratio);
    return buf;
}

namespace {
HoeffdingReport make_report(int n, double eps, double delta, double lam_prob,
                            double lambda) {
    HoeffdingReport r;
    r.photon_bound = n;
    r.epsilon = eps;
    r.fd_stepsize = delta;
    r.failure_prob = lam_prob;
    r.lambda = lambda;
    r.sum_abs_coefficients = canonical_shift_rule(n).sum_abs_coefficients();
    const double log_term = -std::log(lam_prob / 2.0);
    r.n_fd = 8.0 * lambda * lambda * log_term / (eps * eps * delta * delta);
    r.n_psr = 2.0 * lambda * lambda * r.sum_abs_coefficients * r.sum_abs_coefficients *
              log_term / (eps * eps);
    r.ratio = r.n_fd / r.n_psr;
    return r;
}
}  // namespace

HoeffdingReport hoeffding_report(int photon_bound, double epsilon, double fd_stepsize,
                                 double failure_prob, double lambda) {
    if (photon_bound < 1)
        throw std::invalid_argument("hoeffding_report: photon bound must be >= 1");
    if (epsilon <= 0.0 || fd_stepsize <= 0.0 || lambda <= 0.0)
        throw std::invalid_argument("hoeffding_report: ε, Δ and λ must be positive");
    if (failure_prob <= 0.0 || failure_prob >= 1.0)
        throw std::invalid_argument("hoeffding_report: Λ must lie in (0, 1)");
    return make_report(photon_bound, epsilon, fd_stepsize, failure_prob, lambda);
}

ScalingTable coefficient_norm_scaling(int n_max, int fit_from, int fit_to) {
    if (n_max < 1)
        throw std::invalid_argument("coefficient_norm_scaling: n_max must be >= 1");
    if (n_max > kMaxRuleBound)
        throw std::invalid_argument("coefficient_norm_scaling: n_max exceeds cap");
    if (fit_to <= 0) fit_to = n_max;
    if (fit_from < 1 || fit_to > n_max || (fit_from >= fit_to && n_max > 1) ||
        (n_max == 1 && fit_from != 1))
        throw std::invalid_argument("coefficient_norm_scaling: bad fit window");

    ScalingTable table;
    table.fit_from = fit_from;
    table.fit_to = fit_to;
    table.n.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        const double s = canonical_shift_rule(n).sum_abs_coefficients();
        table.n.push_back(n);
        table.sum_abs.push_back(s);
        table.sum_abs_sq.push_back(s * s);
    }

    // Log-log least squares over the fit window.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int n = fit_from; n <= fit_to; ++n) {
        const double x = std::log(static_cast<double>(n));
        const double y = std::log(table.sum_abs_sq[static_cast<std::size_t>(n - 1)]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    const double denom = count * sxx - sx * sx;
    if (denom > 0.0) {
        table.alpha = (count * sxy - sx * sy) / denom;
        table.log_prefactor = (sy - table.alpha * sx) / count;
    } else {
        table.alpha = 0.0;
        table.log_prefactor = count ? sy / count : 0.0;
    }
    return table;
}

}  // namespace photongrad
