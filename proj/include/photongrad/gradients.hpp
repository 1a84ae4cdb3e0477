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

#ifndef PHOTONGRAD_GRADIENTS_HPP
#define PHOTONGRAD_GRADIENTS_HPP

#include <complex>
#include <functional>
#include <string>

#include "photongrad/observable.hpp"
#include "photongrad/sampling.hpp"
#include "photongrad/shift_rule.hpp"

namespace photongrad {

struct GradientResult {
    std::string parameter;
    double value = 0.0;
    std::complex<double> complex_value{0.0, 0.0};  // meaningful on the exact dense route
    long long evaluations = 0;
    long long shots = 0;
};

/// Exact PSR gradient ∂f/∂θ = Σ_p c_p f(θ + θ_p) of an expectation value with
/// respect to one named parameter. With `use_light_cone` the rule is built
/// for the light-cone photon bound ν of each occurrence (2ν evaluations)
/// instead of the full photon number n; both give identical gradients. A
/// parameter tagging several shifters is handled by the chain rule (one PSR
/// per occurrence, shifting only that occurrence). Post-selected observables
/// are differentiated by the quotient rule on E[value·1_ret]/E[1_ret], which
/// costs one extra (unshifted) evaluation.
GradientResult psr_gradient(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                            const FockState& input, const Observable& obs,
                            const std::string& param, const NoiseModel& noise,
                            EvalContext& ctx, bool use_light_cone = true,
                            const DeskCaps& caps = {});

/// Finite-difference gradient (f(θ+Δ) - f(θ))/Δ; two independent estimations
/// per call. `central` switches to (f(θ+Δ) - f(θ-Δ))/(2Δ) for oracle
/// cross-checks.
GradientResult fd_gradient(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                           const FockState& input, const Observable& obs,
                           const std::string& param, double stepsize,
                           const NoiseModel& noise, EvalContext& ctx,
                           bool central = false, const DeskCaps& caps = {});

/// Exact-mode ground truth: evaluates the derivative through the commutator
/// form ∂f = i <ψ| e^{-i n̂_k θ} [M, n̂_k] e^{i n̂_k θ} |ψ> with dense lifted
/// matrices for the circuit halves around each occurrence of the parameter.
/// Requires a dense observable; kept independent of the shift-rule path.
GradientResult commutator_gradient_oracle(const ParamCircuit& circuit,
                                          const Eigen::VectorXd& theta,
                                          const FockState& input, const Observable& obs,
                                          const std::string& param,
                                          const DeskCaps& caps = {});

/// Full-gradient helpers used by the optimizers: one unshifted evaluation
/// (recorded as `loss`) shared across all parameters, plus the per-parameter
/// shifted evaluations.
struct ObsGradient {
    double loss = 0.0;
    Eigen::VectorXd grad;
    long long evaluations = 0;
    long long shots = 0;
};

ObsGradient psr_gradient_all(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                             const FockState& input, const Observable& obs,
                             const NoiseModel& noise, EvalContext& ctx,
                             bool use_light_cone = true, const DeskCaps& caps = {});

ObsGradient fd_gradient_all(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                            const FockState& input, const Observable& obs,
                            double stepsize, const NoiseModel& noise, EvalContext& ctx,
                            const DeskCaps& caps = {});

/// SPSA gain sequences a_k = a/(k+1+A)^α, c_k = c/(k+1)^γ with the standard
/// exponents α = 0.602, γ = 0.101.
struct SpsaGains {
    double a = 0.4;
    double c = 0.1;
    double stability = 0.0;  // A
    double alpha = 0.602;
    double gamma = 0.101;

    /// Chooses a so the first-step effective rate equals `learning_rate`.
    static SpsaGains from_learning_rate(double learning_rate, int max_iterations,
                                        double c = 0.1);

    double step_size(int iteration) const;
    double perturbation(int iteration) const;
};

/// Simultaneous ±c_k Rademacher perturbation, two loss evaluations.
Eigen::VectorXd spsa_gradient(const std::function<double(const Eigen::VectorXd&)>& loss,
                              const Eigen::VectorXd& theta, int iteration,
                              const SpsaGains& gains, RngStream& rng);

}  // namespace photongrad

#endif
