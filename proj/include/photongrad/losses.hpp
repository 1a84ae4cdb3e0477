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

#ifndef PHOTONGRAD_LOSSES_HPP
#define PHOTONGRAD_LOSSES_HPP

#include <string>
#include <vector>

#include "photongrad/gradients.hpp"
#include "photongrad/sampling.hpp"

namespace photongrad {

/// D_KL(Q||T) = Σ_x Q(x) log(Q(x)/T(x)) with 0·log 0 = 0. Probabilities
/// below 1e-12 are clamped inside the logarithm; a target zero under
/// Q > 0 is reported as an error.
double kl_loss(const std::vector<double>& q, const std::vector<double>& target);

/// Gaussian-mixture kernel k(x,y) = (1/c) Σ_i exp(-(x-y)²/(2σ_i)) over
/// integer outcome indices.
double gaussian_mixture_kernel(double x, double y, const std::vector<double>& sigmas);

/// MMD²(Q,T) = Σ_{x,y} k(x,y) [Q(x)Q(y) + T(x)T(y) - 2 Q(x)T(y)].
double mmd_loss(const std::vector<double>& q, const std::vector<double>& target,
                const std::vector<double>& sigmas);

/// PSR derivative of the output distribution, per outcome:
/// ∂Q(x) = Σ_p c_p Q_{θ+θ_p}(x) (one rule per occurrence, chain rule).
struct DistributionDerivative {
    std::vector<double> dq;
    long long evaluations = 0;
    long long shots = 0;
};

DistributionDerivative distribution_psr_derivative(
    const ParamCircuit& circuit, const Eigen::VectorXd& theta, const FockState& input,
    const std::string& param, const NoiseModel& noise, EvalContext& ctx,
    bool use_light_cone = true, const DeskCaps& caps = {});

/// ∂/∂θ of D_KL(Q_θ || T) through the PSR on each outcome probability:
/// Σ_x ∂Q(x)·(1 + log(Q_θ(x)/T(x))). Outcomes with Q_θ(x) = 0 contribute 0.
GradientResult kl_gradient_psr(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                               const FockState& input,
                               const std::vector<double>& target,
                               const std::string& param, const NoiseModel& noise,
                               EvalContext& ctx, bool use_light_cone = true,
                               const DeskCaps& caps = {});

/// ∂/∂θ of MMD²(Q_θ, T): 2 Σ_p c_p (E_{x~Q_p, y~Q_θ}[k] - E_{x~Q_p, y~T}[k]).
/// In sampling mode both expectations are V-statistics over empirical
/// distributions.
GradientResult mmd_gradient_psr(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                                const FockState& input,
                                const std::vector<double>& target,
                                const std::vector<double>& sigmas,
                                const std::string& param, const NoiseModel& noise,
                                EvalContext& ctx, bool use_light_cone = true,
                                const DeskCaps& caps = {});

/// Full-gradient variants sharing the single unshifted distribution across
/// all parameters; `loss` is the loss at θ from that shared measurement.
struct LossGradient {
    double loss = 0.0;
    Eigen::VectorXd grad;
    long long evaluations = 0;
    long long shots = 0;
};

LossGradient kl_gradient_psr_all(const ParamCircuit& circuit,
                                 const Eigen::VectorXd& theta, const FockState& input,
                                 const std::vector<double>& target,
                                 const NoiseModel& noise, EvalContext& ctx,
                                 bool use_light_cone = true, const DeskCaps& caps = {});

LossGradient mmd_gradient_psr_all(const ParamCircuit& circuit,
                                  const Eigen::VectorXd& theta, const FockState& input,
                                  const std::vector<double>& target,
                                  const std::vector<double>& sigmas,
                                  const NoiseModel& noise, EvalContext& ctx,
                                  bool use_light_cone = true, const DeskCaps& caps = {});

}  // namespace photongrad

#endif
