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

#include "photongrad/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace photongrad {

double kl_loss(const std::vector<double>& q, const std::vector<double>& target) {
    if (q.size() != target.size())
        throw std::invalid_argument("kl_loss: distribution sizes differ");
    double sum = 0.0;
    for (std::size_t x = 0; x < q.size(); ++x) {
        if (q[x] <= 0.0) continue;  // 0·log 0 = 0
        if (target[x] < kProbFloor && q[x] > kProbFloor)
            throw std::runtime_error("kl_loss: target has a zero where Q > 0");
        sum += q[x] * std::log(std::max(q[x], kProbFloor) /
                               std::max(target[x], kProbFloor));
    }
    return sum;
}

double gaussian_mixture_kernel(double x, double y, const std::vector<double>& sigmas) {
    if (sigmas.empty())
        throw std::invalid_argument("gaussian_mixture_kernel: empty sigma list");
    const double d2 = (x - y) * (x - y);
    double k = 0.0;
    for (double s : sigmas) {
        if (s <= 0.0)
            throw std::invalid_argument("gaussian_mixture_kernel: sigma must be > 0");
        k += std::exp(-d2 / (2.0 * s));
    }
    return k / static_cast<double>(sigmas.size());
}

namespace {

// Kernel matrix over outcome indices 0..d-1.
Eigen::MatrixXd kernel_matrix(std::size_t d, const std::vector<double>& sigmas) {
    Eigen::MatrixXd k(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t x = 0; x < d; ++x) {
        for (std::size_t y = x; y < d; ++y) {
            const double v = gaussian_mixture_kernel(static_cast<double>(x),
                                                     static_cast<double>(y), sigmas);
            k(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = v;
            k(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = v;
        }
    }
    return k;
}

Eigen::VectorXd to_vec(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

double mmd_loss(const std::vector<double>& q, const std::vector<double>& target,
                const std::vector<double>& sigmas) {
    if (q.size() != target.size())
        throw std::invalid_argument("mmd_loss: distribution sizes differ");
    const Eigen::MatrixXd k = kernel_matrix(q.size(), sigmas);
    const Eigen::VectorXd qv = to_vec(q);
    const Eigen::VectorXd tv = to_vec(target);
    return qv.dot(k * qv) + tv.dot(k * tv) - 2.0 * qv.dot(k * tv);
}

DistributionDerivative distribution_psr_derivative(
    const ParamCircuit& circuit, const Eigen::VectorXd& theta, const FockState& input,
    const std::string& param, const NoiseModel& noise, EvalContext& ctx,
    bool use_light_cone, const DeskCaps& caps) {
    const auto occurrences = circuit.occurrences(param);
    const int n = input.photons();

    DistributionDerivative res;
    const auto basis = enumerate_basis(n, input.modes(), caps);
    res.dq.assign(basis->size(), 0.0);

    for (int occ : occurrences) {
        const int nu =
            use_light_cone ? light_cone_photon_bound_at(circuit, input, occ) : n;
        const ShiftRule rule = canonical_shift_rule(nu);
        for (std::size_t p = 0; p < rule.evaluation_count(); ++p) {
            const DistributionEstimate de = measure_distribution(
                circuit, theta, occ, rule.angles[p], input, noise, ctx, caps);
            res.evaluations += 1;
            res.shots += de.shots;
            for (std::size_t x = 0; x < res.dq.size(); ++x)
                res.dq[x] += rule.coefficients[p] * de.q[x];
        }
    }
    return res;
}

namespace {

double kl_contract(const std::vector<double>& dq, const std::vector<double>& q,
                   const std::vector<double>& target) {
    double grad = 0.0;
    for (std::size_t x = 0; x < q.size(); ++x) {
        if (q[x] <= kProbFloor) continue;  // clamped outcomes contribute 0
        grad += dq[x] * (1.0 + std::log(q[x] / std::max(target[x], kProbFloor)));
    }
    return grad;
}

double mmd_contract(const std::vector<double>& dq, const std::vector<double>& q,
                    const std::vector<double>& target,
                    const std::vector<double>& sigmas) {
    const Eigen::MatrixXd k = kernel_matrix(q.size(), sigmas);
    const Eigen::VectorXd dqv = to_vec(dq);
    return 2.0 * (dqv.dot(k * to_vec(q)) - dqv.dot(k * to_vec(target)));
}

}  // namespace

GradientResult kl_gradient_psr(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                               const FockState& input,
                               const std::vector<double>& target,
                               const std::string& param, const NoiseModel& noise,
                               EvalContext& ctx, bool use_light_cone,
                               const DeskCaps& caps) {
    const DistributionEstimate at_theta =
        measure_distribution(circuit, theta, -1, 0.0, input, noise, ctx, caps);
    if (at_theta.q.size() != target.size())
        throw std::invalid_argument("kl_gradient_psr: target size does not match basis");
    const DistributionDerivative dd = distribution_psr_derivative(
        circuit, theta, input, param, noise, ctx, use_light_cone, caps);

    GradientResult res;
    res.parameter = param;
    res.value = kl_contract(dd.dq, at_theta.q, target);
    res.complex_value = {res.value, 0.0};
    res.evaluations = dd.evaluations + 1;
    res.shots = dd.shots + at_theta.shots;
    return res;
}

GradientResult mmd_gradient_psr(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                                const FockState& input,
                                const std::vector<double>& target,
                                const std::vector<double>& sigmas,
                                const std::string& param, const NoiseModel& noise,
                                EvalContext& ctx, bool use_light_cone,
                                const DeskCaps& caps) {
    const DistributionEstimate at_theta =
        measure_distribution(circuit, theta, -1, 0.0, input, noise, ctx, caps);
    if (at_theta.q.size() != target.size())
        throw std::invalid_argument("mmd_gradient_psr: target size does not match basis");
    const DistributionDerivative dd = distribution_psr_derivative(
        circuit, theta, input, param, noise, ctx, use_light_cone, caps);

    GradientResult res;
    res.parameter = param;
    res.value = mmd_contract(dd.dq, at_theta.q, target, sigmas);
    res.complex_value = {res.value, 0.0};
    res.evaluations = dd.evaluations + 1;
    res.shots = dd.shots + at_theta.shots;
    return res;
}

namespace {

LossGradient loss_gradient_all(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                               const FockState& input, const std::vector<double>& target,
                               const std::vector<double>* sigmas,
                               const NoiseModel& noise, EvalContext& ctx,
                               bool use_light_cone, const DeskCaps& caps) {
    const DistributionEstimate at_theta =
        measure_distribution(circuit, theta, -1, 0.0, input, noise, ctx, caps);
    if (at_theta.q.size() != target.size())
        throw std::invalid_argument("loss gradient: target size does not match basis");

    LossGradient res;
    res.grad = Eigen::VectorXd::Zero(circuit.parameter_count());
    res.evaluations = 1;
    res.shots = at_theta.shots;
    res.loss = sigmas ? mmd_loss(at_theta.q, target, *sigmas)
                      : kl_loss(at_theta.q, target);

    for (int pi = 0; pi < circuit.parameter_count(); ++pi) {
        const std::string& name = circuit.parameters()[static_cast<std::size_t>(pi)];
        const DistributionDerivative dd = distribution_psr_derivative(
            circuit, theta, input, name, noise, ctx, use_light_cone, caps);
        res.evaluations += dd.evaluations;
        res.shots += dd.shots;
        res.grad(pi) = sigmas ? mmd_contract(dd.dq, at_theta.q, target, *sigmas)
                              : kl_contract(dd.dq, at_theta.q, target);
    }
    return res;
}

}  // namespace

LossGradient kl_gradient_psr_all(const ParamCircuit& circuit,
                                 const Eigen::VectorXd& theta, const FockState& input,
                                 const std::vector<double>& target,
                                 const NoiseModel& noise, EvalContext& ctx,
                                 bool use_light_cone, const DeskCaps& caps) {
    return loss_gradient_all(circuit, theta, input, target, nullptr, noise, ctx,
                             use_light_cone, caps);
}

LossGradient mmd_gradient_psr_all(const ParamCircuit& circuit,
                                  const Eigen::VectorXd& theta, const FockState& input,
                                  const std::vector<double>& target,
                                  const std::vector<double>& sigmas,
                                  const NoiseModel& noise, EvalContext& ctx,
                                  bool use_light_cone, const DeskCaps& caps) {
    return loss_gradient_all(circuit, theta, input, target, &sigmas, noise, ctx,
                             use_light_cone, caps);
}

}  // namespace photongrad
