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

#include "photongrad/gradients.hpp"

#include <cmath>
#include <stdexcept>

#include "photongrad/evolve.hpp"

namespace photongrad {

namespace {

// One expectation evaluation decomposed per term so post-selected quotients
// can be differentiated: term means are num/den.
struct PointEval {
    std::vector<std::complex<double>> num;
    std::vector<double> den;
    long long shots = 0;
};

struct EvalPlan {
    bool dense_route = false;
    std::vector<double> weights;  // per pseudo-term
};

EvalPlan make_plan(const Observable& obs, const NoiseModel& noise) {
    noise.validate();
    EvalPlan plan;
    plan.dense_route =
        noise.exact() && noise.hom_visibility == 1.0 && obs.has_dense();
    if (plan.dense_route) {
        plan.weights = {1.0};
    } else {
        if (!obs.has_terms())
            throw std::invalid_argument(
                "gradient: sampling/noisy mode needs measurement terms");
        for (const auto& t : obs.terms) plan.weights.push_back(t.weight);
    }
    return plan;
}

PointEval eval_point(const EvalPlan& plan, const ParamCircuit& circuit,
                     const Eigen::VectorXd& theta, int shift_comp, double delta,
                     const FockState& input, const Observable& obs,
                     const NoiseModel& noise, EvalContext& ctx, const DeskCaps& caps) {
    PointEval pe;
    if (plan.dense_route) {
        const auto basis = enumerate_basis(input.photons(), input.modes(), caps);
        const Eigen::MatrixXcd u = compose_unitary(circuit, theta, shift_comp, delta);
        const StateVector out =
            fock_evolve(u, StateVector::basis_state(basis, input), caps);
        const Eigen::VectorXcd& a = out.amplitudes();
        pe.num.push_back(a.dot((*obs.dense) * a));
        pe.den.push_back(obs.dense_projector
                             ? a.dot((*obs.dense_projector) * a).real()
                             : 1.0);
    } else {
        for (std::size_t t = 0; t < obs.terms.size(); ++t) {
            const TermEstimate te =
                measure_term(circuit, theta, shift_comp, delta, input, obs.terms[t],
                             noise, ctx.term_stream(t), caps, ctx.starvation_policy,
                             &ctx.starvation_events);
            pe.num.emplace_back(te.num, 0.0);
            pe.den.push_back(te.den);
            pe.shots += te.shots;
        }
    }
    ctx.advance();
    return pe;
}

std::complex<double> point_value(const EvalPlan& plan, const PointEval& pe) {
    std::complex<double> v{0.0, 0.0};
    for (std::size_t t = 0; t < plan.weights.size(); ++t) {
        if (pe.den[t] == 0.0)
            throw std::runtime_error("gradient: post-selection retained nothing");
        v += plan.weights[t] * pe.num[t] / pe.den[t];
    }
    return v;
}

}  // namespace

GradientResult psr_gradient(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                            const FockState& input, const Observable& obs,
                            const std::string& param, const NoiseModel& noise,
                            EvalContext& ctx, bool use_light_cone, const DeskCaps& caps) {
    const auto occurrences = circuit.occurrences(param);
    const EvalPlan plan = make_plan(obs, noise);
    const bool needs_base = obs.post_selected();
    const int n = input.photons();

    GradientResult res;
    res.parameter = param;

    PointEval base;
    if (needs_base) {
        base = eval_point(plan, circuit, theta, -1, 0.0, input, obs, noise, ctx, caps);
        res.evaluations += 1;
        res.shots += base.shots;
    }

    std::complex<double> grad{0.0, 0.0};
    for (int occ : occurrences) {
        const int nu = use_light_cone ? light_cone_photon_bound_at(circuit, input, occ)
                                      : n;
        const ShiftRule rule = canonical_shift_rule(nu);
        if (rule.evaluation_count() == 0) continue;

        std::vector<std::complex<double>> dnum(plan.weights.size(), {0.0, 0.0});
        std::vector<double> dden(plan.weights.size(), 0.0);
        for (std::size_t p = 0; p < rule.evaluation_count(); ++p) {
            const PointEval pe = eval_point(plan, circuit, theta, occ, rule.angles[p],
                                            input, obs, noise, ctx, caps);
            res.evaluations += 1;
            res.shots += pe.shots;
            for (std::size_t t = 0; t < plan.weights.size(); ++t) {
                dnum[t] += rule.coefficients[p] * pe.num[t];
                dden[t] += rule.coefficients[p] * pe.den[t];
            }
        }
        for (std::size_t t = 0; t < plan.weights.size(); ++t) {
            if (needs_base) {
                grad += plan.weights[t] *
                        (dnum[t] * base.den[t] - base.num[t] * dden[t]) /
                        (base.den[t] * base.den[t]);
            } else {
                grad += plan.weights[t] * dnum[t];
            }
        }
    }
    res.complex_value = grad;
    res.value = grad.real();
    return res;
}

GradientResult fd_gradient(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                           const FockState& input, const Observable& obs,
                           const std::string& param, double stepsize,
                           const NoiseModel& noise, EvalContext& ctx, bool central,
                           const DeskCaps& caps) {
    if (stepsize <= 0.0) throw std::invalid_argument("fd_gradient: stepsize must be > 0");
    const int idx = circuit.parameter_index(param);

    Eigen::VectorXd up = theta;
    up(idx) += stepsize;
    const Estimate f_up = estimate_expectation(circuit, up, input, obs, noise, ctx, caps);

    Eigen::VectorXd lo = theta;
    if (central) lo(idx) -= stepsize;
    const Estimate f_lo = estimate_expectation(circuit, lo, input, obs, noise, ctx, caps);

    const double div = central ? 2.0 * stepsize : stepsize;
    GradientResult res;
    res.parameter = param;
    res.value = (f_up.value - f_lo.value) / div;
    res.complex_value = (f_up.complex_value - f_lo.complex_value) / div;
    res.evaluations = 2;
    res.shots = f_up.shots + f_lo.shots;
    return res;
}

GradientResult commutator_gradient_oracle(const ParamCircuit& circuit,
                                          const Eigen::VectorXd& theta,
                                          const FockState& input, const Observable& obs,
                                          const std::string& param,
                                          const DeskCaps& caps) {
    if (!obs.has_dense())
        throw std::invalid_argument("commutator_gradient_oracle: needs a dense observable");
    const auto basis = enumerate_basis(input.photons(), input.modes(), caps);
    if (basis->size() > static_cast<std::size_t>(caps.max_dense_states))
        throw std::invalid_argument("commutator_gradient_oracle: basis too large");
    if (obs.dense->rows() != static_cast<Eigen::Index>(basis->size()))
        throw std::invalid_argument("commutator_gradient_oracle: observable size mismatch");

    const auto occurrences = circuit.occurrences(param);
    const auto& comps = circuit.components();
    const int total = static_cast<int>(comps.size());

    // Mode-k occupation per basis state, reused per occurrence.
    const Eigen::Index d = static_cast<Eigen::Index>(basis->size());

    const Eigen::VectorXcd psi0 =
        StateVector::basis_state(basis, input).amplitudes();

    auto derivative_of = [&](const Eigen::MatrixXcd& mat) {
        std::complex<double> acc{0.0, 0.0};
        for (int occ : occurrences) {
            const auto& ps = std::get<PhaseShifter>(comps[static_cast<std::size_t>(occ)]);
            const double angle =
                ps.parameterized() ? theta(circuit.parameter_index(ps.param)) : ps.phase;

            const Eigen::MatrixXcd w2 = compose_unitary_range(circuit, theta, 0, occ);
            const Eigen::MatrixXcd w1 = compose_unitary_range(circuit, theta, occ + 1, total);
            const Eigen::MatrixXcd lifted_w2 = lift_unitary(w2, *basis, caps);
            const Eigen::MatrixXcd lifted_w1 = lift_unitary(w1, *basis, caps);

            Eigen::VectorXd number_diag(d);
            for (Eigen::Index j = 0; j < d; ++j)
                number_diag(j) = basis->state(static_cast<std::size_t>(j)).occupation(ps.mode);

            Eigen::VectorXcd phi = lifted_w2 * psi0;
            for (Eigen::Index j = 0; j < d; ++j)
                phi(j) *= std::exp(std::complex<double>(0.0, number_diag(j) * angle));

            const Eigen::MatrixXcd m_prime = lifted_w1.adjoint() * mat * lifted_w1;
            const Eigen::VectorXcd n_phi = number_diag.cast<std::complex<double>>().asDiagonal() * phi;
            const std::complex<double> term1 = phi.dot(m_prime * n_phi);
            const std::complex<double> term2 = n_phi.dot(m_prime * phi);
            acc += std::complex<double>(0.0, 1.0) * (term1 - term2);
        }
        return acc;
    };

    GradientResult res;
    res.parameter = param;
    std::complex<double> grad = derivative_of(*obs.dense);
    if (obs.dense_projector.has_value()) {
        // Quotient rule for post-selected expectations.
        const Eigen::MatrixXcd u = compose_unitary(circuit, theta);
        const Eigen::VectorXcd a =
            fock_evolve(u, StateVector::basis_state(basis, input), caps).amplitudes();
        const std::complex<double> num = a.dot((*obs.dense) * a);
        const double den = a.dot((*obs.dense_projector) * a).real();
        if (den <= 0.0)
            throw std::runtime_error("commutator_gradient_oracle: zero retained probability");
        const std::complex<double> dden = derivative_of(*obs.dense_projector);
        grad = (grad * den - num * dden) / (den * den);
    }
    res.complex_value = grad;
    res.value = grad.real();
    return res;
}

ObsGradient psr_gradient_all(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                             const FockState& input, const Observable& obs,
                             const NoiseModel& noise, EvalContext& ctx,
                             bool use_light_cone, const DeskCaps& caps) {
    const EvalPlan plan = make_plan(obs, noise);
    const bool post_selected = obs.post_selected();
    const int n = input.photons();

    ObsGradient res;
    res.grad = Eigen::VectorXd::Zero(circuit.parameter_count());

    const PointEval base =
        eval_point(plan, circuit, theta, -1, 0.0, input, obs, noise, ctx, caps);
    res.evaluations += 1;
    res.shots += base.shots;
    res.loss = point_value(plan, base).real();

    for (int pi = 0; pi < circuit.parameter_count(); ++pi) {
        const std::string& name = circuit.parameters()[static_cast<std::size_t>(pi)];
        std::complex<double> grad{0.0, 0.0};
        for (int occ : circuit.occurrences(name)) {
            const int nu =
                use_light_cone ? light_cone_photon_bound_at(circuit, input, occ) : n;
            const ShiftRule rule = canonical_shift_rule(nu);
            if (rule.evaluation_count() == 0) continue;
            std::vector<std::complex<double>> dnum(plan.weights.size(), {0.0, 0.0});
            std::vector<double> dden(plan.weights.size(), 0.0);
            for (std::size_t p = 0; p < rule.evaluation_count(); ++p) {
                const PointEval pe = eval_point(plan, circuit, theta, occ,
                                                rule.angles[p], input, obs, noise, ctx, caps);
                res.evaluations += 1;
                res.shots += pe.shots;
                for (std::size_t t = 0; t < plan.weights.size(); ++t) {
                    dnum[t] += rule.coefficients[p] * pe.num[t];
                    dden[t] += rule.coefficients[p] * pe.den[t];
                }
            }
            for (std::size_t t = 0; t < plan.weights.size(); ++t) {
                if (post_selected) {
                    grad += plan.weights[t] *
                            (dnum[t] * base.den[t] - base.num[t] * dden[t]) /
                            (base.den[t] * base.den[t]);
                } else {
                    grad += plan.weights[t] * dnum[t];
                }
            }
        }
        res.grad(pi) = grad.real();
    }
    return res;
}

ObsGradient fd_gradient_all(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                            const FockState& input, const Observable& obs,
                            double stepsize, const NoiseModel& noise, EvalContext& ctx,
                            const DeskCaps& caps) {
    if (stepsize <= 0.0) throw std::invalid_argument("fd_gradient: stepsize must be > 0");
    ObsGradient res;
    res.grad = Eigen::VectorXd::Zero(circuit.parameter_count());
    bool loss_recorded = false;
    for (int pi = 0; pi < circuit.parameter_count(); ++pi) {
        Eigen::VectorXd up = theta;
        up(pi) += stepsize;
        const Estimate f_up =
            estimate_expectation(circuit, up, input, obs, noise, ctx, caps);
        const Estimate f_at =
            estimate_expectation(circuit, theta, input, obs, noise, ctx, caps);
        res.grad(pi) = (f_up.value - f_at.value) / stepsize;
        res.evaluations += 2;
        res.shots += f_up.shots + f_at.shots;
        if (!loss_recorded) {
            res.loss = f_at.value;
            loss_recorded = true;
        }
    }
    return res;
}

SpsaGains SpsaGains::from_learning_rate(double learning_rate, int max_iterations,
                                        double c) {
    SpsaGains g;
    g.c = c;
    g.stability = 0.1 * std::max(1, max_iterations);
    g.a = learning_rate * std::pow(1.0 + g.stability, g.alpha);
    return g;
}

double SpsaGains::step_size(int iteration) const {
    return a / std::pow(iteration + 1.0 + stability, alpha);
}

double SpsaGains::perturbation(int iteration) const {
    return c / std::pow(iteration + 1.0, gamma);
}

Eigen::VectorXd spsa_gradient(const std::function<double(const Eigen::VectorXd&)>& loss,
                              const Eigen::VectorXd& theta, int iteration,
                              const SpsaGains& gains, RngStream& rng) {
    const Eigen::Index d = theta.size();
    Eigen::VectorXd delta(d);
    for (Eigen::Index i = 0; i < d; ++i) delta(i) = rng.rademacher();
    const double ck = gains.perturbation(iteration);
    const double up = loss(theta + ck * delta);
    const double down = loss(theta - ck * delta);
    const double scale = (up - down) / (2.0 * ck);
    Eigen::VectorXd grad(d);
    for (Eigen::Index i = 0; i < d; ++i) grad(i) = scale / delta(i);
    return grad;
}

}  // namespace photongrad
