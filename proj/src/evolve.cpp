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

#include "photongrad/evolve.hpp"

#include <cmath>
#include <stdexcept>

#include "photongrad/permanent.hpp"

namespace photongrad {

namespace {

double factorial_product(const FockState& s) {
    double prod = 1.0;
    for (int occ : s.occupations()) {
        for (int v = 2; v <= occ; ++v) prod *= v;
    }
    return prod;
}

std::vector<int> expand_modes(const FockState& s) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(s.photons()));
    for (int k = 0; k < s.modes(); ++k) {
        for (int c = 0; c < s.occupation(k); ++c) out.push_back(k);
    }
    return out;
}

}  // namespace

std::complex<double> transition_amplitude(const Eigen::MatrixXcd& u,
                                          const FockState& out, const FockState& in,
                                          const DeskCaps& caps) {
    if (out.photons() != in.photons())
        throw std::invalid_argument("transition_amplitude: photon-number mismatch");
    if (u.rows() != u.cols() || u.rows() != in.modes() || out.modes() != in.modes())
        throw std::invalid_argument("transition_amplitude: dimension mismatch");
    const int n = in.photons();
    if (n == 0) return {1.0, 0.0};

    const auto rows = expand_modes(out);
    const auto cols = expand_modes(in);
    Eigen::MatrixXcd sub(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            sub(r, c) = u(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
        }
    }
    const double norm = std::sqrt(factorial_product(out) * factorial_product(in));
    return permanent(sub, caps) / norm;
}

StateVector fock_evolve(const Eigen::MatrixXcd& u, const StateVector& psi,
                        const DeskCaps& caps) {
    const FockBasis& basis = psi.basis();
    if (u.rows() != basis.modes())
        throw std::invalid_argument("fock_evolve: unitary size does not match basis modes");

    const Eigen::VectorXcd& in = psi.amplitudes();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
    for (std::size_t s = 0; s < basis.size(); ++s) {
        const std::complex<double> a = in(static_cast<Eigen::Index>(s));
        if (a == std::complex<double>(0.0, 0.0)) continue;
        for (std::size_t t = 0; t < basis.size(); ++t) {
            out(static_cast<Eigen::Index>(t)) +=
                a * transition_amplitude(u, basis.state(t), basis.state(s), caps);
        }
    }

    StateVector result(psi.basis_ptr(), std::move(out));
    if (psi.is_normalized(1e-9) && std::abs(result.norm() - 1.0) > kEvolveNormTol)
        throw std::runtime_error("fock_evolve: output norm deviates beyond tolerance");
    return result;
}

Eigen::MatrixXcd lift_unitary(const Eigen::MatrixXcd& u, const FockBasis& basis,
                              const DeskCaps& caps) {
    if (basis.size() > static_cast<std::size_t>(caps.max_dense_states))
        throw std::invalid_argument("lift_unitary: basis too large for dense matrices");
    const Eigen::Index d = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd lifted(d, d);
    for (Eigen::Index s = 0; s < d; ++s) {
        for (Eigen::Index t = 0; t < d; ++t) {
            lifted(t, s) = transition_amplitude(
                u, basis.state(static_cast<std::size_t>(t)),
                basis.state(static_cast<std::size_t>(s)), caps);
        }
    }
    return lifted;
}

std::vector<double> output_distribution_from_unitary(const Eigen::MatrixXcd& u,
                                                     const FockState& input,
                                                     const FockBasis& basis,
                                                     const DeskCaps& caps) {
    std::vector<double> p(basis.size(), 0.0);
    double total = 0.0;
    for (std::size_t t = 0; t < basis.size(); ++t) {
        const auto amp = transition_amplitude(u, basis.state(t), input, caps);
        p[t] = std::norm(amp);
        total += p[t];
    }
    if (std::abs(total - 1.0) > kProbSumTol)
        throw std::runtime_error("output_distribution: probabilities do not sum to 1");
    return p;
}

std::vector<double> output_distribution(const ParamCircuit& circuit,
                                        const Eigen::VectorXd& theta,
                                        const FockState& input,
                                        const DeskCaps& caps) {
    if (input.modes() != circuit.modes())
        throw std::invalid_argument("output_distribution: input mode count mismatch");
    const auto basis = enumerate_basis(input.photons(), input.modes(), caps);
    const Eigen::MatrixXcd u = compose_unitary(circuit, theta);
    return output_distribution_from_unitary(u, input, *basis, caps);
}

}  // namespace photongrad
