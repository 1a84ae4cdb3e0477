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

#include "photongrad/sampling.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "photongrad/evolve.hpp"

namespace photongrad {

void NoiseModel::validate() const {
    if (hom_visibility < 0.0 || hom_visibility > 1.0)
        throw std::invalid_argument("NoiseModel: HOM visibility must lie in [0, 1]");
    if (shots.has_value() && *shots < 1)
        throw std::invalid_argument("NoiseModel: shot count must be >= 1");
}

long long SampleRecord::count_of(const FockState& s) const {
    return counts[basis->index_of(s)];
}

std::vector<double> SampleRecord::frequencies() const {
    std::vector<double> f(counts.size(), 0.0);
    if (total > 0) {
        for (std::size_t i = 0; i < counts.size(); ++i)
            f[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    }
    return f;
}

nlohmann::json SampleRecord::to_json() const {
    nlohmann::json out = nlohmann::json::object();
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] != 0) out[basis->state(i).str()] = counts[i];
    }
    return out;
}

SampleRecord sample_distribution(const std::shared_ptr<const FockBasis>& basis,
                                 const std::vector<double>& p, long long n_shots,
                                 RngStream& rng) {
    if (!basis) throw std::invalid_argument("sample_distribution: null basis");
    if (p.size() != basis->size())
        throw std::invalid_argument("sample_distribution: wrong distribution size");
    if (n_shots < 1) throw std::invalid_argument("sample_distribution: shots must be >= 1");

    std::vector<double> cdf(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < -kProbSumTol)
            throw std::invalid_argument("sample_distribution: negative probability");
        acc += std::max(p[i], 0.0);
        cdf[i] = acc;
    }
    if (std::abs(acc - 1.0) > kProbSumTol)
        throw std::invalid_argument("sample_distribution: probabilities do not sum to 1");

    SampleRecord rec;
    rec.basis = basis;
    rec.counts.assign(basis->size(), 0);
    rec.total = n_shots;
    for (long long k = 0; k < n_shots; ++k) rec.counts[rng.categorical(cdf)]++;
    return rec;
}

namespace {

std::vector<int> expand_photons(const FockState& s) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(s.photons()));
    for (int k = 0; k < s.modes(); ++k)
        for (int c = 0; c < s.occupation(k); ++c) out.push_back(k);
    return out;
}

Eigen::MatrixXcd compose_fixed_components(int modes, const std::vector<Component>& comps) {
    ParamCircuit tmp(modes);
    for (const Component& c : comps) {
        if (const auto* ps = std::get_if<PhaseShifter>(&c)) {
            if (ps->parameterized())
                throw std::invalid_argument(
                    "measurement rotation circuits must be parameter-free");
        }
        tmp.append(c);
    }
    return compose_unitary(tmp, Eigen::VectorXd());
}

}  // namespace

std::vector<double> noisy_distribution_from_unitary(const Eigen::MatrixXcd& u,
                                                    const FockState& input,
                                                    const FockBasis& basis,
                                                    double visibility,
                                                    const DeskCaps& caps) {
    if (visibility < 0.0 || visibility > 1.0)
        throw std::invalid_argument("noisy_distribution: visibility must lie in [0, 1]");
    if (visibility == 1.0 || input.photons() == 0)
        return output_distribution_from_unitary(u, input, basis, caps);
    const std::vector<double> betas(static_cast<std::size_t>(input.photons()),
                                    std::sqrt(visibility));
    return noisy_distribution_per_photon(u, input, basis, betas, caps);
}

std::vector<double> noisy_distribution_per_photon(const Eigen::MatrixXcd& u,
                                                  const FockState& input,
                                                  const FockBasis& basis,
                                                  const std::vector<double>& betas,
                                                  const DeskCaps& caps) {
    const int n = input.photons();
    const int m = input.modes();
    if (static_cast<int>(betas.size()) != n)
        throw std::invalid_argument("noisy_distribution: need one beta per photon");
    for (double b : betas) {
        if (b < 0.0 || b > 1.0)
            throw std::invalid_argument("noisy_distribution: beta must lie in [0, 1]");
    }
    if (n > caps.max_photons)
        throw std::invalid_argument("noisy_distribution: photon count exceeds 2^n cap");
    if (n == 0) return output_distribution_from_unitary(u, input, basis, caps);

    const auto photon_modes = expand_photons(input);

    // Sub-bases for 0..n interfering photons, reused across subsets.
    std::vector<std::shared_ptr<const FockBasis>> sub(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) sub[static_cast<std::size_t>(k)] = enumerate_basis(k, m, caps);

    std::vector<double> result(basis.size(), 0.0);
    const std::uint64_t subsets = 1ull << n;
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
        const int good = static_cast<int>(std::popcount(mask));
        double w = 1.0;
        for (int ph = 0; ph < n; ++ph)
            w *= (mask & (1ull << ph)) ? betas[static_cast<std::size_t>(ph)]
                                       : 1.0 - betas[static_cast<std::size_t>(ph)];
        if (w == 0.0) continue;

        std::vector<int> occ(static_cast<std::size_t>(m), 0);
        std::vector<int> bad_modes;
        for (int ph = 0; ph < n; ++ph) {
            if (mask & (1ull << ph))
                occ[static_cast<std::size_t>(photon_modes[static_cast<std::size_t>(ph)])]++;
            else
                bad_modes.push_back(photon_modes[static_cast<std::size_t>(ph)]);
        }

        // Interfering part evolves as one Fock state of `good` photons.
        const FockBasis& gb = *sub[static_cast<std::size_t>(good)];
        std::vector<double> dist =
            output_distribution_from_unitary(u, FockState(occ), gb, caps);

        // Each distinguishable photon routes classically and independently.
        int level = good;
        for (int src : bad_modes) {
            const FockBasis& from = *sub[static_cast<std::size_t>(level)];
            const FockBasis& to = *sub[static_cast<std::size_t>(level + 1)];
            std::vector<double> next(to.size(), 0.0);
            for (std::size_t i = 0; i < from.size(); ++i) {
                if (dist[i] == 0.0) continue;
                std::vector<int> pattern = from.state(i).occupations();
                for (int j = 0; j < m; ++j) {
                    const double pj = std::norm(u(j, src));
                    if (pj == 0.0) continue;
                    pattern[static_cast<std::size_t>(j)]++;
                    next[to.index_of(FockState(pattern))] += dist[i] * pj;
                    pattern[static_cast<std::size_t>(j)]--;
                }
            }
            dist = std::move(next);
            ++level;
        }

        for (std::size_t i = 0; i < result.size(); ++i) result[i] += w * dist[i];
    }

    double total = 0.0;
    for (double p : result) total += p;
    if (std::abs(total - 1.0) > kProbSumTol)
        throw std::runtime_error("noisy_distribution: probabilities do not sum to 1");
    return result;
}

std::vector<double> noisy_distribution(const ParamCircuit& circuit,
                                       const Eigen::VectorXd& theta,
                                       const FockState& input, double visibility,
                                       const DeskCaps& caps) {
    if (input.modes() != circuit.modes())
        throw std::invalid_argument("noisy_distribution: input mode count mismatch");
    const auto basis = enumerate_basis(input.photons(), input.modes(), caps);
    const Eigen::MatrixXcd u = compose_unitary(circuit, theta);
    return noisy_distribution_from_unitary(u, input, *basis, visibility, caps);
}

TermEstimate measure_term(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                          int shifted_component, double delta, const FockState& input,
                          const MeasurementTerm& term, const NoiseModel& noise,
                          RngStream rng, const DeskCaps& caps, StarvationPolicy policy,
                          long long* starvation_counter) {
    auto starved = [&](const char* what) -> bool {
        if (policy == StarvationPolicy::ZeroAndCount) {
            if (starvation_counter) ++*starvation_counter;
            return true;
        }
        throw PostSelectionStarved(what);
    };
    Eigen::MatrixXcd u = compose_unitary(circuit, theta, shifted_component, delta);
    if (!term.rotation.empty())
        u = compose_fixed_components(circuit.modes(), term.rotation) * u;

    const auto basis = enumerate_basis(input.photons(), input.modes(), caps);
    const std::vector<double> p =
        noisy_distribution_from_unitary(u, input, *basis, noise.hom_visibility, caps);

    TermEstimate est;
    if (noise.exact()) {
        double num = 0.0, retained = 0.0;
        for (std::size_t i = 0; i < basis->size(); ++i) {
            auto it = term.values.find(basis->state(i));
            if (it == term.values.end()) continue;
            num += it->second * p[i];
            retained += p[i];
        }
        est.num = num;
        if (term.post_select) {
            if (retained <= 0.0) {
                if (starved("estimate_expectation: post-selection retained zero probability")) {
                    est.num = 0.0;
                    est.den = 1.0;
                    return est;
                }
            }
            est.den = retained;
        }
    } else {
        const long long shots = *noise.shots;
        const SampleRecord rec = sample_distribution(basis, p, shots, rng);
        double num = 0.0;
        long long retained = 0;
        for (std::size_t i = 0; i < basis->size(); ++i) {
            if (rec.counts[i] == 0) continue;
            auto it = term.values.find(basis->state(i));
            if (it == term.values.end()) continue;
            num += it->second * static_cast<double>(rec.counts[i]);
            retained += rec.counts[i];
        }
        est.num = num / static_cast<double>(shots);
        est.shots = shots;
        if (term.post_select) {
            if (retained == 0) {
                if (starved("estimate_expectation: post-selection retained zero shots")) {
                    est.num = 0.0;
                    est.den = 1.0;
                    return est;
                }
            }
            est.den = static_cast<double>(retained) / static_cast<double>(shots);
        }
    }
    return est;
}

DistributionEstimate measure_distribution(const ParamCircuit& circuit,
                                          const Eigen::VectorXd& theta,
                                          int shifted_component, double delta,
                                          const FockState& input,
                                          const NoiseModel& noise, EvalContext& ctx,
                                          const DeskCaps& caps) {
    noise.validate();
    const auto basis = enumerate_basis(input.photons(), input.modes(), caps);
    const Eigen::MatrixXcd u = compose_unitary(circuit, theta, shifted_component, delta);
    const std::vector<double> p =
        noisy_distribution_from_unitary(u, input, *basis, noise.hom_visibility, caps);

    DistributionEstimate est;
    if (noise.exact()) {
        est.q = p;
    } else {
        RngStream rng = ctx.term_stream(0);
        const SampleRecord rec = sample_distribution(basis, p, *noise.shots, rng);
        est.q = rec.frequencies();
        est.shots = *noise.shots;
    }
    ctx.advance();
    return est;
}

Estimate estimate_expectation(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                              const FockState& input, const Observable& obs,
                              const NoiseModel& noise, EvalContext& ctx,
                              const DeskCaps& caps) {
    noise.validate();
    if (input.modes() != circuit.modes())
        throw std::invalid_argument("estimate_expectation: input mode count mismatch");

    Estimate est;
    if (noise.exact() && noise.hom_visibility == 1.0 && obs.has_dense()) {
        const auto basis = enumerate_basis(input.photons(), input.modes(), caps);
        if (obs.dense->rows() != static_cast<Eigen::Index>(basis->size()))
            throw std::invalid_argument(
                "estimate_expectation: dense observable size does not match basis");
        const Eigen::MatrixXcd u = compose_unitary(circuit, theta);
        const StateVector out = fock_evolve(u, StateVector::basis_state(basis, input), caps);
        const Eigen::VectorXcd& a = out.amplitudes();
        std::complex<double> value = a.dot((*obs.dense) * a);  // dot conjugates lhs
        if (obs.dense_projector.has_value()) {
            const double den = a.dot((*obs.dense_projector) * a).real();
            if (den <= 0.0) {
                if (ctx.starvation_policy == StarvationPolicy::ZeroAndCount) {
                    ++ctx.starvation_events;
                    value = {0.0, 0.0};
                } else {
                    throw PostSelectionStarved(
                        "estimate_expectation: post-selection retained zero probability");
                }
            } else {
                value /= den;
            }
        }
        est.value = value.real();
        est.complex_value = value;
        ctx.advance();
        return est;
    }

    if (!obs.has_terms())
        throw std::invalid_argument(
            "estimate_expectation: sampling/noisy mode needs measurement terms "
            "(spectral decomposition supplied by the caller)");

    double total = 0.0;
    for (std::size_t t = 0; t < obs.terms.size(); ++t) {
        const TermEstimate te = measure_term(circuit, theta, -1, 0.0, input,
                                             obs.terms[t], noise, ctx.term_stream(t), caps,
                                             ctx.starvation_policy, &ctx.starvation_events);
        total += obs.terms[t].weight * (te.num / te.den);
        est.shots += te.shots;
    }
    est.value = total;
    est.complex_value = {total, 0.0};
    ctx.advance();
    return est;
}

Estimate estimate_expectation(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                              const FockState& input, const Observable& obs,
                              const NoiseModel& noise, const DeskCaps& caps) {
    EvalContext ctx = EvalContext::from_seed(noise.seed);
    return estimate_expectation(circuit, theta, input, obs, noise, ctx, caps);
}

}  // namespace photongrad
