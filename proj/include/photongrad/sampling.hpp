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

#ifndef PHOTONGRAD_SAMPLING_HPP
#define PHOTONGRAD_SAMPLING_HPP

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <json.hpp>

#include "photongrad/circuit.hpp"
#include "photongrad/fock.hpp"
#include "photongrad/observable.hpp"
#include "photongrad/rng.hpp"
#include "photongrad/tolerances.hpp"

namespace photongrad {

/// Noise and estimation settings: Hong-Ou-Mandel visibility V in [0,1]
/// (1 = perfectly indistinguishable photons), shot count per expectation
/// value (nullopt = exact probabilities), and the RNG seed.
struct NoiseModel {
    double hom_visibility = 1.0;
    std::optional<long long> shots;
    std::uint64_t seed = 0;

    bool exact() const { return !shots.has_value(); }
    void validate() const;
};

/// Counts per output pattern from one finite-shot measurement.
struct SampleRecord {
    std::shared_ptr<const FockBasis> basis;
    std::vector<long long> counts;  // aligned with basis order
    long long total = 0;

    long long count_of(const FockState& s) const;
    std::vector<double> frequencies() const;

    /// {"|s1,s2,...>": count} with zero-count states omitted.
    nlohmann::json to_json() const;
};

/// N i.i.d. categorical draws from p (which must sum to 1 within 1e-9).
SampleRecord sample_distribution(const std::shared_ptr<const FockBasis>& basis,
                                 const std::vector<double>& p, long long n_shots,
                                 RngStream& rng);

/// Exact output distribution under partial distinguishability. Each photon
/// independently carries the shared internal state with probability β = √V;
/// for every subset S of "good" photons (2^n terms) the photons in S evolve
/// with full interference while the rest propagate classically through
/// |U_jk|², and the occupation patterns are combined by convolution. V = 1
/// reproduces output_distribution exactly; pairwise coincidence visibility
/// equals V by construction (β² = V).
std::vector<double> noisy_distribution(const ParamCircuit& circuit,
                                       const Eigen::VectorXd& theta,
                                       const FockState& input, double visibility,
                                       const DeskCaps& caps = {});

std::vector<double> noisy_distribution_from_unitary(const Eigen::MatrixXcd& u,
                                                    const FockState& input,
                                                    const FockBasis& basis,
                                                    double visibility,
                                                    const DeskCaps& caps = {});

/// Underlying mixture with one mixing parameter per photon (photons ordered
/// by input mode, ties in input order); the distribution is affine in each
/// β_i. The scalar model uses β_i = √V for every photon.
std::vector<double> noisy_distribution_per_photon(const Eigen::MatrixXcd& u,
                                                  const FockState& input,
                                                  const FockBasis& basis,
                                                  const std::vector<double>& betas,
                                                  const DeskCaps& caps = {});

/// Raised when post-selection retains no shots (or no probability mass).
class PostSelectionStarved : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// What to do when a post-selected term retains nothing: surface the error
/// (the default operation contract) or score the term 0 and count the event
/// (experiment runs report the counter instead of dying mid-optimization).
enum class StarvationPolicy { Throw, ZeroAndCount };

/// Deterministic sub-stream bookkeeping for one logical run. Every
/// expectation-value estimation consumes one evaluation index; term i of
/// that evaluation draws from the stream keyed (evaluation, term), so
/// results are reproducible at any thread count.
class EvalContext {
  public:
    explicit EvalContext(RngStream root) : root_(root) {}
    static EvalContext from_seed(std::uint64_t seed) {
        return EvalContext(RngStream(seed));
    }

    RngStream term_stream(std::uint64_t term_index) const {
        return root_.derive(eval_index_, term_index);
    }
    void advance() { ++eval_index_; }
    std::uint64_t eval_index() const { return eval_index_; }

    StarvationPolicy starvation_policy = StarvationPolicy::Throw;
    long long starvation_events = 0;

  private:
    RngStream root_;
    std::uint64_t eval_index_ = 0;
};

/// One estimated expectation value.
struct Estimate {
    double value = 0.0;
    std::complex<double> complex_value{0.0, 0.0};
    long long shots = 0;
    long long evaluations = 1;
};

/// Internal measurement of a single term at one circuit setting
/// (optionally with one component's phase shifted). Returns the per-shot
/// means num = E[value·1_retained] and den = E[1_retained] (den = 1 when the
/// term is not post-selected); the term's expectation is num/den.
struct TermEstimate {
    double num = 0.0;
    double den = 1.0;
    long long shots = 0;
};

TermEstimate measure_term(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                          int shifted_component, double delta, const FockState& input,
                          const MeasurementTerm& term, const NoiseModel& noise,
                          RngStream rng, const DeskCaps& caps = {},
                          StarvationPolicy policy = StarvationPolicy::Throw,
                          long long* starvation_counter = nullptr);

/// Measured probability vector over the canonical output basis: exact
/// (optionally noisy) probabilities, or empirical frequencies from N shots.
struct DistributionEstimate {
    std::vector<double> q;
    long long shots = 0;
};

DistributionEstimate measure_distribution(const ParamCircuit& circuit,
                                          const Eigen::VectorXd& theta,
                                          int shifted_component, double delta,
                                          const FockState& input,
                                          const NoiseModel& noise, EvalContext& ctx,
                                          const DeskCaps& caps = {});

/// Expectation of an observable under the noise model. Exact mode with
/// V = 1 and a dense matrix returns ψ†Mψ (real part in `value`, full
/// complex value preserved; divided by ψ†Πψ when a post-selection projector
/// is present). All other modes require measurement terms: per term,
/// its rotation circuit is appended, the (noisy) output distribution is
/// either integrated exactly or sampled with the term's own N shots, and
/// post-selected terms renormalize by the retained weight. Zero retained
/// shots is reported as an error, never silently renormalized.
Estimate estimate_expectation(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                              const FockState& input, const Observable& obs,
                              const NoiseModel& noise, EvalContext& ctx,
                              const DeskCaps& caps = {});

/// Convenience overload with a context freshly derived from noise.seed.
Estimate estimate_expectation(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                              const FockState& input, const Observable& obs,
                              const NoiseModel& noise, const DeskCaps& caps = {});

}  // namespace photongrad

#endif
