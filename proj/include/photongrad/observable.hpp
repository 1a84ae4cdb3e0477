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

#ifndef PHOTONGRAD_OBSERVABLE_HPP
#define PHOTONGRAD_OBSERVABLE_HPP

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "photongrad/circuit.hpp"
#include "photongrad/fock.hpp"

namespace photongrad {

/// One measured term: a fixed rotation circuit appended before the detectors
/// plus diagonal outcome values on the rotated Fock basis. Patterns missing
/// from `values` score 0, or are discarded entirely when `post_select` is set
/// (the term's expectation is then conditioned on retained patterns).
struct MeasurementTerm {
    double weight = 1.0;
    std::vector<Component> rotation;
    std::unordered_map<FockState, double, FockStateHash> values;
    bool post_select = false;

    /// Largest per-shot |value|; the λ entering Hoeffding bounds.
    double lambda_bound() const;
};

/// Measurement specification. `dense` (with optional `dense_projector` for
/// post-selected expectations) serves the exact mode; `terms` serves the
/// sampling/noisy modes. Builders below fill both routes so the same
/// observable works everywhere.
struct Observable {
    std::optional<Eigen::MatrixXcd> dense;
    std::optional<Eigen::MatrixXcd> dense_projector;
    std::vector<MeasurementTerm> terms;

    bool has_dense() const { return dense.has_value(); }
    bool has_terms() const { return !terms.empty(); }
    bool post_selected() const;

    /// Σ_t |w_t| λ_t over terms: bound on one shot's contribution.
    double lambda_bound() const;
};

/// n̂_k on the given basis.
Observable number_operator(const std::shared_ptr<const FockBasis>& basis, int mode);

/// |s><s| on the given basis.
Observable state_projector(const std::shared_ptr<const FockBasis>& basis,
                           const FockState& s);

Observable identity_observable(const std::shared_ptr<const FockBasis>& basis);

/// Exact-mode-only observable from an arbitrary (not necessarily Hermitian)
/// dense matrix on the Fock basis.
Observable dense_observable(Eigen::MatrixXcd matrix);

}  // namespace photongrad

#endif
