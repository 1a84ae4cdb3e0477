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

#include "photongrad/observable.hpp"

#include <cmath>
#include <stdexcept>

namespace photongrad {

double MeasurementTerm::lambda_bound() const {
    double lambda = 0.0;
    for (const auto& [state, value] : values) lambda = std::max(lambda, std::abs(value));
    return lambda;
}

bool Observable::post_selected() const {
    if (dense_projector.has_value()) return true;
    for (const auto& t : terms)
        if (t.post_select) return true;
    return false;
}

double Observable::lambda_bound() const {
    double lambda = 0.0;
    for (const auto& t : terms) lambda += std::abs(t.weight) * t.lambda_bound();
    return lambda;
}

Observable number_operator(const std::shared_ptr<const FockBasis>& basis, int mode) {
    if (!basis) throw std::invalid_argument("number_operator: null basis");
    if (mode < 0 || mode >= basis->modes())
        throw std::out_of_range("number_operator: mode index out of range");
    const Eigen::Index d = static_cast<Eigen::Index>(basis->size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    MeasurementTerm term;
    for (std::size_t j = 0; j < basis->size(); ++j) {
        const int occ = basis->state(j).occupation(mode);
        m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = occ;
        if (occ != 0) term.values.emplace(basis->state(j), static_cast<double>(occ));
    }
    Observable obs;
    obs.dense = std::move(m);
    obs.terms.push_back(std::move(term));
    return obs;
}

Observable state_projector(const std::shared_ptr<const FockBasis>& basis,
                           const FockState& s) {
    if (!basis) throw std::invalid_argument("state_projector: null basis");
    const std::size_t idx = basis->index_of(s);
    const Eigen::Index d = static_cast<Eigen::Index>(basis->size());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    m(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)) = 1.0;
    MeasurementTerm term;
    term.values.emplace(s, 1.0);
    Observable obs;
    obs.dense = std::move(m);
    obs.terms.push_back(std::move(term));
    return obs;
}

Observable identity_observable(const std::shared_ptr<const FockBasis>& basis) {
    if (!basis) throw std::invalid_argument("identity_observable: null basis");
    const Eigen::Index d = static_cast<Eigen::Index>(basis->size());
    MeasurementTerm term;
    for (const auto& s : basis->states()) term.values.emplace(s, 1.0);
    Observable obs;
    obs.dense = Eigen::MatrixXcd::Identity(d, d);
    obs.terms.push_back(std::move(term));
    return obs;
}

Observable dense_observable(Eigen::MatrixXcd matrix) {
    if (matrix.rows() != matrix.cols())
        throw std::invalid_argument("dense_observable: matrix must be square");
    Observable obs;
    obs.dense = std::move(matrix);
    return obs;
}

}  // namespace photongrad
