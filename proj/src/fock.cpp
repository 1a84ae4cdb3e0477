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

#include "photongrad/fock.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

namespace photongrad {

FockState::FockState(std::vector<int> occupations) : occ_(std::move(occupations)) {
    for (int s : occ_) {
        if (s < 0) throw std::invalid_argument("FockState: negative occupation");
    }
}

int FockState::photons() const {
    return std::accumulate(occ_.begin(), occ_.end(), 0);
}

int FockState::occupation(int mode) const {
    if (mode < 0 || mode >= modes())
        throw std::out_of_range("FockState: mode index out of range");
    return occ_[static_cast<std::size_t>(mode)];
}

std::string FockState::str() const {
    std::ostringstream out;
    out << "|";
    for (std::size_t i = 0; i < occ_.size(); ++i) {
        if (i) out << ",";
        out << occ_[i];
    }
    out << ">";
    return out.str();
}

std::size_t FockStateHash::operator()(const FockState& s) const noexcept {
    // FNV-1a over the occupation sequence.
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (int v : s.occupations()) {
        h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull;
        h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
}

int photons_in_mode(const FockState& state, int mode) {
    return state.occupation(mode);
}

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    }
    return r;
}

FockBasis::FockBasis(int n, int m) : n_(n), m_(m) {}

std::shared_ptr<const FockBasis> FockBasis::make(int photons, int modes,
                                                 const DeskCaps& caps) {
    if (photons < 0) throw std::invalid_argument("FockBasis: photon count must be >= 0");
    if (modes < 1) throw std::invalid_argument("FockBasis: mode count must be >= 1");
    if (photons > caps.max_photons)
        throw std::invalid_argument("FockBasis: photon count exceeds desk-scale cap");
    if (modes > caps.max_modes)
        throw std::invalid_argument("FockBasis: mode count exceeds desk-scale cap");

    auto basis = std::shared_ptr<FockBasis>(new FockBasis(photons, modes));
    const std::uint64_t expected = binomial(photons + modes - 1, photons);
    basis->states_.reserve(expected);

    // Lexicographically decreasing enumeration: start (n,0,...,0), end (0,...,0,n).
    std::vector<int> occ(static_cast<std::size_t>(modes), 0);
    occ[0] = photons;
    while (true) {
        basis->states_.emplace_back(occ);
        int j = -1;
        for (int i = modes - 2; i >= 0; --i) {
            if (occ[static_cast<std::size_t>(i)] > 0) {
                j = i;
                break;
            }
        }
        if (j < 0) break;
        int tail = 0;
        for (int i = j + 1; i < modes; ++i) {
            tail += occ[static_cast<std::size_t>(i)];
            occ[static_cast<std::size_t>(i)] = 0;
        }
        occ[static_cast<std::size_t>(j)] -= 1;
        occ[static_cast<std::size_t>(j + 1)] = tail + 1;
    }

    basis->index_.reserve(basis->states_.size());
    for (std::size_t i = 0; i < basis->states_.size(); ++i) {
        basis->index_.emplace(basis->states_[i], i);
    }
    if (basis->states_.size() != expected)
        throw std::logic_error("FockBasis: enumeration size mismatch");
    return basis;
}

const FockState& FockBasis::state(std::size_t position) const {
    if (position >= states_.size())
        throw std::out_of_range("FockBasis: position out of range");
    return states_[position];
}

std::size_t FockBasis::index_of(const FockState& s) const {
    auto it = index_.find(s);
    if (it == index_.end())
        throw std::invalid_argument("FockBasis: state " + s.str() + " is not a member");
    return it->second;
}

bool FockBasis::contains(const FockState& s) const {
    return index_.find(s) != index_.end();
}

std::shared_ptr<const FockBasis> enumerate_basis(int photons, int modes,
                                                 const DeskCaps& caps) {
    return FockBasis::make(photons, modes, caps);
}

StateVector::StateVector(std::shared_ptr<const FockBasis> basis,
                         Eigen::VectorXcd amplitudes)
    : basis_(std::move(basis)), amps_(std::move(amplitudes)) {
    if (!basis_) throw std::invalid_argument("StateVector: null basis");
    if (static_cast<std::size_t>(amps_.size()) != basis_->size())
        throw std::invalid_argument("StateVector: amplitude size does not match basis");
}

StateVector StateVector::basis_state(std::shared_ptr<const FockBasis> basis,
                                     const FockState& s) {
    if (!basis) throw std::invalid_argument("StateVector: null basis");
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()));
    amps(static_cast<Eigen::Index>(basis->index_of(s))) = 1.0;
    return StateVector(std::move(basis), std::move(amps));
}

bool StateVector::is_normalized(double tol) const {
    return std::abs(amps_.squaredNorm() - 1.0) <= tol;
}

StateVector apply_phase(const StateVector& v, int mode, double theta) {
    const FockBasis& basis = v.basis();
    if (mode < 0 || mode >= basis.modes())
        throw std::out_of_range("apply_phase: mode index out of range");
    Eigen::VectorXcd out = v.amplitudes();
    for (std::size_t j = 0; j < basis.size(); ++j) {
        const int a_j = basis.state(j).occupation(mode);
        if (a_j != 0) {
            out(static_cast<Eigen::Index>(j)) *=
                std::exp(std::complex<double>(0.0, a_j * theta));
        }
    }
    return StateVector(v.basis_ptr(), std::move(out));
}

}  // namespace photongrad
