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

#ifndef PHOTONGRAD_FOCK_HPP
#define PHOTONGRAD_FOCK_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "photongrad/tolerances.hpp"

namespace photongrad {

/// Occupation-number vector |s1,...,sm> : photons per optical mode.
class FockState {
  public:
    FockState() = default;
    explicit FockState(std::vector<int> occupations);

    int modes() const { return static_cast<int>(occ_.size()); }
    int photons() const;
    int occupation(int mode) const;
    const std::vector<int>& occupations() const { return occ_; }

    /// Renders as "|s1,s2,...>"; the wire format used for sample records.
    std::string str() const;

    bool operator==(const FockState& other) const { return occ_ == other.occ_; }

  private:
    std::vector<int> occ_;
};

struct FockStateHash {
    std::size_t operator()(const FockState& s) const noexcept;
};

/// Diagonal of the number operator n̂_k.
int photons_in_mode(const FockState& state, int mode);

std::uint64_t binomial(int n, int k);

/// Ordered enumeration of the n-photon Fock basis on m modes.
///
/// Canonical order is lexicographically decreasing occupation vectors,
/// e.g. (2,0) before (1,1) before (0,2). The order is part of the wire
/// contract for distributions and sample records.
class FockBasis {
  public:
    static std::shared_ptr<const FockBasis> make(int photons, int modes,
                                                 const DeskCaps& caps = {});

    int photons() const { return n_; }
    int modes() const { return m_; }
    std::size_t size() const { return states_.size(); }
    const FockState& state(std::size_t position) const;
    const std::vector<FockState>& states() const { return states_; }

    /// Exact inverse of position lookup; throws if the state is not a member.
    std::size_t index_of(const FockState& s) const;
    bool contains(const FockState& s) const;

  private:
    FockBasis(int n, int m);
    int n_;
    int m_;
    std::vector<FockState> states_;
    std::unordered_map<FockState, std::size_t, FockStateHash> index_;
};

/// enumerate_basis(n, m): all weak compositions of n into m parts,
/// size binomial(n+m-1, n). Rejects sizes beyond the desk-scale caps.
std::shared_ptr<const FockBasis> enumerate_basis(int photons, int modes,
                                                 const DeskCaps& caps = {});

/// Complex amplitudes over a FockBasis. Immutable after construction.
class StateVector {
  public:
    StateVector(std::shared_ptr<const FockBasis> basis, Eigen::VectorXcd amplitudes);

    /// Unit vector concentrated on one basis state.
    static StateVector basis_state(std::shared_ptr<const FockBasis> basis,
                                   const FockState& s);

    const FockBasis& basis() const { return *basis_; }
    const std::shared_ptr<const FockBasis>& basis_ptr() const { return basis_; }
    const Eigen::VectorXcd& amplitudes() const { return amps_; }
    double norm() const { return amps_.norm(); }
    bool is_normalized(double tol = kUnitNormTol) const;

  private:
    std::shared_ptr<const FockBasis> basis_;
    Eigen::VectorXcd amps_;
};

/// Applies the phase shifter e^{i n̂_k θ}: amplitude j picks up exp(i a_j θ)
/// where a_j is the photon count in mode k of basis state j. Norm preserving.
StateVector apply_phase(const StateVector& v, int mode, double theta);

}  // namespace photongrad

#endif
