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

#ifndef PHOTONGRAD_EVOLVE_HPP
#define PHOTONGRAD_EVOLVE_HPP

#include <Eigen/Dense>
#include <vector>

#include "photongrad/circuit.hpp"
#include "photongrad/fock.hpp"
#include "photongrad/tolerances.hpp"

namespace photongrad {

/// Fock-space transition amplitude <out| Φ(u) |in> for an m×m mode unitary:
/// perm(u[out,in]) / sqrt(Π out_i! · Π in_j!), where u[out,in] repeats
/// column j in_j times and row i out_i times.
std::complex<double> transition_amplitude(const Eigen::MatrixXcd& u,
                                          const FockState& out, const FockState& in,
                                          const DeskCaps& caps = {});

/// Lifts the mode unitary to the n-photon Fock space and applies it.
/// Output norm is checked against 1 within 1e-9.
StateVector fock_evolve(const Eigen::MatrixXcd& u, const StateVector& psi,
                        const DeskCaps& caps = {});

/// Dense Fock-space matrix of the lifted unitary (for oracle computations).
Eigen::MatrixXcd lift_unitary(const Eigen::MatrixXcd& u, const FockBasis& basis,
                              const DeskCaps& caps = {});

/// Squared output amplitudes of evolving `input` through the bound circuit;
/// sums to 1 within 1e-9. Indexed by the canonical FockBasis order.
std::vector<double> output_distribution(const ParamCircuit& circuit,
                                        const Eigen::VectorXd& theta,
                                        const FockState& input,
                                        const DeskCaps& caps = {});

/// Distribution from an already-composed mode unitary.
std::vector<double> output_distribution_from_unitary(const Eigen::MatrixXcd& u,
                                                     const FockState& input,
                                                     const FockBasis& basis,
                                                     const DeskCaps& caps = {});

}  // namespace photongrad

#endif
