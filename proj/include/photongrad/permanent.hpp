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

#ifndef PHOTONGRAD_PERMANENT_HPP
#define PHOTONGRAD_PERMANENT_HPP

#include <Eigen/Dense>
#include <complex>

#include "photongrad/tolerances.hpp"

namespace photongrad {

/// Matrix permanent of a square complex matrix via the Glynn formula with
/// Gray-code sign updates, O(d·2^d). perm of the empty matrix is 1.
std::complex<double> permanent(const Eigen::MatrixXcd& a, const DeskCaps& caps = {});

}  // namespace photongrad

#endif
