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

#ifndef PHOTONGRAD_TOLERANCES_HPP
#define PHOTONGRAD_TOLERANCES_HPP

namespace photongrad {

// Centralized numeric tolerances. Every module refers to these instead of
// scattering magic constants.
inline constexpr double kUnitNormTol = 1e-12;      // state-vector normalization
inline constexpr double kUnitarityTol = 1e-10;     // mode-unitary deviation from U†U = I
inline constexpr double kProbSumTol = 1e-9;        // probability vectors summing to 1
inline constexpr double kEvolveNormTol = 1e-9;     // norm after a Fock-space evolution
inline constexpr double kRuleResidualTol = 1e-9;   // shift-rule coefficient-system residual
inline constexpr double kProbFloor = 1e-12;        // clamp applied inside logarithms

/// Size caps keeping every instance at desk scale. Callers may relax or
/// tighten them per call; the defaults let the largest stock experiment
/// (4 photons in 8 modes, 330 basis states) run in milliseconds.
struct DeskCaps {
    int max_photons = 6;
    int max_modes = 14;
    int max_permanent_dim = 12;
    int max_dense_states = 2000;
};

}  // namespace photongrad

#endif
