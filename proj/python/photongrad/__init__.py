# Copyright 2026 The photongrad authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Linear-optical circuit simulation with photonic parameter-shift gradients."""

from photongrad._core import (  # noqa: F401
    FockBasis,
    FockState,
    Observable,
    ParamCircuit,
    ShiftRule,
    __version__,
    canonical_shift_rule,
    coefficient_norm_scaling,
    commutator_gradient_oracle,
    compose_unitary,
    dense_observable,
    enumerate_basis,
    estimate_expectation,
    fd_gradient,
    gaussian_mixture_target,
    general_shift_rule,
    hoeffding_report,
    kl_gradient_psr,
    kl_loss,
    light_cone_photon_bound,
    mmd_gradient_psr,
    mmd_loss,
    noisy_distribution,
    number_operator,
    output_distribution,
    permanent,
    psr_gradient,
    qcbm_ansatz,
    qcbm_input,
    sample_counts,
    state_projector,
    vqe_ansatz,
    vqe_input,
)
