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

import math

import pytest

import photongrad as pg


def test_basis_enumeration_order_and_size():
    basis = pg.enumerate_basis(2, 2)
    assert len(basis) == 3
    assert basis.state(0).occupations == [2, 0]
    assert basis.state(1).occupations == [1, 1]
    assert basis.state(2).occupations == [0, 2]
    assert basis.index_of(pg.FockState([1, 1])) == 1
    assert len(pg.enumerate_basis(3, 8)) == 120


def test_hom_dip():
    c = pg.ParamCircuit(2)
    c.bs(0, 1, math.pi / 4)
    p = pg.output_distribution(c, [], pg.FockState([1, 1]))
    basis = pg.enumerate_basis(2, 2)
    assert p[basis.index_of(pg.FockState([1, 1]))] == pytest.approx(0.0, abs=1e-12)
    assert p[basis.index_of(pg.FockState([2, 0]))] == pytest.approx(0.5, abs=1e-9)
    noisy = pg.noisy_distribution(c, [], pg.FockState([1, 1]), 0.9)
    assert noisy[basis.index_of(pg.FockState([1, 1]))] == pytest.approx(0.05, abs=1e-12)


def test_permanent_values():
    import numpy as np

    assert pg.permanent(np.eye(3, dtype=complex)) == pytest.approx(1.0)
    assert pg.permanent(np.ones((3, 3), dtype=complex)) == pytest.approx(6.0)


def test_canonical_shift_rule():
    rule = pg.canonical_shift_rule(1)
    assert rule.coefficients == pytest.approx([1 / math.sqrt(3), -1 / math.sqrt(3)])
    assert rule.max_residual() < 1e-12
    rule4 = pg.canonical_shift_rule(4)
    assert rule4.sum_abs_coefficients == pytest.approx(6.649655, abs=1e-5)


def test_hoeffding_paper_numbers():
    rep = pg.hoeffding_report(4, 0.1, 0.01, 0.1, 1.0)
    assert 26.0e3 < rep["n_psr"] < 27.0e3
    assert 23.5e6 < rep["n_fd"] < 24.5e6
    assert 890 < rep["ratio"] < 910


def test_psr_matches_oracle_on_mzi():
    c = pg.ParamCircuit(2)
    c.bs(0, 1, math.pi / 4).ps(0, "phi").bs(0, 1, math.pi / 4)
    obs = pg.number_operator(1, 2, 0)
    theta = [0.9]
    psr = pg.psr_gradient(c, theta, pg.FockState([1, 0]), obs, "phi")
    oracle = pg.commutator_gradient_oracle(c, theta, pg.FockState([1, 0]), obs, "phi")
    assert psr["value"] == pytest.approx(math.sin(0.9) / 2, abs=1e-9)
    assert psr["value"] == pytest.approx(oracle["value"], abs=1e-9)
    assert psr["evaluations"] == 2


def test_light_cone_bound():
    c = pg.ParamCircuit(6)
    c.bs(0, 1, math.pi / 4).bs(1, 2, math.pi / 4).ps(2, "phi").bs(2, 3, math.pi / 4)
    assert pg.light_cone_photon_bound(c, pg.FockState([1, 0, 0, 0, 1, 0]), "phi") == 1


def test_sampling_is_deterministic():
    c = pg.qcbm_ansatz()
    theta = [0.1 * k for k in range(28)]
    a = pg.sample_counts(c, theta, pg.qcbm_input(), 0.9, 500, seed=5)
    b = pg.sample_counts(c, theta, pg.qcbm_input(), 0.9, 500, seed=5)
    assert a == b
    assert sum(a.values()) == 500


def test_kl_gradient_matches_fd():
    c = pg.ParamCircuit(2)
    c.bs(0, 1, math.pi / 4).ps(0, "phi").bs(0, 1, math.pi / 4)
    target = [0.7, 0.3]
    theta = 1.1
    grad = pg.kl_gradient_psr(c, [theta], pg.FockState([1, 0]), target, "phi")
    eps = 1e-6

    def loss(t):
        q = pg.output_distribution(c, [t], pg.FockState([1, 0]))
        return pg.kl_loss(q, target)

    fd = (loss(theta + eps) - loss(theta - eps)) / (2 * eps)
    assert grad["value"] == pytest.approx(fd, abs=1e-5)


def test_vqe_builtin_pieces():
    c = pg.vqe_ansatz()
    assert c.modes == 6
    assert len(c.parameters) == 8
    assert pg.vqe_input().occupations == [1, 0, 1, 0, 0, 0]
    obs = pg.number_operator(2, 6, 0)
    est = pg.estimate_expectation(c, [0.0] * 8, pg.vqe_input(), obs)
    assert 0.0 <= est["value"] <= 2.0


def test_gaussian_target():
    t = pg.gaussian_mixture_target(120, [30.0, 80.0], [8.0, 8.0], [0.5, 0.5])
    assert len(t) == 120
    assert sum(t) == pytest.approx(1.0)
    assert min(t) > 0.0


def test_circuit_json_roundtrip():
    c = pg.ParamCircuit(3)
    c.ps(0, "theta_0").bs(0, 1, 0.785398).fixed_ps(2, 0.25)
    back = pg.ParamCircuit.from_json(c.to_json())
    import numpy as np

    u1 = pg.compose_unitary(c, [1.234])
    u2 = pg.compose_unitary(back, [1.234])
    assert np.max(np.abs(u1 - u2)) < 1e-15
