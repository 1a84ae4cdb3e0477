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

#include <doctest.h>

#include "oracles.hpp"
#include "photongrad/fock.hpp"

using namespace photongrad;

TEST_CASE("basis enumeration follows the canonical decreasing order") {
    const auto basis = enumerate_basis(2, 2);
    REQUIRE(basis->size() == 3);
    CHECK(basis->state(0) == FockState({2, 0}));
    CHECK(basis->state(1) == FockState({1, 1}));
    CHECK(basis->state(2) == FockState({0, 2}));
}

TEST_CASE("vacuum basis has a single state") {
    const auto basis = enumerate_basis(0, 5);
    REQUIRE(basis->size() == 1);
    CHECK(basis->state(0) == FockState({0, 0, 0, 0, 0}));
}

TEST_CASE("basis size equals binomial(n+m-1, n)") {
    CHECK(enumerate_basis(3, 8)->size() == 120);
    CHECK(enumerate_basis(4, 8)->size() == 330);
    CHECK(enumerate_basis(2, 6)->size() == 21);
    CHECK(binomial(10, 3) == 120);
}

TEST_CASE("desk-scale caps reject oversized bases") {
    CHECK_THROWS_AS(enumerate_basis(7, 2), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_basis(2, 15), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_basis(-1, 2), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_basis(1, 0), std::invalid_argument);
    DeskCaps relaxed;
    relaxed.max_photons = 8;
    CHECK(enumerate_basis(7, 2, relaxed)->size() == 8);
}

TEST_CASE("index map is the exact inverse of position lookup") {
    for (auto [n, m] : {std::pair{2, 2}, {3, 4}, {4, 5}, {0, 3}, {1, 7}}) {
        const auto basis = enumerate_basis(n, m);
        for (std::size_t p = 0; p < basis->size(); ++p) {
            CHECK(basis->index_of(basis->state(p)) == p);
        }
    }
}

TEST_CASE("index lookup rejects foreign states") {
    const auto basis = enumerate_basis(2, 2);
    CHECK_THROWS_AS(basis->index_of(FockState({1, 0})), std::invalid_argument);
    CHECK_FALSE(basis->contains(FockState({3, 0})));
}

TEST_CASE("photons_in_mode reads the occupation") {
    CHECK(photons_in_mode(FockState({1, 1, 0}), 0) == 1);
    CHECK(photons_in_mode(FockState({0, 2, 1}), 1) == 2);
    CHECK(photons_in_mode(FockState({0, 0, 3}), 0) == 0);
    CHECK_THROWS_AS(photons_in_mode(FockState({1, 0}), 2), std::out_of_range);
    CHECK_THROWS_AS(photons_in_mode(FockState({1, 0}), -1), std::out_of_range);
}

TEST_CASE("fock state rejects negative occupations and renders as a ket") {
    CHECK_THROWS_AS(FockState({1, -1}), std::invalid_argument);
    CHECK(FockState({1, 0, 2}).str() == "|1,0,2>");
}

TEST_CASE("apply_phase with zero angle is the identity") {
    const auto basis = enumerate_basis(2, 3);
    RngStream rng(42);
    const StateVector v = testing::random_state(basis, rng);
    const StateVector w = apply_phase(v, 1, 0.0);
    CHECK((w.amplitudes() - v.amplitudes()).norm() == 0.0);
}

TEST_CASE("apply_phase multiplies by exp(i a_j theta)") {
    const auto basis = enumerate_basis(2, 2);
    const StateVector v = StateVector::basis_state(basis, FockState({0, 2}));
    const StateVector w = apply_phase(v, 1, std::numbers::pi / 2);
    const auto amp = w.amplitudes()(static_cast<Eigen::Index>(basis->index_of(FockState({0, 2}))));
    CHECK(std::abs(amp - std::complex<double>(-1.0, 0.0)) < 1e-12);
}

TEST_CASE("apply_phase is periodic in 2*pi") {
    const auto basis = enumerate_basis(3, 3);
    RngStream rng(7);
    const StateVector v = testing::random_state(basis, rng);
    const StateVector w = apply_phase(v, 2, 2.0 * std::numbers::pi);
    CHECK((w.amplitudes() - v.amplitudes()).norm() < 1e-12);
}

TEST_CASE("apply_phase preserves the norm and composes additively") {
    const auto basis = enumerate_basis(3, 4);
    RngStream rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const StateVector v = testing::random_state(basis, rng);
        const double t1 = rng.uniform(0.0, 6.28);
        const double t2 = rng.uniform(0.0, 6.28);
        const int mode = static_cast<int>(rng.next_u64() % 4);
        const StateVector w = apply_phase(apply_phase(v, mode, t1), mode, t2);
        const StateVector z = apply_phase(v, mode, t1 + t2);
        CHECK(std::abs(w.norm() - 1.0) < 1e-12);
        CHECK((w.amplitudes() - z.amplitudes()).norm() < 1e-12);
    }
}

TEST_CASE("photon number expectation sums to n") {
    const auto basis = enumerate_basis(3, 5);
    RngStream rng(13);
    const StateVector v = testing::random_state(basis, rng);
    double total = 0.0;
    for (int k = 0; k < 5; ++k) {
        double nk = 0.0;
        for (std::size_t j = 0; j < basis->size(); ++j) {
            nk += basis->state(j).occupation(k) *
                  std::norm(v.amplitudes()(static_cast<Eigen::Index>(j)));
        }
        total += nk;
    }
    CHECK(total == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("state vector validates basis and size") {
    const auto basis = enumerate_basis(1, 2);
    CHECK_THROWS_AS(StateVector(basis, Eigen::VectorXcd::Zero(3)), std::invalid_argument);
    const StateVector v = StateVector::basis_state(basis, FockState({0, 1}));
    CHECK(v.is_normalized());
}
