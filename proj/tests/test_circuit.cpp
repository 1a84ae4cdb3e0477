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

#include <numbers>

#include "oracles.hpp"
#include "photongrad/circuit.hpp"
#include "photongrad/evolve.hpp"
#include "photongrad/permanent.hpp"

using namespace photongrad;

namespace {
constexpr double kPi = std::numbers::pi;

ParamCircuit random_mesh(RngStream& rng, int m, int comps) {
    ParamCircuit c(m);
    for (int i = 0; i < comps; ++i) {
        if (rng.uniform01() < 0.5) {
            const int a = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(m - 1));
            c.bs(a, a + 1, rng.uniform(0.0, 2.0 * kPi));
        } else {
            c.ps(static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(m)),
                 rng.uniform(0.0, 2.0 * kPi));
        }
    }
    return c;
}

}  // namespace

TEST_CASE("empty circuit composes to the identity") {
    ParamCircuit c(3);
    const Eigen::MatrixXcd u = compose_unitary(c, Eigen::VectorXd());
    CHECK((u - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single phase shifter composes to a diagonal") {
    ParamCircuit c(2);
    c.ps(0, "t");
    Eigen::VectorXd theta(1);
    theta << kPi;
    const Eigen::MatrixXcd u = compose_unitary(c, theta);
    CHECK(std::abs(u(0, 0) - std::complex<double>(-1.0, 0.0)) < 1e-15);
    CHECK(std::abs(u(1, 1) - std::complex<double>(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(u(0, 1)) == 0.0);
}

TEST_CASE("two beam splitters compose like one with summed angle") {
    ParamCircuit twice(2);
    twice.bs(0, 1, kPi / 4).bs(0, 1, kPi / 4);
    const Eigen::MatrixXcd u = compose_unitary(twice, Eigen::VectorXd());
    // Direct 2x2 matrix product oracle.
    const Eigen::Matrix2cd expected =
        beam_splitter_matrix(kPi / 4) * beam_splitter_matrix(kPi / 4);
    CHECK((u - expected).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((expected - beam_splitter_matrix(kPi / 2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("wrong parameter-vector length is rejected") {
    ParamCircuit c(2);
    c.ps(0, "a").ps(1, "b");
    Eigen::VectorXd theta(1);
    theta << 0.3;
    CHECK_THROWS_AS(compose_unitary(c, theta), std::invalid_argument);
}

TEST_CASE("composed circuits are unitary") {
    RngStream rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        ParamCircuit c = random_mesh(rng, 5, 12);
        const Eigen::MatrixXcd u = compose_unitary(c, Eigen::VectorXd());
        CHECK_NOTHROW(require_unitary(u));
    }
}

TEST_CASE("fixed unitary blocks must be unitary") {
    ParamCircuit c(3);
    Eigen::MatrixXcd bad(2, 2);
    bad << 1, 0, 0, 2;
    CHECK_THROWS_AS(c.unitary({0, 1}, bad), std::invalid_argument);
}

TEST_CASE("permanent matches hand values") {
    CHECK(std::abs(permanent(Eigen::MatrixXcd::Identity(3, 3)) -
                   std::complex<double>(1.0, 0.0)) < 1e-14);
    CHECK(std::abs(permanent(Eigen::MatrixXcd::Ones(2, 2)) -
                   std::complex<double>(2.0, 0.0)) < 1e-14);
    CHECK(std::abs(permanent(Eigen::MatrixXcd::Ones(3, 3)) -
                   std::complex<double>(6.0, 0.0)) < 1e-13);
    CHECK(std::abs(permanent(Eigen::MatrixXcd(0, 0)) -
                   std::complex<double>(1.0, 0.0)) == 0.0);
}

TEST_CASE("permanent agrees with the permutation-sum oracle up to d = 5") {
    RngStream rng(17);
    for (int d = 1; d <= 5; ++d) {
        for (int trial = 0; trial < 6; ++trial) {
            Eigen::MatrixXcd a(d, d);
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c)
                    a(r, c) = std::complex<double>(rng.normal(), rng.normal());
            CHECK(std::abs(permanent(a) - testing::permanent_naive(a)) < 1e-10);
        }
    }
}

TEST_CASE("permanent dimension cap") {
    CHECK_THROWS_AS(permanent(Eigen::MatrixXcd::Identity(13, 13)), std::invalid_argument);
}

TEST_CASE("identity unitary leaves states unchanged") {
    const auto basis = enumerate_basis(2, 3);
    RngStream rng(23);
    const StateVector v = testing::random_state(basis, rng);
    const StateVector w = fock_evolve(Eigen::MatrixXcd::Identity(3, 3), v);
    CHECK((w.amplitudes() - v.amplitudes()).norm() < 1e-12);
}

TEST_CASE("Hong-Ou-Mandel coalescence on a 50:50 splitter") {
    ParamCircuit c(2);
    c.bs(0, 1, kPi / 4);
    const auto p = output_distribution(c, Eigen::VectorXd(), FockState({1, 1}));
    const auto basis = enumerate_basis(2, 2);
    CHECK(p[basis->index_of(FockState({1, 1}))] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(p[basis->index_of(FockState({2, 0}))] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(p[basis->index_of(FockState({0, 2}))] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("single-photon evolution reproduces the mode matrix") {
    RngStream rng(29);
    ParamCircuit c = random_mesh(rng, 4, 10);
    const Eigen::MatrixXcd u = compose_unitary(c, Eigen::VectorXd());
    const auto basis = enumerate_basis(1, 4);
    for (int k = 0; k < 4; ++k) {
        std::vector<int> occ(4, 0);
        occ[static_cast<std::size_t>(k)] = 1;
        const StateVector out =
            fock_evolve(u, StateVector::basis_state(basis, FockState(occ)));
        for (int j = 0; j < 4; ++j) {
            std::vector<int> t(4, 0);
            t[static_cast<std::size_t>(j)] = 1;
            const auto amp =
                out.amplitudes()(static_cast<Eigen::Index>(basis->index_of(FockState(t))));
            CHECK(std::abs(amp - u(j, k)) < 1e-12);
        }
    }
}

TEST_CASE("evolution is functorial") {
    RngStream rng(31);
    const auto basis = enumerate_basis(3, 4);
    const StateVector v = testing::random_state(basis, rng);
    ParamCircuit c1 = random_mesh(rng, 4, 8);
    ParamCircuit c2 = random_mesh(rng, 4, 8);
    const Eigen::MatrixXcd u1 = compose_unitary(c1, Eigen::VectorXd());
    const Eigen::MatrixXcd u2 = compose_unitary(c2, Eigen::VectorXd());
    const StateVector stepwise = fock_evolve(u2, fock_evolve(u1, v));
    const StateVector combined = fock_evolve(u2 * u1, v);
    CHECK((stepwise.amplitudes() - combined.amplitudes()).norm() < 1e-9);
}

TEST_CASE("photon-number mismatch is rejected") {
    const Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(2, 2);
    CHECK_THROWS_AS(transition_amplitude(u, FockState({1, 0}), FockState({1, 1})),
                    std::invalid_argument);
}

TEST_CASE("output distributions are normalized point masses for identity circuits") {
    ParamCircuit c(2);
    const auto p = output_distribution(c, Eigen::VectorXd(), FockState({1, 0}));
    const auto basis = enumerate_basis(1, 2);
    CHECK(p[basis->index_of(FockState({1, 0}))] == doctest::Approx(1.0));
    double sum = 0.0;
    for (double v : p) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("output distribution sums to one on random circuits") {
    RngStream rng(37);
    for (int trial = 0; trial < 5; ++trial) {
        ParamCircuit c = random_mesh(rng, 5, 14);
        const auto p = output_distribution(c, Eigen::VectorXd(), FockState({1, 1, 0, 1, 0}));
        double sum = 0.0;
        for (double v : p) sum += v;
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("light cone: only photons reaching the shifter count") {
    // Six modes, photons in modes 0 and 4; the shifter on mode 2 sits after
    // couplers 0-1 and 1-2, so only the first photon can reach it.
    ParamCircuit c(6);
    c.bs(0, 1, kPi / 4).bs(1, 2, kPi / 4).ps(2, "phi");
    c.bs(2, 3, kPi / 4).bs(3, 4, kPi / 4).bs(4, 5, kPi / 4);
    const FockState input({1, 0, 0, 0, 1, 0});
    CHECK(light_cone_photon_bound(c, input, "phi") == 1);
}

TEST_CASE("light cone: first-column shifter sees only its own mode") {
    ParamCircuit c(4);
    c.ps(1, "phi").bs(0, 1, kPi / 4).bs(2, 3, kPi / 4);
    CHECK(light_cone_photon_bound(c, FockState({0, 2, 1, 0}), "phi") == 2);
    CHECK(light_cone_photon_bound(c, FockState({2, 0, 1, 1}), "phi") == 0);
}

TEST_CASE("light cone: fully-connected mesh reaches everything") {
    ParamCircuit c(4);
    c.bs(0, 1, kPi / 4).bs(2, 3, kPi / 4).bs(1, 2, kPi / 4).bs(0, 1, kPi / 4);
    c.ps(0, "phi");
    CHECK(light_cone_photon_bound(c, FockState({1, 1, 0, 1}), "phi") == 3);
}

TEST_CASE("light cone bound is capped at the photon number") {
    ParamCircuit c(2);
    c.bs(0, 1, kPi / 4).ps(0, "phi");
    CHECK(light_cone_photon_bound(c, FockState({2, 1}), "phi") == 3);
}

TEST_CASE("light cone rejects unknown or ambiguous parameters") {
    ParamCircuit c(2);
    c.ps(0, "a").ps(1, "a");
    CHECK_THROWS_AS(light_cone_photon_bound(c, FockState({1, 0}), "missing"),
                    std::invalid_argument);
    CHECK_THROWS_AS(light_cone_photon_bound(c, FockState({1, 0}), "a"),
                    std::invalid_argument);
    CHECK(light_cone_photon_bound_at(c, FockState({1, 0}), 0) == 1);
}

TEST_CASE("circuit json round trip preserves the unitary") {
    ParamCircuit c(3);
    c.ps(0, "theta_0").bs(0, 1, 0.785398).ps(2, 0.25);
    Eigen::Matrix2cd h;
    h << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
    c.unitary({1, 2}, h);

    const nlohmann::json j = c.to_json();
    CHECK(j.at("modes") == 3);
    CHECK(j.at("components")[0].at("type") == "ps");
    CHECK(j.at("components")[0].at("param") == "theta_0");
    CHECK(j.at("components")[1].at("type") == "bs");

    const ParamCircuit back = ParamCircuit::from_json(j);
    Eigen::VectorXd theta(1);
    theta << 1.234;
    const Eigen::MatrixXcd u1 = compose_unitary(c, theta);
    const Eigen::MatrixXcd u2 = compose_unitary(back, theta);
    CHECK((u1 - u2).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("parameter bookkeeping") {
    ParamCircuit c(3);
    c.ps(0, "a").ps(1, "b").ps(2, "a");
    CHECK(c.parameter_count() == 2);
    CHECK(c.parameter_index("b") == 1);
    CHECK(c.occurrences("a") == std::vector<int>{0, 2});
    CHECK_THROWS_AS(c.parameter_index("zz"), std::invalid_argument);
}
