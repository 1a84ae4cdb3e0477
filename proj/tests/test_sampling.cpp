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

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "photongrad/evolve.hpp"
#include "photongrad/sampling.hpp"

using namespace photongrad;

namespace {
constexpr double kPi = std::numbers::pi;

ParamCircuit hom_splitter() {
    ParamCircuit c(2);
    c.bs(0, 1, kPi / 4);
    return c;
}

}  // namespace

TEST_CASE("noise model validation") {
    NoiseModel bad;
    bad.hom_visibility = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.hom_visibility = 0.5;
    bad.shots = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    NoiseModel ok;
    ok.shots = 100;
    CHECK_NOTHROW(ok.validate());
    CHECK_FALSE(ok.exact());
    CHECK(NoiseModel{}.exact());
}

TEST_CASE("point-mass sampling puts every shot on the state") {
    const auto basis = enumerate_basis(1, 2);
    RngStream rng(3);
    const SampleRecord rec = sample_distribution(basis, {1.0, 0.0}, 500, rng);
    CHECK(rec.count_of(FockState({1, 0})) == 500);
    CHECK(rec.count_of(FockState({0, 1})) == 0);
    CHECK(rec.total == 500);
}

TEST_CASE("uniform sampling concentrates at the binomial rate") {
    const auto basis = enumerate_basis(1, 2);
    RngStream rng(5);
    const long long shots = 1000000;
    const SampleRecord rec = sample_distribution(basis, {0.5, 0.5}, shots, rng);
    const double freq =
        static_cast<double>(rec.count_of(FockState({1, 0}))) / static_cast<double>(shots);
    // 3 sigma of sqrt(p q / N) = 0.0005
    CHECK(std::abs(freq - 0.5) < 0.0015);
}

TEST_CASE("sampling is reproducible for a fixed seed and diverges across streams") {
    const auto basis = enumerate_basis(2, 2);
    const std::vector<double> p{0.25, 0.5, 0.25};
    RngStream a(99), b(99), c(100);
    const SampleRecord ra = sample_distribution(basis, p, 1000, a);
    const SampleRecord rb = sample_distribution(basis, p, 1000, b);
    const SampleRecord rc = sample_distribution(basis, p, 1000, c);
    CHECK(ra.counts == rb.counts);
    CHECK(ra.counts != rc.counts);
}

TEST_CASE("sample records serialize with ket-string keys") {
    const auto basis = enumerate_basis(1, 2);
    RngStream rng(1);
    const SampleRecord rec = sample_distribution(basis, {1.0, 0.0}, 3, rng);
    const nlohmann::json j = rec.to_json();
    CHECK(j.at("|1,0>") == 3);
    CHECK_FALSE(j.contains("|0,1>"));
}

TEST_CASE("invalid distributions are rejected") {
    const auto basis = enumerate_basis(1, 2);
    RngStream rng(1);
    CHECK_THROWS_AS(sample_distribution(basis, {0.6, 0.6}, 10, rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample_distribution(basis, {1.0, 0.0}, 0, rng),
                    std::invalid_argument);
}

TEST_CASE("full visibility reproduces the interference distribution") {
    RngStream rng(7);
    ParamCircuit c(3);
    c.bs(0, 1, 0.3).ps(1, 0.7).bs(1, 2, 1.1);
    const FockState input({1, 1, 0});
    const auto exact = output_distribution(c, Eigen::VectorXd(), input);
    const auto noisy = noisy_distribution(c, Eigen::VectorXd(), input, 1.0);
    for (std::size_t i = 0; i < exact.size(); ++i)
        CHECK(noisy[i] == doctest::Approx(exact[i]).epsilon(1e-12));
}

TEST_CASE("a single photon has nothing to be distinguishable from") {
    ParamCircuit c(2);
    c.bs(0, 1, 0.6);
    const FockState input({1, 0});
    const auto exact = output_distribution(c, Eigen::VectorXd(), input);
    const auto noisy = noisy_distribution(c, Eigen::VectorXd(), input, 0.0);
    for (std::size_t i = 0; i < exact.size(); ++i)
        CHECK(noisy[i] == doctest::Approx(exact[i]).epsilon(1e-12));
}

TEST_CASE("HOM coincidence probability is (1-V)/2") {
    const auto basis = enumerate_basis(2, 2);
    const std::size_t idx11 = basis->index_of(FockState({1, 1}));
    for (double v : {0.0, 0.25, 0.5, 0.9, 1.0}) {
        const auto p = noisy_distribution(hom_splitter(), Eigen::VectorXd(),
                                          FockState({1, 1}), v);
        CHECK(p[idx11] == doctest::Approx((1.0 - v) / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("noisy distributions stay normalized") {
    RngStream rng(11);
    ParamCircuit c(4);
    c.bs(0, 1, 0.4).bs(2, 3, 0.9).bs(1, 2, 1.3).ps(2, 0.2).bs(0, 1, 2.2);
    for (double v : {0.0, 0.3, 0.7, 0.95}) {
        const auto p = noisy_distribution(c, Eigen::VectorXd(), FockState({1, 1, 1, 0}), v);
        double sum = 0.0;
        for (double x : p) sum += x;
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("mixture is affine in each photon's mixing parameter") {
    ParamCircuit c(3);
    c.bs(0, 1, 0.8).bs(1, 2, 0.5);
    const FockState input({1, 1, 1});
    const auto basis = enumerate_basis(3, 3);
    const Eigen::MatrixXcd u = compose_unitary(c, Eigen::VectorXd());
    RngStream rng(13);
    for (int photon = 0; photon < 3; ++photon) {
        std::vector<double> betas{0.3, 0.8, 0.55};
        auto at = [&](double b) {
            betas[static_cast<std::size_t>(photon)] = b;
            return noisy_distribution_per_photon(u, input, *basis, betas);
        };
        const double t = rng.uniform01();
        const auto lo = at(0.0);
        const auto hi = at(1.0);
        const auto mid = at(t);
        for (std::size_t i = 0; i < mid.size(); ++i)
            CHECK(mid[i] == doctest::Approx((1 - t) * lo[i] + t * hi[i]).epsilon(1e-12));
    }
}

TEST_CASE("sampled HOM dip recovers the configured visibility") {
    // 5 sigma binomial window at N = 1e5.
    const long long shots = 100000;
    const auto basis = enumerate_basis(2, 2);
    const ParamCircuit c = hom_splitter();
    for (double v : {0.0, 0.5, 0.9, 1.0}) {
        const auto p = noisy_distribution(c, Eigen::VectorXd(), FockState({1, 1}), v);
        RngStream rng(static_cast<std::uint64_t>(v * 1000) + 17);
        const SampleRecord rec = sample_distribution(basis, p, shots, rng);
        const double p11 =
            static_cast<double>(rec.count_of(FockState({1, 1}))) / shots;
        const double expected = (1.0 - v) / 2.0;
        const double sigma = std::sqrt(std::max(expected * (1 - expected), 1e-12) / shots);
        CHECK(std::abs(p11 - expected) < 5.0 * sigma + 1e-12);
        const double v_hat = 1.0 - 2.0 * p11;
        CHECK(std::abs(v_hat - v) < 10.0 * sigma + 1e-12);
    }
}

TEST_CASE("identity observable estimates to one in both modes") {
    ParamCircuit c(2);
    c.bs(0, 1, kPi / 4);
    const auto basis = enumerate_basis(2, 2);
    const Observable obs = identity_observable(basis);
    NoiseModel exact;
    CHECK(estimate_expectation(c, Eigen::VectorXd(), FockState({1, 1}), obs, exact).value ==
          doctest::Approx(1.0).epsilon(1e-12));
    NoiseModel sampled;
    sampled.shots = 200;
    sampled.seed = 4;
    CHECK(estimate_expectation(c, Eigen::VectorXd(), FockState({1, 1}), obs, sampled).value ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("number operator on an eigenstate") {
    ParamCircuit c(2);
    const auto basis = enumerate_basis(2, 2);
    const Observable obs = number_operator(basis, 0);
    NoiseModel exact;
    const Estimate est =
        estimate_expectation(c, Eigen::VectorXd(), FockState({2, 0}), obs, exact);
    CHECK(est.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("projector onto the HOM-suppressed outcome is zero") {
    ParamCircuit c = hom_splitter();
    const auto basis = enumerate_basis(2, 2);
    const Observable obs = state_projector(basis, FockState({1, 1}));
    NoiseModel exact;
    CHECK(std::abs(estimate_expectation(c, Eigen::VectorXd(), FockState({1, 1}), obs, exact)
                       .value) < 1e-12);
}

TEST_CASE("sampling mode requires measurement terms") {
    ParamCircuit c(2);
    const auto basis = enumerate_basis(1, 2);
    Observable dense_only = dense_observable(Eigen::MatrixXcd::Identity(2, 2));
    NoiseModel sampled;
    sampled.shots = 10;
    CHECK_THROWS_AS(
        estimate_expectation(c, Eigen::VectorXd(), FockState({1, 0}), dense_only, sampled),
        std::invalid_argument);
    // Noisy photons also leave the dense route.
    NoiseModel noisy;
    noisy.hom_visibility = 0.9;
    CHECK_THROWS_AS(
        estimate_expectation(c, Eigen::VectorXd(), FockState({1, 0}), dense_only, noisy),
        std::invalid_argument);
    (void)basis;
}

TEST_CASE("post-selection that retains nothing is reported") {
    ParamCircuit c(2);
    const auto basis = enumerate_basis(1, 2);
    MeasurementTerm term;
    term.post_select = true;
    term.values.emplace(FockState({0, 1}), 1.0);  // input stays on |1,0>
    Observable obs;
    obs.terms.push_back(term);
    NoiseModel sampled;
    sampled.shots = 50;
    CHECK_THROWS_AS(
        estimate_expectation(c, Eigen::VectorXd(), FockState({1, 0}), obs, sampled),
        std::runtime_error);
    (void)basis;
}

TEST_CASE("sampling-mode estimation is unbiased") {
    ParamCircuit c(3);
    c.bs(0, 1, 0.7).ps(1, 0.4).bs(1, 2, 1.2);
    const FockState input({1, 1, 0});
    const auto basis = enumerate_basis(2, 3);
    const Observable obs = number_operator(basis, 2);

    NoiseModel exact;
    const double truth =
        estimate_expectation(c, Eigen::VectorXd(), input, obs, exact).value;

    const int seeds = 200;
    const long long shots = 400;
    double mean = 0.0;
    for (int s = 0; s < seeds; ++s) {
        NoiseModel nm;
        nm.shots = shots;
        nm.seed = static_cast<std::uint64_t>(s) + 1;
        mean += estimate_expectation(c, Eigen::VectorXd(), input, obs, nm).value;
    }
    mean /= seeds;
    // Per-shot values lie in [0, 2]; var <= 1 per shot, so the mean of
    // `seeds` estimates at `shots` each has sigma <= 1/sqrt(seeds*shots).
    const double sigma = 1.0 / std::sqrt(static_cast<double>(seeds) * shots);
    CHECK(std::abs(mean - truth) < 5.0 * sigma);
}

TEST_CASE("per-shot contributions are bounded by lambda") {
    const auto basis = enumerate_basis(2, 3);
    const Observable obs = number_operator(basis, 0);
    CHECK(obs.lambda_bound() == doctest::Approx(2.0));
    const Observable proj = state_projector(basis, FockState({1, 1, 0}));
    CHECK(proj.lambda_bound() == doctest::Approx(1.0));
}

TEST_CASE("estimation context keeps derived streams disjoint") {
    EvalContext ctx = EvalContext::from_seed(12);
    RngStream a = ctx.term_stream(0);
    RngStream b = ctx.term_stream(1);
    ctx.advance();
    RngStream c = ctx.term_stream(0);
    CHECK(a.next_u64() != b.next_u64());
    CHECK(a.next_u64() != c.next_u64());
}
