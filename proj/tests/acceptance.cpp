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

// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line;
// the binary exits nonzero if any criterion fails. The first argument is
// the path to the photongrad CLI binary (used by criterion 1).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "photongrad/evolve.hpp"
#include "photongrad/experiments.hpp"

using namespace photongrad;

namespace {

constexpr double kPi = std::numbers::pi;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, double seconds) {
    std::printf("%s  criterion %2d  (%6.1fs)  %s\n", pass ? "PASS" : "FAIL", criterion,
                seconds, what.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void run_criterion(int criterion, const std::function<std::pair<bool, std::string>()>& fn) {
    const auto t0 = Clock::now();
    bool pass = false;
    std::string what;
    try {
        auto [p, w] = fn();
        pass = p;
        what = w;
    } catch (const std::exception& e) {
        what = std::string("exception: ") + e.what();
    }
    report(criterion, pass, what, std::chrono::duration<double>(Clock::now() - t0).count());
}

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("photongrad_accept_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

char fmtbuf[512];

// --- criterion 1: Hoeffding numbers through the CLI ------------------------

std::pair<bool, std::string> criterion_1(const std::string& cli) {
    const auto dir = scratch_dir("bounds");
    const auto t0 = Clock::now();
    const std::string cmd = cli + " bounds --out " + dir.string() + " > /dev/null";
    const int rc = std::system(cmd.c_str());
    const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    if (rc != 0) return {false, "CLI exited with " + std::to_string(rc)};

    const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
    double n_psr = 0, n_fd = 0, ratio = 0;
    bool found = false;
    for (const auto& row : summary.at("rows")) {
        if (row.at("n") == 4 && row.at("epsilon") == 0.1 && row.at("fd_stepsize") == 0.01 &&
            row.at("failure_prob") == 0.1 && row.at("lambda") == 1.0) {
            n_psr = row.at("n_psr").get<double>();
            n_fd = row.at("n_fd").get<double>();
            ratio = row.at("ratio").get<double>();
            found = true;
        }
    }
    std::filesystem::remove_all(dir);
    const bool pass = found && n_psr >= 26.0e3 && n_psr <= 27.0e3 && n_fd >= 23.5e6 &&
                      n_fd <= 24.5e6 && ratio >= 890.0 && ratio <= 910.0 && elapsed < 1.0;
    std::snprintf(fmtbuf, sizeof(fmtbuf),
                  "Hoeffding numbers: N_PSR=%.4g (26.0e3..27.0e3), N_FD=%.4g "
                  "(23.5e6..24.5e6), ratio=%.1f (900+-10), cli %.2fs (<1s)",
                  n_psr, n_fd, ratio, elapsed);
    return {pass, fmtbuf};
}

// --- criterion 2: shift-rule exactness on 200 random circuits --------------

std::pair<bool, std::string> criterion_2() {
    const auto t0 = Clock::now();
    RngStream rng(202);
    const NoiseModel exact{};
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        RngStream inst_rng = rng.derive(0, static_cast<std::uint64_t>(i));
        const RandomInstance inst =
            random_gradient_instance(inst_rng, 4, 8, 20, i % 2 == 0);
        Eigen::VectorXd theta(inst.circuit.parameter_count());
        for (Eigen::Index k = 0; k < theta.size(); ++k)
            theta(k) = inst_rng.uniform(0.0, 2 * kPi);
        EvalContext ctx = EvalContext::from_seed(0);
        const GradientResult psr = psr_gradient(inst.circuit, theta, inst.input,
                                                inst.observable, inst.param, exact,
                                                ctx, true);
        const GradientResult oracle = commutator_gradient_oracle(
            inst.circuit, theta, inst.input, inst.observable, inst.param);
        worst = std::max(worst, std::abs(psr.complex_value - oracle.complex_value));
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool pass = worst < 1e-9 && elapsed < 120.0;
    std::snprintf(fmtbuf, sizeof(fmtbuf),
                  "PSR exactness on 200 random circuits (n<=4, m<=8, <=20 comps): "
                  "max |psr-oracle| = %.3e (<1e-9)",
                  worst);
    return {pass, fmtbuf};
}

// --- criterion 3: coefficient system and scaling ----------------------------

std::pair<bool, std::string> criterion_3() {
    double worst_residual = 0.0, worst_sum = 0.0, worst_antisym = 0.0;
    for (int n = 1; n <= 20; ++n) {
        const ShiftRule rule = canonical_shift_rule(n);
        worst_residual = std::max(worst_residual, rule.max_residual());
        double sum = 0.0;
        for (double c : rule.coefficients) sum += c;
        worst_sum = std::max(worst_sum, std::abs(sum));
        for (int p = 1; p <= n; ++p) {
            worst_antisym = std::max(
                worst_antisym,
                std::abs(rule.coefficients[static_cast<std::size_t>(2 * n - p)] +
                         rule.coefficients[static_cast<std::size_t>(p - 1)]));
        }
    }
    // Declared asymptotic fit window; the [1, 20] fit sits near 2.5 and is
    // reported by the bounds sweep alongside this one.
    const ScalingTable table = coefficient_norm_scaling(1000, 200, 1000);
    const bool pass = worst_residual < 1e-9 && worst_sum < 1e-9 &&
                      worst_antisym == 0.0 && table.alpha <= 2.3;
    std::snprintf(fmtbuf, sizeof(fmtbuf),
                  "coefficient system n=1..20: residual %.2e (<1e-9), sum %.2e, "
                  "antisym %.1e; alpha=%.4f over [200,1000] (<=2.3)",
                  worst_residual, worst_sum, worst_antisym, table.alpha);
    return {pass, fmtbuf};
}

// --- criterion 4: light-cone reduction on the two-photon example -----------

std::pair<bool, std::string> criterion_4() {
    // Six modes, two photons; the highlighted shifter is reachable by one
    // photon only, so its rule needs 2 evaluations instead of 4.
    ParamCircuit c(6);
    c.bs(0, 1, kPi / 4).bs(1, 2, kPi / 4).ps(2, "phi").bs(2, 3, kPi / 4);
    c.bs(3, 4, kPi / 4).bs(4, 5, kPi / 4).bs(2, 3, kPi / 3).bs(1, 2, kPi / 5);
    const FockState input({1, 0, 0, 0, 1, 0});
    const auto basis = enumerate_basis(2, 6);
    const Observable obs = number_operator(basis, 3);
    Eigen::VectorXd theta(1);
    theta << 0.83;

    const int nu = light_cone_photon_bound(c, input, "phi");
    EvalContext ctx = EvalContext::from_seed(0);
    const NoiseModel exact{};
    const GradientResult reduced =
        psr_gradient(c, theta, input, obs, "phi", exact, ctx, true);
    const GradientResult full =
        psr_gradient(c, theta, input, obs, "phi", exact, ctx, false);
    const double dev = std::abs(reduced.value - full.value);
    const bool pass =
        nu == 1 && reduced.evaluations == 2 && full.evaluations == 4 && dev < 1e-9;
    std::snprintf(fmtbuf, sizeof(fmtbuf),
                  "light cone: nu=%d (want 1), evaluations %lld (want 2, full %lld), "
                  "|reduced-full| = %.2e (<1e-9)",
                  nu, reduced.evaluations, full.evaluations, dev);
    return {pass, fmtbuf};
}

// --- criterion 5: HOM calibration -------------------------------------------

std::pair<bool, std::string> criterion_5() {
    ParamCircuit c(2);
    c.bs(0, 1, kPi / 4);
    const auto basis = enumerate_basis(2, 2);
    const long long shots = 100000;
    bool pass = true;
    std::string detail = "HOM dip at N=1e5:";
    int v_index = 0;
    for (double v : {0.0, 0.5, 0.9, 1.0}) {
        const auto p = noisy_distribution(c, Eigen::VectorXd(), FockState({1, 1}), v);
        RngStream rng(1000 + static_cast<std::uint64_t>(v_index++));
        const SampleRecord rec = sample_distribution(basis, p, shots, rng);
        const double p11 =
            static_cast<double>(rec.count_of(FockState({1, 1}))) / shots;
        const double expected = (1.0 - v) / 2.0;
        const double sigma =
            std::sqrt(std::max(expected * (1.0 - expected), 1e-12) / shots);
        const bool ok = std::abs(p11 - expected) <= 5.0 * sigma + 1e-12;
        pass = pass && ok;
        std::snprintf(fmtbuf, sizeof(fmtbuf), " V=%.1f |dP|=%.2e (5s=%.2e)", v,
                      std::abs(p11 - expected), 5.0 * sigma);
        detail += fmtbuf;
    }
    return {pass, detail};
}

// --- criterion 6: Appendix-B loss gradients ---------------------------------

std::pair<bool, std::string> criterion_6() {
    RngStream rng(606);
    const NoiseModel exact{};
    const std::vector<double> sigmas{0.5, 4.0, 32.0};
    double worst_kl = 0.0, worst_mmd = 0.0;
    for (int i = 0; i < 50; ++i) {
        RngStream inst_rng = rng.derive(0, static_cast<std::uint64_t>(i));
        const RandomInstance inst = random_gradient_instance(inst_rng, 3, 6, 14, true);
        Eigen::VectorXd theta(inst.circuit.parameter_count());
        for (Eigen::Index k = 0; k < theta.size(); ++k)
            theta(k) = inst_rng.uniform(0.0, 2 * kPi);
        const auto basis = enumerate_basis(inst.input.photons(), inst.input.modes());
        std::vector<double> target(basis->size());
        double tsum = 0.0;
        for (auto& tv : target) {
            tv = 0.05 + inst_rng.uniform01();
            tsum += tv;
        }
        for (auto& tv : target) tv /= tsum;

        const int idx = inst.circuit.parameter_index(inst.param);
        auto loss_at = [&](double x, bool mmd) {
            Eigen::VectorXd th = theta;
            th(idx) = x;
            EvalContext c2 = EvalContext::from_seed(0);
            const auto de = measure_distribution(inst.circuit, th, -1, 0.0, inst.input,
                                                 exact, c2);
            return mmd ? mmd_loss(de.q, target, sigmas) : kl_loss(de.q, target);
        };
        const double delta = 1e-6;

        EvalContext ctx = EvalContext::from_seed(0);
        const GradientResult klg = kl_gradient_psr(inst.circuit, theta, inst.input,
                                                   target, inst.param, exact, ctx, true);
        const double kl_fd =
            (loss_at(theta(idx) + delta, false) - loss_at(theta(idx) - delta, false)) /
            (2 * delta);
        worst_kl = std::max(worst_kl, std::abs(klg.value - kl_fd));

        const GradientResult mmdg =
            mmd_gradient_psr(inst.circuit, theta, inst.input, target, sigmas,
                             inst.param, exact, ctx, true);
        const double mmd_fd =
            (loss_at(theta(idx) + delta, true) - loss_at(theta(idx) - delta, true)) /
            (2 * delta);
        worst_mmd = std::max(worst_mmd, std::abs(mmdg.value - mmd_fd));
    }
    const bool pass = worst_kl < 1e-5 && worst_mmd < 1e-5;
    std::snprintf(fmtbuf, sizeof(fmtbuf),
                  "KL/MMD PSR gradients vs central FD over 50 instances: "
                  "max KL dev %.2e, max MMD dev %.2e (<1e-5)",
                  worst_kl, worst_mmd);
    return {pass, fmtbuf};
}

// --- criterion 7: sampling concentration under the Hoeffding bound ---------

std::pair<bool, std::string> criterion_7() {
    // Two-photon interferometer with a projector observable (lambda = 1).
    ParamCircuit c(2);
    c.bs(0, 1, kPi / 4).ps(0, "phi").bs(0, 1, kPi / 4);
    const FockState input({1, 1});
    const auto basis = enumerate_basis(2, 2);
    const Observable proj = state_projector(basis, FockState({2, 0}));
    Eigen::VectorXd theta(1);
    theta << 0.7;
    const NoiseModel exact{};
    EvalContext ectx = EvalContext::from_seed(0);
    const double truth = psr_gradient(c, theta, input, proj, "phi", exact, ectx, false).value;

    const double sum_abs = canonical_shift_rule(2).sum_abs_coefficients();
    const long long shots = 10000;
    const int seeds = 500;
    int exceed_05 = 0, exceed_10 = 0;
    for (int s = 0; s < seeds; ++s) {
        NoiseModel nm;
        nm.shots = shots;
        nm.seed = static_cast<std::uint64_t>(s) + 1;
        EvalContext ctx = EvalContext::from_seed(nm.seed);
        const double est = psr_gradient(c, theta, input, proj, "phi", nm, ctx, false).value;
        const double dev = std::abs(est - truth);
        if (dev > 0.05) ++exceed_05;
        if (dev > 0.1) ++exceed_10;
    }
    auto bound = [&](double eps) {
        return 2.0 * std::exp(-eps * eps * static_cast<double>(shots) /
                              (2.0 * sum_abs * sum_abs));
    };
    const double f05 = static_cast<double>(exceed_05) / seeds;
    const double f10 = static_cast<double>(exceed_10) / seeds;
    const bool pass = f05 <= bound(0.05) && f10 <= bound(0.1);
    std::snprintf(fmtbuf, sizeof(fmtbuf),
                  "concentration over 500 seeds at N=1e4: freq(>0.05)=%.4f "
                  "(bound %.4f), freq(>0.1)=%.4f (bound %.4f)",
                  f05, bound(0.05), f10, bound(0.1));
    return {pass, fmtbuf};
}

// --- criteria 8/9: experiment orderings -------------------------------------

nlohmann::json vqe_json(bool exact, double hom) {
    nlohmann::json j = ExperimentConfig::default_json("vqe");
    if (exact)
        j["noise"]["shots"] = nullptr;
    else
        j["noise"]["shots"] = 5000;
    j["noise"]["hom"] = hom;
    return j;
}

double arm_mean(const RunArtifact& artifact, const std::string& name) {
    for (const auto& arm : artifact.arms) {
        if (arm.optimizer.label() == name) return arm.mean_final_exact;
    }
    throw std::runtime_error("arm not found: " + name);
}

double arm_std(const RunArtifact& artifact, const std::string& name) {
    for (const auto& arm : artifact.arms) {
        if (arm.optimizer.label() == name) return arm.std_final_exact;
    }
    throw std::runtime_error("arm not found: " + name);
}

std::pair<bool, std::string> criterion_8() {
    // (a) exact, V=1
    const RunArtifact exact_run =
        run_vqe(ExperimentConfig::from_json(vqe_json(true, 1.0)), "");
    const double oracle = exact_run.oracle_energy;
    const double psr_a = arm_mean(exact_run, "gd-psr");
    const double fd_a = arm_mean(exact_run, "gd-fd");
    const bool pass_a = std::abs(psr_a - fd_a) <= 1e-3 &&
                        std::abs(psr_a - oracle) <= 1e-3 &&
                        std::abs(fd_a - oracle) <= 1e-3;

    // (b) N=5000, V=1
    const RunArtifact shot_run =
        run_vqe(ExperimentConfig::from_json(vqe_json(false, 1.0)), "");
    const double psr_b = arm_mean(shot_run, "gd-psr");
    const double fd_b = arm_mean(shot_run, "gd-fd");
    const bool pass_b =
        std::abs(psr_b - oracle) <= 0.05 && std::abs(fd_b - oracle) > 0.05;

    // (c) N=5000, V=0.9
    const RunArtifact noisy_run =
        run_vqe(ExperimentConfig::from_json(vqe_json(false, 0.9)), "");
    const double psr_c = arm_mean(noisy_run, "gd-psr");
    const double nm_c = arm_mean(noisy_run, "nelder-mead");
    const bool pass_c = psr_c <= nm_c;

    std::snprintf(fmtbuf, sizeof(fmtbuf),
                  "VQE vs oracle %.4f: (a) psr %.5f fd %.5f (within 1e-3); "
                  "(b) psr err %.4f (<=0.05) fd err %.4f (>0.05); (c) psr %.4f <= nm %.4f",
                  oracle, psr_a, fd_a, std::abs(psr_b - oracle),
                  std::abs(fd_b - oracle), psr_c, nm_c);
    return {pass_a && pass_b && pass_c, fmtbuf};
}

std::pair<bool, std::string> criterion_9() {
    nlohmann::json j = ExperimentConfig::default_json("qcbm");
    j["noise"]["shots"] = 5000;
    j["noise"]["hom"] = 0.9;
    const RunArtifact run = run_qcbm(ExperimentConfig::from_json(j), "");
    const double psr = arm_mean(run, "gd-psr");
    const double spsa = arm_mean(run, "gd-spsa");
    const double nm = arm_mean(run, "nelder-mead");
    const double psr_std = arm_std(run, "gd-psr");
    const double spsa_std = arm_std(run, "gd-spsa");
    const bool pass = psr <= spsa && psr <= nm && psr_std <= spsa_std;
    std::snprintf(fmtbuf, sizeof(fmtbuf),
                  "QCBM N=5000 V=0.9: psr %.4f <= spsa %.4f and <= nm %.4f; "
                  "std psr %.4f <= std spsa %.4f",
                  psr, spsa, nm, psr_std, spsa_std);
    return {pass, fmtbuf};
}

// --- criterion 10: byte-identical reruns at any thread count ----------------

std::pair<bool, std::string> criterion_10() {
    nlohmann::json j = ExperimentConfig::default_json("qcbm");
    j["noise"]["shots"] = 200;
    j["noise"]["hom"] = 0.9;
    j["noise"]["seed"] = 33;
    j["repetitions"] = 2;
    j["optimizers"] = nlohmann::json::array(
        {{{"name", "gd-psr"}, {"method", "gd-psr"}, {"learning_rate", 0.4},
          {"max_iterations", 2}},
         {{"name", "gd-spsa"}, {"method", "gd-spsa"}, {"learning_rate", 0.4},
          {"max_iterations", 2}},
         {{"name", "nelder-mead"}, {"method", "nelder-mead"}, {"max_iterations", 2}}});

    const auto dir1 = scratch_dir("det1");
    const auto dir2 = scratch_dir("det2");
    const auto dir3 = scratch_dir("det3");
    nlohmann::json j1 = j;
    j1["threads"] = 1;
    nlohmann::json j2 = j;
    j2["threads"] = 4;
    run_qcbm(ExperimentConfig::from_json(j1), dir1.string());
    run_qcbm(ExperimentConfig::from_json(j2), dir2.string());
    run_qcbm(ExperimentConfig::from_json(j1), dir3.string());

    bool pass = true;
    int compared = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir1)) {
        if (entry.path().extension() != ".csv") continue;
        const auto name = entry.path().filename();
        ++compared;
        pass = pass && slurp(dir1 / name) == slurp(dir2 / name);
        pass = pass && slurp(dir1 / name) == slurp(dir3 / name);
    }
    pass = pass && compared >= 7;  // 6 traces + aggregate
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
    std::filesystem::remove_all(dir3);
    std::snprintf(fmtbuf, sizeof(fmtbuf),
                  "determinism: %d CSVs byte-identical across reruns and thread counts",
                  compared);
    return {pass, fmtbuf};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-photongrad-cli>\n");
        return 2;
    }
    const std::string cli = argv[1];

    run_criterion(1, [&] { return criterion_1(cli); });
    run_criterion(2, criterion_2);
    run_criterion(3, criterion_3);
    run_criterion(4, criterion_4);
    run_criterion(5, criterion_5);
    run_criterion(6, criterion_6);
    run_criterion(7, criterion_7);
    run_criterion(8, criterion_8);
    run_criterion(9, criterion_9);
    run_criterion(10, criterion_10);

    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
