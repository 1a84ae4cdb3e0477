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

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "photongrad/experiments.hpp"

namespace {

// Exit codes: 0 success, 2 config error, 3 tolerance breach (gradcheck),
// 4 runtime failure.
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kToleranceBreach = 3;
constexpr int kRuntimeFailure = 4;

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<long long> shots;
    bool exact = false;
    std::optional<double> hom;
    std::optional<int> reps;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool config_required) {
    auto* copt = cmd->add_option("--config", flags.config_path, "experiment config JSON");
    if (config_required) copt->required();
    cmd->add_option("--out", flags.out_dir, "output directory")->required();
    cmd->add_option("--seed", flags.seed, "override RNG seed");
    cmd->add_option("--shots", flags.shots, "override shots per expectation value");
    cmd->add_flag("--exact", flags.exact, "use exact probabilities (no shot noise)");
    cmd->add_option("--hom", flags.hom, "override HOM visibility in [0,1]");
    cmd->add_option("--reps", flags.reps, "override repetition count");
}

photongrad::ExperimentConfig load_config(const std::string& kind,
                                         const CommonFlags& flags) {
    nlohmann::json j;
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in)
            throw std::invalid_argument("config: cannot open '" + flags.config_path + "'");
        in >> j;
    } else {
        j = photongrad::ExperimentConfig::default_json(kind);
    }
    if (!j.contains("experiment")) j["experiment"] = kind;
    if (j.at("experiment").get<std::string>() != kind)
        throw std::invalid_argument("config: experiment kind does not match subcommand");

    // Flag overrides become part of the effective (hashed) config.
    if (flags.seed) j["noise"]["seed"] = *flags.seed;
    if (flags.exact) j["noise"]["shots"] = nullptr;
    if (flags.shots) j["noise"]["shots"] = *flags.shots;
    if (flags.hom) j["noise"]["hom"] = *flags.hom;
    if (flags.reps) j["repetitions"] = *flags.reps;
    return photongrad::ExperimentConfig::from_json(std::move(j));
}

int run_vqe_cmd(const CommonFlags& flags) {
    const auto config = load_config("vqe", flags);
    const auto artifact = photongrad::run_vqe(config, flags.out_dir);
    std::printf("vqe: oracle ground energy %.6f\n", artifact.oracle_energy);
    for (const auto& arm : artifact.arms) {
        std::printf("  %-12s mean final energy %.6f (std %.3g)\n",
                    arm.optimizer.label().c_str(), arm.mean_final_exact,
                    arm.std_final_exact);
    }
    std::printf("artifacts written to %s\n", flags.out_dir.c_str());
    return kOk;
}

int run_qcbm_cmd(const CommonFlags& flags) {
    const auto config = load_config("qcbm", flags);
    const auto artifact = photongrad::run_qcbm(config, flags.out_dir);
    std::printf("qcbm: loss %s\n", config.qcbm_loss.c_str());
    for (const auto& arm : artifact.arms) {
        std::printf("  %-12s mean final loss %.6f (std %.3g)\n",
                    arm.optimizer.label().c_str(), arm.mean_final_exact,
                    arm.std_final_exact);
    }
    std::printf("artifacts written to %s\n", flags.out_dir.c_str());
    return kOk;
}

int run_bounds_cmd(const CommonFlags& flags) {
    const auto config = load_config("bounds", flags);
    const auto summary = photongrad::run_bound_sweep(config, flags.out_dir);
    for (const auto& row : summary.at("rows")) {
        std::printf("n=%d eps=%g delta=%g Lambda=%g lambda=%g  N_PSR=%.4g  N_FD=%.4g  ratio=%.4g\n",
                    row.at("n").get<int>(), row.at("epsilon").get<double>(),
                    row.at("fd_stepsize").get<double>(),
                    row.at("failure_prob").get<double>(),
                    row.at("lambda").get<double>(), row.at("n_psr").get<double>(),
                    row.at("n_fd").get<double>(), row.at("ratio").get<double>());
    }
    const auto& scaling = summary.at("scaling");
    std::printf("scaling (sum|c_p|)^2 ~ n^alpha: alpha=%.4f over [1,%d], alpha=%.4f over [%d,%d]\n",
                scaling.at("alpha_full_range").get<double>(),
                scaling.at("n_max").get<int>(),
                scaling.at("alpha_fit_window").get<double>(),
                scaling.at("fit_window")[0].get<int>(),
                scaling.at("fit_window")[1].get<int>());
    std::printf("artifacts written to %s\n", flags.out_dir.c_str());
    return kOk;
}

int run_gradcheck_cmd(const CommonFlags& flags) {
    const auto config = load_config("gradcheck", flags);
    const auto report = photongrad::run_grad_check(config, flags.out_dir);
    std::printf("gradcheck: max |psr-oracle| = %.3e, light-cone dev = %.3e, "
                "fd cross dev = %.3e, kl dev = %.3e, mmd dev = %.3e\n",
                report.max_psr_oracle_dev, report.max_light_cone_dev,
                report.max_fd_cross_dev, report.max_kl_dev, report.max_mmd_dev);
    if (!report.pass) {
        std::fprintf(stderr, "gradcheck: tolerance breach (see report.json)\n");
        return kToleranceBreach;
    }
    std::printf("gradcheck: pass\n");
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"photonic circuit simulator with parameter-shift-rule gradients"};
    app.require_subcommand(1);

    CommonFlags vqe_flags, qcbm_flags, bounds_flags, grad_flags;
    auto* vqe = app.add_subcommand("vqe", "variational eigensolver experiment");
    add_common_flags(vqe, vqe_flags, true);
    auto* qcbm = app.add_subcommand("qcbm", "Born-machine training experiment");
    add_common_flags(qcbm, qcbm_flags, true);
    auto* bounds = app.add_subcommand("bounds", "Hoeffding sample-count sweep");
    add_common_flags(bounds, bounds_flags, false);
    auto* gradcheck = app.add_subcommand("gradcheck", "gradient oracle equivalence suite");
    add_common_flags(gradcheck, grad_flags, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kConfigError : kOk;
    }

    try {
        if (vqe->parsed()) return run_vqe_cmd(vqe_flags);
        if (qcbm->parsed()) return run_qcbm_cmd(qcbm_flags);
        if (bounds->parsed()) return run_bounds_cmd(bounds_flags);
        if (gradcheck->parsed()) return run_gradcheck_cmd(grad_flags);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntimeFailure;
    }
    return kConfigError;
}
