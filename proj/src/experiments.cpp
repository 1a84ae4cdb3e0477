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

#include "photongrad/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "photongrad/evolve.hpp"

namespace photongrad {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Built-in circuits
// ---------------------------------------------------------------------------

namespace {

/// Arbitrary single-qubit layer on a rail pair: PS(a)–BS–PS(b)–BS–PS(c).
void add_single_qubit_layer(ParamCircuit& c, int rail0, int rail1,
                            const std::string& p0, const std::string& p1,
                            const std::string& p2) {
    c.ps(rail1, p0);
    c.bs(rail0, rail1, kPi / 4);
    c.ps(rail1, p1);
    c.bs(rail0, rail1, kPi / 4);
    c.ps(rail1, p2);
}

/// One-parameter mixing rotation: BS–PS–BS.
void add_mixing_rotation(ParamCircuit& c, int rail0, int rail1, const std::string& p) {
    c.bs(rail0, rail1, kPi / 4);
    c.ps(rail1, p);
    c.bs(rail0, rail1, kPi / 4);
}

/// Post-selected CZ: central 1/3 coupler on the interacting rails and a 1/3
/// splitter from each non-interacting rail into its ancilla. Conditioned on
/// one photon per rail pair the logical map is exactly (1/3)·CZ.
void add_postselected_cz(ParamCircuit& c, int rail_a0, int rail_a1, int rail_b0,
                         int rail_b1, int ancilla_a, int ancilla_b) {
    const double t = 1.0 / std::sqrt(3.0);
    const double r = std::sqrt(2.0 / 3.0);
    Eigen::Matrix2cd splitter;
    splitter << t, r, r, -t;
    Eigen::Matrix2cd central;
    central << t, r, -r, t;
    c.unitary({rail_a0, ancilla_a}, splitter);
    c.unitary({rail_a1, rail_b1}, central);
    c.unitary({rail_b0, ancilla_b}, splitter);
}

}  // namespace

ParamCircuit vqe_ansatz() {
    ParamCircuit c(6);
    add_single_qubit_layer(c, 0, 1, "theta_0", "theta_1", "theta_2");
    add_single_qubit_layer(c, 2, 3, "theta_3", "theta_4", "theta_5");
    add_postselected_cz(c, 0, 1, 2, 3, 4, 5);
    add_mixing_rotation(c, 0, 1, "theta_6");
    add_mixing_rotation(c, 2, 3, "theta_7");
    return c;
}

FockState vqe_input() { return FockState({1, 0, 1, 0, 0, 0}); }

ParamCircuit qcbm_ansatz() {
    ParamCircuit c(8);
    int param = 0;
    int fixed = 0;
    for (int col = 0; col < 8; ++col) {
        const int first = (col % 2 == 0) ? 0 : 1;
        for (int a = first; a + 1 < 8; a += 2) {
            const std::string name = "theta_" + std::to_string(param++);
            c.bs(a, a + 1, kPi / 4);
            c.ps(a, name);
            c.bs(a, a + 1, kPi / 4);
            // Fixed golden-angle phase: keeps the parameter count at 28 while
            // breaking the real-rotation structure of a bare BS-PS-BS cell.
            c.ps(a + 1, 2.399963229728653 * ++fixed);
        }
    }
    return c;
}

FockState qcbm_input() { return FockState({1, 1, 1, 0, 0, 0, 0, 0}); }

// ---------------------------------------------------------------------------
// VQE observable
// ---------------------------------------------------------------------------

namespace {

Eigen::Matrix2cd pauli_matrix(char letter) {
    Eigen::Matrix2cd m;
    const std::complex<double> i{0.0, 1.0};
    switch (letter) {
        case 'I': m << 1, 0, 0, 1; break;
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, -i, i, 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default:
            throw std::invalid_argument("pauli word letters must be I, X, Y or Z");
    }
    return m;
}

/// Rail-pair rotation mapping the letter's eigenbasis onto the Z basis.
Eigen::Matrix2cd pauli_rotation(char letter) {
    Eigen::Matrix2cd m;
    const std::complex<double> i{0.0, 1.0};
    const double s = 1.0 / std::sqrt(2.0);
    switch (letter) {
        case 'X': m << s, s, s, -s; return m;                  // H
        case 'Y': m << s, -i * s, s, i * s; return m;          // H·S†
        default: throw std::logic_error("rotation only needed for X and Y");
    }
}

const std::vector<FockState>& logical_states() {
    static const std::vector<FockState> states = {
        FockState({1, 0, 1, 0, 0, 0}),  // |00>
        FockState({1, 0, 0, 1, 0, 0}),  // |01>
        FockState({0, 1, 1, 0, 0, 0}),  // |10>
        FockState({0, 1, 0, 1, 0, 0}),  // |11>
    };
    return states;
}

Eigen::Matrix4cd assemble_logical_hamiltonian(const std::vector<PauliTerm>& hamiltonian) {
    Eigen::Matrix4cd h = Eigen::Matrix4cd::Zero();
    for (const auto& term : hamiltonian) {
        if (term.word.size() != 2)
            throw std::invalid_argument("pauli word must have two letters");
        Eigen::Matrix4cd word = Eigen::Matrix4cd::Zero();
        const Eigen::Matrix2cd p0 = pauli_matrix(term.word[0]);
        const Eigen::Matrix2cd p1 = pauli_matrix(term.word[1]);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c)
                    for (int d = 0; d < 2; ++d)
                        word(2 * a + c, 2 * b + d) = p0(a, b) * p1(c, d);
        h += term.weight * word;
    }
    return h;
}

}  // namespace

Eigen::Matrix4cd pauli_word_matrix(const std::string& word) {
    return assemble_logical_hamiltonian({{word, 1.0}});
}

Observable vqe_observable(const std::vector<PauliTerm>& hamiltonian) {
    const auto basis = enumerate_basis(2, 6);
    const Eigen::Index d = static_cast<Eigen::Index>(basis->size());
    const auto& logical = logical_states();

    // Exact route: lifted Hamiltonian plus the dual-rail projector.
    const Eigen::Matrix4cd h_logical = assemble_logical_hamiltonian(hamiltonian);
    Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd projector = Eigen::MatrixXcd::Zero(d, d);
    std::vector<Eigen::Index> logical_idx;
    for (const auto& s : logical)
        logical_idx.push_back(static_cast<Eigen::Index>(basis->index_of(s)));
    for (int i = 0; i < 4; ++i) {
        projector(logical_idx[i], logical_idx[i]) = 1.0;
        for (int j = 0; j < 4; ++j)
            dense(logical_idx[i], logical_idx[j]) = h_logical(i, j);
    }

    Observable obs;
    obs.dense = std::move(dense);
    obs.dense_projector = std::move(projector);

    // Sampling route: one post-selected term per Pauli word. Z-diagonal
    // words read the detectors directly; X/Y words rotate their rail pair
    // first. The logical outcome value is the product over measured qubits
    // of ±1 (+1 when the photon exits the even rail).
    for (const auto& term : hamiltonian) {
        MeasurementTerm mt;
        mt.weight = term.weight;
        mt.post_select = true;
        for (int q = 0; q < 2; ++q) {
            const char letter = term.word[static_cast<std::size_t>(q)];
            if (letter == 'X' || letter == 'Y') {
                FixedUnitary rot;
                rot.modes = {2 * q, 2 * q + 1};
                rot.block = pauli_rotation(letter);
                mt.rotation.push_back(rot);
            }
        }
        for (int q0 = 0; q0 < 2; ++q0) {
            for (int q1 = 0; q1 < 2; ++q1) {
                double value = 1.0;
                if (term.word[0] != 'I') value *= (q0 == 0) ? 1.0 : -1.0;
                if (term.word[1] != 'I') value *= (q1 == 0) ? 1.0 : -1.0;
                mt.values.emplace(logical[static_cast<std::size_t>(2 * q0 + q1)], value);
            }
        }
        obs.terms.push_back(std::move(mt));
    }
    return obs;
}

double vqe_ground_energy(const std::vector<PauliTerm>& hamiltonian) {
    const Eigen::Matrix4cd h = assemble_logical_hamiltonian(hamiltonian);
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("vqe_ground_energy: Hamiltonian must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(h);
    return solver.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// QCBM target
// ---------------------------------------------------------------------------

std::vector<double> gaussian_mixture_target(std::size_t size,
                                            const std::vector<double>& means,
                                            const std::vector<double>& sigmas,
                                            const std::vector<double>& weights) {
    if (means.empty() || means.size() != sigmas.size() || means.size() != weights.size())
        throw std::invalid_argument("gaussian_mixture_target: component lists disagree");
    std::vector<double> t(size, 0.0);
    double total = 0.0;
    for (std::size_t x = 0; x < size; ++x) {
        for (std::size_t c = 0; c < means.size(); ++c) {
            if (sigmas[c] <= 0.0)
                throw std::invalid_argument("gaussian_mixture_target: sigma must be > 0");
            const double z = (static_cast<double>(x) - means[c]) / sigmas[c];
            t[x] += weights[c] * std::exp(-0.5 * z * z);
        }
        total += t[x];
    }
    if (total <= 0.0)
        throw std::invalid_argument("gaussian_mixture_target: degenerate target");
    for (double& v : t) v /= total;
    return t;
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int thread_count(int configured) {
    if (configured > 0) return configured;
    if (const char* env = std::getenv("PHOTONGRAD_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

namespace {

nlohmann::json default_optimizers(const std::string& kind) {
    nlohmann::json gd_psr = {{"name", "gd-psr"},     {"method", "gd-psr"},
                             {"learning_rate", 0.4}, {"max_iterations", kind == "vqe" ? 150 : 150}};
    nlohmann::json gd_fd = {{"name", "gd-fd"},
                            {"method", "gd-fd"},
                            {"learning_rate", 0.4},
                            {"max_iterations", 150},
                            {"fd_stepsize", 0.01}};
    nlohmann::json gd_spsa = {{"name", "gd-spsa"},
                              {"method", "gd-spsa"},
                              {"learning_rate", 0.4},
                              {"max_iterations", 150},
                              {"spsa_c", 0.1}};
    nlohmann::json nm = {{"name", "nelder-mead"},
                         {"method", "nelder-mead"},
                         {"max_iterations", kind == "vqe" ? 600 : 600},
                         {"simplex_step", 0.1}};
    if (kind == "vqe") return nlohmann::json::array({gd_psr, gd_fd, nm});
    return nlohmann::json::array({gd_psr, gd_spsa, nm});
}

}  // namespace

nlohmann::json ExperimentConfig::default_json(const std::string& kind) {
    nlohmann::json j;
    j["experiment"] = kind;
    if (kind == "vqe" || kind == "qcbm") {
        j["noise"] = {{"shots", 5000}, {"hom", 1.0}, {"seed", 7}};
        j["repetitions"] = 10;
        j["threads"] = 0;
        j["optimizers"] = default_optimizers(kind);
    }
    if (kind == "vqe") {
        j["vqe"] = {{"circuit", "builtin:vqe-dual-rail"},
                    {"hamiltonian",
                     {{"II", -1.052}, {"ZI", 0.395}, {"IZ", -0.395},
                      {"ZZ", -0.011}, {"XX", 0.181}, {"YY", 0.181}}}};
    } else if (kind == "qcbm") {
        j["qcbm"] = {{"circuit", "builtin:qcbm-mesh8"},
                     {"loss", "kl"},
                     {"target", {{"means", {30.0, 80.0}}, {"sigmas", {8.0, 8.0}},
                                 {"weights", {0.5, 0.5}}}},
                     {"mmd_sigmas", {0.5, 4.0, 32.0}}};
    } else if (kind == "bounds") {
        nlohmann::json rows = nlohmann::json::array();
        for (int n = 1; n <= 6; ++n)
            rows.push_back({{"n", n}, {"epsilon", 0.1}, {"delta", 0.01},
                            {"failure_prob", 0.1}, {"lambda", 1.0}});
        j["bounds"] = {{"rows", rows},
                       {"scaling_n_max", 1000},
                       {"scaling_fit", {200, 1000}}};
    } else if (kind == "gradcheck") {
        j["noise"] = {{"seed", 11}};
        j["gradcheck"] = {{"instances", 50},
                          {"max_photons", 3},
                          {"max_modes", 6},
                          {"max_components", 14},
                          {"tolerance", 1e-9},
                          {"fd_cross_tolerance", 1e-5},
                          {"loss_instances", 20},
                          {"loss_tolerance", 1e-5},
                          {"concentration",
                           {{"enabled", false},
                            {"seeds", 200},
                            {"shots", 100000},
                            {"epsilons", {0.05, 0.1}}}}};
    } else {
        throw std::invalid_argument("unknown experiment kind '" + kind + "'");
    }
    return j;
}

namespace {

void merge_defaults(nlohmann::json& j, const nlohmann::json& defaults) {
    for (auto it = defaults.begin(); it != defaults.end(); ++it) {
        if (!j.contains(it.key())) {
            j[it.key()] = it.value();
        } else if (it.value().is_object() && j[it.key()].is_object()) {
            merge_defaults(j[it.key()], it.value());
        }
    }
}

OptimizerConfig parse_optimizer(const nlohmann::json& j) {
    OptimizerConfig cfg;
    cfg.method = method_from_string(j.at("method").get<std::string>());
    cfg.name = j.value("name", method_to_string(cfg.method));
    cfg.learning_rate = j.value("learning_rate", 0.4);
    cfg.max_iterations = j.value("max_iterations", 150);
    cfg.tolerance = j.value("tolerance", 0.0);
    cfg.tolerance_window = j.value("tolerance_window", 10);
    cfg.fd_stepsize = j.value("fd_stepsize", 0.01);
    cfg.simplex_step = j.value("simplex_step", 0.1);
    if (cfg.method == Method::GdSpsa) {
        cfg.spsa_gains = SpsaGains::from_learning_rate(
            cfg.learning_rate, cfg.max_iterations, j.value("spsa_c", 0.1));
    }
    if (cfg.max_iterations < 1)
        throw std::invalid_argument("optimizer: max_iterations must be >= 1");
    return cfg;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(nlohmann::json j) {
    if (!j.contains("experiment"))
        throw std::invalid_argument("config: missing 'experiment'");
    const std::string kind = j.at("experiment").get<std::string>();
    merge_defaults(j, default_json(kind));

    ExperimentConfig cfg;
    cfg.kind = kind;

    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        if (n.contains("shots") && !n.at("shots").is_null())
            cfg.noise.shots = n.at("shots").get<long long>();
        cfg.noise.hom_visibility = n.value("hom", 1.0);
        cfg.noise.seed = n.value("seed", std::uint64_t{0});
        cfg.noise.validate();
    }
    cfg.repetitions = j.value("repetitions", 10);
    if (cfg.repetitions < 1)
        throw std::invalid_argument("config: repetitions must be >= 1");
    cfg.threads = j.value("threads", 0);

    if (j.contains("optimizers")) {
        for (const auto& o : j.at("optimizers")) cfg.optimizers.push_back(parse_optimizer(o));
    }

    if (kind == "vqe") {
        const auto& v = j.at("vqe");
        cfg.circuit_ref = v.value("circuit", std::string("builtin:vqe-dual-rail"));
        for (auto it = v.at("hamiltonian").begin(); it != v.at("hamiltonian").end(); ++it)
            cfg.hamiltonian.push_back({it.key(), it.value().get<double>()});
        if (cfg.hamiltonian.empty())
            throw std::invalid_argument("config: vqe.hamiltonian is empty");
    } else if (kind == "qcbm") {
        const auto& q = j.at("qcbm");
        cfg.circuit_ref = q.value("circuit", std::string("builtin:qcbm-mesh8"));
        cfg.qcbm_loss = q.value("loss", std::string("kl"));
        if (cfg.qcbm_loss != "kl" && cfg.qcbm_loss != "mmd")
            throw std::invalid_argument("config: qcbm.loss must be 'kl' or 'mmd'");
        cfg.mmd_sigmas = q.value("mmd_sigmas", std::vector<double>{0.5, 4.0, 32.0});
        cfg.target_spec = q.at("target");
        // Validate the component lists early; materialized per output space.
        (void)cfg.make_target(8);
    } else if (kind == "bounds") {
        const auto& b = j.at("bounds");
        for (const auto& r : b.at("rows")) {
            BoundsRow row;
            row.n = r.at("n").get<int>();
            row.epsilon = r.value("epsilon", 0.1);
            row.delta = r.value("delta", 0.01);
            row.failure_prob = r.value("failure_prob", 0.1);
            row.lambda = r.value("lambda", 1.0);
            cfg.bounds_rows.push_back(row);
        }
        cfg.scaling_n_max = b.value("scaling_n_max", 1000);
        const auto fit = b.value("scaling_fit", std::vector<int>{200, 1000});
        if (fit.size() != 2)
            throw std::invalid_argument("config: bounds.scaling_fit must be [from, to]");
        cfg.scaling_fit_from = fit[0];
        cfg.scaling_fit_to = fit[1];
    } else if (kind == "gradcheck") {
        const auto& g = j.at("gradcheck");
        cfg.gradcheck.instances = g.value("instances", 50);
        cfg.gradcheck.max_photons = g.value("max_photons", 3);
        cfg.gradcheck.max_modes = g.value("max_modes", 6);
        cfg.gradcheck.max_components = g.value("max_components", 14);
        cfg.gradcheck.tolerance = g.value("tolerance", 1e-9);
        cfg.gradcheck.fd_cross_tolerance = g.value("fd_cross_tolerance", 1e-5);
        cfg.gradcheck.loss_instances = g.value("loss_instances", 20);
        cfg.gradcheck.loss_tolerance = g.value("loss_tolerance", 1e-5);
        if (g.contains("concentration")) {
            const auto& c = g.at("concentration");
            cfg.gradcheck.concentration = c.value("enabled", false);
            cfg.gradcheck.concentration_seeds = c.value("seeds", 200);
            cfg.gradcheck.concentration_shots = c.value("shots", 100000LL);
            cfg.gradcheck.concentration_epsilons =
                c.value("epsilons", std::vector<double>{0.05, 0.1});
        }
    }

    cfg.raw = std::move(j);
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config: parse error in '" + path + "': " + e.what());
    }
    return from_json(std::move(j));
}

std::vector<double> ExperimentConfig::make_target(std::size_t size) const {
    return gaussian_mixture_target(
        size, target_spec.at("means").get<std::vector<double>>(),
        target_spec.at("sigmas").get<std::vector<double>>(),
        target_spec.at("weights").get<std::vector<double>>());
}

CircuitFile ExperimentConfig::resolve_circuit() const {
    if (circuit_ref == "builtin:vqe-dual-rail")
        return CircuitFile{vqe_ansatz(), vqe_input()};
    if (circuit_ref == "builtin:qcbm-mesh8")
        return CircuitFile{qcbm_ansatz(), qcbm_input()};
    if (circuit_ref.rfind("builtin:", 0) == 0)
        throw std::invalid_argument("config: unknown builtin circuit '" + circuit_ref + "'");
    CircuitFile file = load_circuit_file(circuit_ref);
    if (!file.input.has_value())
        throw std::invalid_argument("config: circuit file '" + circuit_ref +
                                    "' must declare an \"input\" state");
    if (file.circuit.parameter_count() == 0)
        throw std::invalid_argument("config: circuit '" + circuit_ref +
                                    "' has no tunable parameters");
    return file;
}

std::string ExperimentConfig::config_hash() const {
    // Execution plumbing (worker count) is not part of the experiment
    // definition; identical experiments hash identically at any thread count.
    nlohmann::json canonical = raw;
    canonical.erase("threads");
    return fnv1a_hex(canonical.dump());
}

// ---------------------------------------------------------------------------
// Run driver
// ---------------------------------------------------------------------------

namespace {

using Clock = std::chrono::steady_clock;

/// Loss/gradient closures for one experiment model, bound per repetition.
struct RunModel {
    std::function<LossSample(const Eigen::VectorXd&, EvalContext&)> loss;
    std::function<StepEval(const Eigen::VectorXd&, int, EvalContext&, RngStream&)>
        psr_step;
    std::function<StepEval(const Eigen::VectorXd&, double, EvalContext&)> fd_step;
    std::function<double(const Eigen::VectorXd&)> exact_loss;
    int dimension = 0;
};

OptimizationTrace run_single(const RunModel& model, const OptimizerConfig& opt,
                             Eigen::VectorXd theta0, EvalContext& ctx,
                             RngStream spsa_rng) {
    switch (opt.method) {
        case Method::GdPsr:
            return gradient_descent(
                [&](const Eigen::VectorXd& th, int k) {
                    return model.psr_step(th, k, ctx, spsa_rng);
                },
                std::move(theta0), opt);
        case Method::GdFd:
            return gradient_descent(
                [&](const Eigen::VectorXd& th, int) {
                    return model.fd_step(th, opt.fd_stepsize, ctx);
                },
                std::move(theta0), opt);
        case Method::GdSpsa:
            return gradient_descent(
                [&](const Eigen::VectorXd& th, int k) {
                    StepEval se;
                    long long evals = 0, shots = 0;
                    const LossSample at = model.loss(th, ctx);
                    evals += at.evaluations;
                    shots += at.shots;
                    se.loss = at.loss;
                    se.evaluations_loss = at.evaluations;
                    se.grad = spsa_gradient(
                        [&](const Eigen::VectorXd& x) {
                            const LossSample s = model.loss(x, ctx);
                            evals += s.evaluations;
                            shots += s.shots;
                            return s.loss;
                        },
                        th, k, opt.spsa_gains, spsa_rng);
                    se.evaluations = evals;
                    se.shots = shots;
                    return se;
                },
                std::move(theta0), opt);
        case Method::NelderMead:
            return nelder_mead(
                [&](const Eigen::VectorXd& th) { return model.loss(th, ctx); },
                std::move(theta0), opt);
    }
    throw std::logic_error("run_single: unhandled method");
}

struct TaskOutcome {
    OptimizationTrace trace;
    double final_exact = 0.0;
    double wall_seconds = 0.0;
    long long starved_evaluations = 0;
};

/// Runs all (arm, repetition) tasks, possibly in parallel; every task owns
/// RNG streams derived from (arm, rep), so results are identical at any
/// thread count.
std::vector<std::vector<TaskOutcome>> run_arms(
    const ExperimentConfig& config, const RunModel& model) {
    const int arms = static_cast<int>(config.optimizers.size());
    const int reps = config.repetitions;
    std::vector<std::vector<TaskOutcome>> results(
        static_cast<std::size_t>(arms),
        std::vector<TaskOutcome>(static_cast<std::size_t>(reps)));

    struct Task {
        int arm;
        int rep;
    };
    std::vector<Task> tasks;
    for (int a = 0; a < arms; ++a)
        for (int r = 0; r < reps; ++r) tasks.push_back({a, r});

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            const Task t = tasks[i];
            try {
                const auto t0 = Clock::now();
                RngStream rep_stream =
                    RngStream(config.noise.seed)
                        .derive(static_cast<std::uint64_t>(t.arm) + 1,
                                static_cast<std::uint64_t>(t.rep) + 1);
                Eigen::VectorXd theta0(model.dimension);
                for (int i2 = 0; i2 < model.dimension; ++i2)
                    theta0(i2) = rep_stream.uniform(0.0, 2.0 * kPi);
                EvalContext ctx(rep_stream.derive(0xEC, 1));
                ctx.starvation_policy = StarvationPolicy::ZeroAndCount;
                RngStream spsa_rng = rep_stream.derive(0x5A, 2);

                TaskOutcome out;
                out.trace = run_single(model,
                                       config.optimizers[static_cast<std::size_t>(t.arm)],
                                       theta0, ctx, spsa_rng);
                out.final_exact = model.exact_loss(out.trace.final_theta);
                out.starved_evaluations = ctx.starvation_events;
                out.wall_seconds =
                    std::chrono::duration<double>(Clock::now() - t0).count();
                results[static_cast<std::size_t>(t.arm)][static_cast<std::size_t>(t.rep)] =
                    std::move(out);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    const int workers = std::min<int>(thread_count(config.threads),
                                      static_cast<int>(tasks.size()));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string trace_csv(const ExperimentConfig& config, const std::string& arm_label,
                      int rep, const OptimizationTrace& trace) {
    std::string s;
    s += "# photongrad " + config.kind + " trace\n";
    s += "# config_hash=" + config.config_hash() + "\n";
    s += "# arm=" + arm_label + " rep=" + std::to_string(rep) +
         " seed=" + std::to_string(config.noise.seed) +
         " shots=" + (config.noise.exact() ? std::string("exact")
                                           : std::to_string(*config.noise.shots)) +
         " hom=" + fmt(config.noise.hom_visibility) + "\n";
    s += "iteration,loss,shots_cumulative,evaluations,evaluations_loss";
    const Eigen::Index d = trace.points.empty() ? 0 : trace.points.front().theta.size();
    for (Eigen::Index i = 0; i < d; ++i) s += ",theta_" + std::to_string(i);
    s += "\n";
    long long shots_cum = 0;
    for (const auto& pt : trace.points) {
        shots_cum += pt.shots;
        s += std::to_string(pt.iteration) + "," + fmt(pt.loss) + "," +
             std::to_string(shots_cum) + "," + std::to_string(pt.evaluations) + "," +
             std::to_string(pt.evaluations_loss);
        for (Eigen::Index i = 0; i < pt.theta.size(); ++i) s += "," + fmt(pt.theta(i));
        s += "\n";
    }
    return s;
}

std::string aggregate_csv(const ExperimentConfig& config,
                          const std::vector<ArmResult>& arms) {
    std::string s;
    s += "# photongrad " + config.kind + " aggregate\n";
    s += "# config_hash=" + config.config_hash() + "\n";
    s += "optimizer,iteration,loss_mean,loss_std,shots_cumulative_mean\n";
    for (const auto& arm : arms) {
        std::size_t longest = 0;
        for (const auto& rep : arm.reps)
            longest = std::max(longest, rep.trace.points.size());
        std::vector<long long> shots_cum(arm.reps.size(), 0);
        for (std::size_t it = 0; it < longest; ++it) {
            double sum = 0.0, sum2 = 0.0, shots_sum = 0.0;
            int count = 0;
            for (std::size_t r = 0; r < arm.reps.size(); ++r) {
                const auto& pts = arm.reps[r].trace.points;
                if (it < pts.size()) {
                    shots_cum[r] += pts[it].shots;
                    const double loss = pts[it].loss;
                    sum += loss;
                    sum2 += loss * loss;
                    shots_sum += static_cast<double>(shots_cum[r]);
                    ++count;
                }
            }
            if (count == 0) continue;
            const double mean = sum / count;
            const double var =
                (count > 1) ? std::max(0.0, (sum2 - count * mean * mean) / (count - 1))
                            : 0.0;
            s += arm.optimizer.label() + "," + std::to_string(it) + "," + fmt(mean) +
                 "," + fmt(std::sqrt(var)) + "," + fmt(shots_sum / count) + "\n";
        }
    }
    return s;
}

std::vector<ArmResult> collect_arms(const ExperimentConfig& config,
                                    const std::vector<std::vector<TaskOutcome>>& outcomes) {
    std::vector<ArmResult> arms;
    for (std::size_t a = 0; a < config.optimizers.size(); ++a) {
        ArmResult arm;
        arm.optimizer = config.optimizers[a];
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t r = 0; r < outcomes[a].size(); ++r) {
            const TaskOutcome& out = outcomes[a][r];
            RepResult rep;
            rep.rep = static_cast<int>(r);
            rep.trace = out.trace;
            rep.final_loss =
                out.trace.points.empty() ? 0.0 : out.trace.points.back().loss;
            rep.final_loss_exact = out.final_exact;
            rep.starved_evaluations = out.starved_evaluations;
            rep.wall_seconds = out.wall_seconds;
            sum += rep.final_loss_exact;
            sum2 += rep.final_loss_exact * rep.final_loss_exact;
            arm.reps.push_back(std::move(rep));
        }
        const int n = static_cast<int>(arm.reps.size());
        arm.mean_final_exact = n ? sum / n : 0.0;
        arm.std_final_exact =
            (n > 1)
                ? std::sqrt(std::max(0.0, (sum2 - n * arm.mean_final_exact *
                                                      arm.mean_final_exact) /
                                              (n - 1)))
                : 0.0;
        arms.push_back(std::move(arm));
    }
    return arms;
}

nlohmann::json noise_json(const NoiseModel& noise) {
    nlohmann::json j;
    if (noise.exact())
        j["shots"] = nullptr;
    else
        j["shots"] = *noise.shots;
    j["hom"] = noise.hom_visibility;
    j["seed"] = noise.seed;
    return j;
}

RunArtifact emit_run(const ExperimentConfig& config, const std::string& out_dir,
                     const std::vector<std::vector<TaskOutcome>>& outcomes,
                     nlohmann::json extra_summary, const ParamCircuit& circuit,
                     const FockState& input) {
    RunArtifact artifact;
    artifact.kind = config.kind;
    artifact.hash = config.config_hash();
    artifact.arms = collect_arms(config, outcomes);

    nlohmann::json summary;
    summary["experiment"] = config.kind;
    summary["config_hash"] = artifact.hash;
    summary["noise"] = noise_json(config.noise);
    summary["repetitions"] = config.repetitions;
    for (auto it = extra_summary.begin(); it != extra_summary.end(); ++it)
        summary[it.key()] = it.value();

    nlohmann::json arms_json = nlohmann::json::array();
    for (const auto& arm : artifact.arms) {
        nlohmann::json a;
        a["name"] = arm.optimizer.label();
        a["method"] = method_to_string(arm.optimizer.method);
        a["mean_final_loss_exact"] = arm.mean_final_exact;
        a["std_final_loss_exact"] = arm.std_final_exact;
        nlohmann::json reps = nlohmann::json::array();
        for (const auto& rep : arm.reps) {
            reps.push_back({{"rep", rep.rep},
                            {"final_loss", rep.final_loss},
                            {"final_loss_exact", rep.final_loss_exact},
                            {"total_shots", rep.trace.total_shots},
                            {"total_evaluations", rep.trace.total_evaluations},
                            {"starved_evaluations", rep.starved_evaluations},
                            {"aborted_non_finite", rep.trace.aborted_non_finite},
                            {"wall_seconds", rep.wall_seconds}});
        }
        a["reps"] = std::move(reps);
        arms_json.push_back(std::move(a));
    }
    summary["arms"] = std::move(arms_json);
    artifact.summary = summary;

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        const std::filesystem::path dir(out_dir);
        write_text_file(dir / "config.json", config.raw.dump(2) + "\n");
        write_text_file(dir / "circuit.json",
                        circuit_file_json(circuit, input).dump(2) + "\n");
        for (const auto& arm : artifact.arms) {
            for (const auto& rep : arm.reps) {
                write_text_file(dir / ("trace_" + arm.optimizer.label() + "_" +
                                       std::to_string(rep.rep) + ".csv"),
                                trace_csv(config, arm.optimizer.label(), rep.rep,
                                          rep.trace));
            }
        }
        write_text_file(dir / "aggregate.csv", aggregate_csv(config, artifact.arms));
        write_text_file(dir / "summary.json", summary.dump(2) + "\n");
    }
    return artifact;
}

/// Generic FD step on an arbitrary loss closure (forward differences,
/// fresh estimates for both points of every parameter).
StepEval loss_fd_step(const RunModel& model, const Eigen::VectorXd& theta,
                      double stepsize, EvalContext& ctx) {
    StepEval se;
    se.grad = Eigen::VectorXd::Zero(theta.size());
    bool recorded = false;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        Eigen::VectorXd up = theta;
        up(i) += stepsize;
        const LossSample f_up = model.loss(up, ctx);
        const LossSample f_at = model.loss(theta, ctx);
        se.grad(i) = (f_up.loss - f_at.loss) / stepsize;
        se.evaluations += f_up.evaluations + f_at.evaluations;
        se.shots += f_up.shots + f_at.shots;
        if (!recorded) {
            se.loss = f_at.loss;
            recorded = true;
        }
    }
    return se;
}

}  // namespace

// ---------------------------------------------------------------------------
// VQE
// ---------------------------------------------------------------------------

RunArtifact run_vqe(const ExperimentConfig& config, const std::string& out_dir) {
    if (config.kind != "vqe") throw std::invalid_argument("run_vqe: wrong config kind");
    const CircuitFile resolved = config.resolve_circuit();
    const ParamCircuit& circuit = resolved.circuit;
    const FockState input = resolved.input.value();
    // The dual-rail energy readout fixes the mode layout: rails (0,1) and
    // (2,3) with ancillas 4,5 and one photon per rail pair at the input.
    if (circuit.modes() != 6 || input.photons() != 2 ||
        input.occupation(0) + input.occupation(1) != 1 ||
        input.occupation(2) + input.occupation(3) != 1)
        throw std::invalid_argument(
            "run_vqe: circuit must use the dual-rail layout (6 modes, one photon "
            "per rail pair)");
    const Observable obs = vqe_observable(config.hamiltonian);
    const double oracle = vqe_ground_energy(config.hamiltonian);
    const NoiseModel base_noise = config.noise;

    RunModel model;
    model.dimension = circuit.parameter_count();
    model.loss = [&, base_noise](const Eigen::VectorXd& th, EvalContext& ctx) {
        const Estimate est = estimate_expectation(circuit, th, input, obs, base_noise, ctx);
        return LossSample{est.value, est.evaluations, est.shots};
    };
    model.psr_step = [&, base_noise](const Eigen::VectorXd& th, int, EvalContext& ctx,
                                     RngStream&) {
        const ObsGradient g =
            psr_gradient_all(circuit, th, input, obs, base_noise, ctx, true);
        StepEval se;
        se.loss = g.loss;
        se.grad = g.grad;
        se.evaluations = g.evaluations;
        se.evaluations_loss = 1;
        se.shots = g.shots;
        return se;
    };
    model.fd_step = [&, base_noise](const Eigen::VectorXd& th, double stepsize,
                                    EvalContext& ctx) {
        const ObsGradient g =
            fd_gradient_all(circuit, th, input, obs, stepsize, base_noise, ctx);
        StepEval se;
        se.loss = g.loss;
        se.grad = g.grad;
        se.evaluations = g.evaluations;
        se.evaluations_loss = 0;  // loss reused from the first forward pair
        se.shots = g.shots;
        return se;
    };
    NoiseModel exact_noise = base_noise;
    exact_noise.shots.reset();
    model.exact_loss = [&, exact_noise](const Eigen::VectorXd& th) {
        EvalContext ctx = EvalContext::from_seed(0);
        return estimate_expectation(circuit, th, input, obs, exact_noise, ctx).value;
    };

    const std::vector<std::vector<TaskOutcome>> outcomes = run_arms(config, model);

    nlohmann::json extra;
    extra["oracle_ground_energy"] = oracle;
    nlohmann::json ham = nlohmann::json::object();
    for (const auto& t : config.hamiltonian) ham[t.word] = t.weight;
    extra["hamiltonian"] = ham;
    RunArtifact artifact = emit_run(config, out_dir, outcomes, extra, circuit, input);
    artifact.oracle_energy = oracle;
    return artifact;
}

// ---------------------------------------------------------------------------
// QCBM
// ---------------------------------------------------------------------------

RunArtifact run_qcbm(const ExperimentConfig& config, const std::string& out_dir) {
    if (config.kind != "qcbm") throw std::invalid_argument("run_qcbm: wrong config kind");
    const CircuitFile resolved = config.resolve_circuit();
    const ParamCircuit& circuit = resolved.circuit;
    const FockState input = resolved.input.value();
    const auto out_basis = enumerate_basis(input.photons(), input.modes());
    const std::vector<double> target = config.make_target(out_basis->size());
    const std::vector<double> sigmas = config.mmd_sigmas;
    const bool use_mmd = (config.qcbm_loss == "mmd");
    const NoiseModel base_noise = config.noise;

    RunModel model;
    model.dimension = circuit.parameter_count();
    model.loss = [&, base_noise](const Eigen::VectorXd& th, EvalContext& ctx) {
        const DistributionEstimate de =
            measure_distribution(circuit, th, -1, 0.0, input, base_noise, ctx);
        const double loss = use_mmd ? mmd_loss(de.q, target, sigmas)
                                    : kl_loss(de.q, target);
        return LossSample{loss, 1, de.shots};
    };
    model.psr_step = [&, base_noise](const Eigen::VectorXd& th, int, EvalContext& ctx,
                                     RngStream&) {
        const LossGradient g =
            use_mmd ? mmd_gradient_psr_all(circuit, th, input, target, sigmas,
                                           base_noise, ctx, true)
                    : kl_gradient_psr_all(circuit, th, input, target, base_noise, ctx,
                                          true);
        StepEval se;
        se.loss = g.loss;
        se.grad = g.grad;
        se.evaluations = g.evaluations;
        se.evaluations_loss = 1;
        se.shots = g.shots;
        return se;
    };
    model.fd_step = [&](const Eigen::VectorXd& th, double stepsize, EvalContext& ctx) {
        return loss_fd_step(model, th, stepsize, ctx);
    };
    NoiseModel exact_noise = base_noise;
    exact_noise.shots.reset();
    model.exact_loss = [&, exact_noise](const Eigen::VectorXd& th) {
        EvalContext ctx = EvalContext::from_seed(0);
        const DistributionEstimate de =
            measure_distribution(circuit, th, -1, 0.0, input, exact_noise, ctx);
        return use_mmd ? mmd_loss(de.q, target, sigmas) : kl_loss(de.q, target);
    };

    const std::vector<std::vector<TaskOutcome>> outcomes = run_arms(config, model);

    nlohmann::json extra;
    extra["loss"] = config.qcbm_loss;
    extra["target_size"] = target.size();
    RunArtifact artifact = emit_run(config, out_dir, outcomes, extra, circuit, input);

    // Final-model histogram against the target: exact output distribution at
    // each repetition's final parameters (configured visibility), averaged
    // per optimizer arm.
    if (!out_dir.empty()) {
        std::string csv = "index,target";
        for (const auto& opt : config.optimizers) csv += "," + opt.label();
        csv += "\n";
        std::vector<std::vector<double>> arm_mean(
            config.optimizers.size(), std::vector<double>(target.size(), 0.0));
        for (std::size_t a = 0; a < outcomes.size(); ++a) {
            for (const auto& out : outcomes[a]) {
                const Eigen::MatrixXcd u =
                    compose_unitary(circuit, out.trace.final_theta);
                const auto q = noisy_distribution_from_unitary(
                    u, input, *out_basis, config.noise.hom_visibility);
                for (std::size_t x = 0; x < q.size(); ++x)
                    arm_mean[a][x] += q[x] / static_cast<double>(outcomes[a].size());
            }
        }
        for (std::size_t x = 0; x < target.size(); ++x) {
            csv += std::to_string(x) + "," + fmt(target[x]);
            for (std::size_t a = 0; a < arm_mean.size(); ++a)
                csv += "," + fmt(arm_mean[a][x]);
            csv += "\n";
        }
        write_text_file(std::filesystem::path(out_dir) / "histogram.csv", csv);
    }
    return artifact;
}

// ---------------------------------------------------------------------------
// Bounds sweep
// ---------------------------------------------------------------------------

nlohmann::json run_bound_sweep(const ExperimentConfig& config,
                               const std::string& out_dir) {
    if (config.kind != "bounds")
        throw std::invalid_argument("run_bound_sweep: wrong config kind");

    std::string csv = HoeffdingReport::csv_header() + "\n";
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : config.bounds_rows) {
        const HoeffdingReport rep = hoeffding_report(row.n, row.epsilon, row.delta,
                                                     row.failure_prob, row.lambda);
        csv += rep.csv_row() + "\n";
        rows.push_back(rep.to_json());
    }

    const ScalingTable table = coefficient_norm_scaling(
        config.scaling_n_max, config.scaling_fit_from, config.scaling_fit_to);
    const ScalingTable full_fit = coefficient_norm_scaling(config.scaling_n_max);

    std::string scaling = "n,sum_abs_coefficients,sum_abs_coefficients_sq\n";
    for (std::size_t i = 0; i < table.n.size(); ++i) {
        scaling += std::to_string(table.n[i]) + "," + fmt(table.sum_abs[i]) + "," +
                   fmt(table.sum_abs_sq[i]) + "\n";
    }

    nlohmann::json summary;
    summary["experiment"] = "bounds";
    summary["config_hash"] = config.config_hash();
    summary["rows"] = rows;
    summary["scaling"] = {
        {"n_max", config.scaling_n_max},
        {"alpha_full_range", full_fit.alpha},
        {"fit_window", {table.fit_from, table.fit_to}},
        {"alpha_fit_window", table.alpha},
    };

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        const std::filesystem::path dir(out_dir);
        write_text_file(dir / "config.json", config.raw.dump(2) + "\n");
        write_text_file(dir / "hoeffding.csv", csv);
        write_text_file(dir / "scaling.csv", scaling);
        write_text_file(dir / "summary.json", summary.dump(2) + "\n");
    }
    return summary;
}

// ---------------------------------------------------------------------------
// Random instances and gradcheck
// ---------------------------------------------------------------------------

namespace {

Eigen::MatrixXcd random_unitary(RngStream& rng, int dim) {
    Eigen::MatrixXcd a(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) a(r, c) = std::complex<double>(rng.normal(), rng.normal());
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd q = qr.householderQ();
    // Fix the phase ambiguity so the result is exactly unitary.
    return q;
}

Eigen::MatrixXcd random_matrix(RngStream& rng, int dim, bool hermitian) {
    Eigen::MatrixXcd a(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            a(r, c) = std::complex<double>(rng.normal(), rng.normal()) /
                      std::sqrt(static_cast<double>(dim));
    if (hermitian) return ((a + a.adjoint()) / 2.0).eval();
    return a;
}

}  // namespace

RandomInstance random_gradient_instance(RngStream& rng, int max_photons, int max_modes,
                                        int max_components, bool hermitian) {
    const int m = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_modes - 1));
    const int n = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_photons));

    std::vector<int> occ(static_cast<std::size_t>(m), 0);
    for (int p = 0; p < n; ++p) occ[rng.next_u64() % static_cast<std::uint64_t>(m)]++;
    FockState input(occ);

    ParamCircuit circuit(m);
    const int comp_count =
        3 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(
                                 std::max(1, max_components - 2)));
    int param_count = 0;
    for (int i = 0; i < comp_count; ++i) {
        const double pick = rng.uniform01();
        if (pick < 0.45) {
            const int a = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(m));
            int b = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(m));
            while (b == a) b = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(m));
            circuit.bs(a, b, rng.uniform(0.0, 2.0 * kPi));
        } else if (pick < 0.85) {
            const int mode = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(m));
            if (param_count < 4 && rng.uniform01() < 0.7) {
                circuit.ps(mode, "g" + std::to_string(param_count++));
            } else {
                circuit.ps(mode, rng.uniform(0.0, 2.0 * kPi));
            }
        } else {
            const int a = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(m));
            int b = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(m));
            while (b == a) b = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(m));
            circuit.unitary({a, b}, random_unitary(rng, 2));
        }
    }
    if (param_count == 0) {
        circuit.ps(static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(m)), "g0");
        param_count = 1;
    }

    const auto basis = enumerate_basis(n, m);
    Observable obs = dense_observable(
        random_matrix(rng, static_cast<int>(basis->size()), hermitian));

    const int target =
        static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(param_count));
    return RandomInstance(std::move(circuit), std::move(input), std::move(obs),
                          "g" + std::to_string(target));
}

nlohmann::json GradCheckReport::to_json() const {
    nlohmann::json j;
    j["pass"] = pass;
    j["max_psr_oracle_dev"] = max_psr_oracle_dev;
    j["max_complex_dev"] = max_complex_dev;
    j["max_light_cone_dev"] = max_light_cone_dev;
    j["max_fd_cross_dev"] = max_fd_cross_dev;
    j["max_kl_dev"] = max_kl_dev;
    j["max_mmd_dev"] = max_mmd_dev;
    if (!concentration.is_null()) j["concentration"] = concentration;
    if (!failures.is_null() && !failures.empty()) j["failures"] = failures;
    return j;
}

GradCheckReport run_grad_check(const ExperimentConfig& config,
                               const std::string& out_dir) {
    if (config.kind != "gradcheck")
        throw std::invalid_argument("run_grad_check: wrong config kind");
    const GradCheckSettings& s = config.gradcheck;
    GradCheckReport report;
    report.failures = nlohmann::json::array();
    RngStream rng(config.noise.seed);
    const NoiseModel exact{1.0, std::nullopt, 0};

    auto record_failure = [&](const RandomInstance& inst, std::uint64_t idx,
                              const char* what, double dev) {
        nlohmann::json f;
        f["check"] = what;
        f["instance"] = idx;
        f["seed"] = config.noise.seed;
        f["deviation"] = dev;
        f["parameter"] = inst.param;
        f["input"] = inst.input.occupations();
        f["circuit"] = inst.circuit.to_json();
        report.failures.push_back(std::move(f));
        report.pass = false;
    };

    // PSR vs commutator oracle, light-cone on/off, central-FD cross-check.
    for (int i = 0; i < s.instances; ++i) {
        RngStream inst_rng = rng.derive(1, static_cast<std::uint64_t>(i));
        const bool hermitian = (i % 2 == 0);
        const RandomInstance inst = random_gradient_instance(
            inst_rng, s.max_photons, s.max_modes, s.max_components, hermitian);
        Eigen::VectorXd theta(inst.circuit.parameter_count());
        for (Eigen::Index k = 0; k < theta.size(); ++k)
            theta(k) = inst_rng.uniform(0.0, 2.0 * kPi);

        EvalContext ctx = EvalContext::from_seed(0);
        const GradientResult psr = psr_gradient(inst.circuit, theta, inst.input,
                                                inst.observable, inst.param, exact,
                                                ctx, true);
        const GradientResult psr_full = psr_gradient(inst.circuit, theta, inst.input,
                                                     inst.observable, inst.param,
                                                     exact, ctx, false);
        const GradientResult oracle = commutator_gradient_oracle(
            inst.circuit, theta, inst.input, inst.observable, inst.param);

        const double dev = std::abs(psr.value - oracle.value);
        const double cdev = std::abs(psr.complex_value - oracle.complex_value);
        const double lc_dev = std::abs(psr.value - psr_full.value);
        report.max_psr_oracle_dev = std::max(report.max_psr_oracle_dev, dev);
        report.max_complex_dev = std::max(report.max_complex_dev, cdev);
        report.max_light_cone_dev = std::max(report.max_light_cone_dev, lc_dev);
        if (dev > s.tolerance) record_failure(inst, static_cast<std::uint64_t>(i), "psr_vs_oracle", dev);
        if (cdev > s.tolerance) record_failure(inst, static_cast<std::uint64_t>(i), "psr_vs_oracle_complex", cdev);
        if (lc_dev > s.tolerance) record_failure(inst, static_cast<std::uint64_t>(i), "light_cone", lc_dev);

        const GradientResult fd = fd_gradient(inst.circuit, theta, inst.input,
                                              inst.observable, inst.param, 1e-6,
                                              exact, ctx, true);
        const double fd_dev = std::abs(fd.value - oracle.value);
        report.max_fd_cross_dev = std::max(report.max_fd_cross_dev, fd_dev);
        if (fd_dev > s.fd_cross_tolerance)
            record_failure(inst, static_cast<std::uint64_t>(i), "fd_cross_check", fd_dev);
    }

    // KL / MMD gradients vs central FD on exact distributions.
    const std::vector<double> sigmas{0.5, 4.0, 32.0};
    for (int i = 0; i < s.loss_instances; ++i) {
        RngStream inst_rng = rng.derive(2, static_cast<std::uint64_t>(i));
        const RandomInstance inst = random_gradient_instance(
            inst_rng, s.max_photons, s.max_modes, s.max_components, true);
        Eigen::VectorXd theta(inst.circuit.parameter_count());
        for (Eigen::Index k = 0; k < theta.size(); ++k)
            theta(k) = inst_rng.uniform(0.0, 2.0 * kPi);

        const auto basis = enumerate_basis(inst.input.photons(), inst.input.modes());
        std::vector<double> target(basis->size());
        double tsum = 0.0;
        for (auto& tv : target) {
            tv = 0.05 + inst_rng.uniform01();
            tsum += tv;
        }
        for (auto& tv : target) tv /= tsum;

        EvalContext ctx = EvalContext::from_seed(0);
        const int param_idx = inst.circuit.parameter_index(inst.param);
        auto loss_at = [&](double offset, bool mmd) {
            Eigen::VectorXd th = theta;
            th(param_idx) += offset;
            EvalContext c2 = EvalContext::from_seed(0);
            const DistributionEstimate de =
                measure_distribution(inst.circuit, th, -1, 0.0, inst.input, exact, c2);
            return mmd ? mmd_loss(de.q, target, sigmas) : kl_loss(de.q, target);
        };
        const double delta_fd = 1e-6;

        const GradientResult klg = kl_gradient_psr(inst.circuit, theta, inst.input,
                                                   target, inst.param, exact, ctx, true);
        const double kl_fd = (loss_at(delta_fd, false) - loss_at(-delta_fd, false)) /
                             (2.0 * delta_fd);
        const double kl_dev = std::abs(klg.value - kl_fd);
        report.max_kl_dev = std::max(report.max_kl_dev, kl_dev);
        if (kl_dev > s.loss_tolerance)
            record_failure(inst, static_cast<std::uint64_t>(i), "kl_gradient", kl_dev);

        const GradientResult mmdg =
            mmd_gradient_psr(inst.circuit, theta, inst.input, target, sigmas,
                             inst.param, exact, ctx, true);
        const double mmd_fd = (loss_at(delta_fd, true) - loss_at(-delta_fd, true)) /
                              (2.0 * delta_fd);
        const double mmd_dev = std::abs(mmdg.value - mmd_fd);
        report.max_mmd_dev = std::max(report.max_mmd_dev, mmd_dev);
        if (mmd_dev > s.loss_tolerance)
            record_failure(inst, static_cast<std::uint64_t>(i), "mmd_gradient", mmd_dev);
    }

    // Vacuum input: every gradient is exactly zero at zero cost.
    {
        ParamCircuit c(3);
        c.bs(0, 1, kPi / 4).ps(1, "phi").bs(1, 2, kPi / 4);
        const FockState vacuum({0, 0, 0});
        const auto basis = enumerate_basis(0, 3);
        const Observable obs = identity_observable(basis);
        EvalContext ctx = EvalContext::from_seed(0);
        const GradientResult g =
            psr_gradient(c, Eigen::VectorXd::Zero(1), vacuum, obs, "phi", exact, ctx, true);
        if (g.value != 0.0 || g.evaluations != 0) {
            report.pass = false;
            nlohmann::json f;
            f["check"] = "vacuum_gradient";
            f["value"] = g.value;
            report.failures.push_back(std::move(f));
        }
    }

    // Optional sampled-concentration experiment against the Hoeffding bound.
    if (s.concentration) {
        // Mach-Zehnder-style instance with a projector observable (λ = 1).
        ParamCircuit mz(2);
        mz.bs(0, 1, kPi / 4).ps(0, "phi").bs(0, 1, kPi / 4);
        const FockState in({1, 1});
        const auto basis = enumerate_basis(2, 2);
        const Observable proj = state_projector(basis, FockState({2, 0}));
        Eigen::VectorXd theta(1);
        theta(0) = 0.7;

        EvalContext ectx = EvalContext::from_seed(0);
        const double exact_grad =
            psr_gradient(mz, theta, in, proj, "phi", exact, ectx, false).value;
        const ShiftRule rule = canonical_shift_rule(2);
        const double sum_abs = rule.sum_abs_coefficients();

        NoiseModel shot_noise{1.0, s.concentration_shots, 0};
        nlohmann::json conc = nlohmann::json::array();
        std::vector<int> exceed(s.concentration_epsilons.size(), 0);
        for (int seed = 0; seed < s.concentration_seeds; ++seed) {
            shot_noise.seed = static_cast<std::uint64_t>(seed) + 1;
            EvalContext ctx = EvalContext::from_seed(shot_noise.seed);
            const double est =
                psr_gradient(mz, theta, in, proj, "phi", shot_noise, ctx, false).value;
            for (std::size_t e = 0; e < s.concentration_epsilons.size(); ++e) {
                if (std::abs(est - exact_grad) > s.concentration_epsilons[e]) exceed[e]++;
            }
        }
        for (std::size_t e = 0; e < s.concentration_epsilons.size(); ++e) {
            const double eps = s.concentration_epsilons[e];
            const double bound =
                2.0 * std::exp(-eps * eps * static_cast<double>(s.concentration_shots) /
                               (2.0 * sum_abs * sum_abs));
            const double freq =
                static_cast<double>(exceed[e]) / s.concentration_seeds;
            conc.push_back({{"epsilon", eps},
                            {"empirical_frequency", freq},
                            {"hoeffding_bound", bound},
                            {"within_bound", freq <= bound}});
            if (freq > bound) report.pass = false;
        }
        report.concentration = conc;
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        const std::filesystem::path dir(out_dir);
        write_text_file(dir / "config.json", config.raw.dump(2) + "\n");
        write_text_file(dir / "report.json", report.to_json().dump(2) + "\n");
    }
    return report;
}

}  // namespace photongrad
