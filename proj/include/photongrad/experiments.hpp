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

#ifndef PHOTONGRAD_EXPERIMENTS_HPP
#define PHOTONGRAD_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "photongrad/losses.hpp"
#include "photongrad/optimize.hpp"

namespace photongrad {

// ---------------------------------------------------------------------------
// Built-in circuits
// ---------------------------------------------------------------------------

/// Dual-rail two-qubit ansatz on 6 modes (rails 0/1 and 2/3, ancillas 4/5)
/// with 8 tunable phases: an arbitrary single-qubit layer per qubit (3
/// parameters each), a post-selected linear-optical CZ (1/9 success, two
/// ancilla vacuum modes), and a one-parameter mixing rotation per qubit.
ParamCircuit vqe_ansatz();
FockState vqe_input();  // |1,0,1,0,0,0> = logical |00>

/// Rectangular mesh on 8 modes: 8 columns of MZIs (BS–PS–BS) on alternating
/// mode pairs, 28 parameters total.
ParamCircuit qcbm_ansatz();
FockState qcbm_input();  // |1,1,1,0,0,0,0,0>

// ---------------------------------------------------------------------------
// VQE model pieces
// ---------------------------------------------------------------------------

struct PauliTerm {
    std::string word;  // two letters from {I, X, Y, Z}, qubit 0 first
    double weight = 0.0;
};

Eigen::Matrix4cd pauli_word_matrix(const std::string& word);

/// Observable for the dual-rail energy: dense lifted Hamiltonian plus the
/// logical-subspace projector for the exact route, and one post-selected
/// measurement term per Pauli word (X/Y words carry their pre-measurement
/// rotations) for the sampling route.
Observable vqe_observable(const std::vector<PauliTerm>& hamiltonian);

/// Ground energy of the assembled two-qubit Hamiltonian by dense
/// diagonalization; the per-config oracle.
double vqe_ground_energy(const std::vector<PauliTerm>& hamiltonian);

// ---------------------------------------------------------------------------
// QCBM target
// ---------------------------------------------------------------------------

/// Discretized Gaussian-mixture density over outcome indices 0..size-1,
/// renormalized. sigmas are the densities' standard deviations.
std::vector<double> gaussian_mixture_target(std::size_t size,
                                            const std::vector<double>& means,
                                            const std::vector<double>& sigmas,
                                            const std::vector<double>& weights);

// ---------------------------------------------------------------------------
// Config and artifacts
// ---------------------------------------------------------------------------

struct BoundsRow {
    int n = 4;
    double epsilon = 0.1;
    double delta = 0.01;
    double failure_prob = 0.1;
    double lambda = 1.0;
};

struct GradCheckSettings {
    int instances = 50;
    int max_photons = 3;
    int max_modes = 6;
    int max_components = 14;
    double tolerance = 1e-9;
    double fd_cross_tolerance = 1e-5;
    int loss_instances = 20;
    double loss_tolerance = 1e-5;
    bool concentration = false;
    int concentration_seeds = 200;
    long long concentration_shots = 100000;
    std::vector<double> concentration_epsilons{0.05, 0.1};
};

struct ExperimentConfig {
    std::string kind;  // vqe | qcbm | bounds | gradcheck
    nlohmann::json raw;

    NoiseModel noise;
    int repetitions = 10;
    int threads = 0;  // 0 = PHOTONGRAD_THREADS env or hardware
    std::vector<OptimizerConfig> optimizers;
    std::string circuit_ref;  // "builtin:..." or a circuit-json path

    // vqe
    std::vector<PauliTerm> hamiltonian;

    // qcbm
    std::string qcbm_loss = "kl";  // kl | mmd
    std::vector<double> mmd_sigmas{0.5, 4.0, 32.0};
    nlohmann::json target_spec;  // materialized against the output space size

    std::vector<double> make_target(std::size_t size) const;

    /// Circuit+input resolved from `circuit_ref`: a builtin name or a
    /// circuit-json file path (whose "input" entry is then required).
    CircuitFile resolve_circuit() const;

    // bounds
    std::vector<BoundsRow> bounds_rows;
    int scaling_n_max = 1000;
    int scaling_fit_from = 200;
    int scaling_fit_to = 1000;

    // gradcheck
    GradCheckSettings gradcheck;

    static nlohmann::json default_json(const std::string& kind);
    static ExperimentConfig from_json(nlohmann::json j);
    static ExperimentConfig from_file(const std::string& path);

    std::string config_hash() const;  // FNV-1a over the canonical dump
};

struct RepResult {
    int rep = 0;
    OptimizationTrace trace;
    double final_loss = 0.0;        // last recorded estimate
    double final_loss_exact = 0.0;  // exact-probability loss at final theta
    long long starved_evaluations = 0;
    double wall_seconds = 0.0;
};

struct ArmResult {
    OptimizerConfig optimizer;
    std::vector<RepResult> reps;
    double mean_final_exact = 0.0;
    double std_final_exact = 0.0;
};

struct RunArtifact {
    std::string kind;
    std::string hash;
    double oracle_energy = 0.0;  // vqe only
    std::vector<ArmResult> arms;
    nlohmann::json summary;
};

/// Runs write one directory per invocation: config.json,
/// trace_<optimizer>_<rep>.csv, aggregate.csv and summary.json.
RunArtifact run_vqe(const ExperimentConfig& config, const std::string& out_dir);
RunArtifact run_qcbm(const ExperimentConfig& config, const std::string& out_dir);

/// Hoeffding sweep: hoeffding.csv, scaling.csv, summary.json.
nlohmann::json run_bound_sweep(const ExperimentConfig& config,
                               const std::string& out_dir);

struct GradCheckReport {
    bool pass = true;
    double max_psr_oracle_dev = 0.0;
    double max_complex_dev = 0.0;
    double max_light_cone_dev = 0.0;
    double max_fd_cross_dev = 0.0;
    double max_kl_dev = 0.0;
    double max_mmd_dev = 0.0;
    nlohmann::json concentration;
    nlohmann::json failures;  // diagnostic dumps (circuit json + seed)
    nlohmann::json to_json() const;
};

GradCheckReport run_grad_check(const ExperimentConfig& config,
                               const std::string& out_dir);

// ---------------------------------------------------------------------------
// Random instances (gradcheck and property tests)
// ---------------------------------------------------------------------------

struct RandomInstance {
    ParamCircuit circuit;
    FockState input;
    Observable observable;
    std::string param;

    RandomInstance(ParamCircuit c, FockState s, Observable o, std::string p)
        : circuit(std::move(c)), input(std::move(s)), observable(std::move(o)),
          param(std::move(p)) {}
};

RandomInstance random_gradient_instance(RngStream& rng, int max_photons, int max_modes,
                                        int max_components, bool hermitian);

/// Effective worker count: `configured` when positive, else the
/// PHOTONGRAD_THREADS environment variable, else hardware concurrency.
int thread_count(int configured);

std::string fnv1a_hex(const std::string& data);

}  // namespace photongrad

#endif
