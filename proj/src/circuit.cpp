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

#include "photongrad/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace photongrad {

Eigen::Matrix2cd beam_splitter_matrix(double eta) {
    const std::complex<double> is(0.0, std::sin(eta));
    Eigen::Matrix2cd b;
    b << std::cos(eta), is, is, std::cos(eta);
    return b;
}

void require_unitary(const Eigen::MatrixXcd& u, double tol, const char* what) {
    if (u.rows() != u.cols())
        throw std::invalid_argument(std::string(what) + ": not square");
    const Eigen::MatrixXcd gram = u.adjoint() * u;
    const double dev = (gram - Eigen::MatrixXcd::Identity(u.rows(), u.cols()))
                           .cwiseAbs()
                           .maxCoeff();
    if (dev > tol)
        throw std::invalid_argument(std::string(what) +
                                    ": not unitary within tolerance");
}

namespace {

void check_mode(int mode, int m, const char* what) {
    if (mode < 0 || mode >= m)
        throw std::invalid_argument(std::string(what) + ": mode index out of range");
}

/// Modes touched by a component; couplers connect all of theirs.
std::vector<int> component_modes(const Component& c) {
    if (const auto* ps = std::get_if<PhaseShifter>(&c)) return {ps->mode};
    if (const auto* bs = std::get_if<BeamSplitter>(&c)) return {bs->mode_a, bs->mode_b};
    return std::get<FixedUnitary>(c).modes;
}

}  // namespace

ParamCircuit::ParamCircuit(int modes) : m_(modes) {
    if (modes < 1) throw std::invalid_argument("ParamCircuit: modes must be >= 1");
}

ParamCircuit& ParamCircuit::ps(int mode, std::string param) {
    check_mode(mode, m_, "PhaseShifter");
    if (param.empty()) throw std::invalid_argument("PhaseShifter: empty parameter name");
    if (std::find(params_.begin(), params_.end(), param) == params_.end())
        params_.push_back(param);
    components_.push_back(PhaseShifter{mode, std::move(param), 0.0});
    return *this;
}

ParamCircuit& ParamCircuit::ps(int mode, double fixed_phase) {
    check_mode(mode, m_, "PhaseShifter");
    components_.push_back(PhaseShifter{mode, {}, fixed_phase});
    return *this;
}

ParamCircuit& ParamCircuit::bs(int mode_a, int mode_b, double eta) {
    check_mode(mode_a, m_, "BeamSplitter");
    check_mode(mode_b, m_, "BeamSplitter");
    if (mode_a == mode_b)
        throw std::invalid_argument("BeamSplitter: modes must be distinct");
    components_.push_back(BeamSplitter{mode_a, mode_b, eta});
    return *this;
}

ParamCircuit& ParamCircuit::unitary(std::vector<int> modes, Eigen::MatrixXcd block) {
    if (modes.empty()) throw std::invalid_argument("FixedUnitary: empty mode list");
    std::set<int> unique;
    for (int k : modes) {
        check_mode(k, m_, "FixedUnitary");
        if (!unique.insert(k).second)
            throw std::invalid_argument("FixedUnitary: repeated mode");
    }
    if (block.rows() != static_cast<Eigen::Index>(modes.size()))
        throw std::invalid_argument("FixedUnitary: block size does not match modes");
    require_unitary(block, kUnitarityTol, "FixedUnitary block");
    components_.push_back(FixedUnitary{std::move(modes), std::move(block)});
    return *this;
}

ParamCircuit& ParamCircuit::append(const Component& c) {
    if (const auto* p = std::get_if<PhaseShifter>(&c)) {
        if (p->parameterized()) return ps(p->mode, p->param);
        return ps(p->mode, p->phase);
    }
    if (const auto* b = std::get_if<BeamSplitter>(&c)) return bs(b->mode_a, b->mode_b, b->eta);
    const auto& u = std::get<FixedUnitary>(c);
    return unitary(u.modes, u.block);
}

int ParamCircuit::parameter_index(const std::string& name) const {
    auto it = std::find(params_.begin(), params_.end(), name);
    if (it == params_.end())
        throw std::invalid_argument("ParamCircuit: unknown parameter '" + name + "'");
    return static_cast<int>(it - params_.begin());
}

bool ParamCircuit::has_parameter(const std::string& name) const {
    return std::find(params_.begin(), params_.end(), name) != params_.end();
}

std::vector<int> ParamCircuit::occurrences(const std::string& name) const {
    parameter_index(name);  // validates
    std::vector<int> out;
    for (std::size_t i = 0; i < components_.size(); ++i) {
        if (const auto* ps = std::get_if<PhaseShifter>(&components_[i])) {
            if (ps->param == name) out.push_back(static_cast<int>(i));
        }
    }
    return out;
}

namespace {

Eigen::MatrixXcd compose_impl(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                              int begin, int end, int shifted_component, double delta);

}  // namespace

Eigen::MatrixXcd compose_unitary(const ParamCircuit& circuit,
                                 const Eigen::VectorXd& theta) {
    return compose_unitary(circuit, theta, -1, 0.0);
}

Eigen::MatrixXcd compose_unitary(const ParamCircuit& circuit,
                                 const Eigen::VectorXd& theta,
                                 int shifted_component, double delta) {
    return compose_impl(circuit, theta, 0, static_cast<int>(circuit.components().size()),
                        shifted_component, delta);
}

Eigen::MatrixXcd compose_unitary_range(const ParamCircuit& circuit,
                                       const Eigen::VectorXd& theta, int begin,
                                       int end) {
    if (begin < 0 || end < begin || end > static_cast<int>(circuit.components().size()))
        throw std::out_of_range("compose_unitary_range: bad component range");
    return compose_impl(circuit, theta, begin, end, -1, 0.0);
}

namespace {

Eigen::MatrixXcd compose_impl(const ParamCircuit& circuit, const Eigen::VectorXd& theta,
                              int begin, int end, int shifted_component, double delta) {
    if (theta.size() != circuit.parameter_count())
        throw std::invalid_argument("compose_unitary: wrong parameter-vector length");
    const int m = circuit.modes();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(m, m);
    const auto& comps = circuit.components();
    for (std::size_t i = static_cast<std::size_t>(begin); i < static_cast<std::size_t>(end); ++i) {
        const Component& c = comps[i];
        if (const auto* ps = std::get_if<PhaseShifter>(&c)) {
            double angle = ps->parameterized()
                               ? theta(circuit.parameter_index(ps->param))
                               : ps->phase;
            if (static_cast<int>(i) == shifted_component) angle += delta;
            u.row(ps->mode) *= std::exp(std::complex<double>(0.0, angle));
        } else if (const auto* bs = std::get_if<BeamSplitter>(&c)) {
            const Eigen::Matrix2cd b = beam_splitter_matrix(bs->eta);
            const Eigen::RowVectorXcd ra = u.row(bs->mode_a);
            const Eigen::RowVectorXcd rb = u.row(bs->mode_b);
            u.row(bs->mode_a) = b(0, 0) * ra + b(0, 1) * rb;
            u.row(bs->mode_b) = b(1, 0) * ra + b(1, 1) * rb;
        } else {
            const auto& fu = std::get<FixedUnitary>(c);
            const int d = static_cast<int>(fu.modes.size());
            Eigen::MatrixXcd rows(d, m);
            for (int r = 0; r < d; ++r) rows.row(r) = u.row(fu.modes[static_cast<std::size_t>(r)]);
            const Eigen::MatrixXcd mixed = fu.block * rows;
            for (int r = 0; r < d; ++r) u.row(fu.modes[static_cast<std::size_t>(r)]) = mixed.row(r);
        }
    }
    return u;
}

}  // namespace

int light_cone_photon_bound_at(const ParamCircuit& circuit, const FockState& input,
                               int component_index) {
    const auto& comps = circuit.components();
    if (component_index < 0 || component_index >= static_cast<int>(comps.size()))
        throw std::out_of_range("light_cone_photon_bound: component index out of range");
    const auto* target = std::get_if<PhaseShifter>(&comps[static_cast<std::size_t>(component_index)]);
    if (!target)
        throw std::invalid_argument("light_cone_photon_bound: component is not a phase shifter");
    if (input.modes() != circuit.modes())
        throw std::invalid_argument("light_cone_photon_bound: input mode count mismatch");

    const int n = input.photons();
    int reachable_photons = 0;
    for (int j = 0; j < input.modes(); ++j) {
        const int occ = input.occupation(j);
        if (occ == 0) continue;
        // Forward light cone of mode j through components before the shifter.
        std::vector<bool> reach(static_cast<std::size_t>(circuit.modes()), false);
        reach[static_cast<std::size_t>(j)] = true;
        for (int i = 0; i < component_index; ++i) {
            const auto modes = component_modes(comps[static_cast<std::size_t>(i)]);
            if (modes.size() < 2) continue;
            bool touches = false;
            for (int k : modes) touches = touches || reach[static_cast<std::size_t>(k)];
            if (touches)
                for (int k : modes) reach[static_cast<std::size_t>(k)] = true;
        }
        if (reach[static_cast<std::size_t>(target->mode)]) reachable_photons += occ;
    }
    return std::min(n, reachable_photons);
}

int light_cone_photon_bound(const ParamCircuit& circuit, const FockState& input,
                            const std::string& param) {
    const auto occ = circuit.occurrences(param);
    if (occ.size() != 1)
        throw std::invalid_argument(
            "light_cone_photon_bound: parameter '" + param +
            "' must appear on exactly one phase shifter (chain rule handles the rest)");
    return light_cone_photon_bound_at(circuit, input, occ.front());
}

// --- JSON wire format -------------------------------------------------------
//
// {"modes": m, "components": [
//    {"type": "ps", "mode": k, "param": "theta_0"} |
//    {"type": "ps", "mode": k, "phase": 0.25} |
//    {"type": "bs", "modes": [j, k], "eta": 0.785398} |
//    {"type": "unitary", "modes": [...], "matrix": [[re, im], ...]}]}
//
// Matrices are row-major arrays of [re, im] pairs.

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& mat) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
        for (Eigen::Index c = 0; c < mat.cols(); ++c) {
            rows.push_back({mat(r, c).real(), mat(r, c).imag()});
        }
    }
    return rows;
}

Eigen::MatrixXcd matrix_from_json(const nlohmann::json& j, int dim) {
    if (!j.is_array() || j.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim))
        throw std::invalid_argument("circuit json: matrix entry count mismatch");
    Eigen::MatrixXcd mat(dim, dim);
    std::size_t idx = 0;
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c, ++idx) {
            const auto& e = j[idx];
            if (!e.is_array() || e.size() != 2)
                throw std::invalid_argument("circuit json: matrix entries must be [re, im]");
            mat(r, c) = std::complex<double>(e[0].get<double>(), e[1].get<double>());
        }
    }
    return mat;
}

}  // namespace

nlohmann::json ParamCircuit::to_json() const {
    nlohmann::json comps = nlohmann::json::array();
    for (const Component& c : components_) {
        if (const auto* ps = std::get_if<PhaseShifter>(&c)) {
            nlohmann::json e{{"type", "ps"}, {"mode", ps->mode}};
            if (ps->parameterized())
                e["param"] = ps->param;
            else
                e["phase"] = ps->phase;
            comps.push_back(std::move(e));
        } else if (const auto* bs = std::get_if<BeamSplitter>(&c)) {
            comps.push_back({{"type", "bs"},
                             {"modes", {bs->mode_a, bs->mode_b}},
                             {"eta", bs->eta}});
        } else {
            const auto& fu = std::get<FixedUnitary>(c);
            comps.push_back({{"type", "unitary"},
                             {"modes", fu.modes},
                             {"matrix", matrix_to_json(fu.block)}});
        }
    }
    return {{"modes", m_}, {"components", std::move(comps)}};
}

CircuitFile load_circuit_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("circuit file: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("circuit file: parse error in '" + path + "': " +
                                    e.what());
    }
    CircuitFile file{ParamCircuit::from_json(j), std::nullopt};
    if (j.contains("input")) {
        FockState input(j.at("input").get<std::vector<int>>());
        if (input.modes() != file.circuit.modes())
            throw std::invalid_argument("circuit file: input length != modes");
        file.input = std::move(input);
    }
    return file;
}

nlohmann::json circuit_file_json(const ParamCircuit& circuit, const FockState& input) {
    nlohmann::json j = circuit.to_json();
    j["input"] = input.occupations();
    return j;
}

ParamCircuit ParamCircuit::from_json(const nlohmann::json& j) {
    if (!j.contains("modes") || !j.contains("components"))
        throw std::invalid_argument("circuit json: missing 'modes' or 'components'");
    ParamCircuit circuit(j.at("modes").get<int>());
    for (const auto& e : j.at("components")) {
        const std::string type = e.at("type").get<std::string>();
        if (type == "ps") {
            const int mode = e.at("mode").get<int>();
            if (e.contains("param"))
                circuit.ps(mode, e.at("param").get<std::string>());
            else
                circuit.ps(mode, e.at("phase").get<double>());
        } else if (type == "bs") {
            const auto modes = e.at("modes").get<std::vector<int>>();
            if (modes.size() != 2)
                throw std::invalid_argument("circuit json: bs needs two modes");
            circuit.bs(modes[0], modes[1], e.at("eta").get<double>());
        } else if (type == "unitary") {
            auto modes = e.at("modes").get<std::vector<int>>();
            auto mat = matrix_from_json(e.at("matrix"), static_cast<int>(modes.size()));
            circuit.unitary(std::move(modes), std::move(mat));
        } else {
            throw std::invalid_argument("circuit json: unknown component type '" + type + "'");
        }
    }
    return circuit;
}

}  // namespace photongrad
