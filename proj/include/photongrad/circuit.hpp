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

#ifndef PHOTONGRAD_CIRCUIT_HPP
#define PHOTONGRAD_CIRCUIT_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "photongrad/fock.hpp"
#include "photongrad/tolerances.hpp"

namespace photongrad {

/// Single-mode phase shifter e^{i n̂_k θ}; the only parameterized component.
/// Either bound to a named parameter or carrying a fixed angle.
struct PhaseShifter {
    int mode = 0;
    std::string param;   // empty for a fixed shifter
    double phase = 0.0;  // used when param is empty
    bool parameterized() const { return !param.empty(); }
};

/// Two-mode coupler with mixing angle η:
///   BS(η) = [[cos η, i sin η], [i sin η, cos η]]
/// acting on (mode_a, mode_b); η = π/4 is the 50:50 splitter. This sign
/// convention is part of the circuit-file contract.
struct BeamSplitter {
    int mode_a = 0;
    int mode_b = 1;
    double eta = 0.0;
};

/// Arbitrary fixed unitary block on a subset of modes (unitary to 1e-10).
struct FixedUnitary {
    std::vector<int> modes;
    Eigen::MatrixXcd block;
};

using Component = std::variant<PhaseShifter, BeamSplitter, FixedUnitary>;

Eigen::Matrix2cd beam_splitter_matrix(double eta);

/// Checks U†U = I within tol; throws std::invalid_argument otherwise.
void require_unitary(const Eigen::MatrixXcd& u, double tol = kUnitarityTol,
                     const char* what = "matrix");

/// Parameterized linear-optical circuit on m modes: an ordered component
/// sequence plus the ordered list of distinct parameter names (in order of
/// first appearance).
class ParamCircuit {
  public:
    explicit ParamCircuit(int modes);

    ParamCircuit& ps(int mode, std::string param);
    ParamCircuit& ps(int mode, double fixed_phase);
    ParamCircuit& bs(int mode_a, int mode_b, double eta);
    ParamCircuit& unitary(std::vector<int> modes, Eigen::MatrixXcd block);
    ParamCircuit& append(const Component& c);

    int modes() const { return m_; }
    const std::vector<Component>& components() const { return components_; }
    const std::vector<std::string>& parameters() const { return params_; }
    int parameter_count() const { return static_cast<int>(params_.size()); }

    int parameter_index(const std::string& name) const;
    bool has_parameter(const std::string& name) const;

    /// Component indices of all phase shifters bound to this parameter.
    std::vector<int> occurrences(const std::string& name) const;

    nlohmann::json to_json() const;
    static ParamCircuit from_json(const nlohmann::json& j);

  private:
    int m_;
    std::vector<Component> components_;
    std::vector<std::string> params_;
};

/// Circuit-file payload: the component list plus an optional input state,
/// matching the wire format {"modes", "components", "input"}.
struct CircuitFile {
    ParamCircuit circuit;
    std::optional<FockState> input;
};

CircuitFile load_circuit_file(const std::string& path);
nlohmann::json circuit_file_json(const ParamCircuit& circuit, const FockState& input);

/// Product of component matrices in circuit order (later components act
/// from the left). Unitary to 1e-10 by construction.
Eigen::MatrixXcd compose_unitary(const ParamCircuit& circuit,
                                 const Eigen::VectorXd& theta);

/// Same, with one specific component's phase offset by delta. Used by the
/// gradient layer to shift a single occurrence of a shared parameter.
Eigen::MatrixXcd compose_unitary(const ParamCircuit& circuit,
                                 const Eigen::VectorXd& theta,
                                 int shifted_component, double delta);

/// Product of the component range [begin, end) only.
Eigen::MatrixXcd compose_unitary_range(const ParamCircuit& circuit,
                                       const Eigen::VectorXd& theta, int begin,
                                       int end);

/// Photon bound ν for the shifter carrying `param`: the number of input
/// photons whose forward light cone (modes reachable through components
/// preceding the shifter; couplers connect all their modes, phase shifters
/// none) includes the shifter's mode, capped at n. The PSR for this
/// parameter needs only 2ν evaluations.
int light_cone_photon_bound(const ParamCircuit& circuit, const FockState& input,
                            const std::string& param);

/// Per-occurrence variant addressing the shifter by component index.
int light_cone_photon_bound_at(const ParamCircuit& circuit, const FockState& input,
                               int component_index);

}  // namespace photongrad

#endif
