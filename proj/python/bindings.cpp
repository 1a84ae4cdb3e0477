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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "photongrad/evolve.hpp"
#include "photongrad/experiments.hpp"
#include "photongrad/permanent.hpp"

namespace py = pybind11;
using namespace photongrad;

namespace {

NoiseModel make_noise(std::optional<long long> shots, double hom, std::uint64_t seed) {
    NoiseModel noise;
    noise.shots = shots;
    noise.hom_visibility = hom;
    noise.seed = seed;
    noise.validate();
    return noise;
}

Eigen::VectorXd to_theta(const std::vector<double>& theta) {
    return Eigen::Map<const Eigen::VectorXd>(theta.data(),
                                             static_cast<Eigen::Index>(theta.size()));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Linear-optical circuit simulation with photonic parameter-shift "
              "gradients";

    py::class_<FockState>(m, "FockState")
        .def(py::init<std::vector<int>>(), py::arg("occupations"))
        .def_property_readonly("occupations", &FockState::occupations)
        .def_property_readonly("modes", &FockState::modes)
        .def_property_readonly("photons", &FockState::photons)
        .def("__len__", &FockState::modes)
        .def("__getitem__", &FockState::occupation)
        .def("__eq__", [](const FockState& a, const FockState& b) { return a == b; })
        .def("__repr__", &FockState::str);

    py::class_<FockBasis, std::shared_ptr<FockBasis>>(m, "FockBasis")
        .def_property_readonly("photons", &FockBasis::photons)
        .def_property_readonly("modes", &FockBasis::modes)
        .def("__len__", &FockBasis::size)
        .def("state", &FockBasis::state, py::arg("position"))
        .def("index_of", &FockBasis::index_of, py::arg("state"))
        .def("states", &FockBasis::states);

    m.def(
        "enumerate_basis",
        [](int n, int m_modes) {
            return std::const_pointer_cast<FockBasis>(enumerate_basis(n, m_modes));
        },
        py::arg("photons"), py::arg("modes"));

    py::class_<ParamCircuit>(m, "ParamCircuit")
        .def(py::init<int>(), py::arg("modes"))
        .def("ps", py::overload_cast<int, std::string>(&ParamCircuit::ps),
             py::arg("mode"), py::arg("param"), py::return_value_policy::reference)
        .def("fixed_ps", py::overload_cast<int, double>(&ParamCircuit::ps),
             py::arg("mode"), py::arg("phase"), py::return_value_policy::reference)
        .def("bs", &ParamCircuit::bs, py::arg("mode_a"), py::arg("mode_b"),
             py::arg("eta"), py::return_value_policy::reference)
        .def("unitary", &ParamCircuit::unitary, py::arg("modes"), py::arg("block"),
             py::return_value_policy::reference)
        .def_property_readonly("modes", &ParamCircuit::modes)
        .def_property_readonly("parameters", &ParamCircuit::parameters)
        .def("to_json", [](const ParamCircuit& c) { return c.to_json().dump(); })
        .def_static("from_json", [](const std::string& text) {
            return ParamCircuit::from_json(nlohmann::json::parse(text));
        });

    m.def(
        "compose_unitary",
        [](const ParamCircuit& c, const std::vector<double>& theta) {
            return compose_unitary(c, to_theta(theta));
        },
        py::arg("circuit"), py::arg("theta"));

    m.def("permanent",
          [](const Eigen::MatrixXcd& a) { return permanent(a); },
          py::arg("matrix"));

    m.def(
        "output_distribution",
        [](const ParamCircuit& c, const std::vector<double>& theta,
           const FockState& input) {
            return output_distribution(c, to_theta(theta), input);
        },
        py::arg("circuit"), py::arg("theta"), py::arg("input"));

    m.def(
        "noisy_distribution",
        [](const ParamCircuit& c, const std::vector<double>& theta,
           const FockState& input, double visibility) {
            return noisy_distribution(c, to_theta(theta), input, visibility);
        },
        py::arg("circuit"), py::arg("theta"), py::arg("input"), py::arg("visibility"));

    m.def(
        "sample_counts",
        [](const ParamCircuit& c, const std::vector<double>& theta,
           const FockState& input, double visibility, long long shots,
           std::uint64_t seed) {
            const auto basis = enumerate_basis(input.photons(), input.modes());
            const auto p = noisy_distribution(c, to_theta(theta), input, visibility);
            RngStream rng(seed);
            const SampleRecord rec = sample_distribution(basis, p, shots, rng);
            std::map<std::string, long long> out;
            for (std::size_t i = 0; i < rec.counts.size(); ++i) {
                if (rec.counts[i]) out[basis->state(i).str()] = rec.counts[i];
            }
            return out;
        },
        py::arg("circuit"), py::arg("theta"), py::arg("input"),
        py::arg("visibility") = 1.0, py::arg("shots") = 1000, py::arg("seed") = 0);

    m.def("light_cone_photon_bound", &light_cone_photon_bound, py::arg("circuit"),
          py::arg("input"), py::arg("param"));

    py::class_<ShiftRule>(m, "ShiftRule")
        .def_readonly("photon_bound", &ShiftRule::photon_bound)
        .def_readonly("angles", &ShiftRule::angles)
        .def_readonly("coefficients", &ShiftRule::coefficients)
        .def_property_readonly("sum_abs_coefficients", &ShiftRule::sum_abs_coefficients)
        .def("max_residual", &ShiftRule::max_residual)
        .def("to_json", [](const ShiftRule& r) { return r.to_json().dump(); });

    m.def("canonical_shift_rule", &canonical_shift_rule, py::arg("photon_bound"));
    m.def("general_shift_rule", &general_shift_rule, py::arg("photon_bound"),
          py::arg("angles"));

    m.def(
        "hoeffding_report",
        [](int n, double epsilon, double delta, double failure_prob, double lambda) {
            const HoeffdingReport r =
                hoeffding_report(n, epsilon, delta, failure_prob, lambda);
            py::dict d;
            d["n"] = r.photon_bound;
            d["epsilon"] = r.epsilon;
            d["fd_stepsize"] = r.fd_stepsize;
            d["failure_prob"] = r.failure_prob;
            d["lambda"] = r.lambda;
            d["sum_abs_coefficients"] = r.sum_abs_coefficients;
            d["n_psr"] = r.n_psr;
            d["n_fd"] = r.n_fd;
            d["ratio"] = r.ratio;
            return d;
        },
        py::arg("photon_bound"), py::arg("epsilon"), py::arg("fd_stepsize"),
        py::arg("failure_prob"), py::arg("lambda_bound"));

    m.def(
        "coefficient_norm_scaling",
        [](int n_max, int fit_from, int fit_to) {
            const ScalingTable t = coefficient_norm_scaling(n_max, fit_from, fit_to);
            py::dict d;
            d["n"] = t.n;
            d["sum_abs_sq"] = t.sum_abs_sq;
            d["alpha"] = t.alpha;
            d["fit_from"] = t.fit_from;
            d["fit_to"] = t.fit_to;
            return d;
        },
        py::arg("n_max"), py::arg("fit_from") = 1, py::arg("fit_to") = 0);

    py::class_<Observable>(m, "Observable");

    m.def(
        "dense_observable",
        [](const Eigen::MatrixXcd& mat) { return dense_observable(mat); },
        py::arg("matrix"));
    m.def(
        "number_operator",
        [](int photons, int modes, int mode) {
            return number_operator(enumerate_basis(photons, modes), mode);
        },
        py::arg("photons"), py::arg("modes"), py::arg("mode"));
    m.def(
        "state_projector",
        [](const FockState& s) {
            return state_projector(enumerate_basis(s.photons(), s.modes()), s);
        },
        py::arg("state"));

    m.def(
        "estimate_expectation",
        [](const ParamCircuit& c, const std::vector<double>& theta,
           const FockState& input, const Observable& obs,
           std::optional<long long> shots, double hom, std::uint64_t seed) {
            const NoiseModel noise = make_noise(shots, hom, seed);
            const Estimate est =
                estimate_expectation(c, to_theta(theta), input, obs, noise);
            py::dict d;
            d["value"] = est.value;
            d["complex_value"] = est.complex_value;
            d["shots"] = est.shots;
            return d;
        },
        py::arg("circuit"), py::arg("theta"), py::arg("input"), py::arg("observable"),
        py::arg("shots") = py::none(), py::arg("hom") = 1.0, py::arg("seed") = 0);

    auto grad_dict = [](const GradientResult& g) {
        py::dict d;
        d["parameter"] = g.parameter;
        d["value"] = g.value;
        d["complex_value"] = g.complex_value;
        d["evaluations"] = g.evaluations;
        d["shots"] = g.shots;
        return d;
    };

    m.def(
        "psr_gradient",
        [grad_dict](const ParamCircuit& c, const std::vector<double>& theta,
                    const FockState& input, const Observable& obs,
                    const std::string& param, std::optional<long long> shots,
                    double hom, std::uint64_t seed, bool use_light_cone) {
            const NoiseModel noise = make_noise(shots, hom, seed);
            EvalContext ctx = EvalContext::from_seed(seed);
            return grad_dict(psr_gradient(c, to_theta(theta), input, obs, param, noise,
                                          ctx, use_light_cone));
        },
        py::arg("circuit"), py::arg("theta"), py::arg("input"), py::arg("observable"),
        py::arg("param"), py::arg("shots") = py::none(), py::arg("hom") = 1.0,
        py::arg("seed") = 0, py::arg("use_light_cone") = true);

    m.def(
        "fd_gradient",
        [grad_dict](const ParamCircuit& c, const std::vector<double>& theta,
                    const FockState& input, const Observable& obs,
                    const std::string& param, double stepsize,
                    std::optional<long long> shots, double hom, std::uint64_t seed,
                    bool central) {
            const NoiseModel noise = make_noise(shots, hom, seed);
            EvalContext ctx = EvalContext::from_seed(seed);
            return grad_dict(fd_gradient(c, to_theta(theta), input, obs, param,
                                         stepsize, noise, ctx, central));
        },
        py::arg("circuit"), py::arg("theta"), py::arg("input"), py::arg("observable"),
        py::arg("param"), py::arg("stepsize") = 0.01, py::arg("shots") = py::none(),
        py::arg("hom") = 1.0, py::arg("seed") = 0, py::arg("central") = false);

    m.def(
        "commutator_gradient_oracle",
        [grad_dict](const ParamCircuit& c, const std::vector<double>& theta,
                    const FockState& input, const Observable& obs,
                    const std::string& param) {
            return grad_dict(
                commutator_gradient_oracle(c, to_theta(theta), input, obs, param));
        },
        py::arg("circuit"), py::arg("theta"), py::arg("input"), py::arg("observable"),
        py::arg("param"));

    m.def("kl_loss", &kl_loss, py::arg("q"), py::arg("target"));
    m.def("mmd_loss", &mmd_loss, py::arg("q"), py::arg("target"), py::arg("sigmas"));

    m.def(
        "kl_gradient_psr",
        [grad_dict](const ParamCircuit& c, const std::vector<double>& theta,
                    const FockState& input, const std::vector<double>& target,
                    const std::string& param, std::optional<long long> shots,
                    double hom, std::uint64_t seed) {
            const NoiseModel noise = make_noise(shots, hom, seed);
            EvalContext ctx = EvalContext::from_seed(seed);
            return grad_dict(
                kl_gradient_psr(c, to_theta(theta), input, target, param, noise, ctx));
        },
        py::arg("circuit"), py::arg("theta"), py::arg("input"), py::arg("target"),
        py::arg("param"), py::arg("shots") = py::none(), py::arg("hom") = 1.0,
        py::arg("seed") = 0);

    m.def(
        "mmd_gradient_psr",
        [grad_dict](const ParamCircuit& c, const std::vector<double>& theta,
                    const FockState& input, const std::vector<double>& target,
                    const std::vector<double>& sigmas, const std::string& param,
                    std::optional<long long> shots, double hom, std::uint64_t seed) {
            const NoiseModel noise = make_noise(shots, hom, seed);
            EvalContext ctx = EvalContext::from_seed(seed);
            return grad_dict(mmd_gradient_psr(c, to_theta(theta), input, target, sigmas,
                                              param, noise, ctx));
        },
        py::arg("circuit"), py::arg("theta"), py::arg("input"), py::arg("target"),
        py::arg("sigmas"), py::arg("param"), py::arg("shots") = py::none(),
        py::arg("hom") = 1.0, py::arg("seed") = 0);

    m.def("vqe_ansatz", &vqe_ansatz);
    m.def("vqe_input", &vqe_input);
    m.def("qcbm_ansatz", &qcbm_ansatz);
    m.def("qcbm_input", &qcbm_input);
    m.def("gaussian_mixture_target", &gaussian_mixture_target, py::arg("size"),
          py::arg("means"), py::arg("sigmas"), py::arg("weights"));

    m.attr("__version__") = "0.1.0";
}
