// Copyright 2026 The Clover Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "clover/catalysis.hpp"
#include "clover/errors.hpp"
#include "clover/pipelines.hpp"
#include "clover/protocol_json.hpp"
#include "clover/schmidt.hpp"
#include "clover/sloccq.hpp"
#include "clover/state_json.hpp"

namespace py = pybind11;
using namespace clover;

namespace {

// Reports and certificates cross the boundary as JSON text; the Python side parses them.
std::string report_text(const ReportDocument& rep) { return rep.to_json().dump(); }

std::string certificate_text(const SNCertificate& c) {
    nlohmann::json j{{"lower", c.lower},
                     {"upper", c.upper},
                     {"method", std::string(to_string(c.method))},
                     {"exact", c.exact()},
                     {"details", c.details}};
    return j.dump();
}

PipelineOptions options(double corrupt, std::uint64_t seed) {
    PipelineOptions o;
    o.corrupt = corrupt;
    o.seed = seed;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Catalytic entanglement transformation verifier (C++ core).";
    m.attr("__version__") = CLOVER_VERSION;

    auto error = py::register_exception<Error>(m, "CloverError", PyExc_RuntimeError);
    py::register_exception<LayoutError>(m, "LayoutError", error);
    py::register_exception<PreconditionError>(m, "PreconditionError", error);
    py::register_exception<DenseCapError>(m, "DenseCapError", error);
    py::register_exception<BudgetError>(m, "BudgetError", error);
    py::register_exception<FormatError>(m, "FormatError", error);

    py::enum_<Party>(m, "Party")
        .value("Alice", Party::Alice)
        .value("Bob", Party::Bob)
        .value("Referee", Party::Referee);

    py::class_<Register>(m, "Register")
        .def(py::init([](std::string label, std::size_t dim, Party party) { return Register{label, dim, party}; }),
             py::arg("label"), py::arg("dim"), py::arg("party"))
        .def_readonly("label", &Register::label)
        .def_readonly("dim", &Register::dim)
        .def_readonly("party", &Register::party);

    py::class_<QuantumState>(m, "QuantumState")
        .def_static(
            "pure",
            [](const std::vector<Register>& regs, const Vector& amplitudes) {
                return QuantumState::pure(RegisterLayout(regs), amplitudes);
            },
            py::arg("registers"), py::arg("amplitudes"))
        .def_static(
            "dense",
            [](const std::vector<Register>& regs, const Matrix& rho) { return QuantumState::dense(RegisterLayout(regs), rho); },
            py::arg("registers"), py::arg("rho"))
        .def_static(
            "from_json", [](const std::string& text) { return state_from_json(nlohmann::json::parse(text)); },
            py::arg("text"))
        .def("to_json", [](const QuantumState& s) { return state_to_json(s).dump(); })
        .def_property_readonly("labels", [](const QuantumState& s) { return s.layout().labels(); })
        .def_property_readonly("dims", [](const QuantumState& s) { return s.layout().dims(); })
        .def_property_readonly("registers", [](const QuantumState& s) { return s.layout().registers(); })
        .def_property_readonly("is_dense", &QuantumState::is_dense)
        .def("is_pure", &QuantumState::is_pure)
        .def("density", &QuantumState::density)
        .def("pure_vector", &QuantumState::pure_vector)
        .def("permuted", &QuantumState::permuted, py::arg("order"))
        .def("relabeled", &QuantumState::relabeled, py::arg("renames"))
        .def("with_party", &QuantumState::with_party, py::arg("label"), py::arg("party"));

    m.def("load_state", [](const std::string& path) { return load_state(path); }, py::arg("path"));
    m.def("save_state", [](const QuantumState& s, const std::string& path) { save_state(s, path); }, py::arg("state"),
          py::arg("path"));
    m.def("max_entangled", &max_entangled, py::arg("d"), py::arg("alice") = "A", py::arg("bob") = "B");
    m.def("embed_local_dims", &embed_local_dims, py::arg("state"), py::arg("new_dims"));
    m.def("tensor", &tensor, py::arg("a"), py::arg("b"));
    m.def("marginal", &marginal, py::arg("state"), py::arg("keep"));
    m.def("mix", &mix, py::arg("parts"));
    m.def("trace_distance", &trace_distance, py::arg("a"), py::arg("b"));
    m.def("fidelity", &fidelity, py::arg("a"), py::arg("b"));

    m.def(
        "schmidt_coefficients",
        [](const QuantumState& s) {
            const auto r = schmidt_rank(s);
            return Eigen::VectorXd(r.coefficients.head(static_cast<Eigen::Index>(r.rank)));
        },
        py::arg("state"));
    m.def("schmidt_rank", [](const QuantumState& s) { return schmidt_rank(s).rank; }, py::arg("state"));
    m.def("entanglement_entropy", &entanglement_entropy, py::arg("state"));
    m.def("von_neumann_entropy", py::overload_cast<const QuantumState&>(&von_neumann_entropy), py::arg("state"));
    m.def("conditional_entropy", &conditional_entropy, py::arg("state"), py::arg("condition_on"));
    m.def("_sn_orthogonal_mixture", [](const QuantumState& s) { return certificate_text(sn_orthogonal_mixture(s)); });
    m.def("_sn_flagged_blocks", [](const QuantumState& s, const std::vector<std::string>& flags) {
        return certificate_text(sn_flagged_blocks(s, flags));
    });
    m.def("_sn_lower_fidelity", [](const QuantumState& s, const QuantumState& witness) {
        return certificate_text(sn_lower_fidelity(s, witness));
    });
    m.def("_sn_decomposition_upper", [](const QuantumState& s) { return certificate_text(sn_decomposition_upper(s)); });

    m.def("clo_target", &clo_target, py::arg("rho"), py::arg("sigma"), py::arg("n"));
    m.def(
        "run_catalytic",
        [](const QuantumState& rho, const QuantumState& sigma, std::size_t n) {
            const auto protocol = make_catalytic_protocol(rho, sigma, n);
            const auto run = run_clo(protocol, rho);
            py::dict out;
            out["flag_mode"] = std::string(to_string(protocol.flag_mode));
            out["catalyst"] = protocol.catalyst;
            out["output_state"] = run.output_state;
            out["catalyst_out"] = run.catalyst_out;
            out["output_target_distance"] = run.output_target_distance;
            out["catalyst_restoration_distance"] = run.catalyst_restoration_distance;
            out["catalyst_sn"] = run.catalyst_sn.upper;
            return out;
        },
        py::arg("rho"), py::arg("sigma"), py::arg("n"));
    m.def(
        "filter_success_probability",
        [](const QuantumState& v) { return filter_to_max_entangled(v).success_probability; }, py::arg("state"));
    m.def(
        "certify_impossible",
        [](std::size_t input_upper, std::size_t target_lower, std::size_t budget) {
            SNCertificate in, target;
            in.upper = input_upper;
            target.lower = target_lower;
            return certify_impossible(in, target, budget).impossible;
        },
        py::arg("input_sn_upper"), py::arg("target_sn_lower"), py::arg("budget"));

    m.def("_pipeline_theorem", [](std::size_t n, double corrupt) { return report_text(pipeline_theorem(n, options(corrupt, 20260415))); });
    m.def("_pipeline_lemma1", [](const QuantumState& rho, const QuantumState& sigma, std::size_t n, double corrupt) {
        return report_text(pipeline_lemma1(rho, sigma, n, options(corrupt, 20260415)));
    });
    m.def("_pipeline_obs1", [](std::size_t n, double corrupt, bool shared_randomness) {
        return report_text(pipeline_obs1(n, options(corrupt, 20260415), shared_randomness));
    });
    m.def("_pipeline_obs3", [](double corrupt, std::uint64_t seed) { return report_text(pipeline_obs3(options(corrupt, seed))); });
    m.def("_pipeline_schmidt", [](const QuantumState& s, const std::vector<std::string>& cut) {
        return report_text(pipeline_schmidt(s, cut));
    });
    m.def("_pipeline_simulate", [](const std::string& protocol_path, const QuantumState& input,
                                   const std::optional<QuantumState>& target) {
        return report_text(pipeline_simulate(load_protocol(protocol_path), input, target));
    });
}
