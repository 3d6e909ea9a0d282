// Copyright 2026 The qmetro Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qmetro/cli.hpp"
#include "qmetro/optimize.hpp"
#include "qmetro/schemes.hpp"

namespace py = pybind11;
using namespace qmetro;

namespace {

py::tuple run(const std::string &command, const std::string &config_json, std::optional<std::uint64_t> seed,
              const std::string &format) {
    cli::CommandOptions opt;
    opt.seed = seed;
    cli::CommandResult result;
    try {
        opt.format = cli::parse_format(format);
        const cli::json cfg = cli::json::parse(config_json);
        py::gil_scoped_release release;
        result = cli::run_command(command, cfg, opt);
    } catch (const std::exception &e) {
        result = {cli::kExitConfig, {}, e.what()};
    }
    py::dict artifacts;
    for (const auto &a : result.artifacts) {
        artifacts[py::str(a.suffix)] = py::str(a.content);
    }
    return py::make_tuple(result.exit_code, artifacts, result.message);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quantum Fisher information and estimation schemes for non-identical unitary channels";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    m.def("_run", &run, py::arg("command"), py::arg("config_json"), py::arg("seed") = py::none(),
          py::arg("format") = "json");

    m.def(
        "gell_mann_basis", [](int d) { return gell_mann_basis(d).generators; }, py::arg("d"));
    m.def(
        "mes_state", [](int d) { return CVector(mes_state(d).amplitudes()); }, py::arg("d"));
    m.def(
        "multipartite_mes", [](int d, int parties) { return CVector(multipartite_mes(d, parties).amplitudes()); },
        py::arg("d"), py::arg("parties"));
    m.def(
        "su_unitary",
        [](int d, const std::vector<double> &theta) { return SuDChannel(d).unitary_at(theta); }, py::arg("d"),
        py::arg("theta"));
    m.def(
        "qfi_pure_channel",
        [](const CMatrix &u, const std::vector<CMatrix> &du, const CVector &psi0) {
            return qfi_pure_channel(u, du, Ket(psi0, 1e-10)).entries;
        },
        py::arg("u"), py::arg("du"), py::arg("psi0"));
    m.def(
        "su_qfi",
        [](int d, const std::vector<std::vector<double>> &thetas, const CVector &psi0) {
            return TraceQfiObjective(SuDChannel(d), thetas).qfi(Ket::normalized(psi0)).entries;
        },
        py::arg("d"), py::arg("thetas"), py::arg("psi0"),
        "QFI matrix of n SU(d) channels, each with an ancilla, for the input psi0 (layout S1 R1 ... Sn Rn).");
    m.def(
        "ballester_ratio",
        [](int d, const std::vector<double> &theta, const CVector &psi0) {
            return ballester_ratio(SuDChannel(d), theta, Ket::normalized(psi0));
        },
        py::arg("d"), py::arg("theta"), py::arg("psi0"));
}
