// Copyright 2026 The nkfb Authors
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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <array>
#include <string>
#include <vector>

#include "nkfb/analytic_oracles.hpp"
#include "nkfb/emit.hpp"
#include "nkfb/ensemble_runner.hpp"
#include "nkfb/experiment_config.hpp"
#include "nkfb/presets.hpp"
#include "nkfb/trajectory_engine.hpp"

namespace py = pybind11;
using namespace nkfb;

namespace {

using Vec3 = std::array<double, 3>;

DensityMatrix state(const Vec3 &b) { return bloch_to_density({b[0], b[1], b[2]}); }

Vec3 bloch(const DensityMatrix &rho) { return density_to_bloch(rho).as_array(); }

py::array_t<double> rows(const std::vector<BlochVector> &v) {
    py::array_t<double> out({static_cast<py::ssize_t>(v.size()), py::ssize_t{3}});
    auto m = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < v.size(); ++i) {
        m(i, 0) = v[i].sx;
        m(i, 1) = v[i].sy;
        m(i, 2) = v[i].sz;
    }
    return out;
}

py::array_t<double> rows(const std::vector<std::array<double, 3>> &v) {
    py::array_t<double> out({static_cast<py::ssize_t>(v.size()), py::ssize_t{3}});
    auto m = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (int c = 0; c < 3; ++c) {
            m(i, c) = v[i][c];
        }
    }
    return out;
}

py::dict ensemble_dict(const EnsembleResult &r) {
    py::dict d;
    d["t"] = py::array_t<double>(static_cast<py::ssize_t>(r.times.size()), r.times.data());
    d["mean"] = rows(r.mean_bloch);
    d["sem"] = rows(r.sem_bloch);
    d["n_traj"] = r.n_traj;
    d["master_seed"] = r.master_seed;
    d["config_digest"] = r.config_digest;
    return d;
}

ExperimentConfig config_from(const std::string &text, const std::vector<std::string> &overrides) {
    return parse_config(text, overrides);
}

}  // namespace

PYBIND11_MODULE(_nkfb, m) {
    m.doc() = "Quantum-trajectory simulator for no-knowledge measurement with delayed feedback";

    py::register_exception<StepFailure>(m, "StepFailure", PyExc_RuntimeError);
    py::register_exception<TrajectoryError>(m, "TrajectoryError", PyExc_RuntimeError);

    m.def("build_id", &build_id, "Identifier of the native build.");

    py::class_<NoiseStream>(m, "NoiseStream", "Seeded Gaussian white noise, one stream per (seed, index).")
        .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("master_seed"), py::arg("stream_index"))
        .def("sample", &NoiseStream::sample, py::arg("dt"), "One draw with variance 1 / dt.")
        .def("standard_normal", &NoiseStream::standard_normal)
        .def_property_readonly("position", &NoiseStream::position);

    m.def(
        "validate_config",
        [](const std::string &text, const std::vector<std::string> &overrides) {
            return config_from(text, overrides).to_json().dump();
        },
        py::arg("text"), py::arg("overrides") = std::vector<std::string>{},
        "Parses and validates a YAML config; returns the resolved parameters as JSON text.");

    m.def(
        "run_config",
        [](const std::string &text, const std::vector<std::string> &overrides) {
            const ExperimentConfig cfg = config_from(text, overrides);
            EnsembleResult r;
            {
                py::gil_scoped_release release;
                r = run_ensemble(cfg.ensemble_spec(), cfg.ensemble.n_traj, cfg.ensemble.master_seed,
                                 cfg.ensemble.workers);
            }
            return ensemble_dict(r);
        },
        py::arg("text"), py::arg("overrides") = std::vector<std::string>{},
        "Runs the ensemble described by a YAML config and returns t, mean and sem arrays.");

    m.def(
        "run_trajectory",
        [](const std::string &text, std::uint64_t stream_index, const std::vector<std::string> &overrides) {
            const ExperimentConfig cfg = config_from(text, overrides);
            const EnsembleSpec spec = cfg.ensemble_spec();
            const TrajectoryRecord rec =
                run_trajectory(spec.step, spec.rho0, NoiseStream(cfg.ensemble.master_seed, stream_index),
                               spec.n_steps, spec.record_every);
            py::dict d;
            d["t"] = py::array_t<double>(static_cast<py::ssize_t>(rec.times.size()), rec.times.data());
            d["bloch"] = rows(rec.bloch);
            d["purity"] = py::array_t<double>(static_cast<py::ssize_t>(rec.purity.size()), rec.purity.data());
            return d;
        },
        py::arg("text"), py::arg("stream_index") = 0, py::arg("overrides") = std::vector<std::string>{},
        "Runs one conditioned trajectory of a YAML config.");

    m.def(
        "run_preset",
        [](const std::string &name, const std::filesystem::path &out, const std::vector<std::string> &overrides) {
            ExperimentReport rep;
            {
                py::gil_scoped_release release;
                rep = run_preset(name, out, overrides);
            }
            py::dict d;
            std::vector<std::string> files;
            for (const auto &f : rep.files) {
                files.push_back(f.string());
            }
            py::list checks;
            for (const auto &c : rep.checks) {
                checks.append(py::make_tuple(c.name, c.pass, c.detail));
            }
            d["files"] = files;
            d["checks"] = checks;
            d["passed"] = rep.all_passed();
            return d;
        },
        py::arg("name"), py::arg("out"), py::arg("overrides") = std::vector<std::string>{},
        "Runs a figure preset into a directory.");
    m.def("preset_names", &preset_names);

    m.def(
        "lindblad",
        [](const Vec3 &b0, double omega, const Vec3 &axis, double gamma, double t) {
            return bloch(lindblad_propagate(state(b0), rabi_hamiltonian(omega, axis), dephasing_coupling(gamma), t));
        },
        py::arg("bloch0"), py::arg("omega"), py::arg("axis"), py::arg("gamma"), py::arg("t"),
        "Bloch vector of the Lindblad evolution with H = omega / 2 axis.sigma, L = sqrt(gamma) sigma_z.");
    m.def(
        "frozen_average",
        [](const Vec3 &b0, double gamma, double tau, double t) {
            return bloch(frozen_average(state(b0), dephasing_coupling(gamma), tau, t));
        },
        py::arg("bloch0"), py::arg("gamma"), py::arg("tau"), py::arg("t"));
    m.def(
        "commuting_average",
        [](const Vec3 &b0, double omega, double gamma, double tau, double t) {
            return bloch(commuting_average(state(b0), rabi_hamiltonian(omega, {0, 0, 1}), dephasing_coupling(gamma),
                                           tau, t));
        },
        py::arg("bloch0"), py::arg("omega"), py::arg("gamma"), py::arg("tau"), py::arg("t"),
        "Average with H = omega / 2 sigma_z commuting with the coupling.");
    m.def(
        "rabi_reference",
        [](const Vec3 &b0, double omega, const Vec3 &axis, double t) {
            return bloch(rabi_reference(state(b0), omega, axis, t));
        },
        py::arg("bloch0"), py::arg("omega"), py::arg("axis"), py::arg("t"));
    m.def("steady_fidelity", py::overload_cast<double, double, double>(&steady_fidelity), py::arg("sz0"),
          py::arg("gamma"), py::arg("tau"));
}
