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

#ifndef NKFB_EXPERIMENT_CONFIG_HPP
#define NKFB_EXPERIMENT_CONFIG_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nkfb/ensemble_runner.hpp"

namespace nkfb {

enum class OutputFormat { csv, json };

/// Full description of one experiment.
///
/// The text form is YAML with five sections:
///
///     system:        { omega: 6.283185307179586, rabi_axis: x, gamma: 0.5 }
///     sim:           { dt: 0.001, t_final: 5.0, tau: 1.0, method: operational, feedback: true }
///     ensemble:      { n_traj: 5000, master_seed: 1, workers: 0 }
///     initial_state: { bloch: [0.7071067811865476, 0.7071067811865476, 0.0] }
///     output:        { dir: out, format: csv, record_every: 1 }
///
/// Every key is optional. Unknown keys are rejected. omega is an angular
/// frequency (omega = 0 disables the drive); dt defaults to 1e-3 of the Rabi
/// period (or of 1/gamma without drive) and t_final to five Rabi periods (or
/// 3/gamma). workers = 0 defers to NKFB_WORKERS or the hardware concurrency.
struct ExperimentConfig {
    struct System {
        double omega = 2.0 * 3.14159265358979323846;
        char rabi_axis = 'x';
        double gamma = 0.5;
    } system;
    struct Sim {
        double dt = 0.0;
        double t_final = 0.0;
        double tau = 0.0;
        Method method = Method::operational;
        bool feedback = true;
    } sim;
    struct Ensemble {
        std::size_t n_traj = 5000;
        std::uint64_t master_seed = 1;
        std::size_t workers = 0;
    } ensemble;
    struct InitialState {
        std::array<double, 3> bloch{0.70710678118654752, 0.70710678118654752, 0.0};
    } initial_state;
    struct Output {
        std::filesystem::path dir = "out";
        OutputFormat format = OutputFormat::csv;
        std::size_t record_every = 1;
    } output;

    /// T_Omega = 2 pi / omega (infinite without drive).
    double rabi_period() const;
    /// T_gamma = 1 / gamma (infinite without coupling).
    double dephasing_time() const;
    std::size_t kappa() const;
    std::size_t n_steps() const;
    std::array<double, 3> axis() const;

    HermitianOperator hamiltonian() const;
    HermitianOperator coupling() const;
    DensityMatrix initial_density() const;
    StepConfig step_config() const;
    EnsembleSpec ensemble_spec() const;

    /// Every physical and numerical parameter, for manifests.
    nlohmann::json to_json() const;
};

/// Validation failure carrying one message per offending field, each prefixed
/// with its dotted path (e.g. "sim.tau: ...").
class ConfigError : public ValidationError {
   public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string> &errors() const noexcept { return errors_; }

   private:
    std::vector<std::string> errors_;
};

/// Parses and validates configuration text. Each override has the form
/// "section.key=value" and is applied before validation; `value` is read as
/// YAML, so "initial_state.bloch=[0,0,1]" works.
ExperimentConfig parse_config(std::string_view text, std::span<const std::string> overrides = {});

ExperimentConfig load_config(const std::filesystem::path &path, std::span<const std::string> overrides = {});

std::string_view to_string(OutputFormat format);

}  // namespace nkfb

#endif  // NKFB_EXPERIMENT_CONFIG_HPP
