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

#ifndef NKFB_TRAJECTORY_ENGINE_HPP
#define NKFB_TRAJECTORY_ENGINE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nkfb/noise_stream.hpp"
#include "nkfb/quantum_core.hpp"
#include "nkfb/sme_integrators.hpp"

namespace nkfb {

/// How a conditioned trajectory is advanced over one time step.
enum class Method {
    /// Exact measurement / unitary / feedback maps, F U M rho M^dagger U^dagger F^dagger.
    operational,
    /// Euler-Maruyama on the Ito SMEs.
    ito,
    /// Heun on the Stratonovich SMEs.
    stratonovich,
};

std::string_view to_string(Method method);
/// Throws ValidationError for unknown names.
Method method_from_string(std::string_view name);

struct StepConfig {
    HermitianOperator H;
    HermitianOperator L;
    double dt = 0.0;
    std::size_t kappa = 0;
    bool feedback_enabled = true;
    Method method = Method::operational;
    RepairPolicy repair{};

    /// Builds a config from a delay time; tau must be an integer multiple of dt
    /// within relative 1e-9.
    static StepConfig with_delay(HermitianOperator H, HermitianOperator L, double dt, double tau,
                                 bool feedback_enabled = true, Method method = Method::operational);

    double tau() const noexcept { return static_cast<double>(kappa) * dt; }
    Index dim() const noexcept { return H.dim(); }
    void validate() const;
};

/// Number of whole time steps in `tau`. Throws ValidationError unless
/// tau / dt is integral within relative 1e-9.
std::size_t delay_steps(double tau, double dt);

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<BlochVector> bloch;
    std::vector<double> purity;
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
    DensityMatrix final_state;
};

/// normalize(U M rho M^dagger U^dagger) with M = exp(i xi L dt), U = exp(-i H dt).
DensityMatrix step_no_feedback(const DensityMatrix &rho, double xi, const StepConfig &cfg);

/// normalize(F U M rho M^dagger U^dagger F^dagger) with F = exp(-i xi_delayed L dt).
DensityMatrix step_with_feedback(const DensityMatrix &rho, double xi_now, double xi_delayed, const StepConfig &cfg);

/// Runs n_steps steps drawing xi_j from `stream`; the feedback at step j uses
/// xi_{j - kappa} and is absent for j < kappa. Records t = j dt for every j
/// divisible by record_every, including j = 0. Qubits only.
TrajectoryRecord run_trajectory(const StepConfig &cfg, const DensityMatrix &rho0, NoiseStream stream,
                                std::size_t n_steps, std::size_t record_every = 1);

/// Same as above with an explicit noise sequence, one value per step.
TrajectoryRecord run_trajectory(const StepConfig &cfg, const DensityMatrix &rho0, std::span<const double> noises,
                                std::size_t record_every = 1);

/// Product of all step maps up to t = n dt for commuting H and L:
///   exp(-i L dt sum_{k < n - kappa} xi_k) exp(i L dt sum_{k < n} xi_k) exp(-i H n dt).
UnitaryOperator compressed_commuting_propagator(std::span<const double> noises, std::size_t n, std::size_t kappa,
                                                const StepConfig &cfg);

}  // namespace nkfb

#endif  // NKFB_TRAJECTORY_ENGINE_HPP
