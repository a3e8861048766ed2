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

#include "nkfb/trajectory_engine.hpp"

#include <cmath>
#include <sstream>

#include "nkfb/detail/kernels.hpp"
#include "nkfb/detail/qubit_trajectory.hpp"

namespace nkfb {

std::string_view to_string(Method method) {
    switch (method) {
        case Method::operational:
            return "operational";
        case Method::ito:
            return "ito";
        case Method::stratonovich:
            return "stratonovich";
    }
    return "unknown";
}

Method method_from_string(std::string_view name) {
    if (name == "operational") {
        return Method::operational;
    }
    if (name == "ito") {
        return Method::ito;
    }
    if (name == "stratonovich") {
        return Method::stratonovich;
    }
    throw ValidationError("unknown method '" + std::string(name) + "' (expected operational, ito or stratonovich)");
}

std::size_t delay_steps(double tau, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ValidationError("dt must be positive and finite");
    }
    if (!(tau >= 0.0) || !std::isfinite(tau)) {
        throw ValidationError("tau must be non-negative and finite");
    }
    const double ratio = tau / dt;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "tau not an integer multiple of dt (tau = " << tau << ", dt = " << dt << ")";
        throw ValidationError(msg.str());
    }
    return static_cast<std::size_t>(rounded);
}

StepConfig StepConfig::with_delay(HermitianOperator H, HermitianOperator L, double dt, double tau,
                                  bool feedback_enabled, Method method) {
    StepConfig cfg;
    cfg.H = std::move(H);
    cfg.L = std::move(L);
    cfg.dt = dt;
    cfg.kappa = delay_steps(tau, dt);
    cfg.feedback_enabled = feedback_enabled;
    cfg.method = method;
    cfg.validate();
    return cfg;
}

void StepConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ValidationError("StepConfig: dt must be positive and finite");
    }
    if (H.dim() == 0 || H.dim() != L.dim()) {
        throw ValidationError("StepConfig: H and L must be non-empty with equal dimensions");
    }
}

namespace {

void require_valid_state(const DensityMatrix &rho, const StepConfig &cfg) {
    if (rho.dim() != cfg.dim()) {
        throw ValidationError("state dimension does not match the step configuration");
    }
    // Re-run the invariant checks; `rho` may have been built unchecked.
    DensityMatrix checked(rho.matrix());
    (void)checked;
}

DensityMatrix apply_normalized(const Matrix &w, const DensityMatrix &rho) {
    Matrix out = detail::conjugate_normalized(w, rho.matrix());
    out = 0.5 * (out + out.adjoint());
    return DensityMatrix::unchecked(std::move(out));
}

}  // namespace

DensityMatrix step_no_feedback(const DensityMatrix &rho, double xi, const StepConfig &cfg) {
    cfg.validate();
    require_valid_state(rho, cfg);
    const UnitaryOperator u = unitary_from_generator(cfg.H, cfg.dt);
    const UnitaryOperator m = unitary_from_generator(cfg.L, -xi * cfg.dt);
    return apply_normalized((u * m).matrix(), rho);
}

DensityMatrix step_with_feedback(const DensityMatrix &rho, double xi_now, double xi_delayed, const StepConfig &cfg) {
    cfg.validate();
    require_valid_state(rho, cfg);
    const UnitaryOperator u = unitary_from_generator(cfg.H, cfg.dt);
    const UnitaryOperator m = unitary_from_generator(cfg.L, -xi_now * cfg.dt);
    const UnitaryOperator f = unitary_from_generator(cfg.L, xi_delayed * cfg.dt);
    return apply_normalized((f * u * m).matrix(), rho);
}

namespace {

template <class NoiseFn>
TrajectoryRecord run_qubit(const StepConfig &cfg, const DensityMatrix &rho0, std::size_t n_steps,
                           std::size_t record_every, NoiseFn &&next_noise) {
    cfg.validate();
    if (cfg.dim() != 2) {
        throw ValidationError("run_trajectory: Bloch-vector recording requires a qubit (d = 2)");
    }
    require_valid_state(rho0, cfg);
    if (n_steps < 1) {
        throw ValidationError("run_trajectory: n_steps must be at least 1");
    }
    if (record_every < 1) {
        throw ValidationError("run_trajectory: record_every must be at least 1");
    }
    const double horizon = static_cast<double>(n_steps) * cfg.dt;
    if (!std::isfinite(horizon) || n_steps > (std::size_t{1} << 53)) {
        throw ValidationError("run_trajectory: time grid overflows");
    }

    TrajectoryRecord record;
    const std::size_t n_records = n_steps / record_every + 1;
    record.times.reserve(n_records);
    record.bloch.reserve(n_records);
    record.purity.reserve(n_records);

    const detail::QubitStepper stepper(cfg);
    const Eigen::Matrix2cd final = detail::drive_qubit(
        stepper, Eigen::Matrix2cd(rho0.matrix()), n_steps, record_every, next_noise,
        [&](std::size_t j, const Eigen::Matrix2cd &rho) {
            record.times.push_back(static_cast<double>(j) * cfg.dt);
            record.bloch.push_back(detail::bloch_of(rho));
            record.purity.push_back(detail::purity_of(rho));
        });
    record.final_state = DensityMatrix::unchecked(Matrix(final));
    return record;
}

}  // namespace

TrajectoryRecord run_trajectory(const StepConfig &cfg, const DensityMatrix &rho0, NoiseStream stream,
                                std::size_t n_steps, std::size_t record_every) {
    const double dt = cfg.dt;
    TrajectoryRecord record = run_qubit(cfg, rho0, n_steps, record_every, [&] { return stream.sample(dt); });
    record.master_seed = stream.master_seed();
    record.stream_index = stream.stream_index();
    return record;
}

TrajectoryRecord run_trajectory(const StepConfig &cfg, const DensityMatrix &rho0, std::span<const double> noises,
                                std::size_t record_every) {
    std::size_t next = 0;
    return run_qubit(cfg, rho0, noises.size(), record_every, [&] { return noises[next++]; });
}

UnitaryOperator compressed_commuting_propagator(std::span<const double> noises, std::size_t n, std::size_t kappa,
                                                const StepConfig &cfg) {
    cfg.validate();
    if (commutator_norm(cfg.H, cfg.L) > tolerance::commuting) {
        throw ValidationError("compressed_commuting_propagator: H and L do not commute");
    }
    if (n < kappa) {
        throw ValidationError("compressed_commuting_propagator: requires n >= kappa");
    }
    if (noises.size() < n) {
        throw ValidationError("compressed_commuting_propagator: fewer noise samples than steps");
    }
    double measured = 0.0;
    double fed_back = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        measured += noises[k];
        if (k + kappa < n) {
            fed_back += noises[k];
        }
    }
    if (!cfg.feedback_enabled) {
        fed_back = 0.0;
    }
    const UnitaryOperator feedback = unitary_from_generator(cfg.L, cfg.dt * fed_back);
    const UnitaryOperator measurement = unitary_from_generator(cfg.L, -cfg.dt * measured);
    const UnitaryOperator drive = unitary_from_generator(cfg.H, cfg.dt * static_cast<double>(n));
    return feedback * measurement * drive;
}

}  // namespace nkfb
