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

#ifndef NKFB_DETAIL_QUBIT_TRAJECTORY_HPP
#define NKFB_DETAIL_QUBIT_TRAJECTORY_HPP

#include <cstddef>
#include <optional>
#include <sstream>

#include <Eigen/Dense>

#include "nkfb/detail/kernels.hpp"
#include "nkfb/detail/sme_kernels.hpp"
#include "nkfb/noise_stream.hpp"
#include "nkfb/trajectory_engine.hpp"

namespace nkfb::detail {

/// Fixed-size qubit stepper used by run_trajectory and the ensemble runner.
class QubitStepper {
   public:
    explicit QubitStepper(const StepConfig &cfg)
        : method_(cfg.method),
          feedback_(cfg.feedback_enabled),
          kappa_(cfg.kappa),
          dt_(cfg.dt),
          min_eigenvalue_(cfg.repair.min_eigenvalue),
          H_(cfg.H.matrix()),
          L_(cfg.L.matrix()),
          coupling_(PauliGenerator::from(L_)),
          unitary_(qubit_rotation(PauliGenerator::from(H_), cfg.dt, false)) {}

    std::size_t kappa() const noexcept { return kappa_; }
    double dt() const noexcept { return dt_; }

    /// Advances rho by one step. `delayed` is the kappa-step-old noise, or
    /// empty while the delay buffer is filling.
    void step(Eigen::Matrix2cd &rho, double xi, std::optional<double> delayed) const {
        const bool active = feedback_ && delayed.has_value();
        switch (method_) {
            case Method::operational: {
                const Eigen::Matrix2cd m = qubit_rotation(coupling_, -xi * dt_, false);
                Eigen::Matrix2cd w = unitary_ * m;
                if (active) {
                    w = qubit_rotation(coupling_, *delayed * dt_, false) * w;
                }
                rho = conjugate_normalized(w, rho);
                return;
            }
            case Method::ito: {
                if (active && kappa_ == 0) {
                    // Perfectly correlated noises: the zero-delay Ito SME is the bare unitary one.
                    rho = rho - kI * commutator(H_, rho) * dt_;
                } else {
                    rho += delayed_ito_increment(rho, H_, L_, xi, active ? *delayed : 0.0, dt_, active);
                }
                repair(rho);
                return;
            }
            case Method::stratonovich: {
                const double net = active ? xi - *delayed : xi;
                const Eigen::Matrix2cd g = H_ - net * L_;
                rho = heun_commutator_step(rho, g, dt_);
                repair(rho);
                return;
            }
        }
    }

   private:
    void repair(Eigen::Matrix2cd &rho) const {
        const double tr = rho.trace().real();
        if (!(tr > 0.0) || !std::isfinite(tr)) {
            throw StepFailure("SME step produced a state with non-positive trace");
        }
        rho = hermitize_normalize(rho);
        const double a = rho(0, 0).real();
        const double d = rho(1, 1).real();
        const double lmin = 0.5 * (a + d) - std::sqrt(0.25 * (a - d) * (a - d) + std::norm(rho(1, 0)));
        if (!(lmin >= min_eigenvalue_)) {
            std::ostringstream msg;
            msg << "SME step diverged (min eigenvalue " << lmin << " < " << min_eigenvalue_
                << "); reduce dt";
            throw StepFailure(msg.str());
        }
    }

    Method method_;
    bool feedback_;
    std::size_t kappa_;
    double dt_;
    double min_eigenvalue_;
    Eigen::Matrix2cd H_;
    Eigen::Matrix2cd L_;
    PauliGenerator coupling_;
    Eigen::Matrix2cd unitary_;
};

/// Drives one qubit trajectory for n_steps steps. `next_noise()` yields xi_j;
/// `visit(j, rho)` is called for j = 0 and every j divisible by record_every.
template <class NoiseFn, class Visitor>
Eigen::Matrix2cd drive_qubit(const QubitStepper &stepper, Eigen::Matrix2cd rho, std::size_t n_steps,
                             std::size_t record_every, NoiseFn &&next_noise, Visitor &&visit) {
    DelayBuffer buffer(stepper.kappa());
    visit(std::size_t{0}, rho);
    for (std::size_t j = 0; j < n_steps; ++j) {
        const double xi = next_noise();
        stepper.step(rho, xi, buffer.push_pop(xi));
        if ((j + 1) % record_every == 0) {
            visit(j + 1, rho);
        }
    }
    return rho;
}

inline BlochVector bloch_of(const Eigen::Matrix2cd &rho) {
    const std::complex<double> r10 = 0.5 * (rho(1, 0) + std::conj(rho(0, 1)));
    return {2.0 * r10.real(), 2.0 * r10.imag(), (rho(0, 0) - rho(1, 1)).real()};
}

inline double purity_of(const Eigen::Matrix2cd &rho) {
    return (rho * rho).trace().real();
}

}  // namespace nkfb::detail

#endif  // NKFB_DETAIL_QUBIT_TRAJECTORY_HPP
