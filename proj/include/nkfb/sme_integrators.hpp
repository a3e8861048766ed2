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

#ifndef NKFB_SME_INTEGRATORS_HPP
#define NKFB_SME_INTEGRATORS_HPP

#include <numbers>
#include <stdexcept>

#include "nkfb/quantum_core.hpp"

namespace nkfb {

/// Raised when a stochastic step leaves the physical state space by more than
/// the repair policy tolerates. Usually means dt is too large.
class StepFailure : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Post-step state repair for the first-order SME schemes.
///
/// Every step is Hermitized and renormalized to unit trace. The Euler-Maruyama
/// scheme does not preserve positivity: single trajectories routinely leave the
/// Bloch ball, with heavy-tailed excursions, while the conditional mean of each
/// step stays exactly rho + L rho dt. The step therefore only fails as a
/// divergence guard, when the smallest eigenvalue drops below `min_eigenvalue`
/// or the state is not finite. The repair never clips eigenvalues: clipping is
/// nonlinear and would bias ensemble averages.
struct RepairPolicy {
    double min_eigenvalue = -1e3;
};

/// Homodyne measurement of the channel c = L e^{i theta} with efficiency eta.
struct HomodyneConfig {
    double theta = std::numbers::pi / 2.0;
    double eta = 1.0;
    Matrix L;
    HermitianOperator H;

    /// Throws ValidationError unless 0 < eta <= 1, 0 <= theta < 2 pi and
    /// shapes agree.
    void validate() const;
    Matrix channel() const;
};

/// y = sqrt(eta) Tr[(L e^{i theta} + L^dagger e^{-i theta}) rho] + xi.
double homodyne_record(const DensityMatrix &rho, const HomodyneConfig &cfg, double xi);

/// Euler-Maruyama step of d rho = L rho dt + sqrt(eta) xi H[L e^{i theta}] rho dt.
DensityMatrix ito_homodyne_step(const DensityMatrix &rho, const HomodyneConfig &cfg, double xi, double dt,
                                const RepairPolicy &policy = {});

/// Heun step of the Stratonovich SME driven by the record y, including the
/// -(eta / 2) A^2[c] rho correction.
DensityMatrix stratonovich_homodyne_step(const DensityMatrix &rho, const HomodyneConfig &cfg, double y, double dt,
                                         const RepairPolicy &policy = {});

/// Euler-Maruyama step of the delayed-feedback Ito SME
///   d rho = -i[H, rho] dt + 2 D[L] rho dt - i[L, rho] (xi_delayed - xi_now) dt.
/// With feedback inactive this is the no-knowledge Ito SME without feedback.
/// The delayed form assumes independent noises and must not be used at zero
/// delay; see zero_delay_ito_step.
DensityMatrix delayed_ito_step(const DensityMatrix &rho, double xi_now, double xi_delayed, const HermitianOperator &H,
                               const HermitianOperator &L, double dt, bool feedback_active,
                               const RepairPolicy &policy = {});

/// Heun step of d rho / dt = -i[H, rho] - i[L, rho] (xi_delayed - xi_now).
/// With feedback inactive: d rho / dt = -i[H - xi_now L, rho].
DensityMatrix delayed_stratonovich_step(const DensityMatrix &rho, double xi_now, double xi_delayed,
                                        const HermitianOperator &H, const HermitianOperator &L, double dt,
                                        bool feedback_active, const RepairPolicy &policy = {});

/// Euler-Maruyama step of the zero-delay feedback Ito SME d rho = -i[H, rho] dt.
DensityMatrix zero_delay_ito_step(const DensityMatrix &rho, const HermitianOperator &H, double dt,
                                  const RepairPolicy &policy = {});

/// Hermitize, renormalize and check against the policy. Exposed for tests.
DensityMatrix repair_state(const Matrix &rho, const RepairPolicy &policy);

}  // namespace nkfb

#endif  // NKFB_SME_INTEGRATORS_HPP
