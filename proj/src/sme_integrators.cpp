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

#include "nkfb/sme_integrators.hpp"

#include <cmath>
#include <sstream>

#include "nkfb/detail/kernels.hpp"
#include "nkfb/detail/sme_kernels.hpp"

namespace nkfb {

namespace {

void require_dt(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ValidationError("SME step: dt must be positive and finite");
    }
}

void require_dims(const DensityMatrix &rho, const HermitianOperator &H, const HermitianOperator &L) {
    if (H.dim() != rho.dim() || L.dim() != rho.dim()) {
        throw ValidationError("SME step: operator and state dimensions differ");
    }
}

}  // namespace

void HomodyneConfig::validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw ValidationError("HomodyneConfig: eta must lie in (0, 1]");
    }
    if (!(theta >= 0.0 && theta < 2.0 * std::numbers::pi)) {
        throw ValidationError("HomodyneConfig: theta must lie in [0, 2 pi)");
    }
    if (L.rows() != L.cols() || L.rows() == 0) {
        throw ValidationError("HomodyneConfig: L must be a non-empty square matrix");
    }
    if (H.dim() != L.rows()) {
        throw ValidationError("HomodyneConfig: H and L dimensions differ");
    }
}

Matrix HomodyneConfig::channel() const {
    return L * std::polar(1.0, theta);
}

DensityMatrix repair_state(const Matrix &rho, const RepairPolicy &policy) {
    const double tr = rho.trace().real();
    if (!std::isfinite(tr) || !(tr > 0.0)) {
        throw StepFailure("SME step produced a state with non-positive trace");
    }
    DensityMatrix out = DensityMatrix::unchecked(detail::hermitize_normalize(rho));
    const double lmin = out.min_eigenvalue();
    if (!(lmin >= policy.min_eigenvalue)) {
        std::ostringstream msg;
        msg << "SME step diverged (min eigenvalue " << lmin << " < " << policy.min_eigenvalue
            << "); reduce dt";
        throw StepFailure(msg.str());
    }
    return out;
}

double homodyne_record(const DensityMatrix &rho, const HomodyneConfig &cfg, double xi) {
    cfg.validate();
    if (rho.dim() != cfg.L.rows()) {
        throw ValidationError("homodyne_record: dimension mismatch");
    }
    const Matrix c = cfg.channel();
    const Matrix x = c + c.adjoint();
    return std::sqrt(cfg.eta) * (x * rho.matrix()).trace().real() + xi;
}

DensityMatrix ito_homodyne_step(const DensityMatrix &rho, const HomodyneConfig &cfg, double xi, double dt,
                                const RepairPolicy &policy) {
    cfg.validate();
    require_dt(dt);
    if (rho.dim() != cfg.L.rows()) {
        throw ValidationError("ito_homodyne_step: dimension mismatch");
    }
    const Matrix c = cfg.channel();
    const Matrix next =
        rho.matrix() + detail::ito_homodyne_increment(rho.matrix(), cfg.H.matrix(), c, std::sqrt(cfg.eta), xi, dt);
    return repair_state(next, policy);
}

DensityMatrix stratonovich_homodyne_step(const DensityMatrix &rho, const HomodyneConfig &cfg, double y, double dt,
                                         const RepairPolicy &policy) {
    cfg.validate();
    require_dt(dt);
    if (rho.dim() != cfg.L.rows()) {
        throw ValidationError("stratonovich_homodyne_step: dimension mismatch");
    }
    const Matrix c = cfg.channel();
    const Matrix &H = cfg.H.matrix();
    const Matrix next = detail::heun_step(rho.matrix(), dt, [&](const Matrix &r) {
        return detail::stratonovich_homodyne_rhs(r, H, c, cfg.eta, y);
    });
    return repair_state(next, policy);
}

DensityMatrix delayed_ito_step(const DensityMatrix &rho, double xi_now, double xi_delayed, const HermitianOperator &H,
                               const HermitianOperator &L, double dt, bool feedback_active,
                               const RepairPolicy &policy) {
    require_dt(dt);
    require_dims(rho, H, L);
    const Matrix next = rho.matrix() + detail::delayed_ito_increment(rho.matrix(), H.matrix(), L.matrix(), xi_now,
                                                                     xi_delayed, dt, feedback_active);
    return repair_state(next, policy);
}

DensityMatrix delayed_stratonovich_step(const DensityMatrix &rho, double xi_now, double xi_delayed,
                                        const HermitianOperator &H, const HermitianOperator &L, double dt,
                                        bool feedback_active, const RepairPolicy &policy) {
    require_dt(dt);
    require_dims(rho, H, L);
    const double net = feedback_active ? xi_now - xi_delayed : xi_now;
    const Matrix G = H.matrix() - net * L.matrix();
    return repair_state(detail::heun_commutator_step(rho.matrix(), G, dt), policy);
}

DensityMatrix zero_delay_ito_step(const DensityMatrix &rho, const HermitianOperator &H, double dt,
                                  const RepairPolicy &policy) {
    require_dt(dt);
    if (H.dim() != rho.dim()) {
        throw ValidationError("zero_delay_ito_step: dimension mismatch");
    }
    const Matrix next = rho.matrix() - detail::kI * detail::commutator(H.matrix(), rho.matrix()) * dt;
    return repair_state(next, policy);
}

}  // namespace nkfb
