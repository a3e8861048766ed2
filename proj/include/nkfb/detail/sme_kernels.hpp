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

#ifndef NKFB_DETAIL_SME_KERNELS_HPP
#define NKFB_DETAIL_SME_KERNELS_HPP

#include <cmath>

#include "nkfb/detail/kernels.hpp"

namespace nkfb::detail {

/// Euler-Maruyama increment of the homodyne Ito SME
///   d rho = L rho dt + sqrt(eta) xi H[c] rho dt,   L rho = -i[H, rho] + D[c] rho.
template <class M>
M ito_homodyne_increment(const M &rho, const M &H, const M &c, double sqrt_eta, double xi, double dt) {
    return (lindblad_rhs(H, c, rho) + (sqrt_eta * xi) * superop_H(c, rho)) * dt;
}

/// Right-hand side of the homodyne Stratonovich SME with record y:
///   L rho + sqrt(eta) y H[c] rho - (eta / 2) A^2[c] rho.
template <class M>
M stratonovich_homodyne_rhs(const M &rho, const M &H, const M &c, double eta, double y) {
    return lindblad_rhs(H, c, rho) + (std::sqrt(eta) * y) * superop_H(c, rho) - (0.5 * eta) * superop_A2(c, rho);
}

/// Euler-Maruyama increment of the delayed-feedback Ito SME
///   d rho = -i[H, rho] dt + 2 D[L] rho dt - i[L, rho] (xi_delayed - xi_now) dt
/// or, before feedback is active, of the no-knowledge Ito SME
///   d rho = -i[H, rho] dt + D[L] rho dt + i[L, rho] xi_now dt.
template <class M>
M delayed_ito_increment(const M &rho, const M &H, const M &L, double xi_now, double xi_delayed, double dt,
                        bool feedback_active) {
    if (feedback_active) {
        return (-kI * commutator(H, rho) + 2.0 * dissipator(L, rho) -
                kI * (xi_delayed - xi_now) * commutator(L, rho)) *
               dt;
    }
    return (lindblad_rhs(H, L, rho) + kI * xi_now * commutator(L, rho)) * dt;
}

/// Heun (predictor-corrector) step of the linear equation d rho / dt = -i[G, rho].
template <class M>
M heun_commutator_step(const M &rho, const M &G, double dt) {
    const M k1 = -kI * commutator(G, rho);
    const M predicted = rho + dt * k1;
    const M k2 = -kI * commutator(G, predicted);
    return rho + (0.5 * dt) * (k1 + k2);
}

/// Generic Heun step for an arbitrary right-hand side.
template <class M, class Rhs>
M heun_step(const M &rho, double dt, Rhs &&rhs) {
    const M k1 = rhs(rho);
    const M predicted = rho + dt * k1;
    const M k2 = rhs(predicted);
    return rho + (0.5 * dt) * (k1 + k2);
}

}  // namespace nkfb::detail

#endif  // NKFB_DETAIL_SME_KERNELS_HPP
