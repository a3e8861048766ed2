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

// Allocation-free kernels shared by the public operations and the trajectory
// hot loops. Everything here is templated on the Eigen matrix type so the same
// code serves Eigen::MatrixXcd and Eigen::Matrix2cd.

#ifndef NKFB_DETAIL_KERNELS_HPP
#define NKFB_DETAIL_KERNELS_HPP

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace nkfb::detail {

inline constexpr std::complex<double> kI{0.0, 1.0};

template <class M>
M commutator(const M &a, const M &b) {
    return a * b - b * a;
}

template <class M>
M dissipator(const M &L, const M &rho) {
    M LdL = L.adjoint() * L;
    return L * rho * L.adjoint() - 0.5 * (LdL * rho + rho * LdL);
}

/// -i[H, rho] + D[L] rho
template <class M>
M lindblad_rhs(const M &H, const M &L, const M &rho) {
    return -kI * commutator(H, rho) + dissipator(L, rho);
}

template <class M>
M abar(const M &c, const M &rho) {
    return c * rho + rho * c.adjoint();
}

template <class M>
M superop_H(const M &c, const M &rho) {
    M a = abar(c, rho);
    return a - a.trace() * rho;
}

template <class M>
M superop_A2(const M &c, const M &rho) {
    M a2 = abar(c, abar(c, rho));
    return a2 - a2.trace() * rho;
}

/// (rho + rho^dagger) / 2 scaled to unit trace.
template <class M>
M hermitize_normalize(const M &rho) {
    M h = 0.5 * (rho + rho.adjoint());
    return h / h.trace().real();
}

/// Decomposition G = g0 I + g . sigma of a 2x2 Hermitian matrix.
struct PauliGenerator {
    double g0 = 0.0;
    double gx = 0.0;
    double gy = 0.0;
    double gz = 0.0;
    double norm = 0.0;

    template <class M>
    static PauliGenerator from(const M &g) {
        PauliGenerator p;
        p.g0 = 0.5 * (g(0, 0).real() + g(1, 1).real());
        p.gz = 0.5 * (g(0, 0).real() - g(1, 1).real());
        p.gx = g(1, 0).real();
        p.gy = g(1, 0).imag();
        p.norm = std::sqrt(p.gx * p.gx + p.gy * p.gy + p.gz * p.gz);
        return p;
    }
};

/// exp(-i * angle * G) for 2x2 Hermitian G. With `with_phase == false` the
/// global phase exp(-i angle g0) is dropped; it cancels in conjugation.
inline Eigen::Matrix2cd qubit_rotation(const PauliGenerator &g, double angle, bool with_phase = true) {
    const double phi = angle * g.norm;
    const double c = std::cos(phi);
    // sin(angle |g|) / |g|, well defined as |g| -> 0.
    const double s = g.norm > 0.0 ? std::sin(phi) / g.norm : angle;
    Eigen::Matrix2cd u;
    // c I - i s (gx X + gy Y + gz Z)
    u(0, 0) = {c, -s * g.gz};
    u(1, 1) = {c, s * g.gz};
    u(0, 1) = {-s * g.gy, -s * g.gx};
    u(1, 0) = {s * g.gy, -s * g.gx};
    if (with_phase && g.g0 != 0.0) {
        u *= std::polar(1.0, -angle * g.g0);
    }
    return u;
}

/// W rho W^dagger divided by its trace.
template <class M, class W>
M conjugate_normalized(const W &w, const M &rho) {
    M out = w * rho * w.adjoint();
    return out / out.trace().real();
}

}  // namespace nkfb::detail

#endif  // NKFB_DETAIL_KERNELS_HPP
