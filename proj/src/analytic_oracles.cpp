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

#include "nkfb/analytic_oracles.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace nkfb {

namespace {

void require_time(double t, const char *what) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw ValidationError(std::string(what) + ": times must be non-negative and finite");
    }
}

Eigen::VectorXcd vec(const Matrix &m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Matrix unvec(const Eigen::VectorXcd &v, Index d) {
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

DensityMatrix as_state(Matrix m) {
    m = 0.5 * (m + m.adjoint());
    m /= m.trace().real();
    return DensityMatrix::unchecked(std::move(m));
}

DensityMatrix conjugate(const UnitaryOperator &u, const DensityMatrix &rho) {
    return as_state(u.matrix() * rho.matrix() * u.matrix().adjoint());
}

}  // namespace

Matrix liouvillian(const HermitianOperator &H, const Matrix &L) {
    const Index d = H.dim();
    if (L.rows() != d || L.cols() != d) {
        throw ValidationError("liouvillian: H and L dimensions differ");
    }
    const Matrix id = Matrix::Identity(d, d);
    const Matrix LdL = L.adjoint() * L;
    // vec(A X B) = (B^T kron A) vec(X)
    Matrix out = Complex(0.0, -1.0) * (Eigen::kroneckerProduct(id, H.matrix()).eval() -
                                       Eigen::kroneckerProduct(H.matrix().transpose(), id).eval());
    out += Eigen::kroneckerProduct(L.conjugate(), L).eval();
    out -= 0.5 * Eigen::kroneckerProduct(id, LdL).eval();
    out -= 0.5 * Eigen::kroneckerProduct(LdL.transpose(), id).eval();
    return out;
}

DensityMatrix lindblad_propagate(const DensityMatrix &rho0, const HermitianOperator &H, const HermitianOperator &L,
                                 double t) {
    require_time(t, "lindblad_propagate");
    if (rho0.dim() != H.dim() || rho0.dim() != L.dim()) {
        throw ValidationError("lindblad_propagate: dimension mismatch");
    }
    if (t == 0.0) {
        return rho0;
    }
    const Matrix generator = liouvillian(H, L.matrix()) * t;
    const Matrix propagator = generator.exp();
    return as_state(unvec(propagator * vec(rho0.matrix()), rho0.dim()));
}

DensityMatrix frozen_plateau(const DensityMatrix &rho0, const HermitianOperator &L, double tau) {
    require_time(tau, "frozen_plateau");
    return lindblad_propagate(rho0, HermitianOperator::zero(L.dim()), L, tau);
}

DensityMatrix frozen_average(const DensityMatrix &rho0, const HermitianOperator &L, double tau, double t) {
    require_time(tau, "frozen_average");
    require_time(t, "frozen_average");
    return frozen_plateau(rho0, L, std::min(t, tau));
}

DensityMatrix commuting_average(const DensityMatrix &rho0, const HermitianOperator &H, const HermitianOperator &L,
                                double tau, double t) {
    require_time(tau, "commuting_average");
    require_time(t, "commuting_average");
    if (commutator_norm(H, L) > tolerance::commuting) {
        throw ValidationError("commuting_average: H and L do not commute");
    }
    if (t < tau) {
        return lindblad_propagate(rho0, H, L, t);
    }
    const DensityMatrix at_tau = lindblad_propagate(rho0, H, L, tau);
    return conjugate(unitary_from_generator(H, t - tau), at_tau);
}

double steady_fidelity(double sz0, double gamma, double tau) {
    if (!(std::abs(sz0) <= 1.0)) {
        throw ValidationError("steady_fidelity: |sz0| must not exceed 1");
    }
    if (!(gamma > 0.0)) {
        throw ValidationError("steady_fidelity: gamma must be positive");
    }
    require_time(tau, "steady_fidelity");
    const double s2 = sz0 * sz0;
    return 0.5 * ((1.0 + s2) + (1.0 - s2) * std::exp(-2.0 * gamma * tau));
}

double steady_fidelity(const DensityMatrix &rho0, double gamma, double tau) {
    if (rho0.dim() != 2) {
        throw ValidationError("steady_fidelity: qubit state required");
    }
    if (std::abs(rho0.purity() - 1.0) > 1e-10) {
        throw ValidationError("steady_fidelity: defined for pure initial states only");
    }
    return steady_fidelity(density_to_bloch(rho0).sz, gamma, tau);
}

DensityMatrix rabi_reference(const DensityMatrix &rho0, double omega, const std::array<double, 3> &axis, double t) {
    if (rho0.dim() != 2) {
        throw ValidationError("rabi_reference: qubit state required");
    }
    const HermitianOperator H = rabi_hamiltonian(omega, axis);
    return conjugate(unitary_from_generator(H, t), rho0);
}

double overlap(const DensityMatrix &a, const DensityMatrix &b) {
    if (a.dim() != b.dim()) {
        throw ValidationError("overlap: dimension mismatch");
    }
    return (a.matrix() * b.matrix()).trace().real();
}

OracleCurve make_curve(std::span<const double> times, const std::function<DensityMatrix(double)> &state_at,
                       std::string label) {
    OracleCurve curve;
    curve.label = std::move(label);
    curve.times.assign(times.begin(), times.end());
    curve.states.reserve(times.size());
    for (double t : times) {
        curve.states.push_back(density_to_bloch(state_at(t)));
    }
    return curve;
}

}  // namespace nkfb
