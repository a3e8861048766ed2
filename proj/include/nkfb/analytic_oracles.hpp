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

#ifndef NKFB_ANALYTIC_ORACLES_HPP
#define NKFB_ANALYTIC_ORACLES_HPP

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nkfb/quantum_core.hpp"

namespace nkfb {

/// Reference Bloch-vector curve sampled on a uniform time grid.
struct OracleCurve {
    std::vector<double> times;
    std::vector<BlochVector> states;
    std::string label;
};

/// d^2 x d^2 matrix of the Lindbladian -i[H, .] + D[L] acting on
/// column-stacked density matrices.
Matrix liouvillian(const HermitianOperator &H, const Matrix &L);

/// exp(L t) rho0 via the matrix exponential of the vectorized Liouvillian.
DensityMatrix lindblad_propagate(const DensityMatrix &rho0, const HermitianOperator &H, const HermitianOperator &L,
                                 double t);

/// Average state under delayed feedback without a Hamiltonian:
/// exp(D[L] t) rho0 for t < tau, exp(D[L] tau) rho0 afterwards.
DensityMatrix frozen_average(const DensityMatrix &rho0, const HermitianOperator &L, double tau, double t);

/// The t >= tau plateau of frozen_average.
DensityMatrix frozen_plateau(const DensityMatrix &rho0, const HermitianOperator &L, double tau);

/// Average state under delayed feedback with a Hamiltonian commuting with L:
/// exp(L t) rho0 for t < tau, then pure unitary evolution of rho(tau).
DensityMatrix commuting_average(const DensityMatrix &rho0, const HermitianOperator &H, const HermitianOperator &L,
                                double tau, double t);

/// Steady-state fidelity Tr[rho0 rho_av(infinity)] for L = sqrt(gamma) sigma_z and
/// a pure initial state: ((1 + sz0^2) + (1 - sz0^2) exp(-2 gamma tau)) / 2.
double steady_fidelity(double sz0, double gamma, double tau);

/// Same, reading S_z(0) from a pure qubit state. Mixed states are refused.
double steady_fidelity(const DensityMatrix &rho0, double gamma, double tau);

/// exp(-i H t) rho0 exp(i H t) with H = (omega / 2) axis . sigma.
DensityMatrix rabi_reference(const DensityMatrix &rho0, double omega, const std::array<double, 3> &axis, double t);

/// Tr[a b] for density matrices.
double overlap(const DensityMatrix &a, const DensityMatrix &b);

/// Samples `state_at(t)` on `times`.
OracleCurve make_curve(std::span<const double> times, const std::function<DensityMatrix(double)> &state_at,
                       std::string label);

}  // namespace nkfb

#endif  // NKFB_ANALYTIC_ORACLES_HPP
