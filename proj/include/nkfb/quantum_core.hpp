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

#ifndef NKFB_QUANTUM_CORE_HPP
#define NKFB_QUANTUM_CORE_HPP

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nkfb {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Raised when an input violates a documented precondition (shape, hermiticity,
/// positivity, domain of a scalar parameter).
class ValidationError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

namespace tolerance {
inline constexpr double hermitian = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double psd = -1e-10;
inline constexpr double unitary = 1e-12;
inline constexpr double bloch = 1e-10;
inline constexpr double commuting = 1e-12;
}  // namespace tolerance

/// Largest entrywise modulus of A - A^dagger.
double hermiticity_defect(const Matrix &m);

/// A d x d Hermitian matrix. Used for Hamiltonians (angular frequency) and for
/// Hermitian coupling operators (square root of a rate).
class HermitianOperator {
   public:
    HermitianOperator() = default;
    explicit HermitianOperator(Matrix m);

    static HermitianOperator zero(Index dim);

    const Matrix &matrix() const noexcept { return data_; }
    Index dim() const noexcept { return data_.rows(); }

    HermitianOperator scaled(double factor) const;

   private:
    Matrix data_;
};

class UnitaryOperator {
   public:
    UnitaryOperator() = default;
    /// Validates U U^dagger = I within tolerance::unitary.
    explicit UnitaryOperator(Matrix m);

    static UnitaryOperator identity(Index dim);
    /// Wraps a matrix already known to be unitary (closed-form constructions).
    static UnitaryOperator unchecked(Matrix m);

    const Matrix &matrix() const noexcept { return data_; }
    Index dim() const noexcept { return data_.rows(); }

    UnitaryOperator adjoint() const;
    UnitaryOperator operator*(const UnitaryOperator &rhs) const;

   private:
    Matrix data_;
};

/// Unit-trace, Hermitian, positive semidefinite system state.
///
/// The validating constructor enforces all three invariants. States produced by
/// first-order stochastic integrators are only approximately positive; those
/// are carried through `unchecked`.
class DensityMatrix {
   public:
    DensityMatrix() = default;
    explicit DensityMatrix(Matrix m);

    static DensityMatrix unchecked(Matrix m);
    static DensityMatrix maximally_mixed(Index dim);
    static DensityMatrix pure(const Eigen::VectorXcd &psi);

    const Matrix &matrix() const noexcept { return data_; }
    Index dim() const noexcept { return data_.rows(); }

    Complex trace() const { return data_.trace(); }
    double purity() const;
    double min_eigenvalue() const;

   private:
    Matrix data_;
};

struct BlochVector {
    double sx = 0.0;
    double sy = 0.0;
    double sz = 0.0;

    double norm() const;
    double transverse() const;
    std::array<double, 3> as_array() const { return {sx, sy, sz}; }
    double operator[](int axis) const { return axis == 0 ? sx : axis == 1 ? sy : sz; }
};

double distance(const BlochVector &a, const BlochVector &b);

namespace pauli {
Matrix identity();
Matrix x();
Matrix y();
Matrix z();
/// sigma_minus = |g><e| with |e> = |0>, |g> = |1>.
Matrix lowering();
/// n . sigma for a (not necessarily unit) 3-vector n.
Matrix along(const std::array<double, 3> &n);
}  // namespace pauli

/// exp(-i * angle * G). Closed-form Pauli rotation for d = 2, Hermitian
/// eigendecomposition otherwise.
UnitaryOperator unitary_from_generator(const HermitianOperator &generator, double angle);

/// L rho L^dagger - (L^dagger L rho + rho L^dagger L) / 2, for general L.
Matrix dissipator(const Matrix &L, const DensityMatrix &rho);

/// -i[H, rho] + D[L] rho.
Matrix lindblad_rhs(const HermitianOperator &H, const HermitianOperator &L, const DensityMatrix &rho);

/// c rho + rho c^dagger - Tr(c rho + rho c^dagger) rho.
Matrix superop_H(const Matrix &c, const DensityMatrix &rho);

/// Abar^2[c] rho - Tr(Abar^2[c] rho) rho, with Abar[c] = c . + . c^dagger.
Matrix superop_A2(const Matrix &c, const DensityMatrix &rho);

BlochVector density_to_bloch(const DensityMatrix &rho);
DensityMatrix bloch_to_density(const BlochVector &b);

/// Frobenius norm of AB - BA.
double commutator_norm(const HermitianOperator &a, const HermitianOperator &b);

/// Qubit Hamiltonian (omega / 2) * (axis . sigma); axis must be a unit vector.
HermitianOperator rabi_hamiltonian(double omega, const std::array<double, 3> &axis);

/// Hermitian dephasing coupling sqrt(gamma) * sigma_z.
HermitianOperator dephasing_coupling(double gamma);

std::string describe(const Matrix &m);

}  // namespace nkfb

#endif  // NKFB_QUANTUM_CORE_HPP
