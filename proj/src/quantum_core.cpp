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

#include "nkfb/quantum_core.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nkfb/detail/kernels.hpp"

namespace nkfb {

namespace {

void require_square(const Matrix &m, const char *what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        std::ostringstream msg;
        msg << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
        throw ValidationError(msg.str());
    }
}

void require_same_dim(Index a, Index b, const char *what) {
    if (a != b) {
        std::ostringstream msg;
        msg << what << ": dimension mismatch (" << a << " vs " << b << ")";
        throw ValidationError(msg.str());
    }
}

}  // namespace

double hermiticity_defect(const Matrix &m) {
    if (m.rows() != m.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// HermitianOperator

HermitianOperator::HermitianOperator(Matrix m) : data_(std::move(m)) {
    require_square(data_, "HermitianOperator");
    const double defect = hermiticity_defect(data_);
    if (!(defect <= tolerance::hermitian)) {
        throw ValidationError("HermitianOperator: matrix is not Hermitian (max |A - A^dagger| = " +
                              std::to_string(defect) + ")");
    }
}

HermitianOperator HermitianOperator::zero(Index dim) {
    return HermitianOperator(Matrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::scaled(double factor) const {
    HermitianOperator out;
    out.data_ = data_ * factor;
    return out;
}

// ---------------------------------------------------------------------------
// UnitaryOperator

UnitaryOperator::UnitaryOperator(Matrix m) : data_(std::move(m)) {
    require_square(data_, "UnitaryOperator");
    const Index d = data_.rows();
    const double defect = (data_ * data_.adjoint() - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (!(defect <= tolerance::unitary)) {
        throw ValidationError("UnitaryOperator: matrix is not unitary (max |U U^dagger - I| = " +
                              std::to_string(defect) + ")");
    }
}

UnitaryOperator UnitaryOperator::identity(Index dim) {
    return unchecked(Matrix::Identity(dim, dim));
}

UnitaryOperator UnitaryOperator::unchecked(Matrix m) {
    UnitaryOperator out;
    out.data_ = std::move(m);
    return out;
}

UnitaryOperator UnitaryOperator::adjoint() const {
    return unchecked(data_.adjoint());
}

UnitaryOperator UnitaryOperator::operator*(const UnitaryOperator &rhs) const {
    require_same_dim(dim(), rhs.dim(), "UnitaryOperator product");
    return unchecked(data_ * rhs.data_);
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(Matrix m) : data_(std::move(m)) {
    require_square(data_, "DensityMatrix");
    const double defect = hermiticity_defect(data_);
    if (!(defect <= tolerance::hermitian)) {
        throw ValidationError("DensityMatrix: not Hermitian (defect " + std::to_string(defect) + ")");
    }
    const Complex tr = data_.trace();
    if (!(std::abs(tr - 1.0) <= tolerance::trace)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "DensityMatrix: trace " << tr << " differs from 1";
        throw ValidationError(msg.str());
    }
    const double lmin = min_eigenvalue();
    if (!(lmin >= tolerance::psd)) {
        throw ValidationError("DensityMatrix: negative eigenvalue " + std::to_string(lmin));
    }
}

DensityMatrix DensityMatrix::unchecked(Matrix m) {
    DensityMatrix out;
    out.data_ = std::move(m);
    return out;
}

DensityMatrix DensityMatrix::maximally_mixed(Index dim) {
    return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd &psi) {
    const double n = psi.squaredNorm();
    if (!(n > 0.0)) {
        throw ValidationError("DensityMatrix::pure: zero state vector");
    }
    Matrix rho = psi * psi.adjoint() / n;
    rho = 0.5 * (rho + rho.adjoint());
    return DensityMatrix(std::move(rho));
}

double DensityMatrix::purity() const {
    return (data_ * data_).trace().real();
}

double DensityMatrix::min_eigenvalue() const {
    if (data_.rows() == 2) {
        // Closed form for the Hermitian part of a 2x2 matrix.
        const double a = data_(0, 0).real();
        const double d = data_(1, 1).real();
        const Complex b = 0.5 * (data_(0, 1) + std::conj(data_(1, 0)));
        const double half_gap = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b));
        return 0.5 * (a + d) - half_gap;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (data_ + data_.adjoint()), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// BlochVector

double BlochVector::norm() const {
    return std::sqrt(sx * sx + sy * sy + sz * sz);
}

double BlochVector::transverse() const {
    return std::hypot(sx, sy);
}

double distance(const BlochVector &a, const BlochVector &b) {
    const double dx = a.sx - b.sx;
    const double dy = a.sy - b.sy;
    const double dz = a.sz - b.sz;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// ---------------------------------------------------------------------------
// Pauli matrices

namespace pauli {

Matrix identity() {
    return Matrix::Identity(2, 2);
}

Matrix x() {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

Matrix y() {
    Matrix m(2, 2);
    m << Complex(0.0, 0.0), Complex(0.0, -1.0), Complex(0.0, 1.0), Complex(0.0, 0.0);
    return m;
}

Matrix z() {
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

Matrix lowering() {
    Matrix m = Matrix::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

Matrix along(const std::array<double, 3> &n) {
    return n[0] * x() + n[1] * y() + n[2] * z();
}

}  // namespace pauli

// ---------------------------------------------------------------------------
// Operations

UnitaryOperator unitary_from_generator(const HermitianOperator &generator, double angle) {
    const Matrix &g = generator.matrix();
    if (g.rows() == 0) {
        throw ValidationError("unitary_from_generator: empty generator");
    }
    if (g.rows() == 2) {
        const auto pg = detail::PauliGenerator::from(g);
        return UnitaryOperator::unchecked(Matrix(detail::qubit_rotation(pg, angle)));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(g);
    if (solver.info() != Eigen::Success) {
        throw ValidationError("unitary_from_generator: eigendecomposition failed");
    }
    const Eigen::VectorXcd phases =
        (solver.eigenvalues().cast<Complex>() * Complex(0.0, -angle)).array().exp().matrix();
    const Matrix &v = solver.eigenvectors();
    return UnitaryOperator::unchecked(v * phases.asDiagonal() * v.adjoint());
}

Matrix dissipator(const Matrix &L, const DensityMatrix &rho) {
    require_square(L, "dissipator");
    require_same_dim(L.rows(), rho.dim(), "dissipator");
    return detail::dissipator(L, rho.matrix());
}

Matrix lindblad_rhs(const HermitianOperator &H, const HermitianOperator &L, const DensityMatrix &rho) {
    require_same_dim(H.dim(), rho.dim(), "lindblad_rhs (H)");
    require_same_dim(L.dim(), rho.dim(), "lindblad_rhs (L)");
    return detail::lindblad_rhs(H.matrix(), L.matrix(), rho.matrix());
}

Matrix superop_H(const Matrix &c, const DensityMatrix &rho) {
    require_square(c, "superop_H");
    require_same_dim(c.rows(), rho.dim(), "superop_H");
    return detail::superop_H(c, rho.matrix());
}

Matrix superop_A2(const Matrix &c, const DensityMatrix &rho) {
    require_square(c, "superop_A2");
    require_same_dim(c.rows(), rho.dim(), "superop_A2");
    return detail::superop_A2(c, rho.matrix());
}

BlochVector density_to_bloch(const DensityMatrix &rho) {
    if (rho.dim() != 2) {
        throw ValidationError("density_to_bloch: Bloch vectors are defined for d = 2 only");
    }
    const Matrix &m = rho.matrix();
    const Complex r10 = 0.5 * (m(1, 0) + std::conj(m(0, 1)));
    return {2.0 * r10.real(), 2.0 * r10.imag(), (m(0, 0) - m(1, 1)).real()};
}

DensityMatrix bloch_to_density(const BlochVector &b) {
    if (!(b.norm() <= 1.0 + tolerance::bloch)) {
        throw ValidationError("bloch_to_density: |b| = " + std::to_string(b.norm()) + " exceeds 1");
    }
    Matrix m(2, 2);
    m(0, 0) = 0.5 * (1.0 + b.sz);
    m(1, 1) = 0.5 * (1.0 - b.sz);
    m(1, 0) = Complex(0.5 * b.sx, 0.5 * b.sy);
    m(0, 1) = Complex(0.5 * b.sx, -0.5 * b.sy);
    return DensityMatrix::unchecked(std::move(m));
}

double commutator_norm(const HermitianOperator &a, const HermitianOperator &b) {
    require_same_dim(a.dim(), b.dim(), "commutator_norm");
    return detail::commutator(a.matrix(), b.matrix()).norm();
}

HermitianOperator rabi_hamiltonian(double omega, const std::array<double, 3> &axis) {
    const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (std::abs(n - 1.0) > 1e-12) {
        throw ValidationError("rabi_hamiltonian: rotation axis must be a unit vector");
    }
    return HermitianOperator(0.5 * omega * pauli::along(axis));
}

HermitianOperator dephasing_coupling(double gamma) {
    if (!(gamma >= 0.0)) {
        throw ValidationError("dephasing_coupling: gamma must be non-negative");
    }
    return HermitianOperator(std::sqrt(gamma) * pauli::z());
}

std::string describe(const Matrix &m) {
    std::ostringstream out;
    out.precision(6);
    out << m;
    return out.str();
}

}  // namespace nkfb
