// Copyright 2026 The dcgpulse Authors
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

#pragma once

// Dense complex matrices of dimension <= 8: Pauli algebra, exponentials of
// Hermitian and skew-symmetric generators, Kronecker products and a
// phase-insensitive distance between unitaries.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <iostream>
#include <stdexcept>
#include <string>

namespace dcg {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using Mat2 = Eigen::Matrix2cd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

inline Mat2 pauli_x() {
    Mat2 m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline Mat2 pauli_y() {
    Mat2 m;
    m << 0.0, -kI, kI, 0.0;
    return m;
}

inline Mat2 pauli_z() {
    Mat2 m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

/// The su(2) generators Lambda_1..3 = (X, Y, Z), normalized so that
/// Tr(Lambda_j Lambda_k) = K delta_jk with K = 2.
struct GeneratorBasis {
    static constexpr int K = 2;
    std::array<Mat2, 3> generators;
    Mat2 identity;

    const Mat2& operator[](int k) const { return generators.at(static_cast<std::size_t>(k)); }
};

inline const GeneratorBasis& su2_basis() {
    static const GeneratorBasis basis{{pauli_x(), pauli_y(), pauli_z()}, Mat2::Identity()};
    return basis;
}

inline bool all_finite(const CMatrix& m) {
    return m.array().isFinite().all();
}

inline double hermiticity_defect(const CMatrix& h) {
    return (h - h.adjoint()).norm();
}

inline double unitarity_defect(const CMatrix& u) {
    return (u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())).norm();
}

inline CMatrix mat_mul(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.cols() != b.rows()) {
        throw std::invalid_argument("mat_mul: dimension mismatch (" + std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()) + " times " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()) + ")");
    }
    return a * b;
}

/// Exponential of a real skew-symmetric matrix, computed from the
/// eigendecomposition of the Hermitian matrix i*s. The result is orthogonal.
inline RMatrix expm_skew(const RMatrix& s) {
    if (s.rows() != s.cols()) {
        throw std::invalid_argument("expm_skew: matrix is not square");
    }
    const double asym = (s + s.transpose()).norm();
    if (!(asym <= 1e-14 * std::max(1.0, s.norm()))) {
        throw std::invalid_argument("expm_skew: input is not skew-symmetric (|s + s^T| = " +
                                    std::to_string(asym) + ")");
    }
    const auto n = s.rows();
    if (n == 0) {
        return s;
    }
    // s = -i h with h = i s Hermitian, so exp(s) = V exp(-i w) V^dagger.
    const CMatrix h = kI * s.cast<cplx>();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
    const Eigen::VectorXd w = eig.eigenvalues();
    const CMatrix& v = eig.eigenvectors();
    Eigen::VectorXcd phases(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        phases(k) = std::exp(-kI * w(k));
    }
    const CMatrix e = v * phases.asDiagonal() * v.adjoint();
    return e.real();
}

/// exp(-i h dt) for Hermitian h. Two-level generators use the closed form
/// cos/sin expression; larger ones go through an eigendecomposition.
inline CMatrix expm_antihermitian_step(const CMatrix& h, double dt) {
    if (h.rows() != h.cols()) {
        throw std::invalid_argument("expm_antihermitian_step: matrix is not square");
    }
    if (!(hermiticity_defect(h) <= 1e-12 * std::max(1.0, h.norm()))) {
        throw std::invalid_argument("expm_antihermitian_step: generator is not Hermitian");
    }
    const auto n = h.rows();
    if (n == 2) {
        const Mat2 hh = h;
        const cplx tr = 0.5 * (hh(0, 0) + hh(1, 1));
        const double nx = 0.5 * (hh(0, 1) + hh(1, 0)).real();
        const double ny = 0.5 * (hh(1, 0) - hh(0, 1)).imag();
        const double nz = 0.5 * (hh(0, 0) - hh(1, 1)).real();
        const double r = std::sqrt(nx * nx + ny * ny + nz * nz);
        const double phi = r * dt;
        // sin(phi)/r written so that r -> 0 stays finite.
        const double sinc = r > 0.0 ? std::sin(phi) / r : dt;
        const double c = std::cos(phi);
        Mat2 u;
        u << cplx(c, -sinc * nz), cplx(-sinc * ny, -sinc * nx), cplx(sinc * ny, -sinc * nx),
            cplx(c, sinc * nz);
        return std::exp(-kI * tr.real() * dt) * u;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
    const Eigen::VectorXd w = eig.eigenvalues();
    const CMatrix& v = eig.eigenvectors();
    Eigen::VectorXcd phases(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        phases(k) = std::exp(-kI * (w(k) * dt));
    }
    return v * phases.asDiagonal() * v.adjoint();
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Phase-insensitive distance d = sqrt(1 - |Tr(u^dagger v)| / K').
///
/// For unitary arguments 1 - |Tr(u^dagger v)|/K' equals
/// |u - e^{i a} v|_F^2 / (2 K') with e^{i a} the phase of Tr(v^dagger u), and
/// that form is evaluated here: it has no cancellation, so distances far below
/// 1e-8 are resolved. Non-unitary inputs only produce a warning.
inline double distance_up_to_phase(const CMatrix& u, const CMatrix& v) {
    if (u.rows() != v.rows() || u.cols() != v.cols() || u.rows() != u.cols()) {
        throw std::invalid_argument("distance_up_to_phase: dimension mismatch");
    }
    constexpr double kUnitarityWarn = 1e-8;
    if (unitarity_defect(u) > kUnitarityWarn || unitarity_defect(v) > kUnitarityWarn) {
        std::cerr << "warning: distance_up_to_phase called with a non-unitary argument\n";
    }
    const auto k = static_cast<double>(u.rows());
    const cplx overlap = (v.adjoint() * u).trace();
    const double mag = std::abs(overlap);
    const cplx phase = mag > 0.0 ? overlap / mag : cplx(1.0, 0.0);
    const double radicand = (u - phase * v).squaredNorm() / (2.0 * k);
    return std::sqrt(std::max(0.0, radicand));
}

}  // namespace dcg
