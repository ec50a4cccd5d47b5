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

// Pulse synthesis.
//
// The weighted collocation vectors b~_kappa (b~_i = k_i f_kappa(lambda_i)) are
// the first four columns of B = o0 exp(sum_{i<j} o_ij Sigma^(ij)). Since
// B^T B = o0^2 I and the DCT-I transform is orthonormal, the coefficient
// vectors a_kappa = A~^T b~_kappa are mutually orthogonal with equal norm o0.
// Once their last entries vanish this is exactly the c-weighted
// orthogonality/equal-norm condition that makes the first Magnus term of any
// static noise proportional to the identity. What remains are the boundary
// values, the last-coefficient constraints and the terminal control fields,
// solved for by Levenberg-Marquardt over (o0, o_ij).

#include "dcgpulse/curve.hpp"
#include "dcgpulse/dct1.hpp"
#include "dcgpulse/levenberg_marquardt.hpp"
#include "dcgpulse/pulses.hpp"
#include "dcgpulse/smallmat.hpp"

#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace dcg {

/// Target gate in SU(2) with its final boundary values
/// f1 = (f_0(1), f_1(1), f_2(1), f_3(1)), u = f1_0 I + i sum_k f1_k Lambda_k.
struct TargetGate {
    std::string name;
    Mat2 u;
    Quaternion f1{};
};

struct BParams {
    double o0 = 1.0;
    /// o_ij for i < j in row-major order: (0,1), (0,2), ..., (M-2, M-1).
    RVector omega;
};

struct SynthesisOptions {
    std::uint64_t seed = 0;
    int max_restarts = 32;
    /// Success threshold on |residuals|_2.
    double residual_tolerance = 1e-9;
    /// Retry once at M + 1 when every restart at M fails.
    bool allow_escalation = true;
    LmOptions lm{};
};

struct SynthesisResult {
    CoefficientSet cs;
    double residual_norm = 0.0;
    int iterations = 0;
    int restarts_used = 0;
    BParams b_params;
};

class SynthesisFailure : public std::runtime_error {
public:
    SynthesisFailure(const std::string& what, double best) : std::runtime_error(what), best_residual(best) {}
    double best_residual;
};

inline Mat2 rz_gate(double theta) {
    Mat2 u = Mat2::Zero();
    u(0, 0) = std::exp(-kI * (theta / 2));
    u(1, 1) = std::exp(kI * (theta / 2));
    return u;
}

inline Mat2 rx_gate(double theta) {
    return std::cos(theta / 2) * Mat2::Identity() - kI * std::sin(theta / 2) * pauli_x();
}

inline Mat2 ry_gate(double theta) {
    return std::cos(theta / 2) * Mat2::Identity() - kI * std::sin(theta / 2) * pauli_y();
}

/// Haar-random SU(2) element from a normalized Gaussian quaternion.
inline Mat2 random_su2(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Quaternion f{};
    double n2 = 0.0;
    for (auto& x : f) {
        x = gauss(rng);
        n2 += x * x;
    }
    const double n = std::sqrt(n2);
    for (auto& x : f) {
        x /= n;
    }
    return quaternion_matrix(f);
}

/// Removes the global phase: u / sqrt(det u), with the sign chosen so that
/// f_0(1) >= 0 (ties: first nonzero f_k(1) > 0).
inline Mat2 project_to_su2(const Mat2& u) {
    if (!(unitarity_defect(u) <= 1e-10)) {
        throw std::invalid_argument("project_to_su2: input is not unitary");
    }
    Mat2 v = u / std::sqrt(u.determinant());
    constexpr double kTie = 1e-14;
    const double f0 = 0.5 * v.trace().real();
    double sign = 1.0;
    if (f0 < -kTie) {
        sign = -1.0;
    } else if (std::abs(f0) <= kTie) {
        const auto& basis = su2_basis();
        for (int k = 0; k < 3; ++k) {
            const double fk = ((basis[k] * v).trace() / (2.0 * kI)).real();
            if (std::abs(fk) > kTie) {
                sign = fk > 0.0 ? 1.0 : -1.0;
                break;
            }
        }
    }
    return sign * v;
}

/// (Tr(u)/K, Tr(Lambda_k u)/(iK)).
inline Quaternion boundary_values(const Mat2& u) {
    if (!(std::abs(u.determinant() - 1.0) <= 1e-10)) {
        throw std::invalid_argument("boundary_values: det(u) != 1");
    }
    const auto& basis = su2_basis();
    std::array<cplx, 4> raw{};
    raw[0] = u.trace() / 2.0;
    for (int k = 0; k < 3; ++k) {
        raw[k + 1] = (basis[k] * u).trace() / (2.0 * kI);
    }
    Quaternion f{};
    for (int k = 0; k < 4; ++k) {
        if (std::abs(raw[k].imag()) > 1e-12) {
            throw std::invalid_argument("boundary_values: component " + std::to_string(k) +
                                        " has imaginary part " + std::to_string(raw[k].imag()));
        }
        f[k] = raw[k].real();
    }
    return f;
}

inline TargetGate make_target(const Mat2& u, std::string name = "matrix") {
    TargetGate t;
    t.name = std::move(name);
    t.u = project_to_su2(u);
    t.f1 = boundary_values(t.u);
    return t;
}

inline int skew_parameter_count(int M) {
    return M * (M - 1) / 2;
}

inline RMatrix build_B(const BParams& p, int M) {
    if (M < kMinCollocationPoints) {
        throw std::invalid_argument("build_B: M below minimum");
    }
    if (p.omega.size() != skew_parameter_count(M)) {
        throw std::invalid_argument("build_B: expected " + std::to_string(skew_parameter_count(M)) +
                                    " skew parameters");
    }
    RMatrix s = RMatrix::Zero(M, M);
    int idx = 0;
    for (int i = 0; i < M; ++i) {
        for (int j = i + 1; j < M; ++j) {
            s(i, j) = p.omega(idx);
            s(j, i) = -p.omega(idx);
            ++idx;
        }
    }
    return p.o0 * expm_skew(s);
}

inline CoefficientSet coefficients_from_B(const RMatrix& B, const TransformMatrix& transform) {
    CoefficientSet cs;
    cs.M = transform.M;
    for (int k = 0; k < 4; ++k) {
        cs.a[k] = transform.entries.transpose() * B.col(k);
    }
    return cs;
}

inline constexpr int kResidualCount = 15;

/// Stacked residuals: 4 first-row, 4 last-row, 4 last-coefficient and 3
/// terminal-control entries.
inline RVector constraint_residuals(const RMatrix& B, const TargetGate& target, const DctBasis& basis,
                                    const TransformMatrix& transform) {
    const int M = basis.M;
    RVector r(kResidualCount);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < 4; ++j) {
        r(j) = B(0, j) - (j == 0 ? 1.0 : 0.0) * inv_sqrt2;
        r(4 + j) = B(M - 1, j) - target.f1[j] * inv_sqrt2;
        r(8 + j) = transform.entries.col(M - 1).dot(B.col(j));
    }
    const CoefficientSet cs = coefficients_from_B(B, transform);
    const double q1 = eval_q(cs, 1.0);
    r.tail(3).setZero();
    if (q1 > kNormZeroTolerance) {
        // H does not depend on the branch sign, so no zero scan is needed here.
        const Mat2 h = hamiltonian_at(cs, 1.0, BranchedNorm{}, time_map(cs, 1.0));
        const auto g = control_fields(h);
        for (int k = 0; k < 3; ++k) {
            r(12 + k) = g[k];
        }
    }
    return r;
}

namespace detail {

inline BParams unpack(const RVector& x) {
    return {std::exp(x(0)), x.tail(x.size() - 1)};
}

inline SynthesisResult synthesize_at(const TargetGate& target, int M, const SynthesisOptions& opts,
                                     double& best_norm) {
    const DctBasis basis = make_basis(M);
    const TransformMatrix transform = transform_matrix(basis);
    const int n_skew = skew_parameter_count(M);
    const auto residuals = [&](const RVector& x) {
        return constraint_residuals(build_B(unpack(x), M), target, basis, transform);
    };

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> skew_dist(-kPi / 4, kPi / 4);
    std::uniform_real_distribution<double> norm_dist(0.5, 2.0);
    for (int attempt = 0; attempt < opts.max_restarts; ++attempt) {
        // x(0) = log(o0) keeps the column norm positive.
        RVector x0(n_skew + 1);
        x0(0) = std::log(norm_dist(rng));
        for (int i = 0; i < n_skew; ++i) {
            x0(i + 1) = skew_dist(rng);
        }
        const LmResult lm = levenberg_marquardt(residuals, x0, opts.lm);
        best_norm = std::min(best_norm, lm.norm);
        if (lm.norm <= opts.residual_tolerance) {
            SynthesisResult res;
            res.b_params = unpack(lm.x);
            res.cs = coefficients_from_B(build_B(res.b_params, M), transform);
            res.residual_norm = lm.norm;
            res.iterations = lm.iterations;
            res.restarts_used = attempt;
            return res;
        }
    }
    throw SynthesisFailure("no restart converged", best_norm);
}

}  // namespace detail

/// Solves for a coefficient set reaching `target` with cancelled first-order
/// noise response. Deterministic for a given seed.
inline SynthesisResult synthesize(const TargetGate& target, int M, const SynthesisOptions& opts = {}) {
    if (M < kMinCollocationPoints) {
        throw std::invalid_argument("synthesize: M = " + std::to_string(M) + " is below the minimum of " +
                                    std::to_string(kMinCollocationPoints));
    }
    double best = std::numeric_limits<double>::infinity();
    try {
        return detail::synthesize_at(target, M, opts, best);
    } catch (const SynthesisFailure&) {
        if (!opts.allow_escalation) {
            throw SynthesisFailure("synthesis did not converge after " + std::to_string(opts.max_restarts) +
                                       " restarts (best residual " + std::to_string(best) +
                                       "); try a larger M",
                                   best);
        }
    }
    std::cerr << "warning: synthesis at M = " << M << " failed (best residual " << best << "); retrying at M = "
              << M + 1 << "\n";
    try {
        return detail::synthesize_at(target, M + 1, opts, best);
    } catch (const SynthesisFailure&) {
        throw SynthesisFailure("synthesis did not converge at M = " + std::to_string(M) + " or " +
                                   std::to_string(M + 1) + " (best residual " + std::to_string(best) +
                                   "); try a larger M",
                               best);
    }
}

}  // namespace dcg
