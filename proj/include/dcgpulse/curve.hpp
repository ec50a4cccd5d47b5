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

// The auxiliary curve V_C(lambda) = f_0 I + i sum_k f_k Lambda_k, its signed
// norm s(lambda) with s^2 = q = sum f_kappa^2, the control unitary
// U_C = V_C / s and the time reparametrization dt/dlambda = T q / int q.

#include "dcgpulse/dct1.hpp"
#include "dcgpulse/smallmat.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcg {

inline constexpr double kNormZeroTolerance = 1e-20;
inline constexpr int kBranchScanGrid = 4096;

using Quaternion = std::array<double, 4>;

/// Coefficient vectors a_0..a_3 of f_0 (identity part) and f_1..f_3.
struct CoefficientSet {
    int M = 0;
    std::array<RVector, 4> a;

    static CoefficientSet zeros(int M) {
        CoefficientSet cs;
        cs.M = M;
        for (auto& v : cs.a) {
            v = RVector::Zero(M);
        }
        return cs;
    }

    /// f_0 == 1, f_k == 0: the set describing U_C(lambda) == I.
    static CoefficientSet identity(int M) {
        CoefficientSet cs = zeros(M);
        cs.a[0](0) = std::sqrt(M - 1.0);
        return cs;
    }
};

inline Quaternion eval_components(const CoefficientSet& cs, double lambda) {
    Quaternion f{};
    for (int k = 0; k < 4; ++k) {
        f[k] = eval_f(cs.a[k], lambda);
    }
    return f;
}

inline Quaternion eval_components_dot(const CoefficientSet& cs, double lambda) {
    Quaternion f{};
    for (int k = 0; k < 4; ++k) {
        f[k] = eval_f_dot(cs.a[k], lambda);
    }
    return f;
}

inline double eval_q(const CoefficientSet& cs, double lambda) {
    const Quaternion f = eval_components(cs, lambda);
    return f[0] * f[0] + f[1] * f[1] + f[2] * f[2] + f[3] * f[3];
}

/// V = f_0 I + i sum_k f_k Lambda_k.
inline Mat2 quaternion_matrix(const Quaternion& f) {
    const auto& basis = su2_basis();
    Mat2 v = f[0] * basis.identity;
    for (int k = 0; k < 3; ++k) {
        v += kI * f[k + 1] * basis[k];
    }
    return v;
}

inline Mat2 eval_Vc(const CoefficientSet& cs, double lambda) {
    return quaternion_matrix(eval_components(cs, lambda));
}

/// Largest deviation from each coefficient-set invariant.
struct CoefficientReport {
    double last_coefficient = 0.0;  // max_i |(a_i)_{M-1}|
    double initial_value = 0.0;     // max_kappa |f_kappa(0) - delta_kappa0|
    double orthogonality = 0.0;     // max_ij |a_i . a_j - delta_ij a_0 . a_0| in the c-weighted product

    double worst() const { return std::max({last_coefficient, initial_value, orthogonality}); }
};

inline CoefficientReport inspect(const CoefficientSet& cs, const DctBasis& basis) {
    CoefficientReport r;
    for (int i = 0; i < 4; ++i) {
        r.last_coefficient = std::max(r.last_coefficient, std::abs(cs.a[i](cs.M - 1)));
    }
    const Quaternion f0 = eval_components(cs, 0.0);
    for (int k = 0; k < 4; ++k) {
        r.initial_value = std::max(r.initial_value, std::abs(f0[k] - (k == 0 ? 1.0 : 0.0)));
    }
    const double n00 = odot(cs.a[0], cs.a[0], basis);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const double expected = i == j ? n00 : 0.0;
            r.orthogonality = std::max(r.orthogonality, std::abs(odot(cs.a[i], cs.a[j], basis) - expected));
        }
    }
    return r;
}

/// Analytic branch of sqrt(q): positive at lambda = 0, flipping sign at each
/// common zero of all f_kappa so that s stays smooth through it.
struct BranchedNorm {
    std::vector<double> zeros;

    double sign(double lambda) const {
        const auto crossed = std::count_if(zeros.begin(), zeros.end(), [&](double z) { return z < lambda; });
        return crossed % 2 == 0 ? 1.0 : -1.0;
    }

    double value(const CoefficientSet& cs, double lambda) const {
        return sign(lambda) * std::sqrt(eval_q(cs, lambda));
    }

    /// Distance from lambda to the nearest recorded zero (infinity if none).
    double distance_to_zero(double lambda) const {
        double best = std::numeric_limits<double>::infinity();
        for (double z : zeros) {
            best = std::min(best, std::abs(lambda - z));
        }
        return best;
    }
};

namespace detail {

inline double half_q_dot(const CoefficientSet& cs, double lambda) {
    const Quaternion f = eval_components(cs, lambda);
    const Quaternion fd = eval_components_dot(cs, lambda);
    return f[0] * fd[0] + f[1] * fd[1] + f[2] * fd[2] + f[3] * fd[3];
}

}  // namespace detail

/// Locates common zeros of the f_kappa. Every local minimum of q on a uniform
/// grid is refined by bisection on q'/2 = f . f'; minima with q below
/// kNormZeroTolerance are zeros, and each must be simple (|f'| > 0).
inline BranchedNorm branch_norm(const CoefficientSet& cs, int grid = kBranchScanGrid) {
    if (grid < 4) {
        throw std::invalid_argument("branch_norm: grid resolution too small");
    }
    BranchedNorm bn;
    const double h = 1.0 / grid;
    std::vector<double> q(static_cast<std::size_t>(grid) + 1);
    for (int i = 0; i <= grid; ++i) {
        q[i] = eval_q(cs, i * h);
    }
    if (q.front() <= kNormZeroTolerance || q.back() <= kNormZeroTolerance) {
        throw std::domain_error("branch_norm: norm vanishes at an endpoint; the pulse is ill-posed");
    }
    for (int i = 1; i < grid; ++i) {
        if (!(q[i] <= q[i - 1] && q[i] <= q[i + 1])) {
            continue;
        }
        double lo = (i - 1) * h;
        double hi = (i + 1) * h;
        if (!(detail::half_q_dot(cs, lo) <= 0.0 && detail::half_q_dot(cs, hi) >= 0.0)) {
            continue;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (detail::half_q_dot(cs, mid) <= 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        const double z = 0.5 * (lo + hi);
        if (eval_q(cs, z) > kNormZeroTolerance) {
            continue;
        }
        if (z <= h || z >= 1.0 - h) {
            throw std::domain_error("branch_norm: norm zero at an endpoint; the pulse is ill-posed");
        }
        const Quaternion fd = eval_components_dot(cs, z);
        const double slope2 = fd[0] * fd[0] + fd[1] * fd[1] + fd[2] * fd[2] + fd[3] * fd[3];
        if (slope2 <= 1e-12) {
            throw std::domain_error("branch_norm: degenerate (higher-order) norm zero at lambda = " +
                                    std::to_string(z));
        }
        if (bn.zeros.empty() || z - bn.zeros.back() > 2 * h) {
            bn.zeros.push_back(z);
        }
    }
    return bn;
}

/// U_C(lambda) = V_C(lambda) / s(lambda).
inline Mat2 eval_Uc(const CoefficientSet& cs, double lambda, const BranchedNorm& bn) {
    const Quaternion f = eval_components(cs, lambda);
    const double q = f[0] * f[0] + f[1] * f[1] + f[2] * f[2] + f[3] * f[3];
    if (q <= kNormZeroTolerance) {
        throw std::domain_error("eval_Uc: lambda = " + std::to_string(lambda) +
                                " is a norm zero; use eval_Uc_near_zero");
    }
    return quaternion_matrix(f) / (bn.sign(lambda) * std::sqrt(q));
}

/// Limit of V_C / s at a common zero: (f'_0 I + i sum f'_k Lambda_k) / s'.
inline Mat2 eval_Uc_near_zero(const CoefficientSet& cs, double lambda, const BranchedNorm& bn) {
    const Quaternion fd = eval_components_dot(cs, lambda);
    const double speed = std::sqrt(fd[0] * fd[0] + fd[1] * fd[1] + fd[2] * fd[2] + fd[3] * fd[3]);
    if (speed <= 0.0) {
        throw std::domain_error("eval_Uc_near_zero: vanishing derivative at the zero");
    }
    // Past the zero s has the sign recorded just after it.
    const double s_dot = bn.sign(std::nextafter(lambda, 2.0)) * speed;
    return quaternion_matrix(fd) / s_dot;
}

/// lambda -> t with dt/dlambda = T q / Q and Q = int_0^1 q = sum_kappa a_kappa (.) a_kappa.
/// The cumulative integral uses the exact antiderivative of the trigonometric
/// polynomial q.
class TimeMap {
public:
    TimeMap(const CoefficientSet& cs, double T) : T_(T), M_(cs.M), gram_(RMatrix::Zero(cs.M, cs.M)) {
        if (!(T > 0.0)) {
            throw std::invalid_argument("time_map: T must be positive");
        }
        const DctBasis basis = make_basis(cs.M);
        total_ = 0.0;
        for (int k = 0; k < 4; ++k) {
            total_ += odot(cs.a[k], cs.a[k], basis);
            gram_ += cs.a[k] * cs.a[k].transpose();
        }
        if (!(total_ > 0.0)) {
            throw std::domain_error("time_map: coefficient set has zero norm");
        }
        for (int j = 0; j < M_; ++j) {
            sqrt_d_.push_back((j == 0 || j == M_ - 1) ? 1.0 : std::sqrt(2.0));
        }
    }

    double T() const { return T_; }

    /// int_0^1 q dlambda.
    double q_integral() const { return total_; }

    double dt_dlambda(double q) const { return T_ * q / total_; }

    double t_at(double lambda) const {
        if (lambda >= 1.0) {
            return T_;
        }
        if (lambda <= 0.0) {
            return 0.0;
        }
        double acc = 0.0;
        for (int j = 0; j < M_; ++j) {
            for (int l = 0; l < M_; ++l) {
                const double g = gram_(j, l);
                if (g == 0.0) {
                    continue;
                }
                acc += g * sqrt_d_[j] * sqrt_d_[l] * (cos_integral(j - l, lambda) + cos_integral(j + l, lambda));
            }
        }
        acc /= 2.0 * (M_ - 1);
        return T_ * acc / total_;
    }

private:
    // int_0^lambda cos(pi m x) dx
    static double cos_integral(int m, double lambda) {
        if (m == 0) {
            return lambda;
        }
        return std::sin(kPi * m * lambda) / (kPi * m);
    }

    double T_;
    int M_;
    RMatrix gram_;
    double total_ = 0.0;
    std::vector<double> sqrt_d_;
};

inline TimeMap time_map(const CoefficientSet& cs, double T) {
    return TimeMap(cs, T);
}

}  // namespace dcg
