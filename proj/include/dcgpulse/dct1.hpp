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

// DCT-I collocation basis on the equispaced nodes lambda_i = i/(M-1).
//
// Basis functions: p_n(x) = sqrt(d_n) cos(pi n x) / sqrt(M-1), with d_n = 1 at
// n in {0, M-1} and 2 otherwise. They satisfy int_0^1 p_l p_m = c_l delta_lm,
// c_n = 1/(M-1) except c_{M-1} = 1/(2(M-1)).

#include "dcgpulse/smallmat.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dcg {

inline constexpr int kMinCollocationPoints = 6;

struct DctBasis {
    int M = 0;
    RVector nodes;
    RVector d;
    RVector c;
    /// Row weight k_i of the orthonormal transform: 1/sqrt(2) at both
    /// endpoints, 1 elsewhere. Collocation values enter as b~_i = k_i f(lambda_i).
    RVector row_weight;
};

/// Orthonormal DCT-I matrix A~ with A~ a = b~ for b~_i = k_i f(lambda_i).
struct TransformMatrix {
    int M = 0;
    RMatrix entries;
};

inline DctBasis make_basis(int M) {
    if (M < kMinCollocationPoints) {
        throw std::invalid_argument("make_basis: M = " + std::to_string(M) + " is below the minimum of " +
                                    std::to_string(kMinCollocationPoints) + " collocation points");
    }
    DctBasis b;
    b.M = M;
    b.nodes.resize(M);
    b.d.resize(M);
    b.c.resize(M);
    b.row_weight.resize(M);
    const double m1 = M - 1;
    for (int n = 0; n < M; ++n) {
        const bool endpoint = n == 0 || n == M - 1;
        b.nodes(n) = n / m1;
        b.d(n) = endpoint ? 1.0 : 2.0;
        b.c(n) = n == M - 1 ? 1.0 / (2.0 * m1) : 1.0 / m1;
        b.row_weight(n) = endpoint ? 1.0 / std::sqrt(2.0) : 1.0;
    }
    return b;
}

inline TransformMatrix transform_matrix(const DctBasis& basis) {
    const int M = basis.M;
    const double m1 = M - 1;
    const double scale = std::sqrt(2.0 / m1);
    TransformMatrix t;
    t.M = M;
    t.entries.resize(M, M);
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
            // Reduce i*j modulo 2(M-1) so the cosine argument stays in [0, 2 pi).
            const int phase = (i * j) % (2 * (M - 1));
            t.entries(i, j) = basis.row_weight(i) * basis.row_weight(j) * scale * std::cos(kPi * phase / m1);
        }
    }
    return t;
}

inline double basis_function(int n, int M, double lambda) {
    const double dn = (n == 0 || n == M - 1) ? 1.0 : 2.0;
    return std::sqrt(dn) * std::cos(kPi * n * lambda) / std::sqrt(M - 1.0);
}

inline double basis_function_dot(int n, int M, double lambda) {
    const double dn = (n == 0 || n == M - 1) ? 1.0 : 2.0;
    return -kPi * n * std::sqrt(dn) * std::sin(kPi * n * lambda) / std::sqrt(M - 1.0);
}

inline double eval_f(const RVector& a, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::domain_error("eval_f: lambda = " + std::to_string(lambda) + " outside [0, 1]");
    }
    const int M = static_cast<int>(a.size());
    double sum = 0.0;
    for (int j = 0; j < M; ++j) {
        sum += a(j) * basis_function(j, M, lambda);
    }
    return sum;
}

inline double eval_f_dot(const RVector& a, double lambda) {
    const int M = static_cast<int>(a.size());
    double sum = 0.0;
    for (int j = 0; j < M; ++j) {
        sum += a(j) * basis_function_dot(j, M, lambda);
    }
    return sum;
}

/// c-weighted product a . C . b; equals int_0^1 f_a f_b dlambda.
inline double odot(const RVector& a, const RVector& b, const DctBasis& basis) {
    if (a.size() != b.size() || a.size() != basis.M) {
        throw std::invalid_argument("odot: length mismatch");
    }
    double sum = 0.0;
    for (int k = 0; k < basis.M; ++k) {
        sum += a(k) * basis.c(k) * b(k);
    }
    return sum;
}

}  // namespace dcg
