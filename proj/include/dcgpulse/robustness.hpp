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

// Noise-robustness checks: propagation of a sampled schedule under static
// noise, phase-insensitive gate errors, noise-strength sweeps with log-log
// slope fits, the geodesic (uncorrected) baseline pulse and the first Magnus
// term of the toggling-frame noise.

#include "dcgpulse/curve.hpp"
#include "dcgpulse/pulses.hpp"
#include "dcgpulse/smallmat.hpp"
#include "dcgpulse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace dcg {

enum class NoiseKind { single_qubit_static, mediated_zz };

struct NoiseModel {
    NoiseKind kind = NoiseKind::single_qubit_static;
    /// 2x2 traceless with unit spectral norm, or the 8x8 ZZI + IZZ coupling
    /// on (q1, bath, q2).
    CMatrix generator;
    std::optional<std::uint64_t> seed;
};

class FitRefused : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// N = n . sigma with n uniform on the unit sphere.
inline NoiseModel random_static_noise(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::array<double, 3> n{};
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (auto& x : n) {
            x = gauss(rng);
            n2 += x * x;
        }
    } while (n2 < 1e-24);
    const double norm = std::sqrt(n2);
    const auto& basis = su2_basis();
    Mat2 g = Mat2::Zero();
    for (int k = 0; k < 3; ++k) {
        g += (n[k] / norm) * basis[k];
    }
    return {NoiseKind::single_qubit_static, g, seed};
}

/// Single-qubit static noise from an arbitrary Hermitian matrix: trace
/// removed, scaled to unit spectral norm.
inline NoiseModel static_noise(const Mat2& h) {
    if (!(hermiticity_defect(h) <= 1e-12)) {
        throw std::invalid_argument("static_noise: generator is not Hermitian");
    }
    Mat2 g = h - 0.5 * h.trace() * Mat2::Identity();
    // Spectral norm of a traceless 2x2 Hermitian matrix is sqrt(-det).
    const double norm = std::sqrt(std::max(0.0, -g.determinant().real()));
    if (!(norm > 0.0)) {
        throw std::invalid_argument("static_noise: generator has no traceless part");
    }
    return {NoiseKind::single_qubit_static, g / norm, std::nullopt};
}

inline CMatrix zz_coupling() {
    const CMatrix z = pauli_z();
    const CMatrix id = Mat2::Identity();
    return kron(kron(z, z), id) + kron(kron(id, z), z);
}

inline NoiseModel mediated_zz() {
    return {NoiseKind::mediated_zz, zz_coupling(), std::nullopt};
}

namespace detail {

/// Cubic Lagrange weights (and their derivatives) on the nodes 0, 1, 2, 3.
inline std::array<double, 4> lagrange4(double x) {
    return {-(x - 1) * (x - 2) * (x - 3) / 6, x * (x - 2) * (x - 3) / 2, -x * (x - 1) * (x - 3) / 2,
            x * (x - 1) * (x - 2) / 6};
}

inline std::array<double, 4> lagrange4_dot(double x) {
    return {-((x - 2) * (x - 3) + (x - 1) * (x - 3) + (x - 1) * (x - 2)) / 6,
            ((x - 2) * (x - 3) + x * (x - 3) + x * (x - 2)) / 2,
            -((x - 1) * (x - 3) + x * (x - 3) + x * (x - 1)) / 2,
            ((x - 1) * (x - 2) + x * (x - 2) + x * (x - 1)) / 6};
}

}  // namespace detail

/// Control field and dt/ds of a schedule as smooth functions of the sample
/// index s, by cubic interpolation over the four nearest samples.
class ScheduleInterpolant {
public:
    explicit ScheduleInterpolant(const PulseSchedule& ps) : ps_(ps) {
        if (ps.samples.size() < 4) {
            throw std::invalid_argument("schedule needs at least four samples for propagation");
        }
    }

    std::size_t intervals() const { return ps_.samples.size() - 1; }

    Mat2 field(double s) const {
        const auto [base, x] = locate(s);
        const auto w = detail::lagrange4(x);
        const auto& basis = su2_basis();
        double gx = 0.0, gy = 0.0, gz = 0.0;
        for (int j = 0; j < 4; ++j) {
            const auto& p = ps_.samples[base + j];
            gx += w[j] * p.gx;
            gy += w[j] * p.gy;
            gz += w[j] * p.gz;
        }
        return gx * basis[0] + gy * basis[1] + gz * basis[2];
    }

    double dt_ds(double s) const {
        const auto [base, x] = locate(s);
        const auto w = detail::lagrange4_dot(x);
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) {
            acc += w[j] * ps_.samples[base + j].t;
        }
        return acc;
    }

private:
    std::pair<std::size_t, double> locate(double s) const {
        const auto n = static_cast<long>(ps_.samples.size());
        const long base = std::clamp(static_cast<long>(std::floor(s)) - 1, 0L, n - 4);
        return {static_cast<std::size_t>(base), s - static_cast<double>(base)};
    }

    const PulseSchedule& ps_;
};

/// Fourth-order commutator-free Magnus step across one sample interval:
/// exp(-i (a1 K1 + a2 K2)) exp(-i (a2 K1 + a1 K2)), with K_j the generator
/// (already multiplied by dt/ds) at the two Gauss points of the interval.
struct GaussPair {
    Mat2 field1, field2;
    double rate1 = 0.0, rate2 = 0.0;
};

inline constexpr double kGaussOffset = 0.28867513459481288225;  // sqrt(3)/6
inline constexpr double kCfWeightLow = 0.25 - kGaussOffset;
inline constexpr double kCfWeightHigh = 0.25 + kGaussOffset;

inline std::vector<GaussPair> gauss_pairs(const PulseSchedule& ps) {
    const ScheduleInterpolant interp(ps);
    std::vector<GaussPair> out(interp.intervals());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double s1 = static_cast<double>(i) + 0.5 - kGaussOffset;
        const double s2 = static_cast<double>(i) + 0.5 + kGaussOffset;
        out[i] = {interp.field(s1), interp.field(s2), interp.dt_ds(s1), interp.dt_ds(s2)};
    }
    return out;
}

template <class Generator>
CMatrix commutator_free_step(const Generator& k1, const Generator& k2) {
    const CMatrix first = kCfWeightHigh * k1 + kCfWeightLow * k2;
    const CMatrix second = kCfWeightLow * k1 + kCfWeightHigh * k2;
    return expm_antihermitian_step(second, 1.0) * expm_antihermitian_step(first, 1.0);
}

/// Propagator of H_C(t) + delta N over the whole schedule.
inline Mat2 propagate_single(const PulseSchedule& ps, const NoiseModel& noise, double delta) {
    if (noise.kind != NoiseKind::single_qubit_static || noise.generator.rows() != 2) {
        throw std::invalid_argument("propagate_single: needs a single-qubit noise model");
    }
    const Mat2 n = noise.generator;
    Mat2 u = Mat2::Identity();
    for (const auto& g : gauss_pairs(ps)) {
        const Mat2 k1 = (g.field1 + delta * n) * g.rate1;
        const Mat2 k2 = (g.field2 + delta * n) * g.rate2;
        u = Mat2(commutator_free_step(k1, k2)) * u;
    }
    return u;
}

/// Noiseless control propagator U_C at every sample time.
inline std::vector<Mat2> control_path(const PulseSchedule& ps) {
    std::vector<Mat2> path;
    path.reserve(ps.samples.size());
    Mat2 u = Mat2::Identity();
    path.push_back(u);
    for (const auto& g : gauss_pairs(ps)) {
        const Mat2 k1 = g.field1 * g.rate1;
        const Mat2 k2 = g.field2 * g.rate2;
        u = Mat2(commutator_free_step(k1, k2)) * u;
        path.push_back(u);
    }
    return path;
}

/// Both targets (q1, q2) driven by the same schedule, coupled to the bath
/// qubit in the middle by delta (ZZI + IZZ).
inline CMatrix propagate_mediated(const PulseSchedule& ps, double delta) {
    const CMatrix id2 = Mat2::Identity();
    const CMatrix coupling = zz_coupling();
    const auto lift = [&](const Mat2& hc) -> CMatrix {
        const CMatrix h = hc;
        return kron(kron(h, id2), id2) + kron(kron(id2, id2), h) + delta * coupling;
    };
    CMatrix u = CMatrix::Identity(8, 8);
    for (const auto& g : gauss_pairs(ps)) {
        const CMatrix k1 = lift(g.field1) * g.rate1;
        const CMatrix k2 = lift(g.field2) * g.rate2;
        u = commutator_free_step(k1, k2) * u;
    }
    return u;
}

inline double gate_error_single(const Mat2& actual, const Mat2& target) {
    return distance_up_to_phase(actual, target);
}

/// (q1, q2) block of an 8x8 operator on (q1, bath, q2) for bath state |b>.
inline CMatrix bath_conditional_block(const CMatrix& u, int bath) {
    if (u.rows() != 8 || u.cols() != 8 || (bath != 0 && bath != 1)) {
        throw std::invalid_argument("bath_conditional_block: expected an 8x8 operator and bath in {0, 1}");
    }
    CMatrix block(4, 4);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            const int row = 4 * (r / 2) + 2 * bath + (r % 2);
            const int col = 4 * (c / 2) + 2 * bath + (c % 2);
            block(r, c) = u(row, col);
        }
    }
    return block;
}

/// Worst case over bath basis states of the distance between the
/// bath-conditional two-qubit block and the target.
inline double gate_error_mediated(const CMatrix& actual, const CMatrix& target_2q) {
    if (actual.rows() != 8 || target_2q.rows() != 4) {
        throw std::invalid_argument("gate_error_mediated: expected 8x8 actual and 4x4 target");
    }
    double worst = 0.0;
    for (int b = 0; b < 2; ++b) {
        const CMatrix block = bath_conditional_block(actual, b);
        if (unitarity_defect(block) > 1e-8) {
            throw std::domain_error("gate_error_mediated: bath-conditional block is not unitary; "
                                    "the coupling is not bath-diagonal");
        }
        worst = std::max(worst, distance_up_to_phase(block, target_2q));
    }
    return worst;
}

struct SweepResult {
    std::vector<double> deltas;
    std::vector<double> errors;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    /// Points at or below the numerical floor are kept but not fitted.
    std::vector<bool> fitted;
};

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LogLogFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        const double dy = std::log(y[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double ss_res = syy - fit.slope * sxy;
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return fit;
}

inline std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < n; ++i) {
        out[i] = n == 1 ? lo : std::pow(10.0, a + (b - a) * i / (n - 1));
    }
    return out;
}

namespace detail {

/// Runs fn(i) for i in [0, n) on up to hardware_concurrency threads. Results
/// are written by index, so the outcome does not depend on scheduling.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) {
                    fn(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace detail

inline constexpr double kErrorFloor = 1e-9;

/// Gate error for each delta and a least-squares fit of log(error) against
/// log(delta). Without an explicit reference the errors are measured against
/// the noiseless propagation of the same schedule, so the discretization
/// error of the integrator does not enter the comparison.
inline SweepResult sweep(const PulseSchedule& ps, const NoiseModel& noise, const std::vector<double>& deltas,
                         std::optional<CMatrix> reference = std::nullopt) {
    if (deltas.size() < 5) {
        throw std::invalid_argument("sweep: need at least 5 noise strengths");
    }
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!(deltas[i] > 0.0) || (i > 0 && !(deltas[i] > deltas[i - 1]))) {
            throw std::invalid_argument("sweep: noise strengths must be positive and strictly increasing");
        }
    }
    const bool mediated = noise.kind == NoiseKind::mediated_zz;
    if (!reference) {
        const Mat2 u0 = control_path(ps).back();
        reference = mediated ? kron(u0, u0) : CMatrix(u0);
    }
    SweepResult res;
    res.deltas = deltas;
    res.errors.assign(deltas.size(), 0.0);
    detail::parallel_for(deltas.size(), [&](std::size_t i) {
        if (mediated) {
            res.errors[i] = gate_error_mediated(propagate_mediated(ps, deltas[i]), *reference);
        } else {
            res.errors[i] = gate_error_single(propagate_single(ps, noise, deltas[i]), Mat2(*reference));
        }
    });

    std::vector<double> xs, ys;
    res.fitted.assign(deltas.size(), false);
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (res.errors[i] > kErrorFloor) {
            res.fitted[i] = true;
            xs.push_back(deltas[i]);
            ys.push_back(res.errors[i]);
        }
    }
    if (xs.size() < 4) {
        throw FitRefused("sweep: only " + std::to_string(xs.size()) +
                         " errors above the numerical floor; fit refused");
    }
    const LogLogFit fit = fit_log_log(xs, ys);
    res.slope = fit.slope;
    res.intercept = fit.intercept;
    res.r2 = fit.r2;
    return res;
}

/// Constant-field pulse H = theta/(2T) n.sigma with exp(-i H T) = target
/// (R_n(theta) = exp(-i theta n.sigma / 2)). Reaches the gate exactly but
/// does nothing against noise.
inline PulseSchedule baseline_pulse(const TargetGate& target, double T, int n_samples) {
    if (n_samples < 2) {
        throw std::invalid_argument("baseline_pulse: need at least two samples");
    }
    if (!(T > 0.0)) {
        throw std::invalid_argument("baseline_pulse: T must be positive");
    }
    const Quaternion& f = target.f1;
    const double sin_half = std::sqrt(f[1] * f[1] + f[2] * f[2] + f[3] * f[3]);
    const double theta = 2.0 * std::atan2(sin_half, f[0]);
    std::array<double, 3> g{};
    if (sin_half > 0.0) {
        for (int k = 0; k < 3; ++k) {
            g[k] = -f[k + 1] / sin_half * theta / (2.0 * T);
        }
    }
    PulseSchedule ps;
    ps.T = T;
    ps.meta.gate = target.name + " (baseline)";
    for (int i = 0; i < n_samples; ++i) {
        const double t = i == n_samples - 1 ? T : T * i / (n_samples - 1);
        ps.samples.push_back({t, g[0], g[1], g[2]});
    }
    return ps;
}

inline constexpr int kMagnusPanels = 4096;

/// A_1 = T / int q * int_0^1 V_C^dagger N V_C dlambda, composite Simpson in lambda.
inline Mat2 first_order_magnus(const CoefficientSet& cs, double T, const NoiseModel& noise) {
    if (noise.generator.rows() != 2) {
        throw std::invalid_argument("first_order_magnus: needs a single-qubit noise model");
    }
    const Mat2 n = noise.generator;
    const TimeMap tm = time_map(cs, T);
    const double h = 1.0 / kMagnusPanels;
    Mat2 acc = Mat2::Zero();
    for (int i = 0; i <= kMagnusPanels; ++i) {
        const double w = (i == 0 || i == kMagnusPanels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const Mat2 v = eval_Vc(cs, i * h);
        acc += w * (v.adjoint() * n * v);
    }
    acc *= h / 3.0;
    return T / tm.q_integral() * acc;
}

/// A_1 = int_0^T U_C^dagger N U_C dt from the sampled schedule: U_C rebuilt
/// by propagation, the integral taken over the sample index (Simpson, with a
/// closing 3/8 panel when the interval count is odd).
inline Mat2 first_order_magnus(const PulseSchedule& ps, const NoiseModel& noise) {
    if (noise.generator.rows() != 2) {
        throw std::invalid_argument("first_order_magnus: needs a single-qubit noise model");
    }
    const Mat2 n = noise.generator;
    const auto path = control_path(ps);
    const ScheduleInterpolant interp(ps);
    std::vector<Mat2> integrand(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) {
        integrand[i] = path[i].adjoint() * n * path[i] * interp.dt_ds(static_cast<double>(i));
    }
    const std::size_t intervals = path.size() - 1;
    const std::size_t simpson_end = intervals % 2 == 0 ? intervals : intervals - 3;
    Mat2 acc = Mat2::Zero();
    for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
        acc += (integrand[i] + 4.0 * integrand[i + 1] + integrand[i + 2]) / 3.0;
    }
    if (simpson_end != intervals) {
        const std::size_t i = simpson_end;
        acc += 3.0 / 8.0 * (integrand[i] + 3.0 * integrand[i + 1] + 3.0 * integrand[i + 2] + integrand[i + 3]);
    }
    return acc;
}

}  // namespace dcg
