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

// Acceptance run: one PASS/FAIL line per criterion. Exit status 0 iff all pass.

#include "dcgpulse/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace dcg;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] %2d %-28s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) {
        ++failures;
    }
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

struct Solved {
    TargetGate target;
    SynthesisResult res;
    PulseSchedule ps;
};

}  // namespace

int main() {
    // 1
    {
        const auto t0 = Clock::now();
        double worst = 0.0;
        for (int m : {6, 8, 12}) {
            const RMatrix a = transform_matrix(make_basis(m)).entries;
            worst = std::max(worst, (a.transpose() * a - RMatrix::Identity(m, m)).norm());
        }
        const double ms = 1e3 * seconds_since(t0);
        report(1, "dct_orthonormality", worst <= 1e-12 && ms < 1.0,
               fmt("max |A^T A - I|_F = %.2e (<= 1e-12), %.3f ms (< 1 ms)", worst, ms));
    }

    // 2
    {
        std::mt19937_64 rng(2);
        std::normal_distribution<double> g(0.0, 1.0);
        double worst_dot = 0.0, worst_quad = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            const int m = 6 + trial % 7;
            const DctBasis basis = make_basis(m);
            RVector u(m), v(m);
            for (int i = 0; i < m; ++i) {
                u(i) = g(rng);
                v(i) = g(rng);
            }
            u(m - 1) = v(m - 1) = 0.0;
            const double scale = 1.0 + u.norm() * v.norm();
            worst_dot = std::max(worst_dot, std::abs((m - 1) * odot(u, v, basis) - u.dot(v)) / scale);
            const double quad = oracle::integrate([&](double x) { return eval_f(u, x) * eval_f(v, x); }, 0.0, 1.0);
            worst_quad = std::max(worst_quad, std::abs(odot(u, v, basis) - quad));
        }
        report(2, "weighted_product_identity", worst_dot <= 1e-14 && worst_quad <= 1e-10,
               fmt("max rel |(M-1) a.C.b - a.b| = %.2e (rounding, <= 1e-14), max |odot - quad| = %.2e (<= 1e-10)",
                   worst_dot, worst_quad));
    }

    // 3
    std::vector<Solved> solved;
    {
        const auto t0 = Clock::now();
        bool ok = true;
        double worst = 0.0;
        int max_restarts = 0;
        for (const auto& target : fixtures::standard_targets()) {
            SynthesisOptions opts;
            opts.seed = fixtures::kSynthSeed;
            opts.allow_escalation = false;
            try {
                SynthesisResult res = synthesize(target, 6, opts);
                worst = std::max(worst, res.residual_norm);
                max_restarts = std::max(max_restarts, res.restarts_used + 1);
                solved.push_back({target, res, {}});
            } catch (const SynthesisFailure& e) {
                ok = false;
                std::printf("       %s: %s\n", target.name.c_str(), e.what());
            }
        }
        const double s = seconds_since(t0);
        ok = ok && worst <= 1e-9 && max_restarts <= 32 && s < 60.0;
        report(3, "synthesis_feasibility", ok,
               fmt("%g/23 targets, max residual %.2e (<= 1e-9), max attempts %g (<= 32), %.2f s (< 60 s)",
                   static_cast<double>(solved.size()), worst, max_restarts, s));
    }
    for (auto& s : solved) {
        ScheduleMeta meta;
        meta.gate = s.target.name;
        meta.seed = fixtures::kSynthSeed;
        s.ps = extract_pulses(s.res.cs, 1.0, fixtures::kSamples, meta);
    }

    // 4
    {
        double worst = 0.0;
        for (const auto& s : solved) {
            for (std::uint64_t n = 0; n < 20; ++n) {
                worst = std::max(worst, first_order_magnus(s.res.cs, 1.0, random_static_noise(100 + n)).norm());
            }
        }
        report(4, "cancellation_certificate", worst <= 1e-7 && !solved.empty(),
               fmt("max |A_1|_F over %g pulses x 20 noises = %.2e (<= 1e-7 T)", static_cast<double>(solved.size()),
                   worst));
    }

    // 5
    {
        double worst = 0.0, worst_ratio = 1e300;
        for (const auto& s : solved) {
            const double fine = distance_up_to_phase(control_path(s.ps).back(), s.target.u);
            const PulseSchedule coarse_ps = extract_pulses(s.res.cs, 1.0, fixtures::kSamples / 2);
            const double coarse = distance_up_to_phase(control_path(coarse_ps).back(), s.target.u);
            worst = std::max(worst, fine);
            worst_ratio = std::min(worst_ratio, coarse / fine);
        }
        report(5, "gate_correctness", worst <= 1e-6 && worst_ratio >= 3.0 && !solved.empty(),
               fmt("max distance at 4096 steps = %.2e (<= 1e-6), min improvement 2048->4096 = %.1fx (>= 3x)", worst,
                   worst_ratio));
    }

    const std::vector<double> deltas = logspace(1e-3, 1e-2, 7);
    const auto find = [&](const std::string& name) -> const Solved& {
        for (const auto& s : solved) {
            if (s.target.name == name) {
                return s;
            }
        }
        throw std::runtime_error("missing target " + name);
    };

    // 6
    try {
        const auto t0 = Clock::now();
        double lo = 1e300, hi = -1e300, r2 = 1.0, blo = 1e300, bhi = -1e300;
        const TargetGate rnd = make_target(random_su2(kDemoRandomGateSeed), "random");
        SynthesisOptions opts;
        opts.seed = kDemoRandomGateSeed;
        const PulseSchedule rnd_ps = extract_pulses(synthesize(rnd, 6, opts).cs, 1.0, fixtures::kSamples);
        const std::vector<std::pair<TargetGate, PulseSchedule>> cases = {{find("rz").target, find("rz").ps},
                                                                         {rnd, rnd_ps}};
        for (const auto& [target, ps] : cases) {
            const PulseSchedule bl = baseline_pulse(target, 1.0, fixtures::kSamples);
            for (std::uint64_t n = 0; n < 5; ++n) {
                const NoiseModel noise = random_static_noise(n);
                const SweepResult r = sweep(ps, noise, deltas);
                lo = std::min(lo, r.slope);
                hi = std::max(hi, r.slope);
                r2 = std::min(r2, r.r2);
                const SweepResult b = sweep(bl, noise, deltas);
                blo = std::min(blo, b.slope);
                bhi = std::max(bhi, b.slope);
            }
        }
        const double s = seconds_since(t0);
        const bool ok = lo >= 1.85 && hi <= 2.15 && r2 >= 0.99 && blo >= 0.9 && bhi <= 1.1 && s < 30.0;
        report(6, "second_order_single_qubit", ok,
               fmt("slopes [%.4f, %.4f] in [1.85, 2.15], min r2 %.6f (>= 0.99), ", lo, hi, r2) +
                   fmt("baseline [%.4f, %.4f] in [0.9, 1.1], %.2f s (< 30 s)", blo, bhi, s));
    } catch (const std::exception& e) {
        report(6, "second_order_single_qubit", false, e.what());
    }

    // 7
    try {
        const auto t0 = Clock::now();
        const Solved& rz = find("rz");
        const SweepResult r = sweep(rz.ps, mediated_zz(), deltas);
        const SweepResult b = sweep(baseline_pulse(rz.target, 1.0, fixtures::kSamples), mediated_zz(), deltas);
        double decomp = 0.0;
        const NoiseModel nz = static_noise(pauli_z());
        for (double delta : {1e-3, 1e-2}) {
            const CMatrix full = propagate_mediated(rz.ps, delta);
            for (int bath = 0; bath < 2; ++bath) {
                const Mat2 single = propagate_single(rz.ps, nz, bath == 0 ? delta : -delta);
                decomp = std::max(decomp, (bath_conditional_block(full, bath) - kron(single, single)).norm());
            }
        }
        const double s = seconds_since(t0);
        const bool ok = r.slope >= 1.85 && r.slope <= 2.15 && decomp <= 1e-10 && s < 60.0;
        report(7, "second_order_mediated_zz", ok,
               fmt("slope %.4f in [1.85, 2.15] (baseline %.4f), bath decomposition %.2e (<= 1e-10), %.2f s (< 60 s)",
                   r.slope, b.slope, decomp, s));
    } catch (const std::exception& e) {
        report(7, "second_order_mediated_zz", false, e.what());
    }

    // 8
    {
        double worst_end = 0.0, worst_ratio = 0.0;
        for (const auto& s : solved) {
            for (const auto* p : {&s.ps.samples.front(), &s.ps.samples.back()}) {
                worst_end = std::max({worst_end, std::abs(p->gx), std::abs(p->gy), std::abs(p->gz)});
            }
            worst_ratio = std::max(worst_ratio, fixtures::continuity_ratio(s.ps));
        }
        report(8, "smoothness", worst_end <= 1e-8 && worst_ratio <= 10.0 && !solved.empty(),
               fmt("max |g(0)|,|g(T)| = %.2e (<= 1e-8), max jump / local-slope estimate = %.2f (<= 10)", worst_end,
                   worst_ratio));
    }

    // 9
    {
        bool all_reported = !solved.empty();
        for (const auto& s : solved) {
            const auto j = schedule_to_json(s.ps);
            all_reported = all_reported && j["meta"].contains("magnus_budget") &&
                           std::isfinite(j["meta"]["magnus_budget"].get<double>());
        }
        const double rz = magnus_budget(find("rz").ps).value;
        const bool ok = all_reported && std::abs(rz - fixtures::kRzMagnusBudget) <= 1e-9;
        report(9, "magnus_budget", ok,
               fmt("reported for all schedules; R_z(0.025 pi) budget %.12f vs baseline %.12f (|diff| <= 1e-9)", rz,
                   fixtures::kRzMagnusBudget));
    }

    // 10
    {
        namespace fs = std::filesystem;
        const fs::path root = fs::temp_directory_path() / "dcgpulse_acceptance";
        fs::remove_all(root);
        std::ostringstream log;
        const int rc_a = cmd_demo((root / "a").string(), log);
        const int rc_b = cmd_demo((root / "b").string(), log);
        int compared = 0, differing = 0;
        for (const auto& entry : fs::directory_iterator(root / "a")) {
            if (entry.path().extension() != ".csv") {
                continue;
            }
            ++compared;
            const fs::path other = root / "b" / entry.path().filename();
            if (!fs::exists(other) || read_text_file(entry.path().string()) != read_text_file(other.string())) {
                ++differing;
            }
        }
        report(10, "determinism", rc_a == kExitOk && rc_b == kExitOk && compared > 0 && differing == 0,
               fmt("demo exit codes %g/%g, %g CSV files compared, %g differ", rc_a, rc_b, compared, differing));
    }

    std::printf("%s: %d failing criteria\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
