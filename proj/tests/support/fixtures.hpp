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

#include "dcgpulse/pulses.hpp"
#include "dcgpulse/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace fixtures {

inline constexpr std::uint64_t kSynthSeed = 7;
inline constexpr int kSamples = 4096;
/// Magnus budget of the R_z(0.025 pi) schedule at seed 7, 4096 samples.
inline constexpr double kRzMagnusBudget = 7.409412708895295;

/// Identity, R_z(0.025 pi), R_x(pi/2) and 20 seeded random gates.
inline std::vector<dcg::TargetGate> standard_targets() {
    std::vector<dcg::TargetGate> out;
    out.push_back(dcg::make_target(dcg::Mat2::Identity(), "identity"));
    out.push_back(dcg::make_target(dcg::rz_gate(0.025 * dcg::kPi), "rz"));
    out.push_back(dcg::make_target(dcg::rx_gate(dcg::kPi / 2), "rx"));
    for (std::uint64_t s = 1000; s < 1020; ++s) {
        out.push_back(dcg::make_target(dcg::random_su2(s), "random" + std::to_string(s)));
    }
    return out;
}

inline const dcg::SynthesisResult& solved(const dcg::TargetGate& target) {
    static std::map<std::string, dcg::SynthesisResult> cache;
    auto it = cache.find(target.name);
    if (it == cache.end()) {
        dcg::SynthesisOptions opts;
        opts.seed = kSynthSeed;
        it = cache.emplace(target.name, dcg::synthesize(target, 6, opts)).first;
    }
    return it->second;
}

inline dcg::PulseSchedule schedule(const dcg::TargetGate& target, int samples = kSamples, double T = 1.0) {
    dcg::ScheduleMeta meta;
    meta.gate = target.name;
    meta.M = 6;
    meta.seed = kSynthSeed;
    return dcg::extract_pulses(solved(target).cs, T, samples, meta);
}

/// Largest ratio of an adjacent-sample jump |g_{i+1} - g_i| to the jump
/// predicted by the local slope, max(|D_i|, |D_{i+1}|) (t_{i+1} - t_i), with
/// D_i the centered difference at sample i.
inline double continuity_ratio(const dcg::PulseSchedule& ps) {
    const auto& s = ps.samples;
    const auto diff = [&](std::size_t a, std::size_t b) {
        return std::array<double, 3>{s[b].gx - s[a].gx, s[b].gy - s[a].gy, s[b].gz - s[a].gz};
    };
    const auto norm = [](const std::array<double, 3>& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); };
    const auto slope = [&](std::size_t i) { return norm(diff(i - 1, i + 1)) / (s[i + 1].t - s[i - 1].t); };
    double worst = 0.0;
    for (std::size_t i = 1; i + 2 < s.size(); ++i) {
        const double jump = norm(diff(i, i + 1));
        const double predicted = std::max(slope(i), slope(i + 1)) * (s[i + 1].t - s[i].t);
        if (jump == 0.0) {
            continue;
        }
        worst = std::max(worst, predicted > 0.0 ? jump / predicted : std::numeric_limits<double>::infinity());
    }
    return worst;
}

inline dcg::TargetGate rz_demo() {
    return dcg::make_target(dcg::rz_gate(0.025 * dcg::kPi), "rz");
}

}  // namespace fixtures
