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

// Control fields from the control unitary. With dU/dt = -i H U the field is
// H = i (dU/dt) U^dagger = sum_k g_k Lambda_k, g_k = Tr(H Lambda_k) / K.

#include "dcgpulse/curve.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dcg {

inline constexpr int kMinScheduleSamples = 256;

struct ControlSample {
    double t = 0.0;
    double gx = 0.0;
    double gy = 0.0;
    double gz = 0.0;

    friend bool operator==(const ControlSample&, const ControlSample&) = default;
};

struct ScheduleMeta {
    std::string gate;
    int M = 0;
    std::uint64_t seed = 0;
    double residual = 0.0;
    /// Full run configuration, serialized as-is into JSON outputs.
    nlohmann::json config = nlohmann::json::object();
};

struct PulseSchedule {
    double T = 0.0;
    std::vector<ControlSample> samples;
    /// Parametrization value behind each sample; empty for schedules that
    /// did not come from a coefficient set.
    std::vector<double> lambda_grid;
    /// Norm zeros encountered while sampling.
    std::vector<double> norm_zeros;
    ScheduleMeta meta;
};

class ScheduleFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// H(lambda) = i (dU_C/dlambda) (dlambda/dt) U_C^dagger, using
/// dU_C/dlambda = V'/s - V (f . f') / s^3.
inline Mat2 hamiltonian_at(const CoefficientSet& cs, double lambda, const BranchedNorm& bn, const TimeMap& tm) {
    const Quaternion f = eval_components(cs, lambda);
    const Quaternion fd = eval_components_dot(cs, lambda);
    const double q = f[0] * f[0] + f[1] * f[1] + f[2] * f[2] + f[3] * f[3];
    if (q <= kNormZeroTolerance) {
        throw std::domain_error("hamiltonian_at: lambda = " + std::to_string(lambda) + " is a norm zero");
    }
    const double s = bn.sign(lambda) * std::sqrt(q);
    const double f_dot_fd = f[0] * fd[0] + f[1] * fd[1] + f[2] * fd[2] + f[3] * fd[3];
    const Mat2 v = quaternion_matrix(f);
    const Mat2 v_dot = quaternion_matrix(fd);
    const Mat2 du = v_dot / s - v * (f_dot_fd / (s * s * s));
    const Mat2 u = v / s;
    const double dlambda_dt = 1.0 / tm.dt_dlambda(q);
    return kI * dlambda_dt * du * u.adjoint();
}

inline std::array<double, 3> control_fields(const Mat2& h) {
    const auto& basis = su2_basis();
    std::array<double, 3> g{};
    for (int k = 0; k < 3; ++k) {
        g[k] = (h * basis[k]).trace().real() / GeneratorBasis::K;
    }
    return g;
}

inline PulseSchedule extract_pulses(const CoefficientSet& cs, double T, int n_samples, ScheduleMeta meta = {}) {
    if (n_samples < kMinScheduleSamples) {
        throw std::invalid_argument("extract_pulses: need at least " + std::to_string(kMinScheduleSamples) +
                                    " samples");
    }
    const BranchedNorm bn = branch_norm(cs);
    const TimeMap tm = time_map(cs, T);
    const double step = 1.0 / (n_samples - 1);

    std::vector<double> grid(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        grid[i] = i == n_samples - 1 ? 1.0 : i * step;
    }
    constexpr double kZeroClearance = 1e-9;
    const bool hits_zero = std::any_of(grid.begin(), grid.end(), [&](double l) {
        return bn.distance_to_zero(l) < kZeroClearance;
    });
    if (hits_zero) {
        // Interior nodes moved to the cell midpoints; endpoints kept.
        grid.assign(1, 0.0);
        for (int i = 0; i + 1 < n_samples; ++i) {
            grid.push_back((i + 0.5) * step);
        }
        grid.push_back(1.0);
    }

    PulseSchedule ps;
    ps.T = T;
    ps.norm_zeros = bn.zeros;
    meta.M = cs.M;
    ps.meta = std::move(meta);
    for (double lambda : grid) {
        const Mat2 h = hamiltonian_at(cs, lambda, bn, tm);
        const auto g = control_fields(h);
        ControlSample s{tm.t_at(lambda), g[0], g[1], g[2]};
        if (!ps.samples.empty() && s.t - ps.samples.back().t < 1e-12) {
            if (lambda < 1.0) {
                continue;
            }
            ps.samples.pop_back();
            ps.lambda_grid.pop_back();
        }
        ps.samples.push_back(s);
        ps.lambda_grid.push_back(lambda);
    }
    return ps;
}

struct MagnusBudget {
    double value = 0.0;
    bool within_bound = true;  // value <= pi
};

/// Trapezoidal int_0^T |H_C(t)|_2 dt; for traceless 2x2 fields |H|_2 = |g|.
inline MagnusBudget magnus_budget(const PulseSchedule& ps) {
    MagnusBudget mb;
    const auto norm = [](const ControlSample& s) { return std::sqrt(s.gx * s.gx + s.gy * s.gy + s.gz * s.gz); };
    for (std::size_t i = 0; i + 1 < ps.samples.size(); ++i) {
        const double dt = ps.samples[i + 1].t - ps.samples[i].t;
        mb.value += 0.5 * dt * (norm(ps.samples[i]) + norm(ps.samples[i + 1]));
    }
    mb.within_bound = mb.value <= kPi;
    return mb;
}

enum class ScheduleFormat { csv, json };

inline ScheduleFormat format_from_path(const std::string& path) {
    const auto dot = path.rfind('.');
    if (dot != std::string::npos && path.substr(dot) == ".json") {
        return ScheduleFormat::json;
    }
    return ScheduleFormat::csv;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string schedule_to_csv(const PulseSchedule& ps) {
    std::string out = "t,gx,gy,gz\n";
    for (const auto& s : ps.samples) {
        out += format_double(s.t);
        out += ',';
        out += format_double(s.gx);
        out += ',';
        out += format_double(s.gy);
        out += ',';
        out += format_double(s.gz);
        out += '\n';
    }
    return out;
}

inline nlohmann::json schedule_to_json(const PulseSchedule& ps) {
    nlohmann::json j;
    j["T"] = ps.T;
    auto samples = nlohmann::json::array();
    for (const auto& s : ps.samples) {
        samples.push_back({s.t, s.gx, s.gy, s.gz});
    }
    j["samples"] = std::move(samples);
    if (!ps.lambda_grid.empty()) {
        j["lambda"] = ps.lambda_grid;
    }
    j["norm_zeros"] = ps.norm_zeros;
    j["meta"] = {
        {"gate", ps.meta.gate},
        {"M", ps.meta.M},
        {"seed", ps.meta.seed},
        {"residual", ps.meta.residual},
        {"magnus_budget", magnus_budget(ps).value},
        {"config", ps.meta.config},
    };
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void export_schedule(const PulseSchedule& ps, ScheduleFormat format, const std::string& path) {
    if (format == ScheduleFormat::csv) {
        write_text_file(path, schedule_to_csv(ps));
    } else {
        write_text_file(path, schedule_to_json(ps).dump(1) + "\n");
    }
}

namespace detail {

inline double parse_double(std::string_view field, std::size_t line) {
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
        field.remove_prefix(1);
    }
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
        field.remove_suffix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ScheduleFormatError("line " + std::to_string(line) + ": malformed number '" + std::string(field) +
                                  "'");
    }
    return v;
}

inline void validate_time_column(const PulseSchedule& ps) {
    if (ps.samples.size() < 2) {
        throw ScheduleFormatError("schedule needs at least two samples");
    }
    if (std::abs(ps.samples.front().t) > 1e-12) {
        throw ScheduleFormatError("schedule must start at t = 0");
    }
    for (std::size_t i = 1; i < ps.samples.size(); ++i) {
        if (!(ps.samples[i].t > ps.samples[i - 1].t)) {
            throw ScheduleFormatError("time column is not strictly increasing at sample " + std::to_string(i));
        }
    }
    for (const auto& s : ps.samples) {
        if (!std::isfinite(s.t) || !std::isfinite(s.gx) || !std::isfinite(s.gy) || !std::isfinite(s.gz)) {
            throw ScheduleFormatError("schedule contains non-finite values");
        }
    }
}

inline PulseSchedule schedule_from_csv(const std::string& text) {
    PulseSchedule ps;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (!header_seen) {
            if (line != "t,gx,gy,gz") {
                throw ScheduleFormatError("expected header 't,gx,gy,gz', got '" + line + "'");
            }
            header_seen = true;
            continue;
        }
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != 4) {
            throw ScheduleFormatError("line " + std::to_string(line_no) + ": expected 4 columns, got " +
                                      std::to_string(fields.size()));
        }
        ps.samples.push_back({parse_double(fields[0], line_no), parse_double(fields[1], line_no),
                              parse_double(fields[2], line_no), parse_double(fields[3], line_no)});
    }
    if (!header_seen) {
        throw ScheduleFormatError("empty schedule file");
    }
    validate_time_column(ps);
    ps.T = ps.samples.back().t;
    return ps;
}

inline PulseSchedule schedule_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScheduleFormatError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("T") || !j.contains("samples") || !j["samples"].is_array()) {
        throw ScheduleFormatError("schedule JSON needs 'T' and 'samples'");
    }
    PulseSchedule ps;
    try {
        ps.T = j["T"].get<double>();
        for (const auto& row : j["samples"]) {
            if (!row.is_array() || row.size() != 4) {
                throw ScheduleFormatError("every sample must be [t, gx, gy, gz]");
            }
            ps.samples.push_back(
                {row[0].get<double>(), row[1].get<double>(), row[2].get<double>(), row[3].get<double>()});
        }
        if (j.contains("lambda")) {
            ps.lambda_grid = j["lambda"].get<std::vector<double>>();
            if (ps.lambda_grid.size() != ps.samples.size()) {
                throw ScheduleFormatError("'lambda' length differs from 'samples'");
            }
        }
        if (j.contains("norm_zeros")) {
            ps.norm_zeros = j["norm_zeros"].get<std::vector<double>>();
        }
        if (j.contains("meta")) {
            const auto& m = j["meta"];
            ps.meta.gate = m.value("gate", std::string{});
            ps.meta.M = m.value("M", 0);
            ps.meta.seed = m.value("seed", std::uint64_t{0});
            ps.meta.residual = m.value("residual", 0.0);
            if (m.contains("config")) {
                ps.meta.config = m["config"];
            }
        }
    } catch (const nlohmann::json::type_error& e) {
        throw ScheduleFormatError(std::string("schedule JSON has wrong types: ") + e.what());
    }
    validate_time_column(ps);
    if (std::abs(ps.samples.back().t - ps.T) > 1e-12 * std::max(1.0, ps.T)) {
        throw ScheduleFormatError("last sample time differs from T");
    }
    return ps;
}

}  // namespace detail

/// Reads a schedule written by export_schedule. JSON is recognized by its
/// leading '{', anything else is parsed as CSV.
inline PulseSchedule import_schedule(const std::string& path) {
    const std::string text = read_text_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        return detail::schedule_from_json(text);
    }
    return detail::schedule_from_csv(text);
}

}  // namespace dcg
