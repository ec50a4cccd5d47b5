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

// Command implementations behind the dcgpulse tool. Each command takes a
// RunConfig, writes its files under config.out and returns a process exit
// code. Every JSON output embeds the RunConfig it was produced with.

#include "dcgpulse/pulses.hpp"
#include "dcgpulse/robustness.hpp"
#include "dcgpulse/synth.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dcg {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSynthesisFailure = 2;
inline constexpr int kExitVerificationFailure = 3;
inline constexpr int kExitUsage = 64;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Expectation { second_order, first_order };

struct SlopeWindow {
    double lo;
    double hi;
    bool contains(double s) const { return s >= lo && s <= hi; }
};

inline SlopeWindow slope_window(Expectation e) {
    return e == Expectation::second_order ? SlopeWindow{1.85, 2.15} : SlopeWindow{0.9, 1.1};
}

struct RunConfig {
    /// rz, rx, ry, identity, random or matrix.
    std::string gate = "rz";
    double angle = 0.0;
    std::string matrix_file;
    int M = kMinCollocationPoints;
    double T = 1.0;
    std::uint64_t seed = 0;
    int samples = 4096;
    std::vector<double> deltas = logspace(1e-3, 1e-2, 7);
    /// static or mediated.
    std::string noise = "static";
    Expectation expect = Expectation::second_order;
    std::string out = ".";

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline std::string expectation_name(Expectation e) {
    return e == Expectation::second_order ? "second-order" : "first-order";
}

inline nlohmann::json config_to_json(const RunConfig& c) {
    return {
        {"gate", c.gate},       {"angle", c.angle},   {"matrix_file", c.matrix_file},
        {"M", c.M},             {"T", c.T},           {"seed", c.seed},
        {"samples", c.samples}, {"deltas", c.deltas}, {"noise", c.noise},
        {"expect", expectation_name(c.expect)},       {"out", c.out},
    };
}

namespace detail {

inline double parse_number(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) {
            throw std::invalid_argument(v);
        }
        return x;
    } catch (const std::exception&) {
        throw UsageError("config: '" + key + "' expects a number, got '" + v + "'");
    }
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    std::string t = s.substr(b, e - b + 1);
    if (t.size() >= 2 && t.front() == '"' && t.back() == '"') {
        t = t.substr(1, t.size() - 2);
    }
    return t;
}

}  // namespace detail

inline std::vector<double> parse_delta_list(const std::string& text) {
    std::string body = detail::trim(text);
    if (!body.empty() && body.front() == '[' && body.back() == ']') {
        body = body.substr(1, body.size() - 2);
    }
    std::vector<double> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(detail::parse_number("deltas", detail::trim(item)));
    }
    return out;
}

/// Applies one key/value pair. Keys are the long flag names without dashes
/// (matrix-file and matrix_file are both accepted).
inline void set_config_value(RunConfig& c, std::string key, const std::string& value) {
    for (auto& ch : key) {
        if (ch == '-') {
            ch = '_';
        }
    }
    if (key == "gate") {
        c.gate = value;
    } else if (key == "angle") {
        c.angle = detail::parse_number(key, value);
    } else if (key == "matrix_file") {
        c.matrix_file = value;
    } else if (key == "M" || key == "m") {
        c.M = static_cast<int>(detail::parse_number(key, value));
    } else if (key == "T" || key == "t") {
        c.T = detail::parse_number(key, value);
    } else if (key == "seed") {
        c.seed = static_cast<std::uint64_t>(detail::parse_number(key, value));
    } else if (key == "samples") {
        c.samples = static_cast<int>(detail::parse_number(key, value));
    } else if (key == "deltas") {
        c.deltas = parse_delta_list(value);
    } else if (key == "noise") {
        c.noise = value;
    } else if (key == "expect") {
        if (value == "second-order") {
            c.expect = Expectation::second_order;
        } else if (value == "first-order") {
            c.expect = Expectation::first_order;
        } else {
            throw UsageError("config: expect must be second-order or first-order");
        }
    } else if (key == "out") {
        c.out = value;
    } else {
        throw UsageError("config: unknown key '" + key + "'");
    }
}

/// key = value lines; '#' starts a comment, [sections] are ignored.
inline RunConfig parse_config_text(const std::string& text, RunConfig base = {}) {
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty() || line.front() == '[') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        set_config_value(base, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    return base;
}

/// Inverse of config_to_json; missing keys keep their defaults.
inline RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        c.gate = j.value("gate", c.gate);
        c.angle = j.value("angle", c.angle);
        c.matrix_file = j.value("matrix_file", c.matrix_file);
        c.M = j.value("M", c.M);
        c.T = j.value("T", c.T);
        c.seed = j.value("seed", c.seed);
        c.samples = j.value("samples", c.samples);
        c.deltas = j.value("deltas", c.deltas);
        c.noise = j.value("noise", c.noise);
        c.out = j.value("out", c.out);
        if (j.contains("expect")) {
            set_config_value(c, "expect", j.at("expect").get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("embedded config: ") + e.what());
    }
    return c;
}

inline void validate_config(const RunConfig& c) {
    if (c.M < kMinCollocationPoints) {
        throw UsageError("M = " + std::to_string(c.M) + " is below the minimum of " +
                         std::to_string(kMinCollocationPoints) + " collocation points");
    }
    if (!(c.T > 0.0)) {
        throw UsageError("T must be positive");
    }
    if (c.samples < kMinScheduleSamples) {
        throw UsageError("samples must be at least " + std::to_string(kMinScheduleSamples));
    }
    if (c.noise != "static" && c.noise != "mediated") {
        throw UsageError("noise must be static or mediated");
    }
    if (c.deltas.size() < 5) {
        throw UsageError("need at least 5 deltas");
    }
    for (std::size_t i = 0; i < c.deltas.size(); ++i) {
        if (!(c.deltas[i] > 0.0) || (i > 0 && !(c.deltas[i] > c.deltas[i - 1]))) {
            throw UsageError("deltas must be positive and strictly increasing");
        }
    }
}

/// JSON {"re": [[..],[..]], "im": [[..],[..]]}.
inline Mat2 read_matrix_file(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("matrix file '" + path + "': " + e.what());
    }
    Mat2 u;
    try {
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) {
                const double im = j.contains("im") ? j.at("im").at(r).at(c).get<double>() : 0.0;
                u(r, c) = {j.at("re").at(r).at(c).get<double>(), im};
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("matrix file '" + path + "': " + e.what());
    }
    return u;
}

inline TargetGate resolve_target(const RunConfig& c) {
    try {
        if (c.gate == "rz") {
            return make_target(rz_gate(c.angle), "rz");
        }
        if (c.gate == "rx") {
            return make_target(rx_gate(c.angle), "rx");
        }
        if (c.gate == "ry") {
            return make_target(ry_gate(c.angle), "ry");
        }
        if (c.gate == "identity") {
            return make_target(Mat2::Identity(), "identity");
        }
        if (c.gate == "random") {
            return make_target(random_su2(c.seed), "random");
        }
        if (c.gate == "matrix") {
            if (c.matrix_file.empty()) {
                throw UsageError("gate 'matrix' needs --matrix-file");
            }
            return make_target(read_matrix_file(c.matrix_file), "matrix");
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    throw UsageError("unknown gate '" + c.gate + "' (rz, rx, ry, identity, random, matrix)");
}

inline nlohmann::json coefficients_to_json(const SynthesisResult& res, const TargetGate& target,
                                           const RunConfig& c) {
    auto a = nlohmann::json::array();
    for (const auto& v : res.cs.a) {
        a.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    }
    const auto& om = res.b_params.omega;
    return {
        {"M", res.cs.M},
        {"a", a},
        {"residual", res.residual_norm},
        {"seed", c.seed},
        {"gate", target.name},
        {"iterations", res.iterations},
        {"restarts_used", res.restarts_used},
        {"b_params", {{"o0", res.b_params.o0}, {"omega", std::vector<double>(om.data(), om.data() + om.size())}}},
        {"config", config_to_json(c)},
    };
}

struct CoefficientFile {
    CoefficientSet cs;
    std::string gate;
    double residual = 0.0;
    std::uint64_t seed = 0;
};

inline CoefficientFile read_coefficients(const std::string& path) {
    const std::string text = read_text_file(path);
    CoefficientFile f;
    try {
        const auto j = nlohmann::json::parse(text);
        const int M = j.at("M").get<int>();
        if (M < kMinCollocationPoints) {
            throw std::invalid_argument("M below minimum");
        }
        const auto& a = j.at("a");
        if (!a.is_array() || a.size() != 4) {
            throw std::invalid_argument("'a' must hold 4 coefficient arrays");
        }
        f.cs = CoefficientSet::zeros(M);
        for (int k = 0; k < 4; ++k) {
            const auto v = a.at(k).get<std::vector<double>>();
            if (static_cast<int>(v.size()) != M) {
                throw std::invalid_argument("coefficient array " + std::to_string(k) + " has wrong length");
            }
            for (int i = 0; i < M; ++i) {
                f.cs.a[k](i) = v[i];
            }
        }
        f.gate = j.value("gate", std::string("unknown"));
        f.residual = j.value("residual", 0.0);
        f.seed = j.value("seed", std::uint64_t{0});
    } catch (const std::exception& e) {
        throw std::runtime_error("invalid coefficient file '" + path + "': " + e.what());
    }
    return f;
}

inline std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

inline void ensure_dir(const std::string& dir) {
    std::filesystem::create_directories(dir);
}

/// CSV columns: delta,error,fitted,fit. `fit` is exp(intercept) delta^slope.
inline std::string sweep_to_csv(const SweepResult& r) {
    std::string out = "delta,error,fitted,fit\n";
    for (std::size_t i = 0; i < r.deltas.size(); ++i) {
        const double fit = std::exp(r.intercept) * std::pow(r.deltas[i], r.slope);
        out += format_double(r.deltas[i]) + "," + format_double(r.errors[i]) + "," + (r.fitted[i] ? "1" : "0") +
               "," + format_double(fit) + "\n";
    }
    return out;
}

inline nlohmann::json sweep_to_json(const SweepResult& r, const nlohmann::json& meta) {
    return {{"deltas", r.deltas}, {"errors", r.errors}, {"slope", r.slope},
            {"intercept", r.intercept}, {"r2", r.r2}, {"meta", meta}};
}

inline int cmd_synth(const RunConfig& c, std::ostream& log) {
    validate_config(c);
    const TargetGate target = resolve_target(c);
    SynthesisOptions opts;
    opts.seed = c.seed;
    SynthesisResult res;
    try {
        res = synthesize(target, c.M, opts);
    } catch (const SynthesisFailure& e) {
        log << "error: " << e.what() << "\n";
        return kExitSynthesisFailure;
    }
    ensure_dir(c.out);
    const std::string path = join_path(c.out, "coefficients.json");
    write_text_file(path, coefficients_to_json(res, target, c).dump(2) + "\n");
    log << "synth: gate=" << target.name << " M=" << res.cs.M << " residual=" << res.residual_norm
        << " restarts=" << res.restarts_used << " -> " << path << "\n";
    return kExitOk;
}

inline PulseSchedule schedule_from_coefficients(const CoefficientFile& f, const RunConfig& c) {
    ScheduleMeta meta;
    meta.gate = f.gate;
    meta.M = f.cs.M;
    meta.seed = f.seed;
    meta.residual = f.residual;
    meta.config = config_to_json(c);
    return extract_pulses(f.cs, c.T, c.samples, meta);
}

inline void write_schedule_pair(const PulseSchedule& ps, const std::string& dir, const std::string& stem) {
    export_schedule(ps, ScheduleFormat::csv, join_path(dir, stem + ".csv"));
    export_schedule(ps, ScheduleFormat::json, join_path(dir, stem + ".json"));
}

inline int cmd_pulses(const RunConfig& c, const std::string& coeff_path, std::ostream& log) {
    validate_config(c);
    CoefficientFile f;
    try {
        f = read_coefficients(coeff_path);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    const PulseSchedule ps = schedule_from_coefficients(f, c);
    ensure_dir(c.out);
    write_schedule_pair(ps, c.out, "schedule");
    const MagnusBudget mb = magnus_budget(ps);
    log << "pulses: " << ps.samples.size() << " samples -> " << join_path(c.out, "schedule.csv") << "\n";
    log << "magnus_budget=" << mb.value << " within_bound=" << (mb.within_bound ? "true" : "false") << "\n";
    return kExitOk;
}

inline NoiseModel noise_from_config(const RunConfig& c) {
    return c.noise == "mediated" ? mediated_zz() : random_static_noise(c.seed);
}

inline int cmd_sweep(const RunConfig& c, const std::string& schedule_path, std::ostream& log) {
    validate_config(c);
    PulseSchedule ps;
    try {
        ps = import_schedule(schedule_path);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    const NoiseModel noise = noise_from_config(c);
    SweepResult r;
    try {
        r = sweep(ps, noise, c.deltas);
    } catch (const FitRefused& e) {
        log << "error: " << e.what() << "\n";
        return kExitVerificationFailure;
    }
    const SlopeWindow w = slope_window(c.expect);
    const bool ok = w.contains(r.slope);
    ensure_dir(c.out);
    write_text_file(join_path(c.out, "sweep.csv"), sweep_to_csv(r));
    nlohmann::json meta = {{"schedule", schedule_path}, {"noise", c.noise}, {"config", config_to_json(c)}};
    write_text_file(join_path(c.out, "sweep.json"), sweep_to_json(r, meta).dump(2) + "\n");
    log << "slope=" << r.slope << " r2=" << r.r2 << " expect=" << expectation_name(c.expect) << " window=[" << w.lo
        << ", " << w.hi << "] " << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kExitOk : kExitVerificationFailure;
}

inline constexpr std::uint64_t kDemoSeed = 7;
inline constexpr std::uint64_t kDemoRandomGateSeed = 2024;
inline constexpr int kDemoNoiseSeeds = 5;

/// Fixed-seed pipeline producing plot-ready pulse and sweep data. Only `out` is taken from the config.
inline int cmd_demo(const std::string& out_dir, std::ostream& log) {
    ensure_dir(out_dir);
    RunConfig base;
    base.seed = kDemoSeed;
    base.out = out_dir;
    nlohmann::json manifest = {{"files", nlohmann::json::array()}, {"checks", nlohmann::json::array()}};
    bool all_ok = true;
    const auto add_file = [&](const std::string& name) { manifest["files"].push_back(name); };
    const auto check = [&](const std::string& name, const SweepResult& r, Expectation e) {
        const SlopeWindow w = slope_window(e);
        const bool ok = w.contains(r.slope);
        all_ok = all_ok && ok;
        manifest["checks"].push_back({{"name", name}, {"slope", r.slope}, {"r2", r.r2}, {"window", {w.lo, w.hi}},
                                      {"pass", ok}});
        log << name << ": slope=" << r.slope << " r2=" << r.r2 << (ok ? " PASS" : " FAIL") << "\n";
    };
    const auto write_sweep = [&](const std::string& stem, const SweepResult& r, const nlohmann::json& meta) {
        write_text_file(join_path(out_dir, stem + ".csv"), sweep_to_csv(r));
        write_text_file(join_path(out_dir, stem + ".json"), sweep_to_json(r, meta).dump(2) + "\n");
        add_file(stem + ".csv");
        add_file(stem + ".json");
    };
    const auto synth_schedule = [&](const RunConfig& c, const std::string& stem) {
        const TargetGate target = resolve_target(c);
        SynthesisOptions opts;
        opts.seed = c.seed;
        const SynthesisResult res = synthesize(target, c.M, opts);
        write_text_file(join_path(out_dir, stem + "_coefficients.json"),
                        coefficients_to_json(res, target, c).dump(2) + "\n");
        add_file(stem + "_coefficients.json");
        CoefficientFile f{res.cs, target.name, res.residual_norm, c.seed};
        PulseSchedule ps = schedule_from_coefficients(f, c);
        write_schedule_pair(ps, out_dir, stem + "_pulses");
        add_file(stem + "_pulses.csv");
        add_file(stem + "_pulses.json");
        PulseSchedule bl = baseline_pulse(target, c.T, c.samples);
        bl.meta.config = config_to_json(c);
        write_schedule_pair(bl, out_dir, stem + "_baseline_pulses");
        add_file(stem + "_baseline_pulses.csv");
        add_file(stem + "_baseline_pulses.json");
        manifest["magnus_budget"][stem] = magnus_budget(ps).value;
        return std::pair{ps, bl};
    };

    try {
        RunConfig rz = base;
        rz.gate = "rz";
        rz.angle = 0.025 * kPi;
        const auto [rz_ps, rz_bl] = synth_schedule(rz, "rz");

        RunConfig med = rz;
        med.noise = "mediated";
        const nlohmann::json med_meta = {{"noise", "mediated"}, {"config", config_to_json(med)}};
        const SweepResult med_r = sweep(rz_ps, mediated_zz(), med.deltas);
        write_sweep("mediated_sweep", med_r, med_meta);
        check("mediated_sweep", med_r, Expectation::second_order);
        const SweepResult med_bl = sweep(rz_bl, mediated_zz(), med.deltas);
        write_sweep("mediated_baseline_sweep", med_bl, med_meta);
        check("mediated_baseline_sweep", med_bl, Expectation::first_order);

        RunConfig rnd = base;
        rnd.gate = "random";
        rnd.seed = kDemoRandomGateSeed;
        const auto [rnd_ps, rnd_bl] = synth_schedule(rnd, "random");

        for (int s = 0; s < kDemoNoiseSeeds; ++s) {
            RunConfig sc = rnd;
            sc.seed = static_cast<std::uint64_t>(s);
            const NoiseModel noise = random_static_noise(sc.seed);
            const nlohmann::json meta = {{"noise", "static"}, {"noise_seed", s}, {"config", config_to_json(sc)}};
            const std::string tag = "_seed" + std::to_string(s);
            const SweepResult r = sweep(rnd_ps, noise, sc.deltas);
            write_sweep("static_sweep" + tag, r, meta);
            check("static_sweep" + tag, r, Expectation::second_order);
            const SweepResult b = sweep(rnd_bl, noise, sc.deltas);
            write_sweep("static_baseline_sweep" + tag, b, meta);
            check("static_baseline_sweep" + tag, b, Expectation::first_order);
        }
    } catch (const SynthesisFailure& e) {
        log << "error: " << e.what() << "\n";
        return kExitSynthesisFailure;
    } catch (const FitRefused& e) {
        log << "error: " << e.what() << "\n";
        return kExitVerificationFailure;
    }
    manifest["config"] = config_to_json(base);
    write_text_file(join_path(out_dir, "manifest.json"), manifest.dump(2) + "\n");
    log << "demo: wrote " << manifest["files"].size() + 1 << " files to " << out_dir << "\n";
    return all_ok ? kExitOk : kExitVerificationFailure;
}

}  // namespace dcg
