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

#include "dcgpulse/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "gtest/gtest.h"

using namespace dcg;
namespace fs = std::filesystem;

static fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "dcgpulse_cli_test" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

static int run_tool(const std::string& args) {
    const std::string cmd = std::string(DCGPULSE_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

static RunConfig rz_config(const fs::path& out) {
    RunConfig c;
    c.gate = "rz";
    c.angle = 0.025 * kPi;
    c.seed = 7;
    c.out = out.string();
    return c;
}

TEST(cli, config_text_parsing) {
    const RunConfig c = parse_config_text(R"(
        # comment
        [run]
        gate = rx
        angle = 1.5   # radians
        M = 7
        T = 2
        seed = 12
        samples = 512
        deltas = [0.001, 0.002, 0.003, 0.004, 0.005]
        noise = "mediated"
        expect = first-order
        matrix-file = u.json
        out = results
    )");
    EXPECT_EQ(c.gate, "rx");
    EXPECT_EQ(c.angle, 1.5);
    EXPECT_EQ(c.M, 7);
    EXPECT_EQ(c.T, 2.0);
    EXPECT_EQ(c.seed, 12u);
    EXPECT_EQ(c.samples, 512);
    EXPECT_EQ(c.deltas.size(), 5u);
    EXPECT_EQ(c.deltas[4], 0.005);
    EXPECT_EQ(c.noise, "mediated");
    EXPECT_EQ(c.expect, Expectation::first_order);
    EXPECT_EQ(c.matrix_file, "u.json");
    EXPECT_EQ(c.out, "results");
}

TEST(cli, config_text_errors) {
    EXPECT_THROW(parse_config_text("colour = red"), UsageError);
    EXPECT_THROW(parse_config_text("angle = abc"), UsageError);
    EXPECT_THROW(parse_config_text("just a line"), UsageError);
    EXPECT_THROW(parse_config_text("expect = third-order"), UsageError);
}

TEST(cli, config_json_round_trip) {
    RunConfig c = rz_config("somewhere");
    c.noise = "mediated";
    c.expect = Expectation::first_order;
    EXPECT_EQ(config_from_json(config_to_json(c)), c);
}

TEST(cli, validation) {
    RunConfig c;
    EXPECT_NO_THROW(validate_config(c));
    c.M = 5;
    EXPECT_THROW(validate_config(c), UsageError);
    c = RunConfig{};
    c.noise = "thermal";
    EXPECT_THROW(validate_config(c), UsageError);
    c = RunConfig{};
    c.deltas = {1e-3, 1e-2};
    EXPECT_THROW(validate_config(c), UsageError);
    c = RunConfig{};
    c.samples = 10;
    EXPECT_THROW(validate_config(c), UsageError);
    c = RunConfig{};
    c.gate = "toffoli";
    EXPECT_THROW(resolve_target(c), UsageError);
    c.gate = "matrix";
    EXPECT_THROW(resolve_target(c), UsageError);
}

TEST(cli, matrix_file_target) {
    const fs::path dir = scratch("matrix");
    const std::string path = (dir / "u.json").string();
    // Hadamard: unitary with det -1, projected into SU(2).
    const double h = 1.0 / std::sqrt(2.0);
    write_text_file(path, nlohmann::json{{"re", {{h, h}, {h, -h}}}, {"im", {{0, 0}, {0, 0}}}}.dump());
    RunConfig c;
    c.gate = "matrix";
    c.matrix_file = path;
    const TargetGate t = resolve_target(c);
    EXPECT_NEAR(std::abs(t.u.determinant() - 1.0), 0.0, 1e-14);
    write_text_file(path, R"({"re": [[1, 0], [0, 2]]})");
    EXPECT_THROW(resolve_target(c), UsageError);
    write_text_file(path, "{");
    EXPECT_THROW(resolve_target(c), UsageError);
}

TEST(cli, synth_pulses_sweep_pipeline) {
    const fs::path dir = scratch("pipeline");
    std::ostringstream log;
    RunConfig c = rz_config(dir);
    ASSERT_EQ(cmd_synth(c, log), kExitOk);
    const auto coeff = nlohmann::json::parse(read_text_file((dir / "coefficients.json").string()));
    EXPECT_EQ(coeff["M"], 6);
    EXPECT_EQ(coeff["a"].size(), 4u);
    EXPECT_EQ(coeff["a"][0].size(), 6u);
    EXPECT_LE(coeff["residual"].get<double>(), 1e-9);
    EXPECT_EQ(coeff["seed"], 7);
    EXPECT_EQ(config_from_json(coeff["config"]), c);

    ASSERT_EQ(cmd_pulses(c, (dir / "coefficients.json").string(), log), kExitOk);
    EXPECT_NE(log.str().find("magnus_budget=7.4094"), std::string::npos);
    EXPECT_NE(log.str().find("within_bound=false"), std::string::npos);
    const PulseSchedule ps = import_schedule((dir / "schedule.csv").string());
    EXPECT_EQ(ps.samples.size(), 4096u);
    const auto sj = nlohmann::json::parse(read_text_file((dir / "schedule.json").string()));
    EXPECT_EQ(config_from_json(sj["meta"]["config"]), c);

    ASSERT_EQ(cmd_sweep(c, (dir / "schedule.csv").string(), log), kExitOk);
    EXPECT_NE(log.str().find("PASS"), std::string::npos);
    const auto sw = nlohmann::json::parse(read_text_file((dir / "sweep.json").string()));
    EXPECT_GE(sw["slope"].get<double>(), 1.85);
    EXPECT_LE(sw["slope"].get<double>(), 2.15);
    for (const char* key : {"deltas", "errors", "slope", "intercept", "r2", "meta"}) {
        EXPECT_TRUE(sw.contains(key)) << key;
    }
    EXPECT_EQ(read_text_file((dir / "sweep.csv").string()).substr(0, 23), "delta,error,fitted,fit\n");

    // The pulse file alone is enough for a mediated run.
    c.noise = "mediated";
    EXPECT_EQ(cmd_sweep(c, (dir / "schedule.json").string(), log), kExitOk);

    // Synthesized pulses do not pass as first order.
    c.noise = "static";
    c.expect = Expectation::first_order;
    EXPECT_EQ(cmd_sweep(c, (dir / "schedule.csv").string(), log), kExitVerificationFailure);
}

TEST(cli, embedded_config_reproduces_outputs) {
    const fs::path a = scratch("repro_a");
    std::ostringstream log;
    RunConfig c = rz_config(a);
    c.samples = 1024;
    ASSERT_EQ(cmd_synth(c, log), kExitOk);
    ASSERT_EQ(cmd_pulses(c, (a / "coefficients.json").string(), log), kExitOk);
    const auto meta = nlohmann::json::parse(read_text_file((a / "schedule.json").string()))["meta"]["config"];

    const fs::path b = scratch("repro_b");
    RunConfig again = config_from_json(meta);
    again.out = b.string();
    ASSERT_EQ(cmd_synth(again, log), kExitOk);
    ASSERT_EQ(cmd_pulses(again, (b / "coefficients.json").string(), log), kExitOk);
    EXPECT_EQ(read_text_file((a / "schedule.csv").string()), read_text_file((b / "schedule.csv").string()));
}

TEST(cli, baseline_schedule_passes_first_order_expectation) {
    const fs::path dir = scratch("baseline");
    RunConfig c = rz_config(dir);
    const PulseSchedule bl = baseline_pulse(resolve_target(c), 1.0, 4096);
    export_schedule(bl, ScheduleFormat::csv, (dir / "baseline.csv").string());
    std::ostringstream log;
    c.expect = Expectation::first_order;
    EXPECT_EQ(cmd_sweep(c, (dir / "baseline.csv").string(), log), kExitOk);
    c.expect = Expectation::second_order;
    EXPECT_EQ(cmd_sweep(c, (dir / "baseline.csv").string(), log), kExitVerificationFailure);
}

TEST(cli, zero_rotation_gives_valid_coefficients) {
    const fs::path dir = scratch("zero");
    RunConfig c = rz_config(dir);
    c.angle = 0.0;
    std::ostringstream log;
    EXPECT_EQ(cmd_synth(c, log), kExitOk);
}

TEST(cli, identity_coefficients_give_zero_schedule) {
    const fs::path dir = scratch("identity");
    const CoefficientSet id = CoefficientSet::identity(6);
    nlohmann::json j = {{"M", 6}, {"a", nlohmann::json::array()}, {"residual", 0.0}, {"seed", 0}};
    for (const auto& v : id.a) {
        j["a"].push_back(std::vector<double>(v.data(), v.data() + v.size()));
    }
    write_text_file((dir / "c.json").string(), j.dump());
    RunConfig c;
    c.out = dir.string();
    std::ostringstream log;
    ASSERT_EQ(cmd_pulses(c, (dir / "c.json").string(), log), kExitOk);
    for (const auto& s : import_schedule((dir / "schedule.csv").string()).samples) {
        EXPECT_EQ(s.gx, 0.0);
        EXPECT_EQ(s.gz, 0.0);
    }
    EXPECT_NE(log.str().find("magnus_budget=0 within_bound=true"), std::string::npos);
}

TEST(cli, bad_inputs_are_usage_errors) {
    const fs::path dir = scratch("bad");
    RunConfig c;
    c.out = dir.string();
    std::ostringstream log;
    EXPECT_THROW(cmd_pulses(c, (dir / "missing.json").string(), log), UsageError);
    write_text_file((dir / "c.json").string(), R"({"M": 6, "a": [[1, 2]]})");
    EXPECT_THROW(cmd_pulses(c, (dir / "c.json").string(), log), UsageError);
    EXPECT_THROW(cmd_sweep(c, (dir / "missing.csv").string(), log), UsageError);
}

TEST(cli, refused_fit_is_verification_failure) {
    const fs::path dir = scratch("refused");
    RunConfig c = rz_config(dir);
    std::ostringstream log;
    ASSERT_EQ(cmd_synth(c, log), kExitOk);
    ASSERT_EQ(cmd_pulses(c, (dir / "coefficients.json").string(), log), kExitOk);
    c.deltas = logspace(1e-9, 1e-7, 5);
    EXPECT_EQ(cmd_sweep(c, (dir / "schedule.csv").string(), log), kExitVerificationFailure);
    EXPECT_NE(log.str().find("fit refused"), std::string::npos);
}

TEST(cli, tool_exit_codes) {
    const fs::path dir = scratch("tool");
    const std::string out = " --out " + dir.string();
    EXPECT_EQ(run_tool("synth --gate rz --angle 0.0785398 --seed 7" + out), kExitOk);
    EXPECT_EQ(run_tool("synth --M 5 --gate rz" + out), kExitUsage);
    EXPECT_EQ(run_tool("synth --gate nope" + out), kExitUsage);
    EXPECT_EQ(run_tool("synth --bogus-flag" + out), kExitUsage);
    EXPECT_EQ(run_tool(""), kExitUsage);
    EXPECT_EQ(run_tool("--help"), kExitOk);
    EXPECT_EQ(run_tool("pulses " + (dir / "coefficients.json").string() + out), kExitOk);
    EXPECT_EQ(run_tool("pulses " + (dir / "nothing.json").string() + out), kExitUsage);
    EXPECT_EQ(run_tool("sweep " + (dir / "schedule.csv").string() + out), kExitOk);
    EXPECT_EQ(run_tool("sweep " + (dir / "schedule.csv").string() + " --expect first-order" + out),
              kExitVerificationFailure);
    EXPECT_EQ(run_tool("sweep " + (dir / "schedule.csv").string() + " --deltas 1e-9,1e-8,2e-8,5e-8,1e-7" + out),
              kExitVerificationFailure);
}

TEST(cli, tool_flags_override_config_file) {
    const fs::path dir = scratch("override");
    write_text_file((dir / "run.cfg").string(), "gate = rx\nangle = 1.0\nM = 5\nseed = 3\n");
    const std::string base = "synth --config " + (dir / "run.cfg").string() + " --out " + dir.string();
    EXPECT_EQ(run_tool(base), kExitUsage);
    ASSERT_EQ(run_tool(base + " --M 6 --angle 0.5"), kExitOk);
    const auto j = nlohmann::json::parse(read_text_file((dir / "coefficients.json").string()));
    EXPECT_EQ(j["config"]["gate"], "rx");
    EXPECT_EQ(j["config"]["angle"], 0.5);
    EXPECT_EQ(j["config"]["M"], 6);
    EXPECT_EQ(j["config"]["seed"], 3);
}

TEST(cli, demo_is_deterministic_and_complete) {
    const fs::path a = scratch("demo_a");
    const fs::path b = scratch("demo_b");
    std::ostringstream log;
    ASSERT_EQ(cmd_demo(a.string(), log), kExitOk) << log.str();
    ASSERT_EQ(cmd_demo(b.string(), log), kExitOk);
    const auto manifest = nlohmann::json::parse(read_text_file((a / "manifest.json").string()));
    int csv_count = 0;
    for (const auto& name : manifest["files"]) {
        const fs::path fa = a / name.get<std::string>();
        ASSERT_TRUE(fs::exists(fa)) << name;
        if (fa.extension() == ".csv") {
            ++csv_count;
            EXPECT_EQ(read_text_file(fa.string()), read_text_file((b / name.get<std::string>()).string())) << name;
        }
    }
    EXPECT_GE(csv_count, 14);
    for (const char* name : {"rz_pulses.csv", "mediated_sweep.csv", "random_pulses.csv",
                             "static_sweep_seed0.csv", "static_baseline_sweep_seed4.csv"}) {
        EXPECT_TRUE(fs::exists(a / name)) << name;
    }
    for (const auto& check : manifest["checks"]) {
        EXPECT_TRUE(check["pass"].get<bool>()) << check.dump();
    }
    EXPECT_NEAR(manifest["magnus_budget"]["rz"].get<double>(), 7.409412708895295, 1e-9);
}
