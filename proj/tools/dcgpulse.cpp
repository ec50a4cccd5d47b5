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

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

struct Flags {
    std::string config_file;
    std::string gate, matrix_file, noise, out, expect, deltas;
    double angle = 0.0, T = 1.0;
    int M = 6, samples = 4096;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config_file, "key = value config file; flags override it");
    sub->add_option("--gate", f.gate, "rz | rx | ry | identity | random | matrix");
    sub->add_option("--angle", f.angle, "rotation angle in radians");
    sub->add_option("--matrix-file", f.matrix_file, "JSON {\"re\": [[..],[..]], \"im\": [[..],[..]]}");
    sub->add_option("--M", f.M, "collocation points (>= 6, default 6)");
    sub->add_option("--T", f.T, "gate duration (default 1)");
    sub->add_option("--seed", f.seed, "RNG seed (synthesis restarts, random gate, static noise)");
    sub->add_option("--samples", f.samples, "schedule samples (default 4096)");
    sub->add_option("--deltas", f.deltas, "comma-separated noise strengths");
    sub->add_option("--noise", f.noise, "static | mediated");
    sub->add_option("--expect", f.expect, "second-order | first-order");
    sub->add_option("--out", f.out, "output directory (default .)");
}

dcg::RunConfig resolve(CLI::App* sub, const Flags& f) {
    dcg::RunConfig c;
    if (!f.config_file.empty()) {
        c = dcg::parse_config_text(dcg::read_text_file(f.config_file), c);
    }
    const auto given = [&](const char* name) { return sub->count(name) > 0; };
    if (given("--gate")) c.gate = f.gate;
    if (given("--angle")) c.angle = f.angle;
    if (given("--matrix-file")) {
        c.matrix_file = f.matrix_file;
        if (!given("--gate")) c.gate = "matrix";
    }
    if (given("--M")) c.M = f.M;
    if (given("--T")) c.T = f.T;
    if (given("--seed")) c.seed = f.seed;
    if (given("--samples")) c.samples = f.samples;
    if (given("--deltas")) c.deltas = dcg::parse_delta_list(f.deltas);
    if (given("--noise")) c.noise = f.noise;
    if (given("--expect")) dcg::set_config_value(c, "expect", f.expect);
    if (given("--out")) c.out = f.out;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamically corrected single-qubit pulse synthesis and verification"};
    app.require_subcommand(1);
    Flags f;
    std::string input;

    auto* synth = app.add_subcommand("synth", "synthesize coefficients -> <out>/coefficients.json");
    add_common(synth, f);

    auto* pulses = app.add_subcommand(
        "pulses", "extract control fields -> <out>/schedule.csv (columns t,gx,gy,gz) and schedule.json");
    add_common(pulses, f);
    pulses->add_option("coefficients", input, "coefficients JSON from synth")->required();

    auto* sweep = app.add_subcommand(
        "sweep", "noise-strength sweep -> <out>/sweep.csv (columns delta,error,fitted,fit) and sweep.json");
    add_common(sweep, f);
    sweep->add_option("schedule", input, "schedule CSV or JSON")->required();

    auto* demo = app.add_subcommand("demo", "fixed-seed pipeline writing pulse and sweep data files");
    add_common(demo, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? dcg::kExitOk : dcg::kExitUsage;
    }

    try {
        if (*synth) return dcg::cmd_synth(resolve(synth, f), std::cout);
        if (*pulses) return dcg::cmd_pulses(resolve(pulses, f), input, std::cout);
        if (*sweep) return dcg::cmd_sweep(resolve(sweep, f), input, std::cout);
        if (*demo) return dcg::cmd_demo(resolve(demo, f).out, std::cout);
    } catch (const dcg::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return dcg::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return dcg::kExitUsage;
}
