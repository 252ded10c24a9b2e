/*
 Copyright 2026 The mtsc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "mtsc/c_api.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfigError = 2;

struct Flags {
    std::string config;
    std::string csv;
    std::string out_dir;
    long long seed_offset = 0;
    double tol = 0.0;
    bool dump_trajectories = false;
    int jobs = 1;
    bool corrupt_mrpc = false;
};

int report(mtsc_status s) {
    std::fprintf(stderr, "error: %s: %s\n", mtsc_status_name(s), mtsc_last_error());
    switch (s) {
        case MTSC_E_PARSE:
        case MTSC_E_VALIDATION:
        case MTSC_E_IO:
        case MTSC_E_INVALID_ARGUMENT: return kExitConfigError;
        default: return kExitCheckFailed;
    }
}

void to_stderr(const char* text, size_t length, void*) { std::fwrite(text, 1, length, stderr); }

mtsc_run_options options_from(const Flags& f) {
    mtsc_run_options o;
    mtsc_run_options_init(&o);
    o.out_dir = f.out_dir.empty() ? nullptr : f.out_dir.c_str();
    o.seed_offset = f.seed_offset;
    o.tol = f.tol;
    o.dump_trajectories = f.dump_trajectories;
    o.jobs = f.jobs;
    o.corrupt_mrpc = f.corrupt_mrpc;
    return o;
}

int run(const Flags& f, bool require_grid) {
    mtsc_scenario* sc = nullptr;
    if (mtsc_status s = mtsc_scenario_load(f.config.c_str(), &sc)) return report(s);
    int has_grid = 0;
    mtsc_scenario_has_sweep(sc, &has_grid);
    if (require_grid && !has_grid) {
        std::fprintf(stderr, "error: ValidationError: sweep: %s defines no sweep grid\n", f.config.c_str());
        mtsc_scenario_free(sc);
        return kExitConfigError;
    }
    const mtsc_run_options o = options_from(f);
    mtsc_run_summary summary{};
    const mtsc_status s = mtsc_scenario_run(sc, &o, to_stderr, nullptr, &summary);
    mtsc_scenario_free(sc);
    if (s) return report(s);
    std::printf("%s\n", summary.csv_path);
    return summary.failed_rows > 0 ? kExitCheckFailed : kExitOk;
}

int validate(const Flags& f) {
    mtsc_scenario* sc = nullptr;
    if (!f.config.empty())
        if (mtsc_status s = mtsc_scenario_load(f.config.c_str(), &sc)) return report(s);
    const mtsc_run_options o = options_from(f);
    int passed = 0;
    const mtsc_status s = mtsc_validate(sc, &o, nullptr, nullptr, &passed);
    mtsc_scenario_free(sc);
    std::fflush(stdout);
    if (s) return report(s);
    return passed ? kExitOk : kExitCheckFailed;
}

int show(const Flags& f) {
    if (mtsc_status s = mtsc_show(f.csv.c_str(), nullptr, nullptr)) return report(s);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-timescale control simulator and bound checker"};
    app.set_version_flag("--version", std::string(mtsc_version()));
    app.require_subcommand(1);
    Flags f;

    auto common = [&f](CLI::App* sub) {
        sub->add_option("--out", f.out_dir, "Output directory");
        sub->add_option("--seed-offset", f.seed_offset, "Added to every configured seed");
        sub->add_option("--tol", f.tol, "Solver tolerance")->check(CLI::PositiveNumber);
        sub->add_flag("--dump-trajectories", f.dump_trajectories, "Write per-run trajectory CSVs");
        sub->add_option("--jobs", f.jobs, "Parallel tasks (0 = all cores)")->check(CLI::NonNegativeNumber);
        sub->add_flag("--corrupt-mrpc", f.corrupt_mrpc)->group("");
    };

    CLI::App* run_cmd = app.add_subcommand("run", "Run a scenario and write results CSV");
    run_cmd->add_option("config", f.config, "Scenario file")->required();
    common(run_cmd);
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a scenario over its sweep grid");
    sweep_cmd->add_option("config", f.config, "Scenario file")->required();
    common(sweep_cmd);
    CLI::App* validate_cmd = app.add_subcommand("validate", "Run the property checks");
    validate_cmd->add_option("config", f.config, "Scenario file (default: built-in corpus)");
    common(validate_cmd);
    CLI::App* show_cmd = app.add_subcommand("show", "Summarize a results CSV");
    show_cmd->add_option("csv", f.csv, "Results file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    if (*run_cmd) return run(f, false);
    if (*sweep_cmd) return run(f, true);
    if (*validate_cmd) return validate(f);
    return show(f);
}
