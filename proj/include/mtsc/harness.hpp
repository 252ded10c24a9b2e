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
#ifndef MTSC_HARNESS_HPP
#define MTSC_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mtsc/analysis.hpp"
#include "mtsc/noise.hpp"

namespace mtsc::harness {

enum class ControllerKind { Mrpc, Afhc, Fhc, OfflineOpt, ZeroSlow };

struct ControllerConfig {
    ControllerKind kind = ControllerKind::Mrpc;
    int w = 0;
    int phase = 1;
    bool thm1_report = false;

    /// Row label for a given window length (afhc_w2, fhc_w2_p1, ...).
    std::string label(int window) const;
};

/// Axes of the parameter grid; an empty axis keeps the base value.
struct SweepGrid {
    std::vector<int> T;
    std::vector<int> k;
    std::vector<int> w;
    std::vector<double> epsilon;
    std::vector<double> noise_scale;

    bool empty() const { return T.empty() && k.empty() && w.empty() && epsilon.empty() && noise_scale.empty(); }
};

struct ScenarioConfig {
    std::string name;
    int n = 1;
    int T = 1;
    int k = 1;
    Mat A;
    Mat Bf;
    Mat Bs;
    double invertibility_threshold = SystemSpec::kDefaultInvertibilityThreshold;
    CostSpec costs;
    NoiseModel noise;
    PredictionModel predictions;
    std::vector<ControllerConfig> controllers;
    SweepGrid sweep;
    std::string output_dir = "results";
    std::vector<std::uint64_t> seeds;
    double tol = kDefaultSolveTol;
};

/// Throws Error(IoError | ParseError | ValidationError). Parse errors carry
/// line and column; validation errors name the offending field.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<config>");
/// Canonical JSON text; parse_config(dump_config(c)) reproduces c.
std::string dump_config(const ScenarioConfig& config);
void validate_config(const ScenarioConfig& config);

struct RunOptions {
    std::optional<std::string> out_dir;
    std::int64_t seed_offset = 0;
    std::optional<double> tol;
    bool dump_trajectories = false;
    int jobs = 1;  // 0 = hardware concurrency
    bool corrupt_mrpc = false;
    bool quiet = false;
};

struct SweepPoint {
    int T = 1;
    int k = 1;
    std::optional<int> w;
    std::optional<double> epsilon;
    std::optional<double> noise_scale;

    /// "T=40;k=5" style tag listing only the swept axes.
    std::string label(const SweepGrid& grid) const;
};

/// Grid points in deterministic order: T outermost, then k, w, epsilon, noise_scale.
std::vector<SweepPoint> sweep_points(const ScenarioConfig& config);

struct RunRecord {
    std::string scenario;
    std::uint64_t seed = 0;
    std::string controller;
    int T = 0;
    int k = 0;
    int n = 0;
    std::optional<double> total_cost;
    std::optional<double> per_step_cost;
    std::optional<double> opt_cost;
    std::optional<double> thm2_factor;
    std::optional<double> thm2_additive;
    std::optional<double> thm1_bound;
    std::optional<double> lemma2_lb;
    std::optional<double> emp_cr;
    std::optional<double> pred_error;
    std::optional<double> solver_gap;
    std::string error;
    // Outside the CSV: plot columns and timing.
    std::optional<double> upper_bound_per_step;
    double duration_ms = 0.0;
    bool check_failed = false;
};

const std::string& csv_header();
std::string csv_row(const RunRecord& record);

struct ScenarioResult {
    std::vector<RunRecord> rows;
    std::string csv_path;
    int failed_rows = 0;
};

/// Runs every (sweep point, seed) and writes <out>/<name>.csv plus the
/// .timing.csv, .bounds.csv and .meta.json sidecars (and trajectories when
/// asked). Per-instance failures are recorded in the error column.
ScenarioResult run_scenario(const ScenarioConfig& config, const RunOptions& options, std::ostream& log);

/// Full property corpus, or the checks derived from one scenario. Prints a
/// summary table; returns 0 when nothing is violated and 1 otherwise.
int validate_suite(const ScenarioConfig* config, const RunOptions& options, std::ostream& out);

/// Pretty summary of a results CSV. Throws Error(IoError | ParseError).
void show_csv(const std::string& path, std::ostream& out);

/// Runs f(0..count-1) on up to `jobs` threads; exceptions propagate after join.
void parallel_for(int count, int jobs, const std::function<void(int)>& f);

}  // namespace mtsc::harness

#endif  // MTSC_HARNESS_HPP
