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
#ifndef MTSC_CONTROLLERS_HPP
#define MTSC_CONTROLLERS_HPP

#include <span>
#include <string>
#include <vector>

#include "mtsc/convex_kernel.hpp"
#include "mtsc/system_model.hpp"

namespace mtsc {

/// What a controller was allowed to observe.
enum class InfoUsed { CausalNoise, WindowPredictions, FullNoise };

const char* to_string(InfoUsed info);

struct ControllerRun {
    std::string name;
    Trajectory traj;
    double total_cost = 0.0;
    std::vector<double> per_step_cost;
    InfoUsed info = InfoUsed::FullNoise;
    double solver_gap = 0.0;  // sum of certified gaps of every solve behind the run
    int solves = 0;
};

/// Builds the run record (costs, per-step costs) from fast and slow actions.
ControllerRun make_run(std::string name, InfoUsed info, const SystemSpec& spec, const CostSpec& costs,
                       const NoiseTrace& noise, const Sequence& f, const Sequence& s);
ControllerRun make_run(std::string name, InfoUsed info, const SystemSpec& spec, const CostSpec& costs,
                       Trajectory traj);

// ---------------------------------------------------------------- MRPC

/// min_s  L c_s(s) + scale * sum_t c_f(Bf^{-1}(Bs s + d_t))  over one slow
/// window of L = disturbances.size() steps. With scale = 1 and predicted
/// disturbances this is the slow controller's problem; with true disturbances
/// it is the per-window piece of the fast/slow lower and upper bounds.
AffineNormProgram slow_window_program(const SystemSpec& spec, const CostSpec& costs,
                                      std::span<const Vec> disturbances, double fast_scale = 1.0);

struct SlowDecision {
    Vec s;
    double objective = 0.0;
    double gap = 0.0;
};

SlowDecision mrpc_slow_action(const SystemSpec& spec, const CostSpec& costs, std::span<const Vec> predictions,
                              double tol = kDefaultSolveTol);

/// f = -Bf^{-1}(Bs s + w), by a linear solve against Bf.
Vec mrpc_fast_action(const SystemSpec& spec, const Vec& slow, const Vec& w);

struct MrpcOptions {
    double tol = kDefaultSolveTol;
    bool flip_fast_sign = false;  // mutation hook for validating the checks themselves
};

/// Online form of MRPC. The slow half sees only the predictions of the
/// current window; the fast half sees only the disturbance of the current step.
class MrpcController {
public:
    MrpcController(const SystemSpec& spec, const CostSpec& costs, MrpcOptions opts = {});

    const SlowDecision& begin_window(std::span<const Vec> predictions);
    /// Also cancels A x_{t-1}, which is zero in exact arithmetic.
    Vec fast_action(const Vec& w, const Vec& x_prev) const;

    const Vec& slow_action() const { return current_.s; }

private:
    const SystemSpec& spec_;
    const CostSpec& costs_;
    MrpcOptions opts_;
    SlowDecision current_;
};

struct MrpcRun {
    ControllerRun run;
    std::vector<SlowDecision> windows;
};

MrpcRun run_mrpc(const SystemSpec& spec, const CostSpec& costs, const NoiseTrace& noise,
                 const PredictionTrace& predictions, MrpcOptions opts = {});

// ---------------------------------------------------------------- offline

/// Offline optimum of the two-timescale problem with the whole trace known.
ControllerRun run_offline_opt(const SystemSpec& spec, const CostSpec& costs, const NoiseTrace& noise,
                              double tol = kDefaultSolveTol);

/// Offline optimum of the single-timescale problem (no slow action), solved
/// over the fast actions with the state substituted out through the iterated
/// dynamics.
ControllerRun run_fast_only_opt(const SystemSpec& spec, const CostSpec& costs, const NoiseTrace& noise,
                                double tol = kDefaultSolveTol);

/// Slow actions pinned to zero, f_t = -Bf^{-1} w_t.
ControllerRun run_baseline_zero_slow(const SystemSpec& spec, const CostSpec& costs, const NoiseTrace& noise);

// ---------------------------------------------------------------- SOCO

/// Smoothed online convex optimization form of the single-timescale problem:
///   sum_t c_x(y_t + v_t) + c_f(Bf^{-1}(y_t - A y_{t-1})),  y_0 = 0.
struct SocoProblem {
    SystemSpec spec;
    CostSpec costs;  // cf must be a norm (the movement penalty)
    NoiseTrace noise;
    Sequence v;      // v_t = A v_{t-1} + w_t

    int T() const { return spec.T(); }
    int n() const { return spec.n(); }
    double hit_cost(const Vec& y, int t) const;
    double move_cost(const Vec& y, const Vec& y_prev) const;
    double objective(const Sequence& y) const;
};

SocoProblem make_soco_problem(const SystemSpec& spec, const CostSpec& costs, const NoiseTrace& noise);

struct SocoReduction {
    SocoProblem problem;
    Sequence y;
};

SocoReduction soco_reduce(const SystemSpec& spec, const CostSpec& costs, const Sequence& f, const NoiseTrace& noise);

/// f_t = Bf^{-1}(y_t - A y_{t-1}) with y_0 = 0.
Sequence soco_lift(const SystemSpec& spec, const Sequence& y);

struct WindowPlan {
    Sequence y;  // y_first .. y_last
    double objective = 0.0;
    double gap = 0.0;
};

/// Minimizes the window objective over [first, last] (0-based, inclusive)
/// anchored at the committed point y_{first-1}.
WindowPlan fhc_window_solve(const SocoProblem& soco, int first, int last, const Vec& anchor,
                            double tol = kDefaultSolveTol);

struct SocoRun {
    ControllerRun run;
    Sequence y;
    double soco_cost = 0.0;
};

SocoRun soco_run_from_points(const SocoProblem& soco, std::string name, InfoUsed info, Sequence y,
                             double gap, int solves);

/// Full-horizon optimum of the SOCO problem.
SocoRun soco_offline_opt(const SocoProblem& soco, double tol = kDefaultSolveTol);

/// Recompute times of FHC phase `phase` (1..w+1) as 0-based window starts.
std::vector<std::pair<int, int>> fhc_windows(int T, int w, int phase);

SocoRun run_fhc(const SocoProblem& soco, int w, int phase, double tol = kDefaultSolveTol);

struct AfhcRun {
    SocoRun average;
    std::vector<SocoRun> phases;
    double mean_phase_cost = 0.0;
};

AfhcRun run_afhc(const SocoProblem& soco, int w, double tol = kDefaultSolveTol);

}  // namespace mtsc

#endif  // MTSC_CONTROLLERS_HPP
