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
#include "mtsc/controllers.hpp"

#include <algorithm>
#include <cmath>

#include "term_builder.hpp"

namespace mtsc {

using detail::TermBuilder;

const char* to_string(InfoUsed info) {
    switch (info) {
        case InfoUsed::CausalNoise: return "causal-noise";
        case InfoUsed::WindowPredictions: return "window-predictions";
        case InfoUsed::FullNoise: return "full-noise";
    }
    return "?";
}

namespace {

/// Adds multiplicity * cost(G z + h) evaluated at timestep t.
void add_stage_term(AffineNormProgram& prog, const StageCost& cost, int t, const SparseMat& G, const Vec& h,
                    double multiplicity = 1.0) {
    if (cost.is_norm()) {
        const auto& nc = cost.as_norm();
        prog.add_norm(nc.weight * multiplicity, nc.p, G, h);
        return;
    }
    const auto& q = cost.as_quad();
    const Vec* c = q.center_at(t);
    prog.add_quad(q.m * multiplicity, G, c ? Vec(h - *c) : h, q.c0 * multiplicity);
}

const NormCost& require_norm(const StageCost& cost, const char* what) {
    if (!cost.is_norm()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be a norm cost");
    return cost.as_norm();
}

void require_length(const Sequence& seq, int T, const char* what) {
    if (seq.size() != static_cast<std::size_t>(T))
        throw Error(ErrorCode::LengthMismatch, std::string(what) + " must have T entries");
}

}  // namespace

ControllerRun make_run(std::string name, InfoUsed info, const SystemSpec& spec, const CostSpec& costs,
                       const NoiseTrace& noise, const Sequence& f, const Sequence& s) {
    return make_run(std::move(name), info, spec, costs, roll_forward(spec, f, s, noise));
}

ControllerRun make_run(std::string name, InfoUsed info, const SystemSpec& spec, const CostSpec& costs,
                       Trajectory traj) {
    ControllerRun run;
    run.name = std::move(name);
    run.info = info;
    run.traj = std::move(traj);
    run.per_step_cost = per_step_costs(spec, costs, run.traj);
    for (double c : run.per_step_cost) run.total_cost += c;
    return run;
}

// ---------------------------------------------------------------- MRPC

AffineNormProgram slow_window_program(const SystemSpec& spec, const CostSpec& costs,
                                      std::span<const Vec> disturbances, double fast_scale) {
    const int n = spec.n();
    const auto& cf = require_norm(costs.cf, "c_f");
    const auto& cs = require_norm(costs.cs, "c_s");
    if (disturbances.empty()) throw Error(ErrorCode::LengthMismatch, "slow window needs at least one step");
    AffineNormProgram prog(n);
    const auto L = static_cast<double>(disturbances.size());
    prog.add_norm(cs.weight * L, cs.p, Mat(Mat::Identity(n, n)), Vec::Zero(n));
    const Mat G = spec.Bf_inv() * spec.Bs();
    for (const auto& d : disturbances) {
        if (d.size() != n) throw Error(ErrorCode::LengthMismatch, "disturbance of wrong dimension");
        prog.add_norm(cf.weight * fast_scale, cf.p, G, spec.solve_Bf(d));
    }
    return prog;
}

SlowDecision mrpc_slow_action(const SystemSpec& spec, const CostSpec& costs, std::span<const Vec> predictions,
                              double tol) {
    require_norm(costs.cx, "c_x");
    const SolveReport rep = solve(slow_window_program(spec, costs, predictions), tol);
    return {rep.z, rep.objective, rep.certified_gap};
}

Vec mrpc_fast_action(const SystemSpec& spec, const Vec& slow, const Vec& w) {
    return -spec.solve_Bf(spec.Bs() * slow + w);
}

MrpcController::MrpcController(const SystemSpec& spec, const CostSpec& costs, MrpcOptions opts)
    : spec_(spec), costs_(costs), opts_(opts) {
    if (!costs.all_norms()) throw Error(ErrorCode::InvalidArgument, "MRPC requires norm costs");
    current_.s = Vec::Zero(spec.n());
}

const SlowDecision& MrpcController::begin_window(std::span<const Vec> predictions) {
    current_ = mrpc_slow_action(spec_, costs_, predictions, opts_.tol);
    return current_;
}

Vec MrpcController::fast_action(const Vec& w, const Vec& x_prev) const {
    Vec f = mrpc_fast_action(spec_, current_.s, w);
    if (opts_.flip_fast_sign) f = -f;
    return f - spec_.solve_Bf(spec_.A() * x_prev);
}

MrpcRun run_mrpc(const SystemSpec& spec, const CostSpec& costs, const NoiseTrace& noise,
                 const PredictionTrace& predictions, MrpcOptions opts) {
    require_length(noise.w, spec.T(), "noise trace");
    require_length(predictions.what, spec.T(), "prediction trace");
    MrpcController ctrl(spec, costs, opts);
    MrpcRun out;
    Trajectory traj;
    traj.x.push_back(Vec::Zero(spec.n()));
    double gap = 0.0;
    for (const auto& win : slow_windows(spec.T(), spec.k())) {
        const std::span<const Vec> window_predictions(predictions.what.data() + win.start,
                                                      static_cast<std::size_t>(win.length));
        const SlowDecision& d = ctrl.begin_window(window_predictions);
        out.windows.push_back(d);
        gap += d.gap;
        for (int t = win.start; t < win.start + win.length; ++t) {
            const Vec& x = traj.x.back();
            traj.s.push_back(d.s);
            traj.f.push_back(ctrl.fast_action(noise.w[t], x));
            traj.x.push_back(spec.A() * x + spec.Bf() * traj.f.back() + spec.Bs() * d.s + noise.w[t]);
        }
    }
    out.run = make_run("mrpc", InfoUsed::WindowPredictions, spec, costs, std::move(traj));
    out.run.solver_gap = gap;
    out.run.solves = static_cast<int>(out.windows.size());
    return out;
}

// ---------------------------------------------------------------- offline

ControllerRun run_offline_opt(const SystemSpec& spec, const CostSpec& costs, const NoiseTrace& noise, double tol) {
    require_length(noise.w, spec.T(), "noise trace");
    const int n = spec.n();
    const int T = spec.T();
    const auto windows = slow_windows(T, spec.k());
    // Decision vector: x_1..x_T, then one slow action per window. The fast
    // action is the affine image f_t = Bf^{-1}(x_t - A x_{t-1} - Bs s_r - w_t).
    const int x_cols = n * T;
    const int dims = x_cols + n * static_cast<int>(windows.size());
    AffineNormProgram prog(dims);
    const Mat Binv = spec.Bf_inv();
    const Mat BinvA = Binv * spec.A();
    const Mat BinvBs = Binv * spec.Bs();
    for (std::size_t r = 0; r < windows.size(); ++r) {
        const int s_col = x_cols + n * static_cast<int>(r);
        const auto& win = windows[r];
        for (int t = win.start; t < win.start + win.length; ++t) {
            add_stage_term(prog, costs.cx, t, TermBuilder(n, dims).identity(n * t).build(), Vec::Zero(n));
            TermBuilder fb(n, dims);
            fb.block(n * t, Binv).block(s_col, -BinvBs);
            if (t > 0) fb.block(n * (t - 1), -BinvA);
            add_stage_term(prog, costs.cf, t, fb.build(), -spec.solve_Bf(noise.w[t]));
        }
        const SparseMat S = TermBuilder(n, dims).identity(s_col).build();
        if (costs.cs.is_norm()) {
            add_stage_term(prog, costs.cs, win.start, S, Vec::Zero(n), win.length);
        } else {
            for (int t = win.start; t < win.start + win.length; ++t) add_stage_term(prog, costs.cs, t, S, Vec::Zero(n));
        }
    }
    const SolveReport rep = solve(prog, tol);

    Sequence f(static_cast<std::size_t>(T));
    Sequence s(static_cast<std::size_t>(T));
    for (std::size_t r = 0; r < windows.size(); ++r) {
        const Vec sr = rep.z.segment(x_cols + n * static_cast<int>(r), n);
        for (int t = windows[r].start; t < windows[r].start + windows[r].length; ++t) s[t] = sr;
    }
    // Keep the solver's states rather than replaying f.
    Trajectory traj;
    traj.x.push_back(Vec::Zero(n));
    for (int t = 0; t < T; ++t) {
        traj.x.push_back(rep.z.segment(n * t, n));
        f[t] = spec.solve_Bf(traj.x[t + 1] - spec.A() * traj.x[t] - spec.Bs() * s[t] - noise.w[t]);
    }
    traj.f = std::move(f);
    traj.s = std::move(s);
    ControllerRun run = make_run("offline_opt", InfoUsed::FullNoise, spec, costs, std::move(traj));
    run.solver_gap = rep.certified_gap;
    run.solves = 1;
    return run;
}

ControllerRun run_fast_only_opt(const SystemSpec& spec, const CostSpec& costs, const NoiseTrace& noise, double tol) {
    require_length(noise.w, spec.T(), "noise trace");
    const int n = spec.n();
    const int T = spec.T();
    const int dims = n * T;
    // x_t = sum_{i<=t} A^{t-i} (Bf f_i + w_i)
    std::vector<Mat> gain(static_cast<std::size_t>(T));  // A^j Bf
    gain[0] = spec.Bf();
    for (int j = 1; j < T; ++j) gain[j] = spec.A() * gain[j - 1];
    AffineNormProgram prog(dims);
    Vec v = Vec::Zero(n);
    for (int t = 0; t < T; ++t) {
        v = spec.A() * v + noise.w[t];
        TermBuilder xb(n, dims);
        for (int i = 0; i <= t; ++i) xb.block(n * i, gain[t - i]);
        add_stage_term(prog, costs.cx, t, xb.build(), v);
        add_stage_term(prog, costs.cf, t, TermBuilder(n, dims).identity(n * t).build(), Vec::Zero(n));
    }
    const SolveReport rep = solve(prog, tol);
    Sequence f(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) f[t] = rep.z.segment(n * t, n);
    ControllerRun run = make_run("fast_only_opt", InfoUsed::FullNoise, spec, costs, noise, f, zeros(T, n));
    run.solver_gap = rep.certified_gap;
    run.solves = 1;
    return run;
}

ControllerRun run_baseline_zero_slow(const SystemSpec& spec, const CostSpec& costs, const NoiseTrace& noise) {
    require_length(noise.w, spec.T(), "noise trace");
    Sequence f;
    f.reserve(noise.w.size());
    for (const auto& w : noise.w) f.push_back(-spec.solve_Bf(w));
    return make_run("zero_slow", InfoUsed::CausalNoise, spec, costs, noise, f, zeros(spec.T(), spec.n()));
}

// ---------------------------------------------------------------- SOCO

double SocoProblem::hit_cost(const Vec& y, int t) const { return costs.cx.eval(y + v[t], t); }

double SocoProblem::move_cost(const Vec& y, const Vec& y_prev) const {
    return costs.cf.eval(spec.solve_Bf(y - spec.A() * y_prev));
}

double SocoProblem::objective(const Sequence& y) const {
    require_length(y, T(), "SOCO point sequence");
    double total = 0.0;
    Vec prev = Vec::Zero(n());
    for (int t = 0; t < T(); ++t) {
        total += hit_cost(y[t], t) + move_cost(y[t], prev);
        prev = y[t];
    }
    return total;
}

SocoProblem make_soco_problem(const SystemSpec& spec, const CostSpec& costs, const NoiseTrace& noise) {
    require_norm(costs.cf, "c_f (movement penalty)");
    require_length(noise.w, spec.T(), "noise trace");
    SocoProblem soco{spec, costs, noise, {}};
    Vec v = Vec::Zero(spec.n());
    for (const auto& w : noise.w) {
        v = spec.A() * v + w;
        soco.v.push_back(v);
    }
    return soco;
}

SocoReduction soco_reduce(const SystemSpec& spec, const CostSpec& costs, const Sequence& f, const NoiseTrace& noise) {
    require_length(f, spec.T(), "fast actions");
    SocoReduction out{make_soco_problem(spec, costs, noise), {}};
    Vec y = Vec::Zero(spec.n());
    for (const auto& ft : f) {
        y = spec.A() * y + spec.Bf() * ft;
        out.y.push_back(y);
    }
    return out;
}

Sequence soco_lift(const SystemSpec& spec, const Sequence& y) {
    Sequence f;
    f.reserve(y.size());
    Vec prev = Vec::Zero(spec.n());
    for (const auto& yt : y) {
        f.push_back(spec.solve_Bf(yt - spec.A() * prev));
        prev = yt;
    }
    return f;
}

WindowPlan fhc_window_solve(const SocoProblem& soco, int first, int last, const Vec& anchor, double tol) {
    if (first < 0 || last < first || last >= soco.T())
        throw Error(ErrorCode::InvalidArgument, "fhc_window_solve: window outside the horizon");
    const int n = soco.n();
    const int len = last - first + 1;
    const int dims = n * len;
    const Mat& Binv = soco.spec.Bf_inv();
    const Mat BinvA = Binv * soco.spec.A();
    AffineNormProgram prog(dims);
    for (int j = 0; j < len; ++j) {
        const int t = first + j;
        add_stage_term(prog, soco.costs.cx, t, TermBuilder(n, dims).identity(n * j).build(), soco.v[t]);
        TermBuilder mb(n, dims);
        mb.block(n * j, Binv);
        Vec h = Vec::Zero(n);
        if (j > 0) {
            mb.block(n * (j - 1), -BinvA);
        } else {
            h = -BinvA * anchor;
        }
        add_stage_term(prog, soco.costs.cf, t, mb.build(), h);
    }
    const SolveReport rep = solve(prog, tol);
    WindowPlan plan;
    for (int j = 0; j < len; ++j) plan.y.push_back(rep.z.segment(n * j, n));
    plan.objective = rep.objective;
    plan.gap = rep.certified_gap;
    return plan;
}

SocoRun soco_run_from_points(const SocoProblem& soco, std::string name, InfoUsed info, Sequence y, double gap,
                             int solves) {
    SocoRun out;
    out.run = make_run(std::move(name), info, soco.spec, soco.costs, soco.noise, soco_lift(soco.spec, y),
                       zeros(soco.T(), soco.n()));
    out.run.solver_gap = gap;
    out.run.solves = solves;
    out.soco_cost = soco.objective(y);
    out.y = std::move(y);
    return out;
}

SocoRun soco_offline_opt(const SocoProblem& soco, double tol) {
    WindowPlan plan = fhc_window_solve(soco, 0, soco.T() - 1, Vec::Zero(soco.n()), tol);
    return soco_run_from_points(soco, "soco_opt", InfoUsed::FullNoise, std::move(plan.y), plan.gap, 1);
}

std::vector<std::pair<int, int>> fhc_windows(int T, int w, int phase) {
    if (w < 0 || phase < 1 || phase > w + 1) throw Error(ErrorCode::InvalidArgument, "FHC phase must be in 1..w+1");
    std::vector<std::pair<int, int>> out;
    if (phase > 1) out.emplace_back(0, std::min(phase - 1, T) - 1);
    for (int s = phase - 1; s < T; s += w + 1) out.emplace_back(s, std::min(s + w, T - 1));
    return out;
}

SocoRun run_fhc(const SocoProblem& soco, int w, int phase, double tol) {
    Sequence y;
    y.reserve(static_cast<std::size_t>(soco.T()));
    Vec anchor = Vec::Zero(soco.n());
    double gap = 0.0;
    int solves = 0;
    for (const auto& [first, last] : fhc_windows(soco.T(), w, phase)) {
        WindowPlan plan = fhc_window_solve(soco, first, last, anchor, tol);
        gap += plan.gap;
        ++solves;
        for (auto& yt : plan.y) y.push_back(std::move(yt));
        anchor = y.back();
    }
    return soco_run_from_points(soco, "fhc_w" + std::to_string(w) + "_p" + std::to_string(phase),
                                InfoUsed::WindowPredictions, std::move(y), gap, solves);
}

AfhcRun run_afhc(const SocoProblem& soco, int w, double tol) {
    AfhcRun out;
    Sequence avg = zeros(soco.T(), soco.n());
    double gap = 0.0;
    int solves = 0;
    for (int phase = 1; phase <= w + 1; ++phase) {
        out.phases.push_back(run_fhc(soco, w, phase, tol));
        const auto& ph = out.phases.back();
        for (int t = 0; t < soco.T(); ++t) avg[t] += ph.y[t];
        gap += ph.run.solver_gap;
        solves += ph.run.solves;
        out.mean_phase_cost += ph.run.total_cost;
    }
    const double count = w + 1.0;
    for (auto& yt : avg) yt /= count;
    out.mean_phase_cost /= count;
    out.average = soco_run_from_points(soco, "afhc_w" + std::to_string(w), InfoUsed::WindowPredictions,
                                       std::move(avg), gap / count, solves);
    return out;
}

}  // namespace mtsc
