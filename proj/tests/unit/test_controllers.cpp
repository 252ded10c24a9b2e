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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "../oracles.hpp"
#include "mtsc/controllers.hpp"
#include "mtsc/corpus.hpp"
#include "mtsc/noise.hpp"

using namespace mtsc;

namespace {

Mat s1(double v) { return Mat::Constant(1, 1, v); }
Vec v1(double v) { return Vec::Constant(1, v); }

NoiseTrace scalar_noise(std::initializer_list<double> xs) {
    NoiseTrace w;
    for (double x : xs) w.w.push_back(v1(x));
    return w;
}

CostSpec abs_costs(double wx = 1, double wf = 1, double ws = 1) {
    return {NormCost{NormKind::L1, wx}, NormCost{NormKind::L1, wf}, NormCost{NormKind::L1, ws}};
}

/// Scalar two-timescale cost written out from the dynamics, decision vector
/// (f_1..f_T, s per window).
double scalar_cost(const Eigen::VectorXd& z, double a, double bf, double bs, const std::vector<double>& w, int k,
                   double wx, double wf, double ws) {
    const int T = static_cast<int>(w.size());
    double x = 0.0, total = 0.0;
    for (int t = 0; t < T; ++t) {
        const double f = z(t), s = z(T + t / k);
        x = a * x + bf * f + bs * s + w[t];
        total += wx * std::abs(x) + wf * std::abs(f) + ws * std::abs(s);
    }
    return total;
}

/// The same cost as affine terms in z = (f_0..f_{T-1}, s_0..s_{W-1}).
std::vector<oracle::Term> scalar_terms(double a, double bf, double bs, const std::vector<double>& w, int k, double wx,
                                       double wf, double ws) {
    const int T = static_cast<int>(w.size()), dims = T + (T + k - 1) / k;
    std::vector<oracle::Term> out;
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(dims);
    double h = 0.0;
    for (int t = 0; t < T; ++t) {
        row *= a;
        h = a * h + w[t];
        row(t) += bf;
        row(T + t / k) += bs;
        out.push_back({wx, 1, row, Eigen::VectorXd::Constant(1, h)});
        Eigen::RowVectorXd ef = Eigen::RowVectorXd::Zero(dims), es = Eigen::RowVectorXd::Zero(dims);
        ef(t) = 1.0;
        es(T + t / k) = 1.0;
        out.push_back({wf, 1, ef, Eigen::VectorXd::Zero(1)});
        out.push_back({ws, 1, es, Eigen::VectorXd::Zero(1)});
    }
    return out;
}

}  // namespace

TEST_CASE("slow action examples") {
    SystemSpec spec(1, 2, 2, s1(0.5), s1(1), s1(1));
    SUBCASE("zero predictions") {
        const Sequence p{v1(0), v1(0)};
        const SlowDecision d = mrpc_slow_action(spec, abs_costs(), p);
        CHECK(std::abs(d.objective) < 1e-8);
        CHECK(std::abs(d.s(0)) < 1e-6);
    }
    SUBCASE("flat minimizer set") {
        const Sequence p{v1(4), v1(4)};
        const SlowDecision d = mrpc_slow_action(spec, abs_costs(), p);
        CHECK(d.objective == doctest::Approx(8.0).epsilon(1e-8));
        CHECK(std::abs(d.objective -
                       oracle::grid_min_1d([](double s) { return 2 * std::abs(s) + 2 * std::abs(s + 4); }, -10, 10)) <
              1e-6);
    }
    SUBCASE("unique minimizer") {
        SystemSpec spec2(1, 2, 2, s1(0.5), s1(1), s1(2));
        const Sequence p{v1(4), v1(4)};
        const SlowDecision d = mrpc_slow_action(spec2, abs_costs(1, 1, 0.1), p);
        CHECK(d.objective == doctest::Approx(0.4).epsilon(1e-7));
        CHECK(d.s(0) == doctest::Approx(-2.0).epsilon(1e-5));
        CHECK(std::abs(d.objective - oracle::grid_min_1d(
                                         [](double s) { return 0.2 * std::abs(s) + 2 * std::abs(2 * s + 4); }, -10, 10)) <
              1e-6);
    }
}

TEST_CASE("fast action examples") {
    const Mat I = Mat::Identity(2, 2);
    SystemSpec a(2, 2, 1, I, I, I);
    CHECK(mrpc_fast_action(a, Vec::Zero(2), Vec(Eigen::Vector2d(3, -1))).isApprox(Vec(Eigen::Vector2d(-3, 1))));
    CHECK(mrpc_fast_action(a, Vec::Zero(2), Vec::Zero(2)).isZero());
    SystemSpec b(2, 2, 1, I, 2 * I, I);
    CHECK(mrpc_fast_action(b, Vec::Ones(2), Vec(Eigen::Vector2d(1, -1))).isApprox(Vec(Eigen::Vector2d(-1, 0))));
}

TEST_CASE("MRPC examples") {
    SystemSpec spec(1, 2, 2, s1(0.5), s1(1), s1(1));
    const NoiseTrace w = scalar_noise({4, 4});
    const MrpcRun r = run_mrpc(spec, abs_costs(), w, PredictionTrace{w.w});
    CHECK(r.run.total_cost == doctest::Approx(8.0).epsilon(1e-8));
    const NoiseTrace zero = scalar_noise({0, 0});
    CHECK(run_mrpc(spec, abs_costs(), zero, PredictionTrace{zero.w}).run.total_cost == doctest::Approx(0.0));
}

TEST_CASE("MRPC keeps the state at zero and respects the dynamics") {
    for (int i = 0; i < 30; ++i) {
        const Instance in = random_norm_instance(mix_seed(101, i), i);
        const MrpcRun r = run_mrpc(in.spec, in.costs, in.noise, in.predictions);
        double scale = 1.0;
        for (const auto& w : in.noise.w) scale = std::max(scale, w.lpNorm<Eigen::Infinity>());
        for (const auto& x : r.run.traj.x) CHECK(x.lpNorm<Eigen::Infinity>() <= 1e-12 * scale * in.spec.T());
        CHECK_NOTHROW(check_trajectory(in.spec, r.run.traj, &in.noise));
        double state_cost = 0.0;
        for (int t = 1; t <= in.spec.T(); ++t) state_cost += in.costs.cx.eval(r.run.traj.x[t]);
        CHECK(state_cost <= 1e-10 * (1 + r.run.total_cost));
    }
}

TEST_CASE("MRPC ignores disturbances outside the current window") {
    for (int i = 0; i < 10; ++i) {
        const Instance in = random_norm_instance(mix_seed(103, i), i);
        const MrpcRun base = run_mrpc(in.spec, in.costs, in.noise, in.predictions);
        const auto windows = slow_windows(in.spec.T(), in.spec.k());
        // Permute disturbances after each window; the window's slow action and
        // fast actions must not move.
        for (std::size_t r = 0; r + 1 < windows.size(); ++r) {
            const int end = windows[r].start + windows[r].length;
            NoiseTrace w = in.noise;
            PredictionTrace p = in.predictions;
            std::reverse(w.w.begin() + end, w.w.end());
            std::reverse(p.what.begin() + end, p.what.end());
            const MrpcRun other = run_mrpc(in.spec, in.costs, w, p);
            CHECK(other.windows[r].s == base.windows[r].s);
            for (int t = windows[r].start; t < end; ++t) CHECK(other.run.traj.f[t] == base.run.traj.f[t]);
        }
    }
}

TEST_CASE("offline optimum examples") {
    SUBCASE("zero disturbance") {
        SystemSpec spec(1, 3, 2, s1(0.5), s1(1), s1(1));
        CHECK(std::abs(run_offline_opt(spec, abs_costs(), scalar_noise({0, 0, 0})).total_cost) < 1e-7);
    }
    SUBCASE("single step") {
        SystemSpec spec(1, 1, 1, s1(0), s1(1), s1(1));
        const ControllerRun r = run_offline_opt(spec, abs_costs(), scalar_noise({6}));
        CHECK(r.total_cost == doctest::Approx(6.0).epsilon(1e-7));
    }
}

TEST_CASE("offline optimum agrees with direct search over actions") {
    Rng rng(107);
    for (int trial = 0; trial < 8; ++trial) {
        const int T = rng.integer(2, 4), k = rng.integer(1, 2);
        const double a = rng.uniform(-1.2, 1.2), bf = rng.uniform(0.5, 2.0), bs = rng.uniform(-2, 2);
        const double wx = rng.uniform(0.5, 2), wf = rng.uniform(0.5, 2), ws = rng.uniform(0.05, 2);
        std::vector<double> w;
        NoiseTrace noise;
        for (int t = 0; t < T; ++t) {
            w.push_back(rng.normal() * 3);
            noise.w.push_back(v1(w.back()));
        }
        SystemSpec spec(1, T, k, s1(a), s1(bf), s1(bs));
        const ControllerRun opt = run_offline_opt(spec, abs_costs(wx, wf, ws), noise, 1e-10);
        const int windows = (T + k - 1) / k;
        const auto terms = scalar_terms(a, bf, bs, w, k, wx, wf, ws);
        for (int probe = 0; probe < 3; ++probe) {
            const Eigen::VectorXd z = rng.normal_vec(T + windows);
            CHECK(oracle::evaluate(terms, z) == doctest::Approx(scalar_cost(z, a, bf, bs, w, k, wx, wf, ws)));
        }
        const double ref = oracle::smoothed_min(terms, T + windows);
        CHECK(opt.total_cost == doctest::Approx(ref).epsilon(1e-5));
        CHECK(opt.total_cost <= ref + 1e-7);
        const ControllerRun fast = run_fast_only_opt(spec, abs_costs(wx, wf, ws), noise, 1e-10);
        std::vector<oracle::Term> fast_terms;
        for (const auto& t : terms) fast_terms.push_back({t.weight, t.p, t.G.leftCols(T), t.h});
        const double ref_fast = oracle::smoothed_min(fast_terms, T);
        CHECK(fast.total_cost == doctest::Approx(ref_fast).epsilon(1e-5));
        CHECK(opt.total_cost <= fast.total_cost + 1e-7);
    }
}

TEST_CASE("offline optimum lower-bounds MRPC and the zero-slow baseline") {
    for (int i = 0; i < 20; ++i) {
        const Instance in = random_norm_instance(mix_seed(109, i), i);
        const ControllerRun opt = run_offline_opt(in.spec, in.costs, in.noise);
        const double slack = 10 * opt.solver_gap + 1e-12 * (1 + opt.total_cost);
        const MrpcRun perfect = run_mrpc(in.spec, in.costs, in.noise, PredictionTrace{in.noise.w});
        CHECK(opt.total_cost <= perfect.run.total_cost + slack);
        CHECK(opt.total_cost <= run_baseline_zero_slow(in.spec, in.costs, in.noise).total_cost + slack);
        CHECK_NOTHROW(check_trajectory(in.spec, opt.traj, &in.noise));
    }
}

TEST_CASE("zero-slow baseline") {
    const Instance in = random_norm_instance(mix_seed(113, 3), 3);
    const ControllerRun z = run_baseline_zero_slow(in.spec, in.costs, in.noise);
    double expected = 0.0;
    for (const auto& w : in.noise.w) expected += in.costs.cf.eval(in.spec.Bf_inv() * w);
    CHECK(z.total_cost == doctest::Approx(expected).epsilon(1e-12));
    NoiseTrace zero{zeros(in.spec.T(), in.spec.n())};
    CHECK(run_baseline_zero_slow(in.spec, in.costs, zero).total_cost == 0.0);
}

TEST_CASE("reduction to the single-timescale form") {
    Rng rng(127);
    const Instance in = single_timescale_instance(mix_seed(131, 0), 0);
    SUBCASE("zero actions") {
        const SocoReduction r = soco_reduce(in.spec, in.costs, zeros(in.spec.T(), in.spec.n()), in.noise);
        for (const auto& y : r.y) CHECK(y.isZero());
    }
    SUBCASE("zero state matrix") {
        const int n = 2;
        const Mat Bf = Mat(Eigen::Matrix2d{{1, 0.5}, {0, 2}});
        SystemSpec spec(n, 5, 1, Mat::Zero(n, n), Bf, Bf);
        Sequence f;
        NoiseTrace w;
        for (int t = 0; t < 5; ++t) f.push_back(rng.normal_vec(n)), w.w.push_back(rng.normal_vec(n));
        const SocoReduction r = soco_reduce(spec, in.costs, f, w);
        for (int t = 0; t < 5; ++t) {
            CHECK(r.y[t].isApprox(Bf * f[t]));
            CHECK(r.problem.v[t].isApprox(w.w[t]));
        }
    }
    SUBCASE("objective is preserved") {
        for (int i = 0; i < 20; ++i) {
            const Instance inst = single_timescale_instance(mix_seed(137, i), i);
            Sequence f;
            for (int t = 0; t < inst.spec.T(); ++t) f.push_back(rng.normal_vec(inst.spec.n()));
            const SocoReduction r = soco_reduce(inst.spec, inst.costs, f, inst.noise);
            const Trajectory traj = roll_forward(inst.spec, f, zeros(inst.spec.T(), inst.spec.n()), inst.noise);
            double direct = 0.0;
            for (int t = 0; t < inst.spec.T(); ++t)
                direct += inst.costs.cx.eval(traj.x[t + 1], t) + inst.costs.cf.eval(f[t], t);
            CHECK(r.problem.objective(r.y) == doctest::Approx(direct).epsilon(1e-9));
        }
    }
    SUBCASE("lift examples") {
        const Mat I = Mat::Identity(1, 1);
        SystemSpec spec(1, 2, 1, I, I, I);
        const Sequence f = soco_lift(spec, {v1(2.5), v1(2.5)});
        CHECK(f[0](0) == 2.5);
        CHECK(f[1](0) == 0.0);
        CHECK(soco_lift(spec, {v1(0), v1(0)})[1].isZero());
    }
}

namespace {

SocoProblem scalar_soco(int T, double a, double m, double c0, std::vector<double> centers, std::vector<double> w) {
    SystemSpec spec(1, T, 1, s1(a), s1(1), s1(1));
    QuadFloorCost q{m, c0, {}};
    for (double c : centers) q.center.push_back(v1(c));
    CostSpec costs{q, NormCost{NormKind::L1, 1.0}, NormCost{NormKind::L1, 1.0}};
    NoiseTrace noise;
    for (double x : w) noise.w.push_back(v1(x));
    return make_soco_problem(spec, costs, noise);
}

}  // namespace

TEST_CASE("window solve examples") {
    SUBCASE("soft threshold") {
        const SocoProblem p = scalar_soco(1, 0.0, 2.0, 0.7, {3.0}, {0.0});
        const WindowPlan plan = fhc_window_solve(p, 0, 0, v1(0));
        CHECK(plan.y[0](0) == doctest::Approx(2.5).epsilon(1e-6));
        CHECK(plan.objective == doctest::Approx(0.25 + 2.5 + 0.7).epsilon(1e-8));
    }
    SUBCASE("stay on the free trajectory") {
        const SocoProblem p = scalar_soco(4, 0.5, 1.0, 0.3, {9.0, 1.0, 0.5, 0.25}, {0, 0, 0, 0});
        const WindowPlan plan = fhc_window_solve(p, 1, 3, v1(2.0));
        CHECK(plan.objective == doctest::Approx(3 * 0.3).epsilon(1e-8));
        CHECK(plan.y[2](0) == doctest::Approx(0.25).epsilon(1e-5));
    }
    SUBCASE("never worse than drifting from the anchor") {
        Rng rng(139);
        for (int i = 0; i < 10; ++i) {
            const SocoInstance si = strongly_convex_instance(mix_seed(149, i), i);
            const int last = std::min(si.soco.T() - 1, 3 + si.w);
            const Vec anchor = rng.normal_vec(si.soco.n());
            const WindowPlan plan = fhc_window_solve(si.soco, 3, last, anchor);
            double drift = 0.0;
            Vec prev = anchor;
            for (int t = 3; t <= last; ++t) {
                const Vec y = si.soco.spec.A() * prev;
                drift += si.soco.hit_cost(y, t) + si.soco.move_cost(y, prev);
                prev = y;
            }
            CHECK(plan.objective <= drift + plan.gap * 10 + 1e-12);
        }
    }
}

TEST_CASE("fixed-horizon and averaging controllers") {
    SUBCASE("one window covers the horizon") {
        const SocoInstance si = strongly_convex_instance(mix_seed(151, 0), 0);
        const int w = si.soco.T();
        const SocoRun fhc = run_fhc(si.soco, w, 1);
        const SocoRun opt = soco_offline_opt(si.soco);
        CHECK(fhc.soco_cost == doctest::Approx(opt.soco_cost).epsilon(1e-8));
    }
    SUBCASE("zero costs") {
        const SocoProblem p = scalar_soco(6, 0.8, 1.0, 0.0, {0.0}, {0, 0, 0, 0, 0, 0});
        const AfhcRun a = run_afhc(p, 2);
        CHECK(std::abs(a.average.soco_cost) < 1e-7);
        for (const auto& y : a.average.y) CHECK(std::abs(y(0)) < 1e-5);
    }
    SUBCASE("phase windows") {
        const auto p1 = fhc_windows(7, 2, 1);
        REQUIRE(p1.size() == 3);
        CHECK(p1[0] == std::pair{0, 2});
        CHECK(p1[2] == std::pair{6, 6});
        const auto p2 = fhc_windows(7, 2, 2);
        CHECK(p2[0] == std::pair{0, 0});
        CHECK(p2[1] == std::pair{1, 3});
        CHECK_THROWS_AS(fhc_windows(7, 2, 4), Error);
    }
    SUBCASE("every phase is feasible and the average is no worse than the mean phase") {
        for (int i = 0; i < 12; ++i) {
            const SocoInstance si = strongly_convex_instance(mix_seed(157, i), i);
            const AfhcRun a = run_afhc(si.soco, si.w);
            const SocoRun opt = soco_offline_opt(si.soco);
            REQUIRE(static_cast<int>(a.phases.size()) == si.w + 1);
            for (const auto& ph : a.phases) CHECK(ph.soco_cost >= opt.soco_cost - 10 * opt.run.solver_gap - 1e-12);
            CHECK(a.average.soco_cost <= a.mean_phase_cost * (1 + 1e-12));
        }
    }
    SUBCASE("identical phases") {
        const SocoProblem p = scalar_soco(5, 0.0, 1.0, 0.5, {1.0}, {0, 0, 0, 0, 0});
        const AfhcRun a = run_afhc(p, 1);
        CHECK(a.average.soco_cost == doctest::Approx(a.phases[0].soco_cost).epsilon(1e-7));
        CHECK(a.average.soco_cost == doctest::Approx(a.phases[1].soco_cost).epsilon(1e-7));
    }
}

TEST_CASE("soco optimum equals the single-timescale optimum") {
    for (int i = 0; i < 8; ++i) {
        const Instance in = single_timescale_instance(mix_seed(163, i), i);
        const SocoRun soco = soco_offline_opt(make_soco_problem(in.spec, in.costs, in.noise), 1e-9);
        const ControllerRun fast = run_fast_only_opt(in.spec, in.costs, in.noise, 1e-9);
        const ControllerRun two = run_offline_opt(in.spec, in.costs, in.noise, 1e-9);
        CHECK(soco.soco_cost == doctest::Approx(fast.total_cost).epsilon(1e-6));
        CHECK(two.total_cost == doctest::Approx(fast.total_cost).epsilon(1e-6));
    }
}

TEST_CASE("MRPC requires norm costs") {
    SystemSpec spec(1, 2, 1, s1(0.5), s1(1), s1(1));
    CostSpec c = abs_costs();
    c.cx = QuadFloorCost{1.0, 0.0, {v1(0)}};
    const NoiseTrace w = scalar_noise({1, 1});
    CHECK_THROWS_AS(run_mrpc(spec, c, w, PredictionTrace{w.w}), Error);
}
