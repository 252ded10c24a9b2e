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
#include "mtsc/analysis.hpp"
#include "mtsc/corpus.hpp"

using namespace mtsc;

namespace {

int as_int(NormKind p) { return p == NormKind::L1 ? 1 : p == NormKind::L2 ? 2 : 0; }

}  // namespace

TEST_CASE("norm constants for hand-computed systems") {
    SUBCASE("dominant state cost") {
        SystemSpec spec(2, 4, 2, 0.5 * Mat::Identity(2, 2), 2 * Mat::Identity(2, 2), Mat::Identity(2, 2));
        const CostSpec c{NormCost{NormKind::L1, 1.0}, NormCost{NormKind::L2, 1.0}, NormCost{NormKind::L2, 1.0}};
        const NormConstants k = norm_constants(spec, c);
        CHECK(k.A_x == doctest::Approx(0.5));
        CHECK(k.Bf_inv_f == doctest::Approx(0.5));
        CHECK(k.c == doctest::Approx(1.0));
        CHECK(k.first_factor == doctest::Approx(1.0));
        CHECK(k.lemma2_C == doctest::Approx(1.0));
    }
    SUBCASE("weak state cost") {
        SystemSpec spec(4, 4, 2, Mat::Identity(4, 4), Mat::Identity(4, 4), Mat::Identity(4, 4));
        const CostSpec c{NormCost{NormKind::L2, 1.0}, NormCost{NormKind::L1, 2.0}, NormCost{NormKind::L2, 1.0}};
        const NormConstants k = norm_constants(spec, c);
        CHECK(k.c == doctest::Approx(0.25));
        CHECK(k.first_factor == doctest::Approx(8.0));
        CHECK(k.lemma2_C == doctest::Approx(0.125));
    }
}

TEST_CASE("inequality checks and reports") {
    const InequalityCheck ok{"a", 1.0, 1.0, 0.0};
    CHECK(ok.holds());
    const InequalityCheck bad{"b", 1.1, 1.0, 0.05};
    CHECK_FALSE(bad.holds());
    CHECK(bad.slack_usage() == doctest::Approx(2.0));
    BoundReport r;
    r.checks = {ok, bad};
    CHECK_FALSE(r.ok());
    CHECK(r.first_violation()->name == "b");
    try {
        require_bounds(r);
        FAIL("expected BoundViolated");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BoundViolated);
        CHECK(std::string(e.what()).find("b") != std::string::npos);
    }
}

TEST_CASE("two-timescale bound holds on random instances") {
    for (int i = 0; i < 30; ++i) {
        const Instance in = random_norm_instance(mix_seed(201, i), i);
        const MrpcRun m = run_mrpc(in.spec, in.costs, in.noise, in.predictions);
        const ControllerRun opt = run_offline_opt(in.spec, in.costs, in.noise);
        const BoundReport r = thm2_report(in.spec, in.costs, m.run, opt, in.predictions, in.noise, kDefaultSolveTol, false);
        for (const auto& c : r.checks) {
            INFO(in.label << " " << c.name << " lhs " << c.lhs << " rhs " << c.rhs);
            CHECK(c.holds());
        }
    }
}

TEST_CASE("dominant state cost with perfect predictions makes MRPC optimal") {
    for (int i = 0; i < 8; ++i) {
        const Instance in = dominant_state_instance(mix_seed(203, i), i);
        const MrpcRun m = run_mrpc(in.spec, in.costs, in.noise, in.predictions);
        const ControllerRun opt = run_offline_opt(in.spec, in.costs, in.noise);
        const BoundReport r = thm2_report(in.spec, in.costs, m.run, opt, in.predictions, in.noise);
        CHECK(*r.thm2_first_factor == 1.0);
        CHECK(*r.thm2_additive == 0.0);
        CHECK(m.run.total_cost == doctest::Approx(opt.total_cost).epsilon(1e-6));
        // The window lower bound is tight here and MRPC attains it.
        CHECK(*r.lemma2_lower_bound == doctest::Approx(m.run.total_cost).epsilon(1e-6));
    }
}

TEST_CASE("zero disturbance leaves the ratio undefined") {
    Instance in = random_norm_instance(mix_seed(205, 0), 0);
    in.noise.w = zeros(in.spec.T(), in.spec.n());
    in.predictions.what = in.noise.w;
    const MrpcRun m = run_mrpc(in.spec, in.costs, in.noise, in.predictions);
    const ControllerRun opt = run_offline_opt(in.spec, in.costs, in.noise);
    const BoundReport r = thm2_report(in.spec, in.costs, m.run, opt, in.predictions, in.noise);
    CHECK(std::abs(r.alg_cost) < 1e-9);
    CHECK(std::abs(r.opt_cost) < 1e-7);
    CHECK_FALSE(r.competitive_ratio.has_value());
}

TEST_CASE("window lower bound") {
    Instance in = random_norm_instance(mix_seed(207, 1), 1);
    SUBCASE("zero disturbance") {
        in.noise.w = zeros(in.spec.T(), in.spec.n());
        CHECK(std::abs(lemma2_lower_bound(in.spec, in.costs, in.noise).value) < 1e-7);
    }
    SUBCASE("degree one homogeneity") {
        const double a = lemma2_lower_bound(in.spec, in.costs, in.noise).value;
        NoiseTrace scaled = in.noise;
        for (auto& w : scaled.w) w *= 3.0;
        CHECK(lemma2_lower_bound(in.spec, in.costs, scaled).value == doctest::Approx(3.0 * a).epsilon(1e-6));
    }
}

TEST_CASE("AFHC bound formula") {
    const Mat I = Mat::Identity(1, 1);
    SystemSpec unit(1, 4, 1, I, I, I);
    const NormCost cf{NormKind::L2, 1.0};
    CHECK(thm1_bound(unit, cf, 1.0, 1.0, 1) == doctest::Approx(1.25));
    SystemSpec still(1, 4, 1, Mat::Zero(1, 1), I, I);
    CHECK(thm1_bound(still, cf, 0.5, 0.5, 0) == 1.0);
    CHECK(thm1_bound(unit, cf, 1.0, 1.0, 1) - 1 == doctest::Approx(2 * (thm1_bound(unit, cf, 1.0, 1.0, 3) - 1)));
    for (int w = 0; w < 6; ++w) CHECK(thm1_bound(unit, cf, 2.0, 0.5, w + 1) < thm1_bound(unit, cf, 2.0, 0.5, w));
    CHECK_THROWS_AS(thm1_bound(unit, cf, 0.0, 1.0, 1), Error);
}

TEST_CASE("AFHC bound holds on strongly convex instances") {
    for (int i = 0; i < 12; ++i) {
        const SocoInstance si = strongly_convex_instance(mix_seed(209, i), i);
        const AfhcRun a = run_afhc(si.soco, si.w);
        const SocoRun opt = soco_offline_opt(si.soco);
        const BoundReport r = thm1_report(si.soco, a, opt, si.w, false);
        for (const auto& c : r.checks) {
            INFO(si.label << " " << c.name);
            CHECK(c.holds());
        }
    }
}

TEST_CASE("AFHC bound collapses to one without state propagation") {
    SocoInstance si = strongly_convex_instance(mix_seed(211, 0), 0);
    si.soco = make_soco_problem(SystemSpec(si.soco.n(), si.soco.T(), 1, Mat::Zero(si.soco.n(), si.soco.n()),
                                           si.soco.spec.Bf(), si.soco.spec.Bs()),
                                si.soco.costs, si.soco.noise);
    const AfhcRun a = run_afhc(si.soco, si.w);
    const SocoRun opt = soco_offline_opt(si.soco);
    const BoundReport r = thm1_report(si.soco, a, opt, si.w);
    CHECK(*r.thm1_bound == 1.0);
    CHECK(a.average.soco_cost == doctest::Approx(opt.soco_cost).epsilon(1e-6));
}

TEST_CASE("AFHC report rejects norm state costs") {
    const Instance in = single_timescale_instance(mix_seed(213, 0), 0);
    const SocoProblem p = make_soco_problem(in.spec, in.costs, in.noise);
    const AfhcRun a = run_afhc(p, 1);
    CHECK_THROWS_AS(thm1_report(p, a, soco_offline_opt(p), 1), Error);
}

TEST_CASE("matrix norm inequality samples") {
    SUBCASE("zero vector") {
        Lemma1Sample s{Mat::Identity(2, 2), NormKind::L2, NormKind::L1, 1.0, 2.0, Vec::Zero(2)};
        const Lemma1Result r = lemma1_sample_check(s);
        CHECK(std::abs(r.lhs) < 1e-8);
        CHECK(r.rhs == 0.0);
        CHECK(r.passed);
    }
    SUBCASE("identity map, equal norms") {
        for (NormKind p : {NormKind::L1, NormKind::L2, NormKind::Linf}) {
            const Vec v = Vec(Eigen::Vector3d(1.5, -2.0, 0.25));
            Lemma1Sample s{Mat::Identity(3, 3), p, p, 1.0, 1.0, v};
            const Lemma1Result r = lemma1_sample_check(s);
            CHECK(r.rhs == doctest::Approx(vector_norm(v, p)));
            CHECK(r.lhs == doctest::Approx(vector_norm(v, p)).epsilon(1e-7));
        }
    }
    SUBCASE("solver side agrees with direct search") {
        for (int i = 0; i < 15; ++i) {
            Lemma1Sample s = random_lemma1_sample(mix_seed(215, i));
            const Lemma1Result r = lemma1_sample_check(s);
            const int pa = as_int(s.a), pb = as_int(s.b);
            const int d = static_cast<int>(s.v.size());
            const double ref = oracle::smoothed_min(
                {{s.alpha, pa, Eigen::MatrixXd(s.M), s.v}, {s.beta, pb, Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d)}},
                d);
            CHECK(r.lhs == doctest::Approx(ref).epsilon(1e-5));
            CHECK(r.passed);
        }
    }
    SUBCASE("suite") {
        const Lemma1Suite suite = lemma1_suite(217, 100);
        CHECK(suite.samples == 100);
        CHECK(suite.failures == 0);
        CHECK_FALSE(suite.witness.has_value());
    }
}

TEST_CASE("empirical competitive ratio") {
    SUBCASE("identical runs") {
        const CompetitiveRatio r = competitive_ratio({2.0, 3.0}, {2.0, 3.0}, {0.0, 0.0});
        CHECK(r.value == 1.0);
        CHECK(r.used.size() == 2);
    }
    SUBCASE("degenerate optimum") {
        CHECK_THROWS_AS(competitive_ratio({1.0}, {1e-12}, {1e-10}), Error);
        const CompetitiveRatio r = competitive_ratio({1.0, 4.0}, {1e-12, 2.0}, {1e-10, 0.0});
        CHECK(r.value == 2.0);
        CHECK(r.excluded == std::vector<std::size_t>{0});
    }
    SUBCASE("cheap slow action beats the zero-slow baseline") {
        const int n = 2, T = 40;
        SystemSpec spec(n, T, 10, 0.8 * Mat::Identity(n, n), Mat::Identity(n, n), Mat::Identity(n, n));
        const CostSpec costs{NormCost{NormKind::L2, 1.0}, NormCost{NormKind::L1, 1.0}, NormCost{NormKind::L1, 0.01}};
        const NoiseTrace w = generate_noise(NoiseModel{SpikeTrain{5.0, 4}, 3}, n, T);
        const ControllerRun zero = run_baseline_zero_slow(spec, costs, w);
        const ControllerRun opt = run_offline_opt(spec, costs, w);
        CHECK(competitive_ratio(std::vector{zero}, std::vector{opt}).value > 1.0);
    }
    SUBCASE("invariant to scaling the disturbance") {
        const Instance in = random_norm_instance(mix_seed(219, 2), 2);
        NoiseTrace big = in.noise;
        for (auto& w : big.w) w *= 7.0;
        const ControllerRun z1 = run_baseline_zero_slow(in.spec, in.costs, in.noise);
        const ControllerRun o1 = run_offline_opt(in.spec, in.costs, in.noise);
        const ControllerRun z7 = run_baseline_zero_slow(in.spec, in.costs, big);
        const ControllerRun o7 = run_offline_opt(in.spec, in.costs, big);
        CHECK(competitive_ratio(std::vector{z1}, std::vector{o1}).value ==
              doctest::Approx(competitive_ratio(std::vector{z7}, std::vector{o7}).value).epsilon(1e-6));
    }
}
