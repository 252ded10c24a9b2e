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
#include "mtsc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "mtsc/noise.hpp"

namespace mtsc {

namespace {

constexpr double kSlackFactor = 10.0;
// Floating-point evaluation noise on either side of an inequality.
constexpr double kRoundoff = 1e-12;

InequalityCheck make_check(std::string name, double lhs, double rhs, double solver_slack) {
    return {std::move(name), lhs, rhs, solver_slack + kRoundoff * (1.0 + std::abs(rhs))};
}

const NormCost& norm_of(const StageCost& c, const char* what) {
    if (!c.is_norm()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be a norm cost");
    return c.as_norm();
}

LowerBound window_sum(const SystemSpec& spec, const CostSpec& costs, const NoiseTrace& noise, double scale,
                      double tol) {
    if (noise.w.size() != static_cast<std::size_t>(spec.T()))
        throw Error(ErrorCode::LengthMismatch, "noise trace must have T entries");
    LowerBound out;
    for (const auto& win : slow_windows(spec.T(), spec.k())) {
        const std::span<const Vec> d(noise.w.data() + win.start, static_cast<std::size_t>(win.length));
        const SolveReport rep = solve(slow_window_program(spec, costs, d, scale), tol);
        out.value += rep.objective;
        out.gap += rep.certified_gap;
    }
    return out;
}

}  // namespace

double InequalityCheck::slack_usage() const {
    if (lhs <= rhs) return 0.0;
    if (slack <= 0.0) return std::numeric_limits<double>::infinity();
    return (lhs - rhs) / slack;
}

bool BoundReport::ok() const { return first_violation() == nullptr; }

const InequalityCheck* BoundReport::first_violation() const {
    for (const auto& c : checks)
        if (!c.holds()) return &c;
    return nullptr;
}

void require_bounds(const BoundReport& report) {
    if (const InequalityCheck* bad = report.first_violation()) {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s violated: lhs %.12g > rhs %.12g + slack %.3g", bad->name.c_str(), bad->lhs,
                      bad->rhs, bad->slack);
        throw Error(ErrorCode::BoundViolated, buf);
    }
}

NormConstants norm_constants(const SystemSpec& spec, const CostSpec& costs) {
    const auto& cx = norm_of(costs.cx, "c_x");
    const auto& cf = norm_of(costs.cf, "c_f");
    NormConstants k;
    k.A_x = induced_norm(spec.A(), cx.p);
    k.Bf_inv_f = induced_norm(spec.Bf_inv(), cf.p);
    k.c = cx.weight / cf.weight * norm_equivalence_constant(cx.p, cf.p, spec.n());
    const double g = (1.0 + k.A_x) * k.Bf_inv_f;
    k.first_factor = std::max(g / k.c, 1.0);
    k.lemma2_C = std::min(k.c / g, 1.0);
    return k;
}

LowerBound lemma2_lower_bound(const SystemSpec& spec, const CostSpec& costs, const NoiseTrace& noise, double tol) {
    return window_sum(spec, costs, noise, norm_constants(spec, costs).lemma2_C, tol);
}

LowerBound lemma3_upper_bound(const SystemSpec& spec, const CostSpec& costs, const NoiseTrace& noise,
                              const PredictionTrace& predictions, double tol) {
    const NormConstants k = norm_constants(spec, costs);
    LowerBound out = window_sum(spec, costs, noise, 1.0, tol);
    const double E = prediction_error(predictions.what, noise.w, costs.cf.as_norm());
    out.value += 2.0 * k.Bf_inv_f * E * spec.T();
    return out;
}

BoundReport thm2_report(const SystemSpec& spec, const CostSpec& costs, const ControllerRun& mrpc,
                        const ControllerRun& opt, const PredictionTrace& predictions, const NoiseTrace& noise,
                        double tol, bool throw_on_violation) {
    const NormConstants k = norm_constants(spec, costs);
    const double T = spec.T();
    const double E = prediction_error(predictions.what, noise.w, costs.cf.as_norm());

    BoundReport r;
    r.opt_cost = opt.total_cost;
    r.alg_cost = mrpc.total_cost;
    r.per_step_opt = opt.total_cost / T;
    r.per_step_alg = mrpc.total_cost / T;
    r.pred_error = E;
    r.thm2_first_factor = k.first_factor;
    r.thm2_additive = 2.0 * k.Bf_inv_f * E;
    r.slack = kSlackFactor * (k.first_factor * opt.solver_gap + mrpc.solver_gap) / T;
    if (opt.total_cost > kSlackFactor * opt.solver_gap && opt.total_cost > 0.0)
        r.competitive_ratio = mrpc.total_cost / opt.total_cost;
    r.checks.push_back(
        make_check("thm2", r.per_step_alg, k.first_factor * r.per_step_opt + *r.thm2_additive, r.slack));

    const LowerBound lb = lemma2_lower_bound(spec, costs, noise, tol);
    r.lemma2_lower_bound = lb.value;
    r.checks.push_back(make_check("lemma2", lb.value, opt.total_cost, kSlackFactor * (opt.solver_gap + lb.gap)));

    const LowerBound ub = lemma3_upper_bound(spec, costs, noise, predictions, tol);
    r.checks.push_back(make_check("lemma3", mrpc.total_cost, ub.value, kSlackFactor * (mrpc.solver_gap + ub.gap)));

    if (throw_on_violation) require_bounds(r);
    return r;
}

double movement_gain(const SystemSpec& spec, const NormCost& cf) {
    return cf.weight * l2_to_norm(spec.Bf_inv() * spec.A(), cf.p);
}

double thm1_bound(const SystemSpec& spec, const NormCost& cf, double m, double c0, int w) {
    if (!(m > 0.0) || !(c0 > 0.0) || w < 0)
        throw Error(ErrorCode::InvalidArgument, "thm1_bound needs m > 0, c0 > 0 and w >= 0");
    const double L = movement_gain(spec, cf);
    return 1.0 + L * L / (2.0 * m * (w + 1.0) * c0);
}

BoundReport thm1_report(const SocoProblem& soco, const AfhcRun& afhc, const SocoRun& opt, int w,
                        bool throw_on_violation) {
    if (soco.costs.cx.is_norm())
        throw Error(ErrorCode::InvalidArgument, "the AFHC bound needs a strongly convex (quad_floor) state cost");
    const auto& q = soco.costs.cx.as_quad();
    const auto& cf = norm_of(soco.costs.cf, "c_f");
    const double bound = thm1_bound(soco.spec, cf, q.m, q.c0, w);
    const double T = soco.T();

    BoundReport r;
    r.opt_cost = opt.soco_cost;
    r.alg_cost = afhc.average.soco_cost;
    r.per_step_opt = r.opt_cost / T;
    r.per_step_alg = r.alg_cost / T;
    r.thm1_bound = bound;
    // Every QuadFloor stage is at least c0 > 0, so OPT >= T c0 and the ratio is defined.
    r.competitive_ratio = r.alg_cost / r.opt_cost;
    const double gap_opt = opt.run.solver_gap;
    r.slack = kSlackFactor * (bound * gap_opt + afhc.average.run.solver_gap) / r.opt_cost;
    r.checks.push_back(make_check("thm1", *r.competitive_ratio, bound, r.slack));

    double mean = 0.0;
    for (const auto& ph : afhc.phases) mean += ph.soco_cost;
    mean /= static_cast<double>(afhc.phases.size());
    r.checks.push_back(make_check("afhc_jensen", r.alg_cost, mean, 0.0));

    for (std::size_t i = 0; i < afhc.phases.size(); ++i)
        r.checks.push_back(make_check("fhc_feasible_p" + std::to_string(i + 1), r.opt_cost, afhc.phases[i].soco_cost,
                                      kSlackFactor * gap_opt));

    const double term_w = bound - 1.0;
    const double term_2w = thm1_bound(soco.spec, cf, q.m, q.c0, 2 * w + 1) - 1.0;
    r.checks.push_back(make_check("thm1_halving", std::abs(2.0 * term_2w - term_w), 0.0, kRoundoff * term_w));

    if (throw_on_violation) require_bounds(r);
    return r;
}

Lemma1Result lemma1_sample_check(const Lemma1Sample& s, double tol) {
    const int n = static_cast<int>(s.M.rows());
    if (s.M.cols() != n || s.v.size() != n) throw Error(ErrorCode::BadDimensions, "lemma1 sample dimensions");
    if (!(s.alpha > 0.0) || !(s.beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha and beta must be > 0");
    Eigen::JacobiSVD<Mat> svd(s.M);
    if (svd.singularValues().minCoeff() <= SystemSpec::kDefaultInvertibilityThreshold)
        throw Error(ErrorCode::SingularBf, "lemma1 sample: M is not invertible");

    AffineNormProgram prog(n);
    prog.add_norm(s.alpha, s.a, s.M, s.v);
    prog.add_norm(s.beta, s.b, Mat(Mat::Identity(n, n)), Vec::Zero(n));
    const SolveReport rep = solve(prog, tol);

    const Eigen::PartialPivLU<Mat> lu(s.M);
    const Mat Minv = lu.inverse();
    const double c = norm_equivalence_constant(s.a, s.b, n);
    const double coef = std::min(s.alpha * c / induced_norm(Minv, s.b), s.beta);

    Lemma1Result out;
    out.lhs = rep.objective;
    out.gap = rep.certified_gap;
    out.rhs = coef * vector_norm(lu.solve(s.v), s.b);
    out.slack = kSlackFactor * out.gap + kRoundoff * (1.0 + std::abs(out.rhs));
    out.passed = out.lhs >= out.rhs - out.slack;
    return out;
}

Lemma1Sample random_lemma1_sample(std::uint64_t seed) {
    Rng rng(seed);
    static constexpr NormKind kinds[] = {NormKind::L1, NormKind::L2, NormKind::Linf};
    Lemma1Sample s;
    const int n = rng.integer(1, 3);
    do {
        s.M = Mat(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s.M(i, j) = rng.normal();
    } while (Eigen::JacobiSVD<Mat>(s.M).singularValues().minCoeff() < 0.05);
    s.a = kinds[rng.integer(0, 2)];
    s.b = kinds[rng.integer(0, 2)];
    s.alpha = std::exp(rng.uniform(-1.5, 1.5));
    s.beta = std::exp(rng.uniform(-1.5, 1.5));
    s.v = rng.normal_vec(n, std::exp(rng.uniform(-2.0, 2.0)));
    return s;
}

Lemma1Suite lemma1_suite(std::uint64_t seed, int count, double tol) {
    Lemma1Suite out;
    for (int i = 0; i < count; ++i) {
        const Lemma1Sample s = random_lemma1_sample(mix_seed(seed, static_cast<std::uint64_t>(i)));
        const Lemma1Result r = lemma1_sample_check(s, tol);
        ++out.samples;
        const double used = r.lhs >= r.rhs ? 0.0 : (r.rhs - r.lhs) / r.slack;
        out.max_slack_usage = std::max(out.max_slack_usage, used);
        if (!r.passed) {
            ++out.failures;
            if (!out.witness) out.witness = s;
        }
    }
    return out;
}

CompetitiveRatio competitive_ratio(const std::vector<double>& alg, const std::vector<double>& opt,
                                   const std::vector<double>& opt_slack) {
    if (alg.size() != opt.size() || opt.size() != opt_slack.size())
        throw Error(ErrorCode::LengthMismatch, "competitive_ratio: run lists differ in length");
    CompetitiveRatio out;
    for (std::size_t i = 0; i < opt.size(); ++i) {
        if (opt[i] <= opt_slack[i] || opt[i] <= 0.0) {
            out.excluded.push_back(i);
            continue;
        }
        out.used.push_back(i);
        out.value = std::max(out.value, alg[i] / opt[i]);
    }
    if (out.used.empty())
        throw Error(ErrorCode::DegenerateOpt, "competitive_ratio: every instance has OPT within slack of zero");
    return out;
}

CompetitiveRatio competitive_ratio(const std::vector<ControllerRun>& alg, const std::vector<ControllerRun>& opt) {
    std::vector<double> a, o, g;
    for (const auto& r : alg) a.push_back(r.total_cost);
    for (const auto& r : opt) {
        o.push_back(r.total_cost);
        g.push_back(kSlackFactor * r.solver_gap);
    }
    return competitive_ratio(a, o, g);
}

}  // namespace mtsc
