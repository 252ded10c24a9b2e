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
#ifndef MTSC_ANALYSIS_HPP
#define MTSC_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtsc/controllers.hpp"

namespace mtsc {

/// Norm quantities shared by the two-timescale bounds.
struct NormConstants {
    double A_x = 0.0;        // ||A|| induced by the state-cost norm
    double Bf_inv_f = 0.0;   // ||Bf^{-1}|| induced by the fast-cost norm
    double c = 0.0;          // weighted norm equivalence: c_x(v) >= c * c_f(v)
    double first_factor = 0.0;   // max((1 + A_x) Bf_inv_f / c, 1)
    double lemma2_C = 0.0;       // min(c / ((1 + A_x) Bf_inv_f), 1)
};

/// Requires norm costs on state and fast action.
NormConstants norm_constants(const SystemSpec& spec, const CostSpec& costs);

/// lhs <= rhs + slack
struct InequalityCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;

    bool holds() const { return lhs <= rhs + slack; }
    /// Fraction of the slack consumed; above 1 means violated.
    double slack_usage() const;
};

struct BoundReport {
    double opt_cost = 0.0;
    double alg_cost = 0.0;
    double per_step_opt = 0.0;
    double per_step_alg = 0.0;
    std::optional<double> competitive_ratio;  // empty when OPT is within slack of zero
    std::optional<double> thm2_first_factor;
    std::optional<double> thm2_additive;
    std::optional<double> pred_error;
    std::optional<double> thm1_bound;
    std::optional<double> lemma2_lower_bound;
    double slack = 0.0;
    std::vector<InequalityCheck> checks;

    bool ok() const;
    const InequalityCheck* first_violation() const;
};

/// Throws Error(BoundViolated) naming the first failing check.
void require_bounds(const BoundReport& report);

struct LowerBound {
    double value = 0.0;
    double gap = 0.0;
};

/// sum over slow windows of min_s L c_s(s) + C sum_t c_f(Bf^{-1}(Bs s + w_t)),
/// one small program per window.
LowerBound lemma2_lower_bound(const SystemSpec& spec, const CostSpec& costs, const NoiseTrace& noise,
                              double tol = kDefaultSolveTol);

/// Same windows with C = 1 under the true disturbances, plus
/// 2 ||Bf^{-1}||_f sum_t c_f(what_t - w_t): an upper bound on the MRPC cost.
LowerBound lemma3_upper_bound(const SystemSpec& spec, const CostSpec& costs, const NoiseTrace& noise,
                              const PredictionTrace& predictions, double tol = kDefaultSolveTol);

/// Per-step MRPC cost against the first factor times per-step OPT plus the
/// prediction term, together with the lower (OPT) and upper (MRPC) window
/// bounds. Slack is 10x the certified gaps involved.
BoundReport thm2_report(const SystemSpec& spec, const CostSpec& costs, const ControllerRun& mrpc,
                        const ControllerRun& opt, const PredictionTrace& predictions, const NoiseTrace& noise,
                        double tol = kDefaultSolveTol, bool throw_on_violation = true);

/// Operator norm of alpha_f Bf^{-1} A from l2 into the fast-cost norm.
double movement_gain(const SystemSpec& spec, const NormCost& cf);

/// 1 + L^2 / (2 m (w + 1) c0), L = movement_gain.
double thm1_bound(const SystemSpec& spec, const NormCost& cf, double m, double c0, int w);

/// AFHC / OPT against thm1_bound; also the averaging (Jensen) inequality, the
/// feasibility of every phase and the halving of the additive term when w + 1
/// doubles. Requires a quadratic-floor state cost; m and c0 are read from it.
BoundReport thm1_report(const SocoProblem& soco, const AfhcRun& afhc, const SocoRun& opt, int w,
                        bool throw_on_violation = true);

struct Lemma1Sample {
    Mat M;
    NormKind a = NormKind::L2;
    NormKind b = NormKind::L2;
    double alpha = 1.0;
    double beta = 1.0;
    Vec v;
};

struct Lemma1Result {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;
    double slack = 0.0;
    bool passed = false;
};

/// min_x alpha ||v + M x||_a + beta ||x||_b  >=  min(alpha c / ||M^{-1}||_b, beta) ||M^{-1} v||_b
/// with c the equivalence constant of (a, b). LHS by the solver, RHS closed form.
Lemma1Result lemma1_sample_check(const Lemma1Sample& sample, double tol = kDefaultSolveTol);

Lemma1Sample random_lemma1_sample(std::uint64_t seed);

struct Lemma1Suite {
    int samples = 0;
    int failures = 0;
    double max_slack_usage = 0.0;
    std::optional<Lemma1Sample> witness;  // first failing sample
};

Lemma1Suite lemma1_suite(std::uint64_t seed, int count, double tol = kDefaultSolveTol);

struct CompetitiveRatio {
    double value = 0.0;
    std::vector<std::size_t> used;
    std::vector<std::size_t> excluded;  // OPT within slack of zero
};

/// Empirical sup of alg/opt over instances with opt > slack. Throws
/// Error(DegenerateOpt) when every instance is excluded.
CompetitiveRatio competitive_ratio(const std::vector<double>& alg, const std::vector<double>& opt,
                                   const std::vector<double>& opt_slack);
CompetitiveRatio competitive_ratio(const std::vector<ControllerRun>& alg, const std::vector<ControllerRun>& opt);

}  // namespace mtsc

#endif  // MTSC_ANALYSIS_HPP
