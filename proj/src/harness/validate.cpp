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
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "harness/internal.hpp"
#include "mtsc/corpus.hpp"

namespace mtsc::harness {

namespace {

struct Outcome {
    std::string check;
    bool ok = true;
    double usage = 0.0;  // fraction of the allowed slack consumed
    std::string detail;
};

using Outcomes = std::vector<Outcome>;

struct Tally {
    std::string name;
    int runs = 0;
    int failures = 0;
    double max_usage = 0.0;
    std::string first_failure;
};

class Suite {
public:
    explicit Suite(int jobs) : jobs_(jobs) {}

    /// Runs `count` cases, each yielding one or more outcomes; tallies are
    /// merged in case order so the summary does not depend on scheduling.
    void family(int count, const std::function<Outcomes(int)>& body) {
        std::vector<Outcomes> results(static_cast<std::size_t>(count));
        parallel_for(count, jobs_, [&](int i) {
            try {
                results[i] = body(i);
            } catch (const std::exception& e) {
                results[i] = {Outcome{"unexpected_error", false, 0.0, e.what()}};
            }
        });
        for (const auto& rs : results)
            for (const auto& r : rs) add(r);
    }

    void add(const Outcome& r) {
        auto it = index_.find(r.check);
        if (it == index_.end()) {
            it = index_.emplace(r.check, tallies_.size()).first;
            tallies_.push_back(Tally{r.check, 0, 0, 0.0, {}});
        }
        Tally& t = tallies_[it->second];
        ++t.runs;
        t.max_usage = std::max(t.max_usage, r.usage);
        if (!r.ok) {
            ++t.failures;
            if (t.first_failure.empty()) t.first_failure = r.detail;
        }
    }

    void note(std::string line) { notes_.push_back(std::move(line)); }

    int report(std::ostream& out) const {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-32s %8s %9s %16s\n", "check", "runs", "failures", "max_slack_usage");
        out << buf;
        int total_runs = 0;
        int total_failures = 0;
        const Tally* first = nullptr;
        for (const auto& t : tallies_) {
            std::snprintf(buf, sizeof buf, "%-32s %8d %9d %16.3g\n", t.name.c_str(), t.runs, t.failures, t.max_usage);
            out << buf;
            total_runs += t.runs;
            total_failures += t.failures;
            if (t.failures && !first) first = &t;
        }
        for (const auto& n : notes_) out << n << '\n';
        if (first) {
            out << "FAIL: " << total_failures << " of " << total_runs << " checks violated; first failing check: "
                << first->name << " (" << first->first_failure << ")\n";
            return 1;
        }
        out << "PASS: " << total_runs << " checks, 0 violations\n";
        return 0;
    }

private:
    int jobs_;
    std::vector<Tally> tallies_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::string> notes_;
};

std::string fmt(const char* f, double a, double b) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

Outcome from_check(const InequalityCheck& c, const std::string& label, std::string name = {}) {
    const double usage = std::isfinite(c.slack_usage()) ? c.slack_usage() : 1e300;
    return {name.empty() ? c.name : std::move(name), c.holds(), usage,
            label + ": " + fmt("lhs %.12g rhs %.12g", c.lhs, c.rhs) + fmt(" slack %.3g%.0s", c.slack, 0.0)};
}

Outcome relative_match(std::string name, double a, double b, double tol, const std::string& label) {
    const double err = std::abs(a - b) / std::max(1.0, std::abs(b));
    return {std::move(name), err <= tol, err / tol, label + ": " + fmt("%.15g vs %.15g", a, b)};
}

constexpr std::uint64_t kCorpusSeed = 20240611;
constexpr NormKind kNorms[] = {NormKind::L1, NormKind::L2, NormKind::Linf};

void system_checks(Suite& suite) {
    suite.family(1000, [](int i) {
        Rng rng(mix_seed(kCorpusSeed + 1, i));
        const int n = rng.integer(1, 4);
        Mat M(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) M(r, c) = rng.normal();
        const Vec v = rng.normal_vec(n);
        Outcomes out;
        for (NormKind p : kNorms) {
            const double lhs = vector_norm(M * v, p);
            const double rhs = induced_norm(M, p) * vector_norm(v, p);
            out.push_back({"system.induced_norm", lhs <= rhs * (1 + 1e-12), 0.0, "sample " + std::to_string(i)});
        }
        const NormKind px = kNorms[rng.integer(0, 2)];
        const NormKind pf = kNorms[rng.integer(0, 2)];
        const double c = norm_equivalence_constant(px, pf, n);
        out.push_back({"system.norm_equivalence", vector_norm(v, px) >= c * vector_norm(v, pf) * (1 - 1e-12), 0.0,
                       "sample " + std::to_string(i)});
        return out;
    });
    suite.family(36, [](int i) {
        const NormKind px = kNorms[i % 3];
        const NormKind pf = kNorms[(i / 3) % 3];
        const int n = 1 + i / 9;
        const double c = norm_equivalence_constant(px, pf, n);
        // Extremal vectors: a coordinate vector or the all-ones vector.
        double best = vector_norm(Vec::Unit(n, 0), px) / vector_norm(Vec::Unit(n, 0), pf);
        best = std::min(best, vector_norm(Vec::Ones(n), px) / vector_norm(Vec::Ones(n), pf));
        return Outcomes{{"system.norm_equivalence_tight", std::abs(best - c) <= 1e-6, 0.0,
                         fmt("tight value %.12g vs constant %.12g", best, c)}};
    });
    suite.family(100, [](int i) {
        const Instance in = random_norm_instance(mix_seed(kCorpusSeed + 2, i), i);
        Rng rng(mix_seed(kCorpusSeed + 3, i));
        Sequence f, s;
        Vec held;
        for (int t = 0; t < in.spec.T(); ++t) {
            if (t % in.spec.k() == 0) held = rng.normal_vec(in.spec.n());
            f.push_back(rng.normal_vec(in.spec.n()));
            s.push_back(held);
        }
        Outcomes out;
        const Trajectory traj = roll_forward(in.spec, f, s, in.noise);
        bool consistent = true;
        try {
            check_trajectory(in.spec, traj, &in.noise);
        } catch (const Error&) {
            consistent = false;
        }
        out.push_back({"system.roll_forward_consistent", consistent, 0.0, in.label});
        const double lambda = 2.5;
        Sequence fl, sl;
        for (const auto& v : f) fl.push_back(lambda * v);
        for (const auto& v : s) sl.push_back(lambda * v);
        NoiseTrace wl;
        for (const auto& v : in.noise.w) wl.w.push_back(lambda * v);
        const double c1 = trajectory_cost(in.spec, in.costs, traj);
        const double c2 = trajectory_cost(in.spec, in.costs, roll_forward(in.spec, fl, sl, wl));
        out.push_back(relative_match("system.cost_homogeneity", c2, lambda * c1, 1e-9, in.label));
        return out;
    });
}

AffineNormProgram random_program(std::uint64_t seed) {
    Rng rng(seed);
    const int d = rng.integer(1, 6);
    AffineNormProgram prog(d);
    const int terms = rng.integer(1, 5);
    for (int t = 0; t < terms; ++t) {
        const int m = rng.integer(1, 4);
        Mat G(m, d);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < d; ++c) G(r, c) = rng.normal();
        prog.add_norm(std::exp(rng.uniform(-1, 1)), kNorms[rng.integer(0, 2)], G, rng.normal_vec(m, 2.0));
    }
    prog.add_norm(0.1, NormKind::L2, Mat(Mat::Identity(d, d)), Vec::Zero(d));
    if (rng.uniform() < 0.5) {
        Mat G = Mat::Identity(d, d);
        prog.add_quad(rng.uniform(0.5, 2.0), G, rng.normal_vec(d), rng.uniform(0, 1));
    }
    return prog;
}

void kernel_checks(Suite& suite, double tol) {
    suite.family(40, [tol](int i) {
        const AffineNormProgram prog = random_program(mix_seed(kCorpusSeed + 4, i));
        const SolveReport a = solve(prog, tol);
        const SolveReport b = solve(prog, tol);
        Outcomes out;
        out.push_back({"kernel.determinism", a.z == b.z && a.objective == b.objective, 0.0, "program " + std::to_string(i)});
        out.push_back({"kernel.certificate", a.certified_gap <= tol * (1 + std::abs(a.objective)),
                       a.certified_gap / (tol * (1 + std::abs(a.objective))), "program " + std::to_string(i)});
        Rng rng(mix_seed(kCorpusSeed + 5, i));
        double worst = 0.0;
        for (int p = 0; p < 100; ++p) {
            const Vec z = a.z + rng.normal_vec(prog.dims(), std::exp(rng.uniform(-7, 0)));
            worst = std::max(worst, a.objective - prog.objective(z));
        }
        const double allowed = tol * (1 + std::abs(a.objective));
        out.push_back({"kernel.probe", worst <= allowed, std::max(0.0, worst) / allowed, "program " + std::to_string(i)});
        return out;
    });
}

/// 1-D slow-window subproblems (n = 1) checked against the grid oracle.
Outcomes oracle_1d_outcomes(const Instance& in, double tol) {
    Outcomes out;
    if (in.spec.n() != 1) return out;
    const double C = norm_constants(in.spec, in.costs).lemma2_C;
    for (const auto& win : slow_windows(in.spec.T(), in.spec.k())) {
        const std::span<const Vec> pred(in.predictions.what.data() + win.start, static_cast<std::size_t>(win.length));
        const std::span<const Vec> truth(in.noise.w.data() + win.start, static_cast<std::size_t>(win.length));
        for (const auto& prog : {slow_window_program(in.spec, in.costs, pred), slow_window_program(in.spec, in.costs, truth, C)}) {
            const auto [lo, hi] = bracket_1d(prog);
            const double oracle = solve_1d_oracle(prog, lo, hi, 20000);
            const double got = solve(prog, tol).objective;
            const double err = std::abs(got - oracle);
            out.push_back({"kernel.oracle_1d", err <= 1e-6, err / 1e-6, in.label + fmt(": %.12g vs oracle %.12g", got, oracle)});
        }
    }
    return out;
}

void bound_checks(Suite& suite, const RunOptions& opts, double tol) {
    MrpcOptions mo;
    mo.tol = tol;
    mo.flip_fast_sign = opts.corrupt_mrpc;
    suite.family(100, [&](int i) {
        const Instance in = random_norm_instance(mix_seed(kCorpusSeed + 6, i), i);
        const MrpcRun mrpc = run_mrpc(in.spec, in.costs, in.noise, in.predictions, mo);
        const ControllerRun opt = run_offline_opt(in.spec, in.costs, in.noise, tol);
        const ControllerRun zero = run_baseline_zero_slow(in.spec, in.costs, in.noise);
        Outcomes out;
        const BoundReport r = thm2_report(in.spec, in.costs, mrpc.run, opt, in.predictions, in.noise, tol, false);
        for (const auto& c : r.checks) out.push_back(from_check(c, in.label));
        double max_x = 0.0;
        for (const auto& x : mrpc.run.traj.x) max_x = std::max(max_x, x.lpNorm<Eigen::Infinity>());
        double scale = 1.0;
        for (const auto& w : in.noise.w) scale = std::max(scale, w.lpNorm<Eigen::Infinity>());
        out.push_back({"mrpc.zero_state", max_x <= 1e-12 * scale * in.spec.T(), max_x / (1e-12 * scale * in.spec.T()),
                       in.label + fmt(": max |x| %.3g%.0s", max_x, 0.0)});
        const double slack = 10.0 * opt.solver_gap;
        out.push_back(from_check({"", opt.total_cost, zero.total_cost, slack + 1e-12 * (1 + zero.total_cost)}, in.label,
                                 "zero_slow.at_least_opt"));
        for (const ControllerRun* run : {&mrpc.run, &opt, &zero}) {
            bool ok = true;
            try {
                check_trajectory(in.spec, run->traj, &in.noise);
            } catch (const Error&) {
                ok = false;
            }
            out.push_back({"controllers.dynamics_consistent", ok, 0.0, in.label + " " + run->name});
        }

        // Window 0 must not react to disturbances outside it.
        NoiseTrace perturbed = in.noise;
        const int first_len = std::min(in.spec.k(), in.spec.T());
        for (int t = first_len; t < in.spec.T(); ++t) perturbed.w[t] = -3.0 * perturbed.w[t] + Vec::Ones(in.spec.n());
        const PredictionTrace pp =
            generate_predictions(in.prediction_model, perturbed, in.spec.k(), in.costs.cf.as_norm());
        const MrpcRun again = run_mrpc(in.spec, in.costs, perturbed, pp, mo);
        bool same = again.windows.front().s == mrpc.windows.front().s;
        for (int t = 0; t < first_len; ++t) same = same && again.run.traj.f[t] == mrpc.run.traj.f[t];
        out.push_back({"mrpc.information_discipline", same, 0.0, in.label});

        for (auto& o : oracle_1d_outcomes(in, tol)) out.push_back(std::move(o));
        return out;
    });

    suite.family(25, [&](int i) {
        const Instance in = dominant_state_instance(mix_seed(kCorpusSeed + 7, i), i);
        const MrpcRun mrpc = run_mrpc(in.spec, in.costs, in.noise, in.predictions, mo);
        const ControllerRun opt = run_offline_opt(in.spec, in.costs, in.noise, tol);
        const double denom = std::max(opt.total_cost, 1.0);
        const double slack = 10.0 * (opt.solver_gap + mrpc.run.solver_gap) / denom;
        const double diff = std::abs(mrpc.run.total_cost - opt.total_cost) / denom;
        return Outcomes{{"thm2.mrpc_equals_opt", diff <= 1e-5 + slack, diff / (1e-5 + slack),
                         in.label + fmt(": relative difference %.3g%.0s", diff, 0.0)}};
    });

    suite.family(50, [&](int i) {
        const SocoInstance si = strongly_convex_instance(mix_seed(kCorpusSeed + 8, i), i);
        const AfhcRun afhc = run_afhc(si.soco, si.w, tol);
        const SocoRun opt = soco_offline_opt(si.soco, tol);
        const BoundReport r = thm1_report(si.soco, afhc, opt, si.w, false);
        Outcomes out;
        for (const auto& c : r.checks)
            out.push_back(from_check(c, si.label, c.name.rfind("fhc_feasible", 0) == 0 ? "fhc_feasible" : c.name));
        return out;
    });

    suite.family(25, [&](int i) {
        const Instance in = single_timescale_instance(mix_seed(kCorpusSeed + 9, i), i);
        const ControllerRun two = run_offline_opt(in.spec, in.costs, in.noise, tol);
        const ControllerRun one = run_fast_only_opt(in.spec, in.costs, in.noise, tol);
        const SocoRun soco = soco_offline_opt(make_soco_problem(in.spec, in.costs, in.noise), tol);
        const double gap_slack = 10.0 * (one.solver_gap + soco.run.solver_gap) / std::max(1.0, one.total_cost);
        Outcomes out;
        out.push_back(relative_match("prop1.soco_equals_fast_only", soco.soco_cost, one.total_cost, 1e-6 + gap_slack, in.label));
        out.push_back(relative_match("prop1.two_timescale_equals_fast_only", two.total_cost, one.total_cost,
                                     1e-6 + gap_slack, in.label));
        return out;
    });

    suite.family(100, [&](int i) {
        const Instance in = single_timescale_instance(mix_seed(kCorpusSeed + 10, i), i);
        Rng rng(mix_seed(kCorpusSeed + 11, i));
        Sequence f;
        for (int t = 0; t < in.spec.T(); ++t) f.push_back(rng.normal_vec(in.spec.n()));
        const Sequence back = soco_lift(in.spec, soco_reduce(in.spec, in.costs, f, in.noise).y);
        double err = 0.0;
        for (std::size_t t = 0; t < f.size(); ++t) err = std::max(err, (back[t] - f[t]).lpNorm<Eigen::Infinity>());
        return Outcomes{{"prop1.lift_reduce_roundtrip", err <= 1e-10, err / 1e-10, in.label}};
    });

    suite.family(500, [&](int i) {
        const Lemma1Sample s = random_lemma1_sample(mix_seed(kCorpusSeed + 12, i));
        const Lemma1Result r = lemma1_sample_check(s, tol);
        const double usage = r.lhs >= r.rhs ? 0.0 : (r.rhs - r.lhs) / r.slack;
        return Outcomes{{"lemma1", r.passed, usage, "sample " + std::to_string(i) + fmt(": lhs %.12g rhs %.12g", r.lhs, r.rhs)}};
    });
}

void noise_checks(Suite& suite) {
    suite.family(100, [](int i) {
        Rng rng(mix_seed(kCorpusSeed + 13, i));
        const int n = rng.integer(1, 4);
        const NormCost cf{kNorms[rng.integer(0, 2)], std::exp(rng.uniform(-1, 1))};
        const double eps = rng.uniform(0.0, 2.0);
        const NoiseTrace w = generate_noise(NoiseModel{GaussianIID{1.0}, rng.bits()}, n, 60);
        const PredictionModel pm{AdditiveBounded{eps}, rng.bits()};
        const PredictionTrace p = generate_predictions(pm, w, rng.integer(1, 10), cf);
        double worst = 0.0;
        for (std::size_t t = 0; t < w.w.size(); ++t)
            worst = std::max(worst, cf.weight * vector_norm(p.what[t] - w.w[t], cf.p));
        Outcomes out;
        out.push_back({"noise.additive_bounded", worst <= eps * (1 + 1e-12), 0.0, fmt("max error %.6g > %.6g", worst, eps)});
        const PredictionTrace again = generate_predictions(pm, w, 1 + i % 10, cf);
        const PredictionTrace again2 = generate_predictions(pm, w, 1 + i % 10, cf);
        bool same = generate_noise(NoiseModel{GaussianIID{1.0}, 99}, n, 10).w == generate_noise(NoiseModel{GaussianIID{1.0}, 99}, n, 10).w;
        same = same && again.what == again2.what;
        out.push_back({"noise.determinism", same, 0.0, "generator " + std::to_string(i)});
        return out;
    });
}

void hardness_note(Suite& suite, double tol) {
    double ratio[2];
    const double mags[2] = {1.0, 10.0};
    for (int i = 0; i < 2; ++i) {
        const Instance in = alternating_instance(mags[i]);
        const MrpcRun m = run_mrpc(in.spec, in.costs, in.noise, in.predictions, MrpcOptions{tol, false});
        const ControllerRun o = run_offline_opt(in.spec, in.costs, in.noise, tol);
        ratio[i] = m.run.total_cost / o.total_cost;
    }
    suite.note(fmt("hardness (reported, not asserted): MRPC with zero predictions on alternating noise, "
                   "empirical ratio %.9g at magnitude 1, %.9g at magnitude 10",
                   ratio[0], ratio[1]));
}

void scenario_checks(Suite& suite, const ScenarioConfig& cfg, const RunOptions& opts, double tol) {
    const std::vector<SweepPoint> points = sweep_points(cfg);
    const int per_point = static_cast<int>(cfg.seeds.size());
    suite.family(static_cast<int>(points.size()) * per_point, [&](int i) {
        const SweepPoint& p = points[i / per_point];
        const std::uint64_t seed = cfg.seeds[i % per_point] + static_cast<std::uint64_t>(opts.seed_offset);
        RunOptions quiet = opts;
        quiet.dump_trajectories = false;
        const detail::TaskOutput t = detail::run_task(cfg, p, seed, quiet, tol);
        Outcomes out;
        for (const auto& r : t.rows)
            out.push_back({"scenario." + r.controller, r.error.empty(), 0.0,
                           r.scenario + " seed " + std::to_string(r.seed) + ": " + r.error});
        return out;
    });
}

}  // namespace

int validate_suite(const ScenarioConfig* config, const RunOptions& opts, std::ostream& out) {
    const double tol = opts.tol.value_or(config ? config->tol : kDefaultSolveTol);
    if (!(tol >= 1e-10)) throw Error(ErrorCode::ValidationError, "tol: must be >= 1e-10");
    Suite suite(opts.jobs);
    if (config) {
        validate_config(*config);
        out << "validating scenario " << config->name << "\n";
        scenario_checks(suite, *config, opts, tol);
    } else {
        out << "validating the built-in corpus\n";
        system_checks(suite);
        kernel_checks(suite, tol);
        bound_checks(suite, opts, tol);
        noise_checks(suite);
        hardness_note(suite, tol);
    }
    return suite.report(out);
}

}  // namespace mtsc::harness
