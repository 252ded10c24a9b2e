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
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "harness/internal.hpp"
#include "json.hpp"

namespace mtsc::harness {

namespace fs = std::filesystem;

namespace {

template <class... Fs>
struct Overload : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overload(Fs...) -> Overload<Fs...>;

std::string num(double v, const char* format = "%.12g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string csv_safe(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r' || c == '"') c = c == ',' ? ';' : ' ';
    return s;
}

std::string describe_error(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) return std::string(to_string(err->code())) + ": " + e.what();
    return std::string("InternalError: ") + e.what();
}

NoiseModel scaled_noise(NoiseModel m, double s) {
    std::visit(Overload{
                   [&](GaussianIID& g) { g.sigma *= s; },
                   [&](UniformIID& u) { u.radius *= s; },
                   [&](SinusoidPlusNoise& q) {
                       q.amplitude *= s;
                       q.sigma *= s;
                   },
                   [&](SpikeTrain& q) { q.magnitude *= s; },
                   [&](AdversarialAlternating& a) { a.magnitude *= s; },
               },
               m.kind);
    return m;
}

PredictionModel with_error_size(PredictionModel m, double e) {
    std::visit(Overload{
                   [](Perfect&) {},
                   [&](AdditiveGaussian& g) { g.sigma = e; },
                   [&](AdditiveBounded& b) { b.epsilon = e; },
                   [&](AdversarialWorstSign& a) { a.epsilon = e; },
               },
               m.kind);
    return m;
}

void write_trajectory(const fs::path& path, const Trajectory& traj) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    const auto n = traj.x.front().size();
    out << "t";
    for (const char* tag : {"x", "f", "s"})
        for (Eigen::Index i = 1; i <= n; ++i) out << ',' << tag << i;
    out << '\n';
    for (std::size_t t = 1; t < traj.x.size(); ++t) {
        out << t;
        for (const Vec* v : {&traj.x[t], &traj.f[t - 1], &traj.s[t - 1]})
            for (Eigen::Index i = 0; i < n; ++i) out << ',' << num((*v)[i], "%.17g");
        out << '\n';
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace

namespace detail {

TaskOutput run_task(const ScenarioConfig& cfg, const SweepPoint& point, std::uint64_t seed, const RunOptions& opts,
                    double tol) {
    using clock = std::chrono::steady_clock;
    TaskOutput out;
    const std::string scenario = cfg.sweep.empty() ? cfg.name : cfg.name + "[" + point.label(cfg.sweep) + "]";
    auto base_record = [&](std::string controller) {
        RunRecord r;
        r.scenario = scenario;
        r.seed = seed;
        r.controller = std::move(controller);
        r.T = point.T;
        r.k = point.k;
        r.n = cfg.n;
        return r;
    };

    std::optional<SystemSpec> spec;
    NoiseTrace noise;
    PredictionTrace predictions;
    try {
        spec.emplace(cfg.n, point.T, point.k, cfg.A, cfg.Bf, cfg.Bs, cfg.invertibility_threshold);
        NoiseModel nm = point.noise_scale ? scaled_noise(cfg.noise, *point.noise_scale) : cfg.noise;
        nm.seed = seed;
        PredictionModel pm = point.epsilon ? with_error_size(cfg.predictions, *point.epsilon) : cfg.predictions;
        pm.seed = mix_seed(seed, 1);
        noise = generate_noise(nm, cfg.n, point.T);
        predictions = generate_predictions(pm, noise, point.k, cfg.costs.cf.as_norm());
    } catch (const std::exception& e) {
        for (const auto& c : cfg.controllers) {
            RunRecord r = base_record(c.label(point.w.value_or(c.w)));
            r.error = describe_error(e);
            out.rows.push_back(std::move(r));
        }
        return out;
    }
    const CostSpec& costs = cfg.costs;
    const double E = prediction_error(predictions.what, noise.w, costs.cf.as_norm());

    bool need_opt = false;
    bool need_soco = false;
    for (const auto& c : cfg.controllers) {
        if (c.kind == ControllerKind::Afhc || c.kind == ControllerKind::Fhc) need_soco = true;
        else need_opt = true;
    }
    std::optional<ControllerRun> opt;
    std::string opt_error;
    if (need_opt) {
        try {
            opt = run_offline_opt(*spec, costs, noise, tol);
        } catch (const std::exception& e) {
            opt_error = describe_error(e);
        }
    }
    std::optional<SocoProblem> soco;
    std::optional<SocoRun> soco_opt;
    std::string soco_error;
    if (need_soco) {
        try {
            soco = make_soco_problem(*spec, costs, noise);
            soco_opt = soco_offline_opt(*soco, tol);
        } catch (const std::exception& e) {
            soco_error = describe_error(e);
        }
    }

    for (const auto& c : cfg.controllers) {
        const int w = point.w.value_or(c.w);
        RunRecord r = base_record(c.label(w));
        const auto t0 = clock::now();
        try {
            const bool windowed = c.kind == ControllerKind::Afhc || c.kind == ControllerKind::Fhc;
            if (!windowed && !opt) throw Error(ErrorCode::CheckFailed, "offline optimum unavailable (" + opt_error + ")");
            if (windowed && !soco_opt)
                throw Error(ErrorCode::CheckFailed, "SOCO optimum unavailable (" + soco_error + ")");
            const double opt_cost = windowed ? soco_opt->soco_cost : opt->total_cost;
            const double opt_gap = windowed ? soco_opt->run.solver_gap : opt->solver_gap;
            r.opt_cost = opt_cost;
            ControllerRun run;
            std::optional<BoundReport> report;
            switch (c.kind) {
                case ControllerKind::Mrpc: {
                    MrpcOptions mo;
                    mo.tol = tol;
                    mo.flip_fast_sign = opts.corrupt_mrpc;
                    run = run_mrpc(*spec, costs, noise, predictions, mo).run;
                    report = thm2_report(*spec, costs, run, *opt, predictions, noise, tol, false);
                    r.thm2_factor = report->thm2_first_factor;
                    r.thm2_additive = report->thm2_additive;
                    r.lemma2_lb = report->lemma2_lower_bound;
                    r.pred_error = E;
                    r.upper_bound_per_step = *report->thm2_first_factor * report->per_step_opt + *report->thm2_additive;
                    break;
                }
                case ControllerKind::OfflineOpt: run = *opt; break;
                case ControllerKind::ZeroSlow: run = run_baseline_zero_slow(*spec, costs, noise); break;
                case ControllerKind::Fhc: {
                    if (c.phase > w + 1) throw Error(ErrorCode::InvalidArgument, "phase exceeds w+1");
                    run = run_fhc(*soco, w, c.phase, tol).run;
                    break;
                }
                case ControllerKind::Afhc: {
                    const AfhcRun afhc = run_afhc(*soco, w, tol);
                    run = afhc.average.run;
                    if (c.thm1_report) {
                        report = thm1_report(*soco, afhc, *soco_opt, w, false);
                        r.thm1_bound = report->thm1_bound;
                        r.upper_bound_per_step = *report->thm1_bound * report->per_step_opt;
                    } else {
                        // Averaging never costs more than the mean phase.
                        double mean = 0.0;
                        for (const auto& ph : afhc.phases) mean += ph.soco_cost;
                        mean /= static_cast<double>(afhc.phases.size());
                        if (afhc.average.soco_cost > mean + 1e-12 * (1.0 + mean))
                            throw Error(ErrorCode::BoundViolated, "afhc_jensen violated");
                    }
                    break;
                }
            }
            check_trajectory(*spec, run.traj, &noise);
            r.total_cost = run.total_cost;
            r.per_step_cost = run.total_cost / point.T;
            r.solver_gap = run.solver_gap;
            if (opt_cost > 10.0 * opt_gap && opt_cost > 0.0) r.emp_cr = run.total_cost / opt_cost;
            if (report) {
                if (const InequalityCheck* bad = report->first_violation()) {
                    r.check_failed = true;
                    r.error = "BoundViolated: " + bad->name + " lhs " + num(bad->lhs) + " > rhs " + num(bad->rhs) +
                              " + slack " + num(bad->slack, "%.3g");
                }
            }
            if (opts.dump_trajectories) out.trajectories.emplace_back(r.controller, std::move(run.traj));
        } catch (const std::exception& e) {
            r.error = describe_error(e);
            if (const auto* err = dynamic_cast<const Error*>(&e)) r.check_failed = err->code() == ErrorCode::BoundViolated;
        }
        r.duration_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        out.rows.push_back(std::move(r));
    }
    return out;
}

}  // namespace detail

std::string SweepPoint::label(const SweepGrid& grid) const {
    std::string out;
    auto add = [&](const std::string& part) { out += (out.empty() ? "" : ";") + part; };
    if (!grid.T.empty()) add("T=" + std::to_string(T));
    if (!grid.k.empty()) add("k=" + std::to_string(k));
    if (w) add("w=" + std::to_string(*w));
    if (epsilon) add("epsilon=" + num(*epsilon));
    if (noise_scale) add("noise_scale=" + num(*noise_scale));
    return out;
}

std::vector<SweepPoint> sweep_points(const ScenarioConfig& cfg) {
    const auto& g = cfg.sweep;
    const std::vector<int> Ts = g.T.empty() ? std::vector<int>{cfg.T} : g.T;
    const std::vector<int> ks = g.k.empty() ? std::vector<int>{cfg.k} : g.k;
    std::vector<std::optional<int>> ws(1);
    std::vector<std::optional<double>> es(1), ss(1);
    if (!g.w.empty()) ws.assign(g.w.begin(), g.w.end());
    if (!g.epsilon.empty()) es.assign(g.epsilon.begin(), g.epsilon.end());
    if (!g.noise_scale.empty()) ss.assign(g.noise_scale.begin(), g.noise_scale.end());
    std::vector<SweepPoint> out;
    for (int T : Ts)
        for (int k : ks)
            for (const auto& w : ws)
                for (const auto& e : es)
                    for (const auto& s : ss) out.push_back(SweepPoint{T, k, w, e, s});
    return out;
}

const std::string& csv_header() {
    static const std::string h =
        "scenario,seed,controller,T,k,n,total_cost,per_step_cost,opt_cost,thm2_factor,thm2_additive,thm1_bound,"
        "lemma2_lb,emp_cr,pred_error,solver_gap,error";
    return h;
}

std::string csv_row(const RunRecord& r) {
    std::ostringstream os;
    os << csv_safe(r.scenario) << ',' << r.seed << ',' << csv_safe(r.controller) << ',' << r.T << ',' << r.k << ','
       << r.n << ',' << opt_num(r.total_cost) << ',' << opt_num(r.per_step_cost) << ',' << opt_num(r.opt_cost) << ','
       << opt_num(r.thm2_factor) << ',' << opt_num(r.thm2_additive) << ',' << opt_num(r.thm1_bound) << ','
       << opt_num(r.lemma2_lb) << ',' << opt_num(r.emp_cr) << ',' << opt_num(r.pred_error) << ','
       << opt_num(r.solver_gap) << ',' << csv_safe(r.error);
    return os.str();
}

void parallel_for(int count, int jobs, const std::function<void(int)>& f) {
    if (jobs <= 0) jobs = static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
    jobs = std::min(jobs, count);
    if (jobs <= 1) {
        for (int i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) {
        pool.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < count;) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts, std::ostream& log) {
    validate_config(cfg);
    const double tol = opts.tol.value_or(cfg.tol);
    if (!(tol >= 1e-10)) throw Error(ErrorCode::ValidationError, "tol: must be >= 1e-10");
    const fs::path out_dir = opts.out_dir.value_or(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + out_dir.string() + ": " + ec.message());

    const std::vector<SweepPoint> points = sweep_points(cfg);
    struct Task {
        std::size_t point;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t p = 0; p < points.size(); ++p)
        for (std::uint64_t s : cfg.seeds) tasks.push_back({p, s + static_cast<std::uint64_t>(opts.seed_offset)});

    std::vector<detail::TaskOutput> outputs(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), opts.jobs, [&](int i) {
        outputs[i] = detail::run_task(cfg, points[tasks[i].point], tasks[i].seed, opts, tol);
    });

    ScenarioResult result;
    result.csv_path = (out_dir / (cfg.name + ".csv")).string();
    std::ostringstream csv, timing, bounds;
    csv << csv_header() << '\n';
    timing << "scenario,seed,controller,duration_ms\n";
    bounds << "scenario,seed,controller,T,k,actual_per_step,upper_bound_per_step,lower_bound_per_step,opt_per_step\n";
    const fs::path traj_dir = out_dir / (cfg.name + "_traj");
    if (opts.dump_trajectories) {
        fs::create_directories(traj_dir, ec);
        if (ec) throw Error(ErrorCode::IoError, "cannot create " + traj_dir.string());
    }
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        for (const auto& r : outputs[i].rows) {
            csv << csv_row(r) << '\n';
            timing << csv_safe(r.scenario) << ',' << r.seed << ',' << r.controller << ',' << num(r.duration_ms, "%.3f")
                   << '\n';
            const auto per_step = [&](const std::optional<double>& v) {
                return v ? std::optional<double>(*v / r.T) : std::nullopt;
            };
            bounds << csv_safe(r.scenario) << ',' << r.seed << ',' << r.controller << ',' << r.T << ',' << r.k << ','
                   << opt_num(r.per_step_cost) << ',' << opt_num(r.upper_bound_per_step) << ','
                   << opt_num(per_step(r.lemma2_lb)) << ',' << opt_num(per_step(r.opt_cost)) << '\n';
            if (!r.error.empty()) ++result.failed_rows;
            result.rows.push_back(r);
        }
        for (const auto& [controller, traj] : outputs[i].trajectories) {
            const std::string file =
                "p" + std::to_string(tasks[i].point) + "_seed" + std::to_string(tasks[i].seed) + "_" + controller + ".csv";
            write_trajectory(traj_dir / file, traj);
        }
    }
    write_text(result.csv_path, csv.str());
    write_text(out_dir / (cfg.name + ".timing.csv"), timing.str());
    write_text(out_dir / (cfg.name + ".bounds.csv"), bounds.str());

    nlohmann::ordered_json meta;
    meta["scenario"] = cfg.name;
    meta["rng"] = Rng::kName;
    meta["prediction_seed"] = "splitmix64(seed, 1), then splitmix64(., window)";
    meta["seed_offset"] = opts.seed_offset;
    meta["tol"] = tol;
    meta["rows"] = result.rows.size();
    meta["failed_rows"] = result.failed_rows;
    meta["sweep_points"] = points.size();
    meta["columns"] = csv_header();
    meta["config"] = nlohmann::ordered_json::parse(dump_config(cfg));
    write_text(out_dir / (cfg.name + ".meta.json"), meta.dump(2) + "\n");

    if (!opts.quiet)
        log << "wrote " << result.csv_path << " (" << result.rows.size() << " rows, " << result.failed_rows
            << " with errors)\n";
    return result;
}

}  // namespace mtsc::harness
