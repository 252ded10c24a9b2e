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
#include "mtsc/c_api.h"

#include <cstdio>
#include <cstring>
#include <ostream>
#include <streambuf>
#include <string>

#include "mtsc/controllers.hpp"
#include "mtsc/harness.hpp"

struct mtsc_scenario {
    mtsc::harness::ScenarioConfig config;
};

struct mtsc_system {
    mtsc::SystemSpec spec;
    mtsc::CostSpec costs;
};

namespace {

thread_local std::string g_last_error;

mtsc_status fail(mtsc_status s, std::string message) {
    g_last_error = std::move(message);
    return s;
}

template <class F>
mtsc_status guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return MTSC_OK;
    } catch (const mtsc::Error& e) {
        return fail(static_cast<mtsc_status>(static_cast<int>(e.code()) + 1), e.what());
    } catch (const std::exception& e) {
        return fail(MTSC_E_INTERNAL, e.what());
    } catch (...) {
        return fail(MTSC_E_INTERNAL, "unknown exception");
    }
}

class CallbackBuf : public std::streambuf {
public:
    CallbackBuf(mtsc_write_fn fn, void* user) : fn_(fn), user_(user) {}

protected:
    int_type overflow(int_type ch) override {
        if (ch != traits_type::eof()) {
            const char c = static_cast<char>(ch);
            emit(&c, 1);
        }
        return ch;
    }
    std::streamsize xsputn(const char* s, std::streamsize count) override {
        emit(s, static_cast<std::size_t>(count));
        return count;
    }

private:
    void emit(const char* s, std::size_t n) {
        if (fn_)
            fn_(s, n, user_);
        else
            std::fwrite(s, 1, n, stdout);
    }
    mtsc_write_fn fn_;
    void* user_;
};

mtsc::NormKind to_norm(mtsc_norm p) {
    switch (p) {
        case MTSC_NORM_L1: return mtsc::NormKind::L1;
        case MTSC_NORM_L2: return mtsc::NormKind::L2;
        case MTSC_NORM_LINF: return mtsc::NormKind::Linf;
    }
    throw mtsc::Error(mtsc::ErrorCode::InvalidArgument, "unknown norm " + std::to_string(static_cast<int>(p)));
}

mtsc::harness::RunOptions to_options(const mtsc_run_options* o) {
    mtsc::harness::RunOptions r;
    if (!o) return r;
    if (o->out_dir) r.out_dir = o->out_dir;
    r.seed_offset = o->seed_offset;
    if (o->tol > 0) r.tol = o->tol;
    r.dump_trajectories = o->dump_trajectories != 0;
    r.jobs = o->jobs;
    r.corrupt_mrpc = o->corrupt_mrpc != 0;
    r.quiet = o->quiet != 0;
    return r;
}

void require(const void* p, const char* what) {
    if (!p) throw mtsc::Error(mtsc::ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

mtsc::Mat square(const double* data, int n) {
    require(data, "matrix");
    mtsc::Mat M(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) M(r, c) = data[r * n + c];
    return M;
}

mtsc::Sequence rows(const double* data, int T, int n) {
    mtsc::Sequence out;
    out.reserve(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) out.push_back(Eigen::Map<const mtsc::Vec>(data + t * n, n));
    return out;
}

}  // namespace

extern "C" {

const char* mtsc_version(void) { return "0.1.0"; }

const char* mtsc_status_name(mtsc_status status) {
    if (status == MTSC_OK) return "Ok";
    if (status == MTSC_E_INTERNAL) return "InternalError";
    if (status > MTSC_OK && status < MTSC_E_INTERNAL)
        return mtsc::to_string(static_cast<mtsc::ErrorCode>(static_cast<int>(status) - 1));
    return "UnknownStatus";
}

const char* mtsc_last_error(void) { return g_last_error.c_str(); }

void mtsc_run_options_init(mtsc_run_options* options) {
    if (!options) return;
    std::memset(options, 0, sizeof *options);
    options->jobs = 1;
}

mtsc_status mtsc_scenario_load(const char* path, mtsc_scenario** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new mtsc_scenario{mtsc::harness::load_config(path)};
    });
}

mtsc_status mtsc_scenario_parse(const char* text, mtsc_scenario** out) {
    return guarded([&] {
        require(text, "text");
        require(out, "out");
        *out = new mtsc_scenario{mtsc::harness::parse_config(text)};
    });
}

void mtsc_scenario_free(mtsc_scenario* scenario) { delete scenario; }

const char* mtsc_scenario_name(const mtsc_scenario* scenario) {
    return scenario ? scenario->config.name.c_str() : "";
}

mtsc_status mtsc_scenario_has_sweep(const mtsc_scenario* scenario, int* out) {
    return guarded([&] {
        require(scenario, "scenario");
        require(out, "out");
        *out = scenario->config.sweep.empty() ? 0 : 1;
    });
}

mtsc_status mtsc_scenario_task_count(const mtsc_scenario* scenario, int* out) {
    return guarded([&] {
        require(scenario, "scenario");
        require(out, "out");
        *out = static_cast<int>(mtsc::harness::sweep_points(scenario->config).size() * scenario->config.seeds.size());
    });
}

mtsc_status mtsc_scenario_run(const mtsc_scenario* scenario, const mtsc_run_options* options, mtsc_write_fn log,
                              void* user, mtsc_run_summary* summary) {
    return guarded([&] {
        require(scenario, "scenario");
        CallbackBuf buf(log, user);
        std::ostream os(&buf);
        const auto result = mtsc::harness::run_scenario(scenario->config, to_options(options), os);
        os.flush();
        if (summary) {
            summary->rows = static_cast<int>(result.rows.size());
            summary->failed_rows = result.failed_rows;
            std::snprintf(summary->csv_path, sizeof summary->csv_path, "%s", result.csv_path.c_str());
        }
    });
}

mtsc_status mtsc_validate(const mtsc_scenario* scenario, const mtsc_run_options* options, mtsc_write_fn out,
                          void* user, int* passed) {
    return guarded([&] {
        require(passed, "passed");
        CallbackBuf buf(out, user);
        std::ostream os(&buf);
        *passed = mtsc::harness::validate_suite(scenario ? &scenario->config : nullptr, to_options(options), os) == 0;
        os.flush();
    });
}

mtsc_status mtsc_show(const char* csv_path, mtsc_write_fn out, void* user) {
    return guarded([&] {
        require(csv_path, "csv_path");
        CallbackBuf buf(out, user);
        std::ostream os(&buf);
        mtsc::harness::show_csv(csv_path, os);
        os.flush();
    });
}

mtsc_status mtsc_system_create(int n, int T, int k, const double* A, const double* Bf, const double* Bs,
                               mtsc_system** out) {
    return guarded([&] {
        require(out, "out");
        if (n < 1) throw mtsc::Error(mtsc::ErrorCode::BadDimensions, "n must be positive");
        mtsc::SystemSpec spec(n, T, k, square(A, n), square(Bf, n), square(Bs, n));
        mtsc::CostSpec costs{mtsc::NormCost{}, mtsc::NormCost{}, mtsc::NormCost{}};
        *out = new mtsc_system{std::move(spec), std::move(costs)};
    });
}

void mtsc_system_free(mtsc_system* system) { delete system; }

mtsc_status mtsc_system_set_norm_costs(mtsc_system* system, mtsc_norm px, double wx, mtsc_norm pf, double wf,
                                       mtsc_norm ps, double ws) {
    return guarded([&] {
        require(system, "system");
        for (double wt : {wx, wf, ws})
            if (!(wt >= 0)) throw mtsc::Error(mtsc::ErrorCode::InvalidArgument, "cost weights must be nonnegative");
        system->costs = mtsc::CostSpec{mtsc::NormCost{to_norm(px), wx}, mtsc::NormCost{to_norm(pf), wf},
                                       mtsc::NormCost{to_norm(ps), ws}};
    });
}

mtsc_status mtsc_system_run(const mtsc_system* system, mtsc_controller controller, const double* w,
                            const double* w_hat, double tol, double* total_cost, double* states) {
    return guarded([&] {
        require(system, "system");
        require(w, "w");
        require(total_cost, "total_cost");
        const auto& spec = system->spec;
        if (!(tol > 0)) tol = mtsc::kDefaultSolveTol;
        const mtsc::NoiseTrace noise{rows(w, spec.T(), spec.n())};
        mtsc::ControllerRun run;
        switch (controller) {
            case MTSC_CONTROLLER_MRPC: {
                const mtsc::PredictionTrace preds{w_hat ? rows(w_hat, spec.T(), spec.n()) : noise.w};
                run = mtsc::run_mrpc(spec, system->costs, noise, preds, mtsc::MrpcOptions{tol, false}).run;
                break;
            }
            case MTSC_CONTROLLER_OFFLINE_OPT: run = mtsc::run_offline_opt(spec, system->costs, noise, tol); break;
            case MTSC_CONTROLLER_ZERO_SLOW: run = mtsc::run_baseline_zero_slow(spec, system->costs, noise); break;
            default: throw mtsc::Error(mtsc::ErrorCode::InvalidArgument, "unknown controller");
        }
        *total_cost = run.total_cost;
        if (states)
            for (int t = 0; t < spec.T(); ++t)
                for (int i = 0; i < spec.n(); ++i) states[t * spec.n() + i] = run.traj.x[t](i);
    });
}

mtsc_status mtsc_induced_norm(const double* M, int rows_, int cols, mtsc_norm p, double* out) {
    return guarded([&] {
        require(M, "M");
        require(out, "out");
        if (rows_ < 1 || cols < 1) throw mtsc::Error(mtsc::ErrorCode::BadDimensions, "matrix must be non-empty");
        mtsc::Mat m(rows_, cols);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols; ++c) m(r, c) = M[r * cols + c];
        *out = mtsc::induced_norm(m, to_norm(p));
    });
}

mtsc_status mtsc_norm_equivalence_constant(mtsc_norm px, mtsc_norm pf, int n, double* out) {
    return guarded([&] {
        require(out, "out");
        *out = mtsc::norm_equivalence_constant(to_norm(px), to_norm(pf), n);
    });
}

}  // extern "C"
