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
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mtsc/harness.hpp"

namespace mtsc::harness {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::ValidationError, field + ": " + what);
}

/// Object view that rejects keys nobody asked about.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) invalid(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }
    const json& get(const std::string& key) {
        if (!has(key)) invalid(path(key), "required field is missing");
        return j_.at(key);
    }

    double number(const std::string& key) {
        const json& v = get(key);
        if (!v.is_number()) invalid(path(key), "expected a number");
        return v.get<double>();
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }
    int integer(const std::string& key) {
        const json& v = get(key);
        if (!v.is_number_integer()) invalid(path(key), "expected an integer");
        return v.get<int>();
    }
    int integer(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }
    std::string text(const std::string& key) {
        const json& v = get(key);
        if (!v.is_string()) invalid(path(key), "expected a string");
        return v.get<std::string>();
    }
    bool flag(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = j_.at(key);
        if (!v.is_boolean()) invalid(path(key), "expected true or false");
        return v.get<bool>();
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) invalid(path(it.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

Mat parse_matrix(const json& j, int n, const std::string& field) {
    if (j.is_string() && j.get<std::string>() == "identity") return Mat::Identity(n, n);
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        invalid(field, "expected \"identity\" or " + std::to_string(n) + " rows");
    Mat M(n, n);
    for (int r = 0; r < n; ++r) {
        const json& row = j[r];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            invalid(field, "row " + std::to_string(r) + " must have " + std::to_string(n) + " entries");
        for (int c = 0; c < n; ++c) {
            if (!row[c].is_number()) invalid(field, "entries must be numbers");
            M(r, c) = row[c].get<double>();
        }
    }
    return M;
}

Vec parse_vector(const json& j, int n, const std::string& field) {
    if (j.is_number() && n == 1) return Vec::Constant(1, j.get<double>());
    if (!j.is_array() || static_cast<int>(j.size()) != n) invalid(field, "expected " + std::to_string(n) + " entries");
    Vec v(n);
    for (int i = 0; i < n; ++i) {
        if (!j[i].is_number()) invalid(field, "entries must be numbers");
        v[i] = j[i].get<double>();
    }
    return v;
}

NormKind parse_p(const json& j, const std::string& field) {
    if (j.is_number_integer()) {
        const int p = j.get<int>();
        if (p == 1) return NormKind::L1;
        if (p == 2) return NormKind::L2;
    } else if (j.is_string()) {
        try {
            return parse_norm_kind(j.get<std::string>());
        } catch (const Error&) {
        }
    }
    invalid(field, "p must be 1, 2 or \"inf\"");
}

StageCost parse_cost(const json& j, int n, const std::string& field) {
    Fields f(j, field);
    const std::string type = f.text("type");
    StageCost out;
    if (type == "norm") {
        NormCost c;
        c.p = parse_p(f.get("p"), f.path("p"));
        c.weight = f.number("weight", 1.0);
        if (!(c.weight > 0.0) || !std::isfinite(c.weight)) invalid(f.path("weight"), "must be > 0");
        out = c;
    } else if (type == "quad_floor") {
        QuadFloorCost c;
        c.m = f.number("m");
        c.c0 = f.number("c0", 0.0);
        if (!(c.m > 0.0)) invalid(f.path("m"), "must be > 0");
        if (!(c.c0 >= 0.0)) invalid(f.path("c0"), "must be >= 0");
        if (f.has("center")) {
            const json& cj = f.get("center");
            if (!cj.is_array()) invalid(f.path("center"), "expected a list of vectors");
            for (std::size_t t = 0; t < cj.size(); ++t)
                c.center.push_back(parse_vector(cj[t], n, f.path("center") + "[" + std::to_string(t) + "]"));
        }
        out = c;
    } else {
        invalid(f.path("type"), "must be \"norm\" or \"quad_floor\"");
    }
    f.finish();
    return out;
}

NoiseModel parse_noise(const json& j) {
    Fields f(j, "noise");
    const std::string kind = f.text("kind");
    NoiseModel m;
    auto nonneg = [&](const char* key) {
        const double v = f.number(key);
        if (!(v >= 0.0)) invalid(f.path(key), "must be >= 0");
        return v;
    };
    if (kind == "gaussian_iid") {
        m.kind = GaussianIID{nonneg("sigma")};
    } else if (kind == "uniform_iid") {
        m.kind = UniformIID{nonneg("radius")};
    } else if (kind == "sinusoid_plus_noise") {
        const double amplitude = f.number("amplitude");
        const double period = f.number("period");
        if (!(period > 0.0)) invalid(f.path("period"), "must be > 0");
        m.kind = SinusoidPlusNoise{amplitude, period, nonneg("sigma")};
    } else if (kind == "spike_train") {
        const double magnitude = f.number("magnitude");
        const int spacing = f.integer("spacing");
        if (spacing < 1) invalid(f.path("spacing"), "must be >= 1");
        m.kind = SpikeTrain{magnitude, spacing};
    } else if (kind == "adversarial_alternating") {
        m.kind = AdversarialAlternating{f.number("magnitude")};
    } else {
        invalid(f.path("kind"),
                "must be one of gaussian_iid, uniform_iid, sinusoid_plus_noise, spike_train, adversarial_alternating");
    }
    f.finish();
    return m;
}

PredictionModel parse_predictions(const json& j) {
    Fields f(j, "predictions");
    const std::string kind = f.text("kind");
    PredictionModel m;
    auto nonneg = [&](const char* key) {
        const double v = f.number(key);
        if (!(v >= 0.0)) invalid(f.path(key), "must be >= 0");
        return v;
    };
    if (kind == "perfect") {
        m.kind = Perfect{};
    } else if (kind == "additive_gaussian") {
        m.kind = AdditiveGaussian{nonneg("sigma")};
    } else if (kind == "additive_bounded") {
        m.kind = AdditiveBounded{nonneg("epsilon")};
    } else if (kind == "adversarial_worst_sign") {
        m.kind = AdversarialWorstSign{nonneg("epsilon")};
    } else {
        invalid(f.path("kind"), "must be one of perfect, additive_gaussian, additive_bounded, adversarial_worst_sign");
    }
    f.finish();
    return m;
}

ControllerConfig parse_controller(const json& j, const std::string& field) {
    Fields f(j, field);
    const std::string type = f.text("type");
    ControllerConfig c;
    if (type == "mrpc") {
        c.kind = ControllerKind::Mrpc;
    } else if (type == "offline_opt") {
        c.kind = ControllerKind::OfflineOpt;
    } else if (type == "zero_slow") {
        c.kind = ControllerKind::ZeroSlow;
    } else if (type == "afhc") {
        c.kind = ControllerKind::Afhc;
        c.w = f.integer("w");
        c.thm1_report = f.flag("thm1_report", false);
    } else if (type == "fhc") {
        c.kind = ControllerKind::Fhc;
        c.w = f.integer("w");
        c.phase = f.integer("phase", 1);
    } else {
        invalid(f.path("type"), "must be one of mrpc, afhc, fhc, offline_opt, zero_slow");
    }
    if (c.w < 0) invalid(f.path("w"), "must be >= 0");
    f.finish();
    return c;
}

template <class T>
std::vector<T> parse_axis(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) invalid(field, "expected a non-empty list");
    std::vector<T> out;
    for (const auto& v : j) {
        if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) invalid(field, "entries must be integers");
        } else {
            if (!v.is_number()) invalid(field, "entries must be numbers");
        }
        out.push_back(v.get<T>());
    }
    return out;
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i + 1 < std::min(byte, text.size() + 1); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

json cost_json(const StageCost& c) {
    if (c.is_norm()) return {{"type", "norm"}, {"p", to_string(c.as_norm().p)}, {"weight", c.as_norm().weight}};
    const auto& q = c.as_quad();
    json out = {{"type", "quad_floor"}, {"m", q.m}, {"c0", q.c0}};
    if (!q.center.empty()) {
        json centers = json::array();
        for (const auto& v : q.center) centers.push_back(std::vector<double>(v.data(), v.data() + v.size()));
        out["center"] = centers;
    }
    return out;
}

json matrix_json(const Mat& M) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(row);
    }
    return rows;
}

template <class... Fs>
struct Overload : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overload(Fs...) -> Overload<Fs...>;

}  // namespace

std::string ControllerConfig::label(int window) const {
    switch (kind) {
        case ControllerKind::Mrpc: return "mrpc";
        case ControllerKind::OfflineOpt: return "offline_opt";
        case ControllerKind::ZeroSlow: return "zero_slow";
        case ControllerKind::Afhc: return "afhc_w" + std::to_string(window);
        case ControllerKind::Fhc: return "fhc_w" + std::to_string(window) + "_p" + std::to_string(phase);
    }
    return "?";
}

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        std::string what = e.what();
        const auto pos = what.find("syntax error");
        throw Error(ErrorCode::ParseError, origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                                               (pos == std::string::npos ? what : what.substr(pos)));
    }

    ScenarioConfig cfg;
    Fields f(root, "");
    cfg.name = f.text("scenario");
    if (!std::regex_match(cfg.name, std::regex("[A-Za-z0-9_.-]+")))
        invalid("scenario", "use letters, digits, '_', '.' or '-' only");

    {
        Fields s(f.get("system"), "system");
        cfg.n = s.integer("n");
        cfg.T = s.integer("T");
        cfg.k = s.integer("k");
        if (cfg.n < 1) invalid("system.n", "must be >= 1");
        if (cfg.T < 1) invalid("system.T", "must be >= 1");
        if (cfg.k < 1 || cfg.k > cfg.T)
            invalid("k", "must satisfy 1 <= k <= T (system.k = " + std::to_string(cfg.k) + ")");
        cfg.A = parse_matrix(s.get("A"), cfg.n, "system.A");
        cfg.Bf = parse_matrix(s.get("Bf"), cfg.n, "system.Bf");
        cfg.Bs = parse_matrix(s.get("Bs"), cfg.n, "system.Bs");
        cfg.invertibility_threshold = s.number("invertibility_threshold", cfg.invertibility_threshold);
        if (!(cfg.invertibility_threshold > 0.0)) invalid("system.invertibility_threshold", "must be > 0");
        s.finish();
    }
    {
        Fields c(f.get("costs"), "costs");
        cfg.costs.cx = parse_cost(c.get("cx"), cfg.n, "costs.cx");
        cfg.costs.cf = parse_cost(c.get("cf"), cfg.n, "costs.cf");
        cfg.costs.cs = parse_cost(c.get("cs"), cfg.n, "costs.cs");
        c.finish();
    }
    cfg.noise = parse_noise(f.get("noise"));
    cfg.predictions = f.has("predictions") ? parse_predictions(f.get("predictions")) : PredictionModel{Perfect{}, 0};

    const json& ctrl = f.get("controllers");
    if (!ctrl.is_array() || ctrl.empty()) invalid("controllers", "expected a non-empty list");
    for (std::size_t i = 0; i < ctrl.size(); ++i)
        cfg.controllers.push_back(parse_controller(ctrl[i], "controllers[" + std::to_string(i) + "]"));

    if (f.has("sweep")) {
        Fields s(f.get("sweep"), "sweep");
        if (s.has("T")) cfg.sweep.T = parse_axis<int>(s.get("T"), "sweep.T");
        if (s.has("k")) cfg.sweep.k = parse_axis<int>(s.get("k"), "sweep.k");
        if (s.has("w")) cfg.sweep.w = parse_axis<int>(s.get("w"), "sweep.w");
        if (s.has("epsilon")) cfg.sweep.epsilon = parse_axis<double>(s.get("epsilon"), "sweep.epsilon");
        if (s.has("noise_scale")) cfg.sweep.noise_scale = parse_axis<double>(s.get("noise_scale"), "sweep.noise_scale");
        s.finish();
    }
    if (f.has("output_dir")) cfg.output_dir = f.text("output_dir");

    const json& seeds = f.get("seeds");
    if (!seeds.is_array() || seeds.empty()) invalid("seeds", "expected a non-empty list of integers");
    for (const auto& s : seeds) {
        if (!s.is_number_unsigned()) invalid("seeds", "entries must be non-negative integers");
        cfg.seeds.push_back(s.get<std::uint64_t>());
    }
    cfg.tol = f.number("tol", cfg.tol);
    f.finish();

    validate_config(cfg);
    return cfg;
}

void validate_config(const ScenarioConfig& cfg) {
    try {
        validate_system(cfg.n, cfg.T, cfg.k, cfg.A, cfg.Bf, cfg.Bs, cfg.invertibility_threshold);
    } catch (const Error& e) {
        invalid(e.code() == ErrorCode::SingularBf ? "system.Bf" : "system", e.what());
    }
    if (!(cfg.tol >= 1e-10)) invalid("tol", "must be >= 1e-10");
    if (!cfg.costs.cf.is_norm())
        invalid("costs.cf", "must be a norm cost (it is the movement penalty and the prediction-error norm)");

    const std::vector<int> Ts = cfg.sweep.T.empty() ? std::vector<int>{cfg.T} : cfg.sweep.T;
    const std::vector<int> ks = cfg.sweep.k.empty() ? std::vector<int>{cfg.k} : cfg.sweep.k;
    for (int T : Ts)
        if (T < 1) invalid("sweep.T", "entries must be >= 1");
    const int minT = *std::min_element(Ts.begin(), Ts.end());
    const int maxT = *std::max_element(Ts.begin(), Ts.end());
    for (int k : ks)
        if (k < 1 || k > minT)
            invalid("k", "must satisfy 1 <= k <= T for every sweep point (got " + std::to_string(k) + ")");
    for (int w : cfg.sweep.w)
        if (w < 0) invalid("sweep.w", "entries must be >= 0");
    for (double e : cfg.sweep.epsilon)
        if (!(e >= 0.0)) invalid("sweep.epsilon", "entries must be >= 0");
    for (double s : cfg.sweep.noise_scale)
        if (!(s >= 0.0)) invalid("sweep.noise_scale", "entries must be >= 0");
    if (!cfg.sweep.epsilon.empty() && std::holds_alternative<Perfect>(cfg.predictions.kind))
        invalid("sweep.epsilon", "needs a prediction model with an error size (not perfect)");
    if (!cfg.sweep.w.empty()) {
        const bool windowed = std::any_of(cfg.controllers.begin(), cfg.controllers.end(), [](const ControllerConfig& c) {
            return c.kind == ControllerKind::Afhc || c.kind == ControllerKind::Fhc;
        });
        if (!windowed) invalid("sweep.w", "no afhc or fhc controller to apply it to");
    }

    for (const StageCost* c : {&cfg.costs.cx, &cfg.costs.cf, &cfg.costs.cs}) {
        if (c->is_norm()) continue;
        const std::size_t len = c->as_quad().center.size();
        if (len > 1 && len < static_cast<std::size_t>(maxT))
            invalid("costs", "a quad_floor center sequence needs 1 or at least T entries");
    }

    for (std::size_t i = 0; i < cfg.controllers.size(); ++i) {
        const auto& c = cfg.controllers[i];
        const std::string field = "controllers[" + std::to_string(i) + "]";
        if (c.kind == ControllerKind::Mrpc && !cfg.costs.all_norms())
            invalid(field, "mrpc requires norm costs for c_x, c_f and c_s");
        if (c.kind == ControllerKind::Afhc && c.thm1_report) {
            if (cfg.costs.cx.is_norm() || !(cfg.costs.cx.as_quad().c0 > 0.0))
                invalid(field + ".thm1_report",
                        "the AFHC bound requires a strongly convex state cost: costs.cx must be quad_floor with c0 > 0");
        }
        if (c.kind == ControllerKind::Fhc) {
            const std::vector<int> ws = cfg.sweep.w.empty() ? std::vector<int>{c.w} : cfg.sweep.w;
            for (int w : ws)
                if (c.phase < 1 || c.phase > w + 1) invalid(field + ".phase", "must be in 1..w+1 for every window length");
        }
    }
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

std::string dump_config(const ScenarioConfig& cfg) {
    json j;
    j["scenario"] = cfg.name;
    j["system"] = {{"n", cfg.n},
                   {"T", cfg.T},
                   {"k", cfg.k},
                   {"A", matrix_json(cfg.A)},
                   {"Bf", matrix_json(cfg.Bf)},
                   {"Bs", matrix_json(cfg.Bs)},
                   {"invertibility_threshold", cfg.invertibility_threshold}};
    j["costs"] = {{"cx", cost_json(cfg.costs.cx)}, {"cf", cost_json(cfg.costs.cf)}, {"cs", cost_json(cfg.costs.cs)}};
    j["noise"] = std::visit(
        Overload{
            [](const GaussianIID& m) -> json { return {{"kind", "gaussian_iid"}, {"sigma", m.sigma}}; },
            [](const UniformIID& m) -> json { return {{"kind", "uniform_iid"}, {"radius", m.radius}}; },
            [](const SinusoidPlusNoise& m) -> json {
                return {{"kind", "sinusoid_plus_noise"}, {"amplitude", m.amplitude}, {"period", m.period}, {"sigma", m.sigma}};
            },
            [](const SpikeTrain& m) -> json {
                return {{"kind", "spike_train"}, {"magnitude", m.magnitude}, {"spacing", m.spacing}};
            },
            [](const AdversarialAlternating& m) -> json {
                return {{"kind", "adversarial_alternating"}, {"magnitude", m.magnitude}};
            },
        },
        cfg.noise.kind);
    j["predictions"] = std::visit(
        Overload{
            [](const Perfect&) -> json { return {{"kind", "perfect"}}; },
            [](const AdditiveGaussian& m) -> json { return {{"kind", "additive_gaussian"}, {"sigma", m.sigma}}; },
            [](const AdditiveBounded& m) -> json { return {{"kind", "additive_bounded"}, {"epsilon", m.epsilon}}; },
            [](const AdversarialWorstSign& m) -> json {
                return {{"kind", "adversarial_worst_sign"}, {"epsilon", m.epsilon}};
            },
        },
        cfg.predictions.kind);
    json ctrls = json::array();
    for (const auto& c : cfg.controllers) {
        switch (c.kind) {
            case ControllerKind::Mrpc: ctrls.push_back({{"type", "mrpc"}}); break;
            case ControllerKind::OfflineOpt: ctrls.push_back({{"type", "offline_opt"}}); break;
            case ControllerKind::ZeroSlow: ctrls.push_back({{"type", "zero_slow"}}); break;
            case ControllerKind::Afhc:
                ctrls.push_back({{"type", "afhc"}, {"w", c.w}, {"thm1_report", c.thm1_report}});
                break;
            case ControllerKind::Fhc: ctrls.push_back({{"type", "fhc"}, {"w", c.w}, {"phase", c.phase}}); break;
        }
    }
    j["controllers"] = ctrls;
    if (!cfg.sweep.empty()) {
        json s = json::object();
        if (!cfg.sweep.T.empty()) s["T"] = cfg.sweep.T;
        if (!cfg.sweep.k.empty()) s["k"] = cfg.sweep.k;
        if (!cfg.sweep.w.empty()) s["w"] = cfg.sweep.w;
        if (!cfg.sweep.epsilon.empty()) s["epsilon"] = cfg.sweep.epsilon;
        if (!cfg.sweep.noise_scale.empty()) s["noise_scale"] = cfg.sweep.noise_scale;
        j["sweep"] = s;
    }
    j["output_dir"] = cfg.output_dir;
    j["seeds"] = cfg.seeds;
    j["tol"] = cfg.tol;
    return j.dump(2);
}

}  // namespace mtsc::harness
