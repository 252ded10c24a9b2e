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
#include "mtsc/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mtsc {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

int Rng::integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
}

Vec Rng::normal_vec(int n, double sigma) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = sigma * normal();
    return v;
}

Vec Rng::uniform_vec(int n, double lo, double hi) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(lo, hi);
    return v;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

template <class... Fs>
struct Overload : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overload(Fs...) -> Overload<Fs...>;

void require_nonnegative(double v, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be >= 0");
}

Vec sign_pattern(const Vec& w) {
    Vec s(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) s[i] = w[i] < 0.0 ? -1.0 : 1.0;
    return s;
}

double weighted(const NormCost& c, const Vec& v) { return c.weight * vector_norm(v, c.p); }

}  // namespace

std::string describe(const NoiseModel& model) {
    std::ostringstream os;
    os.precision(12);
    std::visit(Overload{
                   [&](const GaussianIID& m) { os << "gaussian_iid(sigma=" << m.sigma << ")"; },
                   [&](const UniformIID& m) { os << "uniform_iid(radius=" << m.radius << ")"; },
                   [&](const SinusoidPlusNoise& m) {
                       os << "sinusoid_plus_noise(amplitude=" << m.amplitude << ",period=" << m.period
                          << ",sigma=" << m.sigma << ")";
                   },
                   [&](const SpikeTrain& m) {
                       os << "spike_train(magnitude=" << m.magnitude << ",spacing=" << m.spacing << ")";
                   },
                   [&](const AdversarialAlternating& m) {
                       os << "adversarial_alternating(magnitude=" << m.magnitude << ")";
                   },
               },
               model.kind);
    return os.str();
}

std::string describe(const PredictionModel& model) {
    std::ostringstream os;
    os.precision(12);
    std::visit(Overload{
                   [&](const Perfect&) { os << "perfect"; },
                   [&](const AdditiveGaussian& m) { os << "additive_gaussian(sigma=" << m.sigma << ")"; },
                   [&](const AdditiveBounded& m) { os << "additive_bounded(epsilon=" << m.epsilon << ")"; },
                   [&](const AdversarialWorstSign& m) {
                       os << "adversarial_worst_sign(epsilon=" << m.epsilon << ")";
                   },
               },
               model.kind);
    return os.str();
}

NoiseTrace generate_noise(const NoiseModel& model, int n, int T) {
    if (n < 1 || T < 1) throw Error(ErrorCode::BadDimensions, "generate_noise needs n >= 1 and T >= 1");
    Rng rng(model.seed);
    NoiseTrace trace;
    trace.w.reserve(static_cast<std::size_t>(T));
    std::visit(Overload{
                   [&](const GaussianIID& m) {
                       require_nonnegative(m.sigma, "sigma");
                       for (int t = 0; t < T; ++t) trace.w.push_back(rng.normal_vec(n, m.sigma));
                   },
                   [&](const UniformIID& m) {
                       require_nonnegative(m.radius, "radius");
                       for (int t = 0; t < T; ++t) trace.w.push_back(rng.uniform_vec(n, -m.radius, m.radius));
                   },
                   [&](const SinusoidPlusNoise& m) {
                       require_nonnegative(m.sigma, "sigma");
                       if (!(m.period > 0.0)) throw Error(ErrorCode::InvalidArgument, "period must be > 0");
                       for (int t = 1; t <= T; ++t) {
                           Vec w = rng.normal_vec(n, m.sigma);
                           for (int i = 0; i < n; ++i)
                               w[i] += m.amplitude * std::sin(2.0 * std::numbers::pi * (t / m.period + double(i) / n));
                           trace.w.push_back(std::move(w));
                       }
                   },
                   [&](const SpikeTrain& m) {
                       if (m.spacing < 1) throw Error(ErrorCode::InvalidArgument, "spacing must be >= 1");
                       for (int t = 0; t < T; ++t) {
                           if (t % m.spacing == 0) {
                               Vec u(n);
                               for (int i = 0; i < n; ++i) u[i] = rng.uniform() < 0.5 ? -m.magnitude : m.magnitude;
                               trace.w.push_back(std::move(u));
                           } else {
                               trace.w.push_back(Vec::Zero(n));
                           }
                       }
                   },
                   [&](const AdversarialAlternating& m) {
                       for (int t = 0; t < T; ++t) {
                           Vec w = Vec::Zero(n);
                           w[0] = t % 2 == 0 ? m.magnitude : -m.magnitude;
                           trace.w.push_back(std::move(w));
                       }
                   },
               },
               model.kind);
    return trace;
}

PredictionTrace generate_predictions(const PredictionModel& model, const NoiseTrace& w, int k,
                                     const NormCost& f_norm) {
    if (k < 1) throw Error(ErrorCode::BadDimensions, "slow period must be >= 1");
    const int T = static_cast<int>(w.w.size());
    PredictionTrace out;
    out.what.reserve(w.w.size());
    for (int start = 0, window = 0; start < T; start += k, ++window) {
        Rng rng(mix_seed(model.seed, static_cast<std::uint64_t>(window)));
        for (int t = start; t < std::min(start + k, T); ++t) {
            const Vec& wt = w.w[t];
            const int n = static_cast<int>(wt.size());
            Vec e = std::visit(Overload{
                                   [&](const Perfect&) -> Vec { return Vec::Zero(n); },
                                   [&](const AdditiveGaussian& m) -> Vec {
                                       require_nonnegative(m.sigma, "sigma");
                                       return rng.normal_vec(n, m.sigma);
                                   },
                                   [&](const AdditiveBounded& m) -> Vec {
                                       require_nonnegative(m.epsilon, "epsilon");
                                       Vec d = rng.normal_vec(n);
                                       const double r = m.epsilon * rng.uniform();
                                       const double nd = weighted(f_norm, d);
                                       return nd > 0.0 ? Vec(d * (r / nd)) : Vec(Vec::Zero(n));
                                   },
                                   [&](const AdversarialWorstSign& m) -> Vec {
                                       require_nonnegative(m.epsilon, "epsilon");
                                       const Vec s = sign_pattern(wt);
                                       return s * (m.epsilon / weighted(f_norm, s));
                                   },
                               },
                               model.kind);
            out.what.push_back(wt + e);
        }
    }
    return out;
}

double prediction_error(const Sequence& what, const Sequence& w, const NormCost& f_norm) {
    if (what.size() != w.size()) throw Error(ErrorCode::LengthMismatch, "prediction and noise traces differ in length");
    if (w.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t) {
        if (what[t].size() != w[t].size()) throw Error(ErrorCode::LengthMismatch, "vector dimensions differ");
        total += weighted(f_norm, what[t] - w[t]);
    }
    return total / static_cast<double>(w.size());
}

}  // namespace mtsc
