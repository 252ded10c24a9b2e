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
#include "mtsc/corpus.hpp"

#include <cmath>

namespace mtsc {

namespace {

constexpr NormKind kNorms[] = {NormKind::L1, NormKind::L2, NormKind::Linf};

Mat random_matrix(Rng& rng, int n) {
    Mat M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = rng.normal();
    return M;
}

Mat random_state_gain(Rng& rng, int n, double max_gain = 1.5) {
    Mat A = random_matrix(rng, n);
    const double s = spectral_norm(A);
    if (s > 0.0) A *= rng.uniform(0.2, max_gain) / s;
    return A;
}

Mat random_fast_gain(Rng& rng, int n) {
    for (;;) {
        Mat B = Mat::Identity(n, n) + 0.4 * random_matrix(rng, n);
        if (Eigen::JacobiSVD<Mat>(B).singularValues().minCoeff() > 0.25) return B;
    }
}

NormCost random_norm(Rng& rng) { return {kNorms[rng.integer(0, 2)], std::exp(rng.uniform(-1.0, 1.0))}; }

NoiseModel noise_by_index(Rng& rng, int index) {
    NoiseModel m;
    m.seed = rng.bits();
    switch (index % 5) {
        case 0: m.kind = GaussianIID{rng.uniform(0.5, 2.0)}; break;
        case 1: m.kind = UniformIID{rng.uniform(0.5, 2.0)}; break;
        case 2: m.kind = SinusoidPlusNoise{rng.uniform(1.0, 3.0), rng.uniform(5.0, 20.0), 0.3}; break;
        case 3: m.kind = SpikeTrain{rng.uniform(2.0, 5.0), rng.integer(3, 10)}; break;
        default: m.kind = AdversarialAlternating{rng.uniform(1.0, 3.0)}; break;
    }
    return m;
}

PredictionModel prediction_by_index(Rng& rng, int index) {
    PredictionModel m;
    m.seed = rng.bits();
    switch ((index / 5) % 4) {
        case 0: m.kind = Perfect{}; break;
        case 1: m.kind = AdditiveGaussian{rng.uniform(0.1, 1.0)}; break;
        case 2: m.kind = AdditiveBounded{rng.uniform(0.1, 1.0)}; break;
        default: m.kind = AdversarialWorstSign{rng.uniform(0.1, 1.0)}; break;
    }
    return m;
}

Instance assemble(std::string label, SystemSpec spec, CostSpec costs, NoiseModel nm, PredictionModel pm) {
    NoiseTrace noise = generate_noise(nm, spec.n(), spec.T());
    PredictionTrace pred = generate_predictions(pm, noise, spec.k(), costs.cf.as_norm());
    return Instance{std::move(label), std::move(spec), std::move(costs), nm, pm, std::move(noise), std::move(pred)};
}

std::string tag(const char* family, int index) { return std::string(family) + "#" + std::to_string(index); }

}  // namespace

Instance random_norm_instance(std::uint64_t seed, int index) {
    Rng rng(seed);
    static constexpr int ks[] = {2, 5, 10};
    const int n = rng.integer(1, 4);
    const int T = rng.integer(20, 120);
    const int k = ks[rng.integer(0, 2)];
    Mat A = random_state_gain(rng, n);
    Mat Bf = random_fast_gain(rng, n);
    Mat Bs = random_matrix(rng, n);
    CostSpec costs{random_norm(rng), random_norm(rng), random_norm(rng)};
    NoiseModel nm = noise_by_index(rng, index);
    PredictionModel pm = prediction_by_index(rng, index);
    return assemble(tag("norm", index), SystemSpec(n, T, k, std::move(A), std::move(Bf), std::move(Bs)),
                    std::move(costs), nm, pm);
}

Instance dominant_state_instance(std::uint64_t seed, int index) {
    Instance base = random_norm_instance(seed, index);
    Rng rng(mix_seed(seed, 7));
    const auto& cx = base.costs.cx.as_norm();
    const auto& cf = base.costs.cf.as_norm();
    const double need = (1.0 + induced_norm(base.spec.A(), cx.p)) * induced_norm(base.spec.Bf_inv(), cf.p);
    const double nec = norm_equivalence_constant(cx.p, cf.p, base.spec.n());
    CostSpec costs = base.costs;
    costs.cx = NormCost{cx.p, cf.weight * need / nec * rng.uniform(1.0, 2.0)};
    PredictionModel pm{Perfect{}, 0};
    return assemble(tag("dominant", index), base.spec, std::move(costs), base.noise_model, pm);
}

Instance single_timescale_instance(std::uint64_t seed, int index) {
    Rng rng(seed);
    const int n = rng.integer(1, 3);
    const int T = rng.integer(10, 40);
    const int k = rng.integer(1, 5);
    Mat A = random_state_gain(rng, n, 1.0);
    Mat Bf = random_fast_gain(rng, n);
    const NormCost cf = random_norm(rng);
    CostSpec costs{random_norm(rng), cf, cf};
    NoiseModel nm = noise_by_index(rng, index);
    Mat Bs = Bf;
    return assemble(tag("single", index), SystemSpec(n, T, k, std::move(A), std::move(Bf), std::move(Bs)),
                    std::move(costs), nm, PredictionModel{Perfect{}, 0});
}

Instance alternating_instance(double magnitude) {
    const int n = 2;
    Mat A(n, n);
    A << 0.9, 0.2, -0.1, 0.8;
    Mat B = Mat::Identity(n, n);
    SystemSpec spec(n, 40, 5, A, B, B);
    CostSpec costs{StageCost::norm(NormKind::L2), StageCost::norm(NormKind::L2), StageCost::norm(NormKind::L2, 0.5)};
    NoiseModel nm{AdversarialAlternating{magnitude}, 0};
    NoiseTrace noise = generate_noise(nm, n, spec.T());
    PredictionTrace pred{zeros(spec.T(), n)};
    return Instance{"alternating(" + std::to_string(magnitude) + ")", std::move(spec), std::move(costs), nm,
                    PredictionModel{Perfect{}, 0}, std::move(noise), std::move(pred)};
}

SocoInstance strongly_convex_instance(std::uint64_t seed, int index) {
    Rng rng(seed);
    static constexpr double ms[] = {0.5, 1.0, 2.0};
    static constexpr double c0s[] = {0.5, 1.0};
    static constexpr int ws[] = {1, 2, 4};
    const int n = rng.integer(1, 3);
    const int T = rng.integer(8, 30);
    Mat A = random_state_gain(rng, n, 1.0);
    Mat Bf = random_fast_gain(rng, n);
    QuadFloorCost cx;
    cx.m = ms[index % 3];
    cx.c0 = c0s[(index / 3) % 2];
    for (int t = 0; t < T; ++t) cx.center.push_back(rng.normal_vec(n));
    const NormCost cf = random_norm(rng);
    CostSpec costs{cx, cf, cf};
    NoiseModel nm = noise_by_index(rng, index);
    SystemSpec spec(n, T, 1, std::move(A), Bf, Bf);
    NoiseTrace noise = generate_noise(nm, n, T);
    return SocoInstance{tag("soco", index), make_soco_problem(spec, costs, noise), ws[(index / 6) % 3]};
}

}  // namespace mtsc
