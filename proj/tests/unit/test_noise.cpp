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

#include <random>

#include "../oracles.hpp"
#include "mtsc/noise.hpp"

using namespace mtsc;

TEST_CASE("zero-variance gaussian noise is zero") {
    for (std::uint64_t seed : {0ULL, 1ULL, 999ULL}) {
        const NoiseTrace w = generate_noise(NoiseModel{GaussianIID{0.0}, seed}, 3, 20);
        REQUIRE(w.w.size() == 20);
        for (const auto& v : w.w) CHECK(v.isZero());
    }
}

TEST_CASE("alternating noise") {
    const NoiseTrace w = generate_noise(NoiseModel{AdversarialAlternating{2.0}, 5}, 1, 4);
    REQUIRE(w.w.size() == 4);
    CHECK(w.w[0](0) == 2.0);
    CHECK(w.w[1](0) == -2.0);
    CHECK(w.w[2](0) == 2.0);
    CHECK(w.w[3](0) == -2.0);
    const NoiseTrace w2 = generate_noise(NoiseModel{AdversarialAlternating{1.0}, 5}, 3, 2);
    CHECK(w2.w[1] == Vec(Eigen::Vector3d(-1, 0, 0)));
}

TEST_CASE("generators are deterministic in the seed") {
    const std::vector<NoiseModel> models{
        {GaussianIID{1.0}, 3}, {UniformIID{2.0}, 3}, {SinusoidPlusNoise{1.0, 8.0, 0.2}, 3}, {SpikeTrain{4.0, 5}, 3},
        {AdversarialAlternating{1.0}, 3}};
    for (const auto& m : models) {
        CHECK(generate_noise(m, 3, 30).w == generate_noise(m, 3, 30).w);
        NoiseModel other = m;
        other.seed = 4;
        if (m.kind.index() < 4) CHECK(generate_noise(other, 3, 30).w != generate_noise(m, 3, 30).w);
    }
    const NoiseTrace w = generate_noise(models[0], 2, 30);
    for (const PredictionModel& p : std::vector<PredictionModel>{{AdditiveGaussian{0.5}, 8}, {AdditiveBounded{0.5}, 8}}) {
        const NormCost f{NormKind::L2, 1.0};
        CHECK(generate_predictions(p, w, 5, f).what == generate_predictions(p, w, 5, f).what);
    }
}

TEST_CASE("uniform and spike generators stay in range") {
    const NoiseTrace u = generate_noise(NoiseModel{UniformIID{0.5}, 1}, 4, 200);
    for (const auto& v : u.w) CHECK(v.lpNorm<Eigen::Infinity>() <= 0.5);
    const NoiseTrace s = generate_noise(NoiseModel{SpikeTrain{3.0, 4}, 1}, 2, 12);
    for (int t = 0; t < 12; ++t) {
        if (t % 4 == 0)
            CHECK(s.w[t].cwiseAbs().isApprox(Vec::Constant(2, 3.0)));
        else
            CHECK(s.w[t].isZero());
    }
}

TEST_CASE("perfect and zero-bound predictions equal the truth") {
    const NoiseTrace w = generate_noise(NoiseModel{GaussianIID{1.0}, 2}, 3, 25);
    const NormCost f{NormKind::L1, 2.0};
    CHECK(generate_predictions(PredictionModel{Perfect{}, 1}, w, 4, f).what == w.w);
    CHECK(generate_predictions(PredictionModel{AdditiveBounded{0.0}, 1}, w, 4, f).what == w.w);
    CHECK(prediction_error(w.w, w.w, f) == 0.0);
}

TEST_CASE("bounded prediction errors respect the bound in the weighted fast norm") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const NoiseTrace w = generate_noise(NoiseModel{GaussianIID{1.0}, seed}, 3, 30);
        for (NormKind p : {NormKind::L1, NormKind::L2, NormKind::Linf}) {
            const NormCost f{p, 1.5};
            const PredictionTrace pr = generate_predictions(PredictionModel{AdditiveBounded{0.8}, seed}, w, 7, f);
            double worst = 0.0;
            for (int t = 0; t < 30; ++t)
                worst = std::max(worst, 1.5 * oracle::pnorm(pr.what[t] - w.w[t], p == NormKind::L1 ? 1 : p == NormKind::L2 ? 2 : 0));
            CHECK(worst <= 0.8 * (1 + 1e-12));
        }
    }
}

TEST_CASE("worst-sign errors have exactly the stated size") {
    const NoiseTrace w = generate_noise(NoiseModel{UniformIID{1.0}, 6}, 3, 20);
    const NormCost f{NormKind::L2, 2.0};
    const PredictionTrace pr = generate_predictions(PredictionModel{AdversarialWorstSign{0.3}, 0}, w, 4, f);
    for (int t = 0; t < 20; ++t) {
        const Vec e = pr.what[t] - w.w[t];
        CHECK(f.weight * e.norm() == doctest::Approx(0.3).epsilon(1e-12));
        for (int i = 0; i < 3; ++i) CHECK(e(i) * w.w[t](i) >= 0.0);
    }
}

TEST_CASE("predictions are fixed per window") {
    const NoiseTrace w = generate_noise(NoiseModel{GaussianIID{1.0}, 9}, 2, 20);
    const NormCost f{NormKind::L2, 1.0};
    const PredictionModel m{AdditiveGaussian{1.0}, 4};
    const PredictionTrace a = generate_predictions(m, w, 5, f);
    NoiseTrace later = w;
    for (int t = 10; t < 20; ++t) later.w[t] *= -4.0;
    const PredictionTrace b = generate_predictions(m, later, 5, f);
    for (int t = 0; t < 10; ++t) CHECK(a.what[t] == b.what[t]);
}

TEST_CASE("prediction error examples") {
    const NormCost abs{NormKind::L1, 1.0};
    const Sequence w{Vec::Constant(1, 0.0), Vec::Constant(1, 0.0)};
    const Sequence what{Vec::Constant(1, 3.0), Vec::Constant(1, -1.0)};
    CHECK(prediction_error(what, w, abs) == doctest::Approx(2.0));
    const Sequence scaled{Vec::Constant(1, 7.5), Vec::Constant(1, -2.5)};
    CHECK(prediction_error(scaled, w, abs) == doctest::Approx(2.5 * 2.0));
    CHECK(prediction_error(what, w, NormCost{NormKind::L1, 3.0}) == doctest::Approx(6.0));
    CHECK_THROWS_AS(prediction_error(what, {w[0]}, abs), Error);
}

TEST_CASE("prediction error vanishes only for exact predictions") {
    Sequence w{Vec::Zero(2)};
    Sequence what{Vec::Zero(2)};
    CHECK(prediction_error(what, w, NormCost{}) == 0.0);
    what[0](1) = 1e-12;
    CHECK(prediction_error(what, w, NormCost{}) > 0.0);
}

TEST_CASE("gaussian prediction error has the expected mean size") {
    // Reference mean of ||e||_f from an independent generator.
    const double sigma = 0.7;
    const int n = 3;
    std::mt19937 ref_gen(12345);
    std::normal_distribution<double> nd(0.0, sigma);
    for (int p : {1, 2, 0}) {
        double ref = 0.0;
        const int ref_samples = 200000;
        for (int s = 0; s < ref_samples; ++s) {
            Eigen::VectorXd e(n);
            for (int i = 0; i < n; ++i) e(i) = nd(ref_gen);
            ref += oracle::pnorm(e, p);
        }
        ref /= ref_samples;
        const NormKind kind = p == 1 ? NormKind::L1 : p == 2 ? NormKind::L2 : NormKind::Linf;
        const NormCost f{kind, 1.0};
        const NoiseTrace w = generate_noise(NoiseModel{GaussianIID{1.0}, 77}, n, 10000);
        const PredictionTrace pr = generate_predictions(PredictionModel{AdditiveGaussian{sigma}, 78}, w, 10, f);
        CHECK(std::abs(prediction_error(pr.what, w.w, f) - ref) <= 0.1 * ref);
    }
}

TEST_CASE("random generator basics") {
    Rng a(1), b(1);
    for (int i = 0; i < 100; ++i) CHECK(a.bits() == b.bits());
    Rng c(2);
    double lo = 1, hi = 0;
    for (int i = 0; i < 10000; ++i) {
        const double u = c.uniform();
        lo = std::min(lo, u), hi = std::max(hi, u);
        const int k = c.integer(-2, 2);
        CHECK(k >= -2);
        CHECK(k <= 2);
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(mix_seed(1, 0) != mix_seed(1, 1));
    CHECK(mix_seed(1, 0) != mix_seed(2, 0));
}
