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
#ifndef MTSC_NOISE_HPP
#define MTSC_NOISE_HPP

#include <cstdint>
#include <random>
#include <string>
#include <variant>

#include "mtsc/system_model.hpp"

namespace mtsc {

/// Seeded generator: mt19937_64 for bits, 53-bit uniforms, Box-Muller normals.
/// Deterministic across platforms given the seed.
class Rng {
public:
    static constexpr const char* kName = "mt19937_64/uniform53/box-muller";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();                        // [0, 1)
    double uniform(double lo, double hi);    // [lo, hi)
    double normal();                         // N(0, 1)
    int integer(int lo, int hi);             // inclusive range
    std::uint64_t bits() { return engine_(); }
    Vec normal_vec(int n, double sigma = 1.0);
    Vec uniform_vec(int n, double lo, double hi);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// splitmix64 finalizer, used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

struct GaussianIID {
    double sigma;
};
struct UniformIID {
    double radius;
};
struct SinusoidPlusNoise {
    double amplitude;
    double period;
    double sigma;
};
struct SpikeTrain {
    double magnitude;
    int spacing;
};
struct AdversarialAlternating {
    double magnitude;
};

struct NoiseModel {
    std::variant<GaussianIID, UniformIID, SinusoidPlusNoise, SpikeTrain, AdversarialAlternating> kind;
    std::uint64_t seed = 0;
};

std::string describe(const NoiseModel& model);

/// Disturbance trace of T vectors in R^n.
///   gaussianIID       every coordinate N(0, sigma^2)
///   uniformIID        every coordinate U[-radius, radius)
///   sinusoidPlusNoise amplitude * sin(2 pi t / period + 2 pi i / n) + N(0, sigma^2)
///   spikeTrain        magnitude * u at t = 1, 1 + spacing, ...; u a random sign vector, zero elsewhere
///   adversarialAlternating  +magnitude e1, -magnitude e1, ...
NoiseTrace generate_noise(const NoiseModel& model, int n, int T);

struct Perfect {};
struct AdditiveGaussian {
    double sigma;
};
struct AdditiveBounded {
    double epsilon;
};
struct AdversarialWorstSign {
    double epsilon;
};

struct PredictionModel {
    std::variant<Perfect, AdditiveGaussian, AdditiveBounded, AdversarialWorstSign> kind;
    std::uint64_t seed = 0;
};

std::string describe(const PredictionModel& model);

/// Estimates issued at the start of each slow window of length k. Errors are
/// drawn per step from a generator seeded by (seed, window index), so each
/// window's entries are fixed together and never depend on other windows.
/// Error sizes are measured in the (weighted) fast-cost norm f_norm:
/// additiveBounded keeps f_norm(e_t) <= epsilon, adversarialWorstSign sets
/// e_t = epsilon * sign(w_t) / f_norm(sign(w_t)).
PredictionTrace generate_predictions(const PredictionModel& model, const NoiseTrace& w, int k,
                                     const NormCost& f_norm);

/// (1/T) sum_t f_norm(what_t - w_t). Throws LengthMismatch.
double prediction_error(const Sequence& what, const Sequence& w, const NormCost& f_norm);

}  // namespace mtsc

#endif  // MTSC_NOISE_HPP
