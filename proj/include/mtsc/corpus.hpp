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
#ifndef MTSC_CORPUS_HPP
#define MTSC_CORPUS_HPP

#include <cstdint>
#include <string>

#include "mtsc/controllers.hpp"
#include "mtsc/noise.hpp"

namespace mtsc {

/// One randomized two-timescale instance with its noise and predictions drawn.
struct Instance {
    std::string label;
    SystemSpec spec;
    CostSpec costs;
    NoiseModel noise_model;
    PredictionModel prediction_model;
    NoiseTrace noise;
    PredictionTrace predictions;
};

/// n in 1..4, T in 20..120, k in {2, 5, 10}, random norm costs. The noise kind
/// cycles with index, the prediction kind with index / 5.
Instance random_norm_instance(std::uint64_t seed, int index);

/// As random_norm_instance with perfect predictions and the state weight raised
/// until c >= (1 + ||A||_x) ||Bf^{-1}||_f.
Instance dominant_state_instance(std::uint64_t seed, int index);

/// Single-timescale instance: Bs = Bf and c_s = c_f.
Instance single_timescale_instance(std::uint64_t seed, int index);

/// Fixed system under +-magnitude alternating noise with all-zero predictions.
Instance alternating_instance(double magnitude);

struct SocoInstance {
    std::string label;
    SocoProblem soco;
    int w;
};

/// Quadratic-floor state cost with m in {0.5, 1, 2}, c0 in {0.5, 1} and
/// window w in {1, 2, 4}, cycling with index.
SocoInstance strongly_convex_instance(std::uint64_t seed, int index);

}  // namespace mtsc

#endif  // MTSC_CORPUS_HPP
