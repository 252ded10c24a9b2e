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
#ifndef MTSC_HARNESS_INTERNAL_HPP
#define MTSC_HARNESS_INTERNAL_HPP

#include <string>
#include <utility>
#include <vector>

#include "mtsc/harness.hpp"

namespace mtsc::harness::detail {

/// Everything one (sweep point, seed) pair produces.
struct TaskOutput {
    std::vector<RunRecord> rows;
    std::vector<std::pair<std::string, Trajectory>> trajectories;
};

TaskOutput run_task(const ScenarioConfig& cfg, const SweepPoint& point, std::uint64_t seed, const RunOptions& opts,
                    double tol);

}  // namespace mtsc::harness::detail

#endif  // MTSC_HARNESS_INTERNAL_HPP
