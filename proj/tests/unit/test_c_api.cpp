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

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "mtsc/c_api.h"

namespace {

const char* kScenario = R"({
  "scenario": "capi",
  "system": {"n": 1, "T": 10, "k": 2, "A": [[0.5]], "Bf": "identity", "Bs": "identity"},
  "costs": {"cx": {"type": "norm", "p": 1}, "cf": {"type": "norm", "p": 1}, "cs": {"type": "norm", "p": 1}},
  "noise": {"kind": "uniform_iid", "radius": 1.0},
  "controllers": [{"type": "mrpc"}, {"type": "offline_opt"}],
  "seeds": [3, 4]
})";

void append(const char* text, size_t length, void* user) { static_cast<std::string*>(user)->append(text, length); }

}  // namespace

TEST_CASE("version and status names") {
    CHECK(std::strlen(mtsc_version()) > 0);
    CHECK(std::string(mtsc_status_name(MTSC_OK)) == "Ok");
    CHECK(std::string(mtsc_status_name(MTSC_E_SINGULAR_BF)) == "SingularBf");
    CHECK(std::string(mtsc_status_name(MTSC_E_INVALID_ARGUMENT)) == "InvalidArgument");
}

TEST_CASE("matrix norms through the C interface") {
    const double M[] = {1, -2, 3, 4};
    double out = 0;
    REQUIRE(mtsc_induced_norm(M, 2, 2, MTSC_NORM_LINF, &out) == MTSC_OK);
    CHECK(out == doctest::Approx(7.0));
    REQUIRE(mtsc_norm_equivalence_constant(MTSC_NORM_L2, MTSC_NORM_L1, 4, &out) == MTSC_OK);
    CHECK(out == doctest::Approx(0.5));
    CHECK(mtsc_induced_norm(nullptr, 2, 2, MTSC_NORM_L1, &out) == MTSC_E_INVALID_ARGUMENT);
    CHECK(std::string(mtsc_last_error()).find("NULL") != std::string::npos);
}

TEST_CASE("system handles") {
    const double one = 1.0, half = 0.5, zero = 0.0;
    mtsc_system* sys = nullptr;
    CHECK(mtsc_system_create(1, 2, 2, &half, &zero, &one, &sys) == MTSC_E_SINGULAR_BF);
    CHECK(sys == nullptr);
    CHECK(mtsc_system_create(1, 2, 0, &half, &one, &one, &sys) == MTSC_E_BAD_DIMENSIONS);
    REQUIRE(mtsc_system_create(1, 2, 2, &half, &one, &one, &sys) == MTSC_OK);
    REQUIRE(mtsc_system_set_norm_costs(sys, MTSC_NORM_L1, 1, MTSC_NORM_L1, 1, MTSC_NORM_L1, 1) == MTSC_OK);
    const double w[] = {4, 4};
    double cost = 0, x[2] = {1, 1};
    REQUIRE(mtsc_system_run(sys, MTSC_CONTROLLER_MRPC, w, nullptr, 0, &cost, x) == MTSC_OK);
    CHECK(cost == doctest::Approx(8.0).epsilon(1e-8));
    CHECK(std::abs(x[0]) < 1e-14);
    CHECK(std::abs(x[1]) < 1e-14);
    double opt = 0;
    REQUIRE(mtsc_system_run(sys, MTSC_CONTROLLER_OFFLINE_OPT, w, nullptr, 0, &opt, nullptr) == MTSC_OK);
    CHECK(opt <= cost + 1e-7);
    double base = 0;
    REQUIRE(mtsc_system_run(sys, MTSC_CONTROLLER_ZERO_SLOW, w, nullptr, 0, &base, nullptr) == MTSC_OK);
    CHECK(base == doctest::Approx(8.0));
    CHECK(mtsc_system_run(sys, static_cast<mtsc_controller>(9), w, nullptr, 0, &base, nullptr) ==
          MTSC_E_INVALID_ARGUMENT);
    CHECK(mtsc_system_set_norm_costs(sys, MTSC_NORM_L1, -1, MTSC_NORM_L1, 1, MTSC_NORM_L1, 1) ==
          MTSC_E_INVALID_ARGUMENT);
    mtsc_system_free(sys);
}

TEST_CASE("scenario lifecycle") {
    mtsc_scenario* sc = nullptr;
    CHECK(mtsc_scenario_parse("{ not json", &sc) == MTSC_E_PARSE);
    CHECK(std::string(mtsc_last_error()).find(":1:") != std::string::npos);
    CHECK(mtsc_scenario_load("/nonexistent.json", &sc) == MTSC_E_IO);
    REQUIRE(mtsc_scenario_parse(kScenario, &sc) == MTSC_OK);
    CHECK(std::string(mtsc_scenario_name(sc)) == "capi");
    int value = -1;
    REQUIRE(mtsc_scenario_has_sweep(sc, &value) == MTSC_OK);
    CHECK(value == 0);
    REQUIRE(mtsc_scenario_task_count(sc, &value) == MTSC_OK);
    CHECK(value == 2);

    const auto dir = std::filesystem::temp_directory_path() / "mtsc_capi_test";
    std::filesystem::remove_all(dir);
    const std::string dir_s = dir.string();
    mtsc_run_options o;
    mtsc_run_options_init(&o);
    o.out_dir = dir_s.c_str();
    std::string log;
    mtsc_run_summary summary{};
    REQUIRE(mtsc_scenario_run(sc, &o, append, &log, &summary) == MTSC_OK);
    CHECK(summary.rows == 4);
    CHECK(summary.failed_rows == 0);
    CHECK(std::filesystem::exists(summary.csv_path));
    CHECK(log.find("wrote") != std::string::npos);

    std::string shown;
    REQUIRE(mtsc_show(summary.csv_path, append, &shown) == MTSC_OK);
    CHECK(shown.find("offline_opt") != std::string::npos);
    CHECK(mtsc_show("/nonexistent.csv", append, &shown) == MTSC_E_IO);

    std::string report;
    int passed = 0;
    REQUIRE(mtsc_validate(sc, &o, append, &report, &passed) == MTSC_OK);
    CHECK(passed == 1);
    o.corrupt_mrpc = 1;
    REQUIRE(mtsc_validate(sc, &o, append, &report, &passed) == MTSC_OK);
    CHECK(passed == 0);
    mtsc_scenario_free(sc);
    std::filesystem::remove_all(dir);
}
