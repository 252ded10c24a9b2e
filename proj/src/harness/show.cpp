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
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "mtsc/harness.hpp"

namespace mtsc::harness {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

struct Summary {
    int rows = 0;
    int errors = 0;
    double per_step_sum = 0.0;
    int per_step_count = 0;
    double cr_sum = 0.0;
    double cr_max = 0.0;
    int cr_count = 0;
};

}  // namespace

void show_csv(const std::string& path, std::ostream& out) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != csv_header())
        throw Error(ErrorCode::ParseError, path + ":1: header does not match the results format");
    const std::vector<std::string> cols = split(csv_header());
    auto col = [&](const char* name) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name) return i;
        throw Error(ErrorCode::InvalidArgument, name);
    };
    const std::size_t c_scen = col("scenario"), c_ctrl = col("controller"), c_ps = col("per_step_cost"),
                      c_cr = col("emp_cr"), c_err = col("error");

    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, Summary> groups;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::vector<std::string> cells = split(line);
        if (cells.size() != cols.size())
            throw Error(ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": expected " +
                                                   std::to_string(cols.size()) + " fields, found " +
                                                   std::to_string(cells.size()));
        const auto key = std::make_pair(cells[c_scen], cells[c_ctrl]);
        auto [it, fresh] = groups.try_emplace(key);
        if (fresh) order.push_back(key);
        Summary& s = it->second;
        ++s.rows;
        if (!cells[c_err].empty()) ++s.errors;
        try {
            if (!cells[c_ps].empty()) {
                s.per_step_sum += std::stod(cells[c_ps]);
                ++s.per_step_count;
            }
            if (!cells[c_cr].empty()) {
                const double cr = std::stod(cells[c_cr]);
                s.cr_sum += cr;
                s.cr_max = std::max(s.cr_max, cr);
                ++s.cr_count;
            }
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::ParseError, path + ":" + std::to_string(lineno) + ": malformed number");
        }
    }

    char buf[512];
    std::snprintf(buf, sizeof buf, "%-40s %-16s %6s %6s %16s %12s %12s\n", "scenario", "controller", "rows", "errors",
                  "mean_per_step", "mean_cr", "max_cr");
    out << buf;
    for (const auto& key : order) {
        const Summary& s = groups.at(key);
        auto num = [](int count, double v) {
            char b[32];
            if (count == 0) return std::string("-");
            std::snprintf(b, sizeof b, "%.6g", v);
            return std::string(b);
        };
        std::snprintf(buf, sizeof buf, "%-40s %-16s %6d %6d %16s %12s %12s\n", key.first.c_str(), key.second.c_str(),
                      s.rows, s.errors, num(s.per_step_count, s.per_step_sum / std::max(1, s.per_step_count)).c_str(),
                      num(s.cr_count, s.cr_sum / std::max(1, s.cr_count)).c_str(), num(s.cr_count, s.cr_max).c_str());
        out << buf;
    }
}

}  // namespace mtsc::harness
