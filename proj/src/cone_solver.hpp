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
#ifndef MTSC_CONE_SOLVER_HPP
#define MTSC_CONE_SOLVER_HPP

#include <Eigen/Sparse>

#include <vector>

namespace mtsc::detail {

/// minimize (1/2) x'Px + q'x  subject to  G x + s = h,  s in K
/// with K = R_+^lp x Q^{soc[0]} x Q^{soc[1]} x ... (rows in that order).
struct ConeProgram {
    Eigen::SparseMatrix<double> P;  // upper and lower parts, symmetric
    Eigen::VectorXd q;
    Eigen::SparseMatrix<double> G;
    Eigen::VectorXd h;
    int lp_rows = 0;
    std::vector<int> soc_dims;
};

struct ConeSolution {
    Eigen::VectorXd x;
    Eigen::VectorXd s;
    Eigen::VectorXd z;
    double primal_cost = 0.0;  // (1/2)x'Px + q'x
    double dual_cost = 0.0;    // -(1/2)x'Px - h'z
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct ConeOptions {
    int max_iterations = 120;
    double rel_gap = 1e-11;
    double abs_gap = 1e-12;
    double feas_tol = 1e-10;
    double objective_offset = 0.0;  // added to both costs when judging the relative gap
};

/// Primal-dual interior-point method with Nesterov-Todd scaling and Mehrotra
/// predictor-corrector steps. Deterministic for identical inputs.
ConeSolution solve_cone_program(const ConeProgram& prog, const ConeOptions& opts);

}  // namespace mtsc::detail

#endif  // MTSC_CONE_SOLVER_HPP
