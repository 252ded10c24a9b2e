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
#ifndef MTSC_CONVEX_KERNEL_HPP
#define MTSC_CONVEX_KERNEL_HPP

#include <Eigen/Sparse>

#include <vector>

#include "mtsc/system_model.hpp"

namespace mtsc {

using SparseMat = Eigen::SparseMatrix<double>;

/// weight * ||G z + h||_p
struct NormTerm {
    double weight;
    NormKind p;
    SparseMat G;
    Vec h;
};

/// (m/2) ||G z + h||_2^2 + c0
struct QuadTerm {
    double m;
    SparseMat G;
    Vec h;
    double c0;
};

/// Unconstrained convex program: a sum of weighted p-norms and quadratics of
/// affine expressions in a d-dimensional decision vector.
class AffineNormProgram {
public:
    explicit AffineNormProgram(int dims);

    int dims() const { return dims_; }

    void add_norm(double weight, NormKind p, SparseMat G, Vec h);
    void add_norm(double weight, NormKind p, const Mat& G, Vec h);
    void add_quad(double m, SparseMat G, Vec h, double c0 = 0.0);
    void add_quad(double m, const Mat& G, Vec h, double c0 = 0.0);
    /// Constant added to the objective.
    void add_constant(double c) { constant_ += c; }

    const std::vector<NormTerm>& norm_terms() const { return norms_; }
    const std::vector<QuadTerm>& quad_terms() const { return quads_; }
    double constant() const { return constant_; }

    double objective(const Vec& z) const;

private:
    int dims_;
    std::vector<NormTerm> norms_;
    std::vector<QuadTerm> quads_;
    double constant_ = 0.0;
};

struct SolveReport {
    Vec z;
    double objective = 0.0;
    int iterations = 0;
    double certified_gap = 0.0;
};

class SolverError : public Error {
public:
    SolverError(ErrorCode code, const std::string& message, SolveReport best)
        : Error(code, message), best_(std::move(best)) {}

    const SolveReport& best() const { return best_; }

private:
    SolveReport best_;
};

constexpr double kDefaultSolveTol = 1e-8;

/// Minimizes the program. On success certified_gap <= tol * (1 + |objective|).
/// Throws SolverError(Unbounded) when the stacked term matrices are column-rank
/// deficient (the objective is constant along a direction) and
/// SolverError(MaxIterations) with the best iterate when the gap stays open.
SolveReport solve(const AffineNormProgram& prog, double tol = kDefaultSolveTol);

/// Brute-force minimum of a one-dimensional program on [lo, hi]: a uniform grid
/// followed by golden-section refinement around the best grid point.
double solve_1d_oracle(const AffineNormProgram& prog, double lo, double hi, int grid);

/// Interval containing a minimizer of a one-dimensional program: the hull of
/// the zeros of all affine components.
std::pair<double, double> bracket_1d(const AffineNormProgram& prog);

}  // namespace mtsc

#endif  // MTSC_CONVEX_KERNEL_HPP
