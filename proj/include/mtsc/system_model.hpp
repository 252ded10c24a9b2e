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
#ifndef MTSC_SYSTEM_MODEL_HPP
#define MTSC_SYSTEM_MODEL_HPP

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mtsc/error.hpp"

namespace mtsc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Ordered sequence of per-timestep vectors; index 0 is timestep 1 unless
/// stated otherwise (Trajectory::x holds x_0 at index 0).
using Sequence = std::vector<Vec>;

/// The vector p-norms supported throughout: 1, 2 and infinity.
enum class NormKind { L1, L2, Linf };

const char* to_string(NormKind p);
NormKind parse_norm_kind(const std::string& text);

double vector_norm(const Vec& v, NormKind p);

/// Operator norm of M induced by the vector p-norm. For p = 1 and p = inf the
/// closed forms (max column / row absolute sum) are used; for p = 2 the
/// largest singular value comes from one-sided Jacobi sweeps.
double induced_norm(const Mat& M, NormKind p);

/// Largest singular value via one-sided (Hestenes) Jacobi rotations.
double spectral_norm(const Mat& M);

/// Operator norm of M from l2 into the p-norm, i.e. max ||M v||_p over
/// ||v||_2 <= 1. Exact for all three p; p = 1 enumerates sign vectors and is
/// limited to 20 rows.
double l2_to_norm(const Mat& M, NormKind p);

/// Tight constant c with ||v||_{px} >= c ||v||_{pf} for all v in R^n.
double norm_equivalence_constant(NormKind px, NormKind pf, int n);

/// v -> weight * ||v||_p
struct NormCost {
    NormKind p = NormKind::L2;
    double weight = 1.0;
};

/// v -> (m/2) ||v - center_t||^2 + c0. An empty center means zero; a single
/// entry is used for every timestep.
struct QuadFloorCost {
    double m = 1.0;
    double c0 = 0.0;
    Sequence center;

    const Vec* center_at(int t) const;
};

class StageCost {
public:
    StageCost() = default;
    StageCost(NormCost cost);
    StageCost(QuadFloorCost cost);

    static StageCost norm(NormKind p, double weight = 1.0) { return StageCost(NormCost{p, weight}); }

    bool is_norm() const { return std::holds_alternative<NormCost>(cost_); }
    const NormCost& as_norm() const;
    const QuadFloorCost& as_quad() const;

    /// Cost of v at timestep t (0-based, selects the QuadFloor center).
    double eval(const Vec& v, int t = 0) const;

private:
    std::variant<NormCost, QuadFloorCost> cost_;
};

struct CostSpec {
    StageCost cx;
    StageCost cf;
    StageCost cs;

    bool all_norms() const { return cx.is_norm() && cf.is_norm() && cs.is_norm(); }
};

/// Dynamics x_t = A x_{t-1} + Bf f_t + Bs s_t + w_t with x_0 = 0 over
/// timesteps 1..T; the slow action may change only at 1, k+1, 2k+1, ...
class SystemSpec {
public:
    static constexpr double kDefaultInvertibilityThreshold = 1e-9;

    SystemSpec(int n, int T, int k, Mat A, Mat Bf, Mat Bs,
               double invertibility_threshold = kDefaultInvertibilityThreshold);

    int n() const { return n_; }
    int T() const { return T_; }
    int k() const { return k_; }
    const Mat& A() const { return A_; }
    const Mat& Bf() const { return Bf_; }
    const Mat& Bs() const { return Bs_; }
    const Mat& Bf_inv() const { return Bf_inv_; }
    /// Bf^{-1} b by LU solve.
    Vec solve_Bf(const Vec& b) const { return bf_lu_.solve(b); }

    /// Copy with a different horizon / slow period (revalidated).
    SystemSpec with_horizon(int T, int k) const;

private:
    int n_;
    int T_;
    int k_;
    Mat A_;
    Mat Bf_;
    Mat Bs_;
    Mat Bf_inv_;
    Eigen::PartialPivLU<Mat> bf_lu_;
    double threshold_;
};

/// Throws Error(SingularBf | BadDimensions) when an invariant fails.
void validate_system(int n, int T, int k, const Mat& A, const Mat& Bf, const Mat& Bs,
                     double invertibility_threshold = SystemSpec::kDefaultInvertibilityThreshold);

/// One slow window: 0-based first timestep and number of steps held.
struct SlowWindow {
    int start;
    int length;
};

/// Windows starting at 0, k, 2k, ...; the last one is truncated at T.
std::vector<SlowWindow> slow_windows(int T, int k);

struct NoiseTrace {
    Sequence w;
};

struct PredictionTrace {
    Sequence what;
};

struct Trajectory {
    Sequence x;  // T+1 entries, x[0] = 0
    Sequence f;  // T entries
    Sequence s;  // T entries
};

/// Throws InconsistentTrajectory if lengths, x_0, piecewise constancy of s, or
/// (when noise is supplied) the dynamics fail at 1e-9 absolute per coordinate.
void check_trajectory(const SystemSpec& spec, const Trajectory& traj,
                      const NoiseTrace* noise = nullptr, double tol = 1e-9);

/// Stage costs c_x(x_t) + c_f(f_t) + c_s(s_t) for t = 1..T.
std::vector<double> per_step_costs(const SystemSpec& spec, const CostSpec& costs, const Trajectory& traj);

double trajectory_cost(const SystemSpec& spec, const CostSpec& costs, const Trajectory& traj);
double trajectory_cost(const SystemSpec& spec, const CostSpec& costs, const Trajectory& traj,
                       const NoiseTrace& noise);

/// Unique trajectory from x_0 = 0. Throws LengthMismatch.
Trajectory roll_forward(const SystemSpec& spec, const Sequence& f, const Sequence& s, const NoiseTrace& noise);

Sequence zeros(int count, int n);

}  // namespace mtsc

#endif  // MTSC_SYSTEM_MODEL_HPP
