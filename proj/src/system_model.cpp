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
#include "mtsc/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SVD>

namespace mtsc {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::SingularBf: return "SingularBf";
        case ErrorCode::BadDimensions: return "BadDimensions";
        case ErrorCode::InconsistentTrajectory: return "InconsistentTrajectory";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::UnsupportedNormPair: return "UnsupportedNormPair";
        case ErrorCode::Unbounded: return "Unbounded";
        case ErrorCode::MaxIterations: return "MaxIterations";
        case ErrorCode::BadBracket: return "BadBracket";
        case ErrorCode::BoundViolated: return "BoundViolated";
        case ErrorCode::CheckFailed: return "CheckFailed";
        case ErrorCode::DegenerateOpt: return "DegenerateOpt";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

const char* to_string(NormKind p) {
    switch (p) {
        case NormKind::L1: return "1";
        case NormKind::L2: return "2";
        case NormKind::Linf: return "inf";
    }
    return "?";
}

NormKind parse_norm_kind(const std::string& text) {
    if (text == "1") return NormKind::L1;
    if (text == "2") return NormKind::L2;
    if (text == "inf" || text == "Inf" || text == "infinity") return NormKind::Linf;
    throw Error(ErrorCode::UnsupportedNormPair, "unsupported norm '" + text + "' (expected 1, 2 or inf)");
}

double vector_norm(const Vec& v, NormKind p) {
    switch (p) {
        case NormKind::L1: return v.lpNorm<1>();
        case NormKind::L2: return v.norm();
        case NormKind::Linf: return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
    }
    return 0.0;
}

double spectral_norm(const Mat& M) {
    if (M.size() == 0) return 0.0;
    // Work on the orientation with fewer columns; sigma(M) = sigma(M^T).
    Mat U = M.cols() <= M.rows() ? M : Mat(M.transpose());
    const Eigen::Index cols = U.cols();
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index i = 0; i < cols - 1; ++i) {
            for (Eigen::Index j = i + 1; j < cols; ++j) {
                const double alpha = U.col(i).squaredNorm();
                const double beta = U.col(j).squaredNorm();
                const double gamma = U.col(i).dot(U.col(j));
                if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                off = std::max(off, std::abs(gamma) / std::sqrt(alpha * beta));
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (Eigen::Index r = 0; r < U.rows(); ++r) {
                    const double ui = U(r, i);
                    const double uj = U(r, j);
                    U(r, i) = c * ui - s * uj;
                    U(r, j) = s * ui + c * uj;
                }
            }
        }
        if (off <= eps) break;
    }
    double best = 0.0;
    for (Eigen::Index i = 0; i < cols; ++i) best = std::max(best, U.col(i).norm());
    return best;
}

double induced_norm(const Mat& M, NormKind p) {
    if (M.size() == 0) return 0.0;
    switch (p) {
        case NormKind::L1: return M.cwiseAbs().colwise().sum().maxCoeff();
        case NormKind::Linf: return M.cwiseAbs().rowwise().sum().maxCoeff();
        case NormKind::L2: return spectral_norm(M);
    }
    return 0.0;
}

double l2_to_norm(const Mat& M, NormKind p) {
    if (M.size() == 0) return 0.0;
    switch (p) {
        case NormKind::L2: return spectral_norm(M);
        case NormKind::Linf: return M.rowwise().norm().maxCoeff();
        case NormKind::L1: {
            // max_{|v|_2<=1} |Mv|_1 = max_{u in {+-1}^m} |M^T u|_2; u and -u agree.
            const auto rows = M.rows();
            if (rows > 20) throw Error(ErrorCode::InvalidArgument, "l2_to_norm(p=1) supports at most 20 rows");
            double best = 0.0;
            Vec u(rows);
            const std::uint64_t count = std::uint64_t{1} << (rows - 1);
            for (std::uint64_t mask = 0; mask < count; ++mask) {
                u(0) = 1.0;
                for (Eigen::Index r = 1; r < rows; ++r) u(r) = (mask >> (r - 1)) & 1U ? -1.0 : 1.0;
                best = std::max(best, (M.transpose() * u).norm());
            }
            return best;
        }
    }
    return 0.0;
}

namespace {

double inverse_exponent(NormKind p) {
    switch (p) {
        case NormKind::L1: return 1.0;
        case NormKind::L2: return 0.5;
        case NormKind::Linf: return 0.0;
    }
    return 0.0;
}

}  // namespace

double norm_equivalence_constant(NormKind px, NormKind pf, int n) {
    if (n < 1) throw Error(ErrorCode::BadDimensions, "norm_equivalence_constant: n must be >= 1");
    const double ix = inverse_exponent(px);
    const double jf = inverse_exponent(pf);
    // ||v||_a >= ||v||_b whenever a <= b (1/a >= 1/b); otherwise the all-ones
    // vector is extremal.
    if (ix >= jf) return 1.0;
    return std::pow(static_cast<double>(n), ix - jf);
}

const Vec* QuadFloorCost::center_at(int t) const {
    if (center.empty()) return nullptr;
    if (center.size() == 1) return &center.front();
    return &center.at(static_cast<std::size_t>(t));
}

StageCost::StageCost(NormCost cost) : cost_(cost) {
    if (!(cost.weight > 0.0)) throw Error(ErrorCode::InvalidArgument, "NormCost weight must be > 0");
}

StageCost::StageCost(QuadFloorCost cost) : cost_(std::move(cost)) {
    const auto& q = std::get<QuadFloorCost>(cost_);
    if (!(q.m > 0.0)) throw Error(ErrorCode::InvalidArgument, "QuadFloor m must be > 0");
    if (!(q.c0 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "QuadFloor c0 must be >= 0");
}

const NormCost& StageCost::as_norm() const {
    if (!is_norm()) throw Error(ErrorCode::InvalidArgument, "stage cost is not a norm");
    return std::get<NormCost>(cost_);
}

const QuadFloorCost& StageCost::as_quad() const {
    if (is_norm()) throw Error(ErrorCode::InvalidArgument, "stage cost is not QuadFloor");
    return std::get<QuadFloorCost>(cost_);
}

double StageCost::eval(const Vec& v, int t) const {
    if (const auto* nc = std::get_if<NormCost>(&cost_)) return nc->weight * vector_norm(v, nc->p);
    const auto& q = std::get<QuadFloorCost>(cost_);
    const Vec* c = q.center_at(t);
    const double sq = c ? (v - *c).squaredNorm() : v.squaredNorm();
    return 0.5 * q.m * sq + q.c0;
}

void validate_system(int n, int T, int k, const Mat& A, const Mat& Bf, const Mat& Bs,
                     double invertibility_threshold) {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::BadDimensions, what); };
    if (n < 1) bad("n must be >= 1");
    if (T < 1) bad("T must be >= 1");
    if (k < 1 || k > T) bad("k must satisfy 1 <= k <= T");
    auto square = [&](const Mat& M, const char* name) {
        if (M.rows() != n || M.cols() != n) bad(std::string(name) + " must be n x n");
        if (!M.allFinite()) bad(std::string(name) + " has non-finite entries");
    };
    square(A, "A");
    square(Bf, "Bf");
    square(Bs, "Bs");
    const Eigen::JacobiSVD<Mat> svd(Bf);
    const double smin = svd.singularValues()(n - 1);
    if (!(smin > invertibility_threshold)) {
        std::ostringstream os;
        os << "Bf is not invertible (smallest singular value " << smin << " <= " << invertibility_threshold << ")";
        throw Error(ErrorCode::SingularBf, os.str());
    }
}

SystemSpec::SystemSpec(int n, int T, int k, Mat A, Mat Bf, Mat Bs, double invertibility_threshold)
    : n_(n), T_(T), k_(k), A_(std::move(A)), Bf_(std::move(Bf)), Bs_(std::move(Bs)),
      threshold_(invertibility_threshold) {
    validate_system(n_, T_, k_, A_, Bf_, Bs_, threshold_);
    Bf_inv_ = Bf_.fullPivLu().inverse();
    bf_lu_.compute(Bf_);
}

SystemSpec SystemSpec::with_horizon(int T, int k) const {
    return SystemSpec(n_, T, k, A_, Bf_, Bs_, threshold_);
}

std::vector<SlowWindow> slow_windows(int T, int k) {
    std::vector<SlowWindow> out;
    for (int r = 0; r < T; r += k) out.push_back({r, std::min(k, T - r)});
    return out;
}

Sequence zeros(int count, int n) { return Sequence(static_cast<std::size_t>(count), Vec::Zero(n)); }

namespace {

void require_lengths(const SystemSpec& spec, const Trajectory& traj) {
    const auto T = static_cast<std::size_t>(spec.T());
    if (traj.x.size() != T + 1 || traj.f.size() != T || traj.s.size() != T)
        throw Error(ErrorCode::InconsistentTrajectory, "trajectory lengths must be (T+1, T, T)");
    auto dims = [&](const Sequence& seq) {
        for (const auto& v : seq)
            if (v.size() != spec.n()) throw Error(ErrorCode::InconsistentTrajectory, "trajectory vector of wrong dimension");
    };
    dims(traj.x);
    dims(traj.f);
    dims(traj.s);
}

}  // namespace

void check_trajectory(const SystemSpec& spec, const Trajectory& traj, const NoiseTrace* noise, double tol) {
    require_lengths(spec, traj);
    if (traj.x[0].cwiseAbs().maxCoeff() != 0.0) throw Error(ErrorCode::InconsistentTrajectory, "x_0 must be zero");
    for (int t = 1; t < spec.T(); ++t) {
        if (t % spec.k() == 0) continue;
        if (traj.s[t] != traj.s[t - 1]) {
            throw Error(ErrorCode::InconsistentTrajectory,
                        "slow action changes at timestep " + std::to_string(t + 1) + " outside the slow steps");
        }
    }
    if (noise == nullptr) return;
    if (noise->w.size() != static_cast<std::size_t>(spec.T()))
        throw Error(ErrorCode::LengthMismatch, "noise trace length differs from T");
    for (int t = 0; t < spec.T(); ++t) {
        const Vec predicted = spec.A() * traj.x[t] + spec.Bf() * traj.f[t] + spec.Bs() * traj.s[t] + noise->w[t];
        const double err = (traj.x[t + 1] - predicted).cwiseAbs().maxCoeff();
        if (!(err <= tol)) {
            std::ostringstream os;
            os << "dynamics violated at timestep " << t + 1 << " (residual " << err << ")";
            throw Error(ErrorCode::InconsistentTrajectory, os.str());
        }
    }
}

std::vector<double> per_step_costs(const SystemSpec& spec, const CostSpec& costs, const Trajectory& traj) {
    check_trajectory(spec, traj);
    std::vector<double> out(static_cast<std::size_t>(spec.T()));
    for (int t = 0; t < spec.T(); ++t)
        out[t] = costs.cx.eval(traj.x[t + 1], t) + costs.cf.eval(traj.f[t], t) + costs.cs.eval(traj.s[t], t);
    return out;
}

double trajectory_cost(const SystemSpec& spec, const CostSpec& costs, const Trajectory& traj) {
    double total = 0.0;
    for (double c : per_step_costs(spec, costs, traj)) total += c;
    return total;
}

double trajectory_cost(const SystemSpec& spec, const CostSpec& costs, const Trajectory& traj,
                       const NoiseTrace& noise) {
    check_trajectory(spec, traj, &noise);
    return trajectory_cost(spec, costs, traj);
}

Trajectory roll_forward(const SystemSpec& spec, const Sequence& f, const Sequence& s, const NoiseTrace& noise) {
    const auto T = static_cast<std::size_t>(spec.T());
    if (f.size() != T || s.size() != T || noise.w.size() != T)
        throw Error(ErrorCode::LengthMismatch, "roll_forward: f, s and w must each have T entries");
    Trajectory traj;
    traj.f = f;
    traj.s = s;
    traj.x.reserve(T + 1);
    traj.x.push_back(Vec::Zero(spec.n()));
    for (std::size_t t = 0; t < T; ++t) {
        if (f[t].size() != spec.n() || s[t].size() != spec.n() || noise.w[t].size() != spec.n())
            throw Error(ErrorCode::LengthMismatch, "roll_forward: vector of wrong dimension");
        traj.x.push_back(spec.A() * traj.x[t] + spec.Bf() * f[t] + spec.Bs() * s[t] + noise.w[t]);
    }
    return traj;
}

}  // namespace mtsc
