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
#include "mtsc/convex_kernel.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseQR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cone_solver.hpp"

namespace mtsc {

namespace {

using Triplet = Eigen::Triplet<double>;

void check_term(int dims, const SparseMat& G, const Vec& h) {
    if (G.cols() != dims) throw Error(ErrorCode::BadDimensions, "term matrix has wrong column count");
    if (G.rows() == 0 || G.rows() != h.size()) throw Error(ErrorCode::BadDimensions, "term matrix / offset size mismatch");
}

SparseMat to_sparse(const Mat& G) {
    SparseMat S = G.sparseView();
    S.makeCompressed();
    return S;
}

}  // namespace

AffineNormProgram::AffineNormProgram(int dims) : dims_(dims) {
    if (dims < 1) throw Error(ErrorCode::BadDimensions, "program needs at least one decision variable");
}

void AffineNormProgram::add_norm(double weight, NormKind p, SparseMat G, Vec h) {
    if (!(weight > 0.0)) throw Error(ErrorCode::InvalidArgument, "norm term weight must be > 0");
    check_term(dims_, G, h);
    G.makeCompressed();
    norms_.push_back({weight, p, std::move(G), std::move(h)});
}

void AffineNormProgram::add_norm(double weight, NormKind p, const Mat& G, Vec h) {
    add_norm(weight, p, to_sparse(G), std::move(h));
}

void AffineNormProgram::add_quad(double m, SparseMat G, Vec h, double c0) {
    if (!(m > 0.0)) throw Error(ErrorCode::InvalidArgument, "quadratic term needs m > 0");
    check_term(dims_, G, h);
    G.makeCompressed();
    quads_.push_back({m, std::move(G), std::move(h), c0});
}

void AffineNormProgram::add_quad(double m, const Mat& G, Vec h, double c0) {
    add_quad(m, to_sparse(G), std::move(h), c0);
}

double AffineNormProgram::objective(const Vec& z) const {
    double total = constant_;
    for (const auto& t : norms_) total += t.weight * vector_norm(t.G * z + t.h, t.p);
    for (const auto& q : quads_) total += 0.5 * q.m * (q.G * z + q.h).squaredNorm() + q.c0;
    return total;
}

namespace {

/// Epigraph reformulation as a cone program over (z, t).
struct Reformulation {
    detail::ConeProgram cone;
    double constant = 0.0;
};

Reformulation reformulate(const AffineNormProgram& prog) {
    const int d = prog.dims();
    int epi = 0;
    int lp_rows = 0;
    int soc_rows = 0;
    for (const auto& t : prog.norm_terms()) {
        const auto m = static_cast<int>(t.G.rows());
        switch (t.p) {
            case NormKind::L1: epi += m; lp_rows += 2 * m; break;
            case NormKind::Linf: epi += 1; lp_rows += 2 * m; break;
            case NormKind::L2: epi += 1; soc_rows += m + 1; break;
        }
    }
    const int nx = d + epi;

    Reformulation out;
    auto& cp = out.cone;
    cp.q = Vec::Zero(nx);
    cp.h = Vec::Zero(lp_rows + soc_rows);
    cp.lp_rows = lp_rows;
    std::vector<Triplet> g;
    int col = d;
    int lp = 0;
    int soc = lp_rows;

    for (const auto& t : prog.norm_terms()) {
        const auto m = static_cast<int>(t.G.rows());
        if (t.p == NormKind::L2) {
            // s = (t, Gz + h) in Q
            g.emplace_back(soc, col, -1.0);
            for (int k = 0; k < t.G.outerSize(); ++k)
                for (SparseMat::InnerIterator it(t.G, k); it; ++it) g.emplace_back(soc + 1 + it.row(), it.col(), -it.value());
            cp.h.segment(soc + 1, m) = t.h;
            cp.soc_dims.push_back(m + 1);
            cp.q(col) = t.weight;
            soc += m + 1;
            col += 1;
            continue;
        }
        // +-(Gz + h) - t <= 0, with t per row (L1) or shared (Linf)
        for (int k = 0; k < t.G.outerSize(); ++k) {
            for (SparseMat::InnerIterator it(t.G, k); it; ++it) {
                g.emplace_back(lp + it.row(), it.col(), it.value());
                g.emplace_back(lp + m + it.row(), it.col(), -it.value());
            }
        }
        for (int r = 0; r < m; ++r) {
            const int tc = t.p == NormKind::L1 ? col + r : col;
            g.emplace_back(lp + r, tc, -1.0);
            g.emplace_back(lp + m + r, tc, -1.0);
        }
        cp.h.segment(lp, m) = -t.h;
        cp.h.segment(lp + m, m) = t.h;
        if (t.p == NormKind::L1) {
            cp.q.segment(col, m).setConstant(t.weight);
            col += m;
        } else {
            cp.q(col) = t.weight;
            col += 1;
        }
        lp += 2 * m;
    }
    cp.G.resize(lp_rows + soc_rows, nx);
    cp.G.setFromTriplets(g.begin(), g.end());
    cp.G.makeCompressed();

    cp.P.resize(nx, nx);
    out.constant = prog.constant();
    for (const auto& qt : prog.quad_terms()) {
        SparseMat block = qt.m * SparseMat(qt.G.transpose() * qt.G);
        block.conservativeResize(nx, nx);
        cp.P += block;
        cp.q.head(d) += qt.m * (qt.G.transpose() * qt.h);
        out.constant += 0.5 * qt.m * qt.h.squaredNorm() + qt.c0;
    }
    cp.P.makeCompressed();
    return out;
}

void check_recession(const AffineNormProgram& prog) {
    const int d = prog.dims();
    std::vector<Triplet> trip;
    int row = 0;
    auto stack = [&](const SparseMat& G) {
        for (int k = 0; k < G.outerSize(); ++k)
            for (SparseMat::InnerIterator it(G, k); it; ++it) trip.emplace_back(row + it.row(), it.col(), it.value());
        row += static_cast<int>(G.rows());
    };
    for (const auto& t : prog.norm_terms()) stack(t.G);
    for (const auto& q : prog.quad_terms()) stack(q.G);
    SparseMat S(std::max(row, 1), d);
    S.setFromTriplets(trip.begin(), trip.end());
    S.makeCompressed();
    Eigen::SparseQR<SparseMat, Eigen::COLAMDOrdering<int>> qr;
    qr.compute(S);
    if (qr.info() != Eigen::Success || qr.rank() < d || row < d) {
        std::ostringstream os;
        os << "objective is constant along a direction: stacked term matrices have rank "
           << (qr.info() == Eigen::Success ? qr.rank() : -1) << " < " << d;
        SolveReport none;
        none.z = Vec::Zero(d);
        none.objective = prog.objective(none.z);
        none.certified_gap = std::numeric_limits<double>::infinity();
        throw SolverError(ErrorCode::Unbounded, os.str(), none);
    }
}

}  // namespace

SolveReport solve(const AffineNormProgram& prog, double tol) {
    if (!(tol >= 1e-10)) throw Error(ErrorCode::InvalidArgument, "solve: tol must be >= 1e-10");
    check_recession(prog);
    const Reformulation ref = reformulate(prog);

    detail::ConeOptions opts;
    opts.rel_gap = std::min(1e-11, tol * 1e-3);
    opts.objective_offset = ref.constant;
    const detail::ConeSolution sol = detail::solve_cone_program(ref.cone, opts);

    SolveReport report;
    report.z = sol.x.head(prog.dims());
    report.objective = prog.objective(report.z);
    report.iterations = sol.iterations;
    const double lower = sol.dual_cost + ref.constant;
    report.certified_gap = std::max(0.0, report.objective - lower);
    if (!std::isfinite(report.objective)) report.certified_gap = std::numeric_limits<double>::infinity();

    const bool feasible = sol.primal_residual <= 1e-8 && sol.dual_residual <= 1e-8;
    if (!feasible || !(report.certified_gap <= tol * (1.0 + std::abs(report.objective)))) {
        std::ostringstream os;
        os << "solver did not certify the requested tolerance after " << sol.iterations << " iterations (gap "
           << report.certified_gap << ", residuals " << sol.primal_residual << "/" << sol.dual_residual << ")";
        throw SolverError(ErrorCode::MaxIterations, os.str(), report);
    }
    return report;
}

double solve_1d_oracle(const AffineNormProgram& prog, double lo, double hi, int grid) {
    if (prog.dims() != 1) throw Error(ErrorCode::BadBracket, "solve_1d_oracle needs a one-dimensional program");
    if (!(lo < hi) || grid < 2 || !std::isfinite(lo) || !std::isfinite(hi))
        throw Error(ErrorCode::BadBracket, "solve_1d_oracle: need lo < hi and grid >= 2");
    Vec z(1);
    auto f = [&](double x) {
        z(0) = x;
        return prog.objective(z);
    };
    const double step = (hi - lo) / grid;
    int best = 0;
    double best_val = f(lo);
    for (int i = 1; i <= grid; ++i) {
        const double v = f(lo + step * i);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    double a = lo + step * std::max(best - 1, 0);
    double b = lo + step * std::min(best + 1, grid);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 300 && (b - a) > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return std::min({best_val, fc, fd, f(0.5 * (a + b))});
}

std::pair<double, double> bracket_1d(const AffineNormProgram& prog) {
    if (prog.dims() != 1) throw Error(ErrorCode::BadBracket, "bracket_1d needs a one-dimensional program");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    auto scan = [&](const SparseMat& G, const Vec& h) {
        const Mat dense(G);
        for (Eigen::Index r = 0; r < dense.rows(); ++r) {
            if (dense(r, 0) == 0.0) continue;
            const double root = -h(r) / dense(r, 0);
            lo = std::min(lo, root);
            hi = std::max(hi, root);
        }
    };
    for (const auto& t : prog.norm_terms()) scan(t.G, t.h);
    for (const auto& q : prog.quad_terms()) scan(q.G, q.h);
    if (!(lo <= hi)) return {-1.0, 1.0};
    const double pad = 1.0 + 0.1 * (hi - lo);
    return {lo - pad, hi + pad};
}

}  // namespace mtsc
