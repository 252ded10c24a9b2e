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
#include "cone_solver.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace mtsc::detail {

namespace {

using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Row layout of the cone: [lp | soc_0 | soc_1 | ...].
struct ConeLayout {
    int lp = 0;
    std::vector<int> soc_offset;
    std::vector<int> soc_dim;
    int rows = 0;

    explicit ConeLayout(const ConeProgram& prog) : lp(prog.lp_rows), soc_dim(prog.soc_dims) {
        int off = lp;
        for (int d : soc_dim) {
            soc_offset.push_back(off);
            off += d;
        }
        rows = off;
    }

    int degree() const { return lp + static_cast<int>(soc_dim.size()); }
    std::size_t socs() const { return soc_dim.size(); }
};

VectorXd identity(const ConeLayout& L) {
    VectorXd e = VectorXd::Zero(L.rows);
    e.head(L.lp).setOnes();
    for (std::size_t b = 0; b < L.socs(); ++b) e(L.soc_offset[b]) = 1.0;
    return e;
}

/// u o v
VectorXd jordan(const ConeLayout& L, const VectorXd& u, const VectorXd& v) {
    VectorXd out(L.rows);
    out.head(L.lp) = u.head(L.lp).cwiseProduct(v.head(L.lp));
    for (std::size_t b = 0; b < L.socs(); ++b) {
        const int o = L.soc_offset[b];
        const int d = L.soc_dim[b];
        out(o) = u.segment(o, d).dot(v.segment(o, d));
        out.segment(o + 1, d - 1) = u(o) * v.segment(o + 1, d - 1) + v(o) * u.segment(o + 1, d - 1);
    }
    return out;
}

/// x with lambda o x = r
VectorXd jordan_solve(const ConeLayout& L, const VectorXd& lambda, const VectorXd& r) {
    VectorXd out(L.rows);
    out.head(L.lp) = r.head(L.lp).cwiseQuotient(lambda.head(L.lp));
    for (std::size_t b = 0; b < L.socs(); ++b) {
        const int o = L.soc_offset[b];
        const int d = L.soc_dim[b];
        const double l0 = lambda(o);
        const auto l1 = lambda.segment(o + 1, d - 1);
        const double det = (l0 - l1.norm()) * (l0 + l1.norm());
        const double x0 = (l0 * r(o) - l1.dot(r.segment(o + 1, d - 1))) / det;
        out(o) = x0;
        out.segment(o + 1, d - 1) = (r.segment(o + 1, d - 1) - x0 * l1) / l0;
    }
    return out;
}

/// inf { a : u + a e in K }
double shift_to_cone(const ConeLayout& L, const VectorXd& u) {
    double a = -kInf;
    if (L.lp > 0) a = std::max(a, -u.head(L.lp).minCoeff());
    for (std::size_t b = 0; b < L.socs(); ++b) {
        const int o = L.soc_offset[b];
        a = std::max(a, u.segment(o + 1, L.soc_dim[b] - 1).norm() - u(o));
    }
    return a;
}

/// Largest a >= 0 with x + a d in K, for x in int K (may be +inf).
double max_step(const ConeLayout& L, const VectorXd& x, const VectorXd& d) {
    double a = kInf;
    for (int i = 0; i < L.lp; ++i)
        if (d(i) < 0.0) a = std::min(a, -x(i) / d(i));
    for (std::size_t b = 0; b < L.socs(); ++b) {
        const int o = L.soc_offset[b];
        const int n1 = L.soc_dim[b] - 1;
        const auto x1 = x.segment(o + 1, n1);
        const auto d1 = d.segment(o + 1, n1);
        const double qa = d(o) * d(o) - d1.squaredNorm();
        const double qb = x(o) * d(o) - x1.dot(d1);
        const double qc = (x(o) - x1.norm()) * (x(o) + x1.norm());
        if (qc <= 0.0) return 0.0;
        const double disc = qb * qb - qa * qc;
        if (disc < 0.0) continue;
        const double denom = -qb + std::sqrt(disc);
        if (denom > 0.0) a = std::min(a, qc / denom);
    }
    return a;
}

/// Nesterov-Todd scaling W (symmetric) with W z = W^{-1} s = lambda.
struct Scaling {
    VectorXd lp_w;  // sqrt(s / z)
    std::vector<Eigen::MatrixXd> W;
    std::vector<Eigen::MatrixXd> Winv;
    VectorXd lambda;
};

Scaling nt_scaling(const ConeLayout& L, const VectorXd& s, const VectorXd& z) {
    Scaling sc;
    sc.lambda.resize(L.rows);
    sc.lp_w = (s.head(L.lp).cwiseQuotient(z.head(L.lp))).cwiseSqrt();
    sc.lambda.head(L.lp) = (s.head(L.lp).cwiseProduct(z.head(L.lp))).cwiseSqrt();
    for (std::size_t b = 0; b < L.socs(); ++b) {
        const int o = L.soc_offset[b];
        const int d = L.soc_dim[b];
        const VectorXd sb = s.segment(o, d);
        const VectorXd zb = z.segment(o, d);
        const double ns = std::sqrt((sb(0) - sb.tail(d - 1).norm()) * (sb(0) + sb.tail(d - 1).norm()));
        const double nz = std::sqrt((zb(0) - zb.tail(d - 1).norm()) * (zb(0) + zb.tail(d - 1).norm()));
        const VectorXd sbar = sb / ns;
        VectorXd jzbar = zb / nz;
        jzbar.tail(d - 1) *= -1.0;
        const double gamma = std::sqrt((1.0 + sbar.dot(zb / nz)) / 2.0);
        const VectorXd wbar = (sbar + jzbar) / (2.0 * gamma);
        const double beta = std::sqrt(ns / nz);
        VectorXd v = wbar;
        v(0) += 1.0;
        v /= std::sqrt(2.0 * (wbar(0) + 1.0));
        Eigen::MatrixXd J = Eigen::MatrixXd::Identity(d, d);
        J.bottomRightCorner(d - 1, d - 1) *= -1.0;
        const Eigen::MatrixXd vv = v * v.transpose();
        sc.W.push_back(beta * (2.0 * vv - J));
        sc.Winv.push_back((2.0 * J * vv * J - J) / beta);
        sc.lambda.segment(o, d) = sc.W.back() * zb;
    }
    return sc;
}

VectorXd apply_w(const ConeLayout& L, const Scaling& sc, const VectorXd& u, bool inverse) {
    VectorXd out(L.rows);
    if (inverse) {
        out.head(L.lp) = u.head(L.lp).cwiseQuotient(sc.lp_w);
    } else {
        out.head(L.lp) = u.head(L.lp).cwiseProduct(sc.lp_w);
    }
    for (std::size_t b = 0; b < L.socs(); ++b) {
        const int o = L.soc_offset[b];
        const int d = L.soc_dim[b];
        out.segment(o, d) = (inverse ? sc.Winv[b] : sc.W[b]) * u.segment(o, d);
    }
    return out;
}

SpMat block_matrix(const ConeLayout& L, const Scaling& sc, bool inverse) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(L.rows) * 2);
    for (int i = 0; i < L.lp; ++i) trip.emplace_back(i, i, inverse ? 1.0 / sc.lp_w(i) : sc.lp_w(i));
    for (std::size_t b = 0; b < L.socs(); ++b) {
        const int o = L.soc_offset[b];
        const int d = L.soc_dim[b];
        const auto& M = inverse ? sc.Winv[b] : sc.W[b];
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) trip.emplace_back(o + r, o + c, M(r, c));
    }
    SpMat out(L.rows, L.rows);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

/// Solves  P dx + G' dz = bx,  G dx - W^2 dz = bz  through the reduced system
/// (P + G' W^-2 G) dx = bx + G' W^-2 bz with two refinement passes.
class KktSolver {
public:
    KktSolver(const ConeProgram& prog, const ConeLayout& layout) : prog_(prog), L_(layout) {}

    bool factor(const Scaling& sc) {
        sc_ = &sc;
        const SpMat Winv = block_matrix(L_, sc, true);
        Gt_ = Winv * prog_.G;
        SpMat H = SpMat(Gt_.transpose()) * Gt_;
        if (prog_.P.nonZeros() > 0) H += prog_.P;
        if (!analyzed_) {
            ldlt_.analyzePattern(H);
            analyzed_ = true;
        }
        ldlt_.factorize(H);
        if (ldlt_.info() == Eigen::Success) return true;
        // Exact cancellation in a pivot; retry with a growing diagonal shift
        // and let refinement against the unshifted system absorb it.
        double diag = 1.0;
        for (int i = 0; i < H.rows(); ++i) diag = std::max(diag, std::abs(H.coeff(i, i)));
        SpMat shift(H.rows(), H.cols());
        shift.setIdentity();
        for (double rel = 1e-14; rel <= 1e-8; rel *= 100.0) {
            ldlt_.factorize(H + shift * (rel * diag));
            if (ldlt_.info() == Eigen::Success) return true;
        }
        return false;
    }

    void solve(const VectorXd& bx, const VectorXd& bz, VectorXd& dx, VectorXd& dz) const {
        reduced(bx, bz, dx, dz);
        for (int pass = 0; pass < 3; ++pass) {
            VectorXd rx = bx - prog_.G.transpose() * dz;
            if (prog_.P.nonZeros() > 0) rx -= prog_.P * dx;
            const VectorXd rz = bz - prog_.G * dx + apply_w(L_, *sc_, apply_w(L_, *sc_, dz, false), false);
            VectorXd cx, cz;
            reduced(rx, rz, cx, cz);
            dx += cx;
            dz += cz;
        }
    }

private:
    void reduced(const VectorXd& bx, const VectorXd& bz, VectorXd& dx, VectorXd& dz) const {
        const VectorXd wbz = apply_w(L_, *sc_, bz, true);  // W^-1 bz
        dx = ldlt_.solve(bx + Gt_.transpose() * wbz);
        dz = apply_w(L_, *sc_, Gt_ * dx - wbz, true);
    }

    const ConeProgram& prog_;
    const ConeLayout& L_;
    const Scaling* sc_ = nullptr;
    SpMat Gt_;
    Eigen::SimplicialLDLT<SpMat> ldlt_;
    bool analyzed_ = false;
};

double quad_form(const SpMat& P, const VectorXd& x) {
    if (P.nonZeros() == 0) return 0.0;
    return x.dot(P * x);
}

}  // namespace

ConeSolution solve_cone_program(const ConeProgram& prog, const ConeOptions& opts) {
    const ConeLayout L(prog);
    const auto nx = prog.q.size();
    ConeSolution sol;

    if (L.rows == 0) {
        Eigen::SimplicialLDLT<SpMat> ldlt(prog.P);
        sol.x = ldlt.solve(-prog.q);
        sol.primal_cost = 0.5 * quad_form(prog.P, sol.x) + prog.q.dot(sol.x);
        sol.dual_cost = sol.primal_cost;
        sol.dual_residual = (prog.P * sol.x + prog.q).norm();
        sol.converged = ldlt.info() == Eigen::Success;
        return sol;
    }

    const VectorXd e = identity(L);
    const double resx0 = std::max(1.0, prog.q.norm());
    const double resz0 = std::max(1.0, prog.h.norm());
    KktSolver kkt(prog, L);

    VectorXd x, s, z;
    {
        Scaling unit;
        unit.lp_w = VectorXd::Ones(L.lp);
        for (int d : L.soc_dim) {
            unit.W.push_back(Eigen::MatrixXd::Identity(d, d));
            unit.Winv.push_back(Eigen::MatrixXd::Identity(d, d));
        }
        kkt.factor(unit);
        VectorXd dz;
        kkt.solve(-prog.q, prog.h, x, dz);
        z = dz;
        s = -dz;
        const double ts = shift_to_cone(L, s);
        if (ts >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + ts) * e;
        const double tz = shift_to_cone(L, z);
        if (tz >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + tz) * e;
    }

    const double nu = L.degree();
    // Near the optimum the scaling becomes ill conditioned and residuals can
    // grow again; the iterate with the smallest merit is what gets returned.
    ConeSolution best;
    double best_merit = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter <= opts.max_iterations; ++iter) {
        VectorXd rx = prog.G.transpose() * z + prog.q;
        if (prog.P.nonZeros() > 0) rx += prog.P * x;
        const VectorXd rz = prog.G * x + s - prog.h;
        const double gap = s.dot(z);
        const double pcost = 0.5 * quad_form(prog.P, x) + prog.q.dot(x);
        const double dcost = pcost + z.dot(rz) - gap;
        const double pres = rz.norm() / resz0;
        const double dres = rx.norm() / resx0;

        sol.x = x;
        sol.s = s;
        sol.z = z;
        sol.primal_cost = pcost;
        sol.dual_cost = dcost;
        sol.primal_residual = pres;
        sol.dual_residual = dres;
        sol.iterations = iter;
        const double scale =
            std::max({std::abs(pcost + opts.objective_offset), std::abs(dcost + opts.objective_offset), 1.0});
        const double merit = std::max({pres, dres, gap / scale});
        if (merit < best_merit) {
            best_merit = merit;
            best = sol;
        }
        if (std::getenv("MTSC_IPM_TRACE")) std::fprintf(stderr, "it %d pcost %.10g dcost %.10g gap %.3g pres %.3g dres %.3g\n", iter, pcost, dcost, gap, pres, dres);
        if (pres <= opts.feas_tol && dres <= opts.feas_tol &&
            (gap <= opts.abs_gap || gap <= opts.rel_gap * scale)) {
            sol.converged = true;
            return sol;
        }
        if (iter == opts.max_iterations) break;

        const Scaling sc = nt_scaling(L, s, z);
        if (!kkt.factor(sc)) {
            if (std::getenv("MTSC_IPM_TRACE")) std::fprintf(stderr, "factorization failed\n");
            break;
        }
        const double mu = gap / nu;

        auto direction = [&](const VectorXd& rs, VectorXd& dx, VectorXd& dsw, VectorXd& dzw) {
            const VectorXd qs = jordan_solve(L, sc.lambda, rs);
            VectorXd dz;
            kkt.solve(-rx, -rz - apply_w(L, sc, qs, false), dx, dz);
            dzw = apply_w(L, sc, dz, false);
            dsw = qs - dzw;
        };

        VectorXd dxa, dsa, dza;
        direction(-jordan(L, sc.lambda, sc.lambda), dxa, dsa, dza);
        const double alpha_aff = std::min({1.0, max_step(L, sc.lambda, dsa), max_step(L, sc.lambda, dza)});
        const double gap_aff = (sc.lambda + alpha_aff * dsa).dot(sc.lambda + alpha_aff * dza);
        const double sigma = std::pow(std::clamp(gap_aff / gap, 0.0, 1.0), 3);

        VectorXd dx, dsw, dzw;
        direction(-jordan(L, sc.lambda, sc.lambda) - jordan(L, dsa, dza) + (sigma * mu) * e, dx, dsw, dzw);
        const VectorXd ds = apply_w(L, sc, dsw, false);
        const VectorXd dz = apply_w(L, sc, dzw, true);
        const double amax = std::min(max_step(L, sc.lambda, dsw), max_step(L, sc.lambda, dzw));
        double alpha = std::min(1.0, 0.99 * amax);
        // The scaled step can overshoot by roundoff; back off until both
        // iterates are strictly interior.
        for (int back = 0; back < 60 && alpha > 1e-14; ++back) {
            if (shift_to_cone(L, s + alpha * ds) < 0.0 && shift_to_cone(L, z + alpha * dz) < 0.0) break;
            alpha *= 0.5;
        }
        if (!(alpha > 1e-14) || !dx.allFinite()) {
            if (std::getenv("MTSC_IPM_TRACE")) std::fprintf(stderr, "step failed alpha=%g\n", alpha);
            break;
        }

        x += alpha * dx;
        s += alpha * ds;
        z += alpha * dz;
    }
    (void)nx;
    best.iterations = sol.iterations;
    return best;
}

}  // namespace mtsc::detail
