// SPDX-License-Identifier: Apache-2.0
//
// irsbc - joint beamforming and IRS phase-shift optimization for bistatic
// backscatter networks.
// Copyright (c) 2026 irsbc contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0

#include "irsbc/sdp_core.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace irsbc {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Real symmetric embedding of a Hermitian matrix, scaled by 1/2 so that
// <embed(A), embed(X)> equals the complex inner product tr(A X).
MatrixXd embed_half(const ComplexMatrix& H) {
    const int n = static_cast<int>(H.rows());
    MatrixXd out(2 * n, 2 * n);
    const MatrixXd re = 0.5 * H.real();
    const MatrixXd im = 0.5 * H.imag();
    out.topLeftCorner(n, n) = re;
    out.bottomRightCorner(n, n) = re;
    out.topRightCorner(n, n) = -im;
    out.bottomLeftCorner(n, n) = im;
    return out;
}

ComplexMatrix extract_complex(const MatrixXd& X) {
    const int n = static_cast<int>(X.rows()) / 2;
    ComplexMatrix out(n, n);
    const auto re = 0.5 * (X.topLeftCorner(n, n) + X.bottomRightCorner(n, n));
    const auto im = 0.5 * (X.bottomLeftCorner(n, n) - X.topRightCorner(n, n));
    out.real() = re;
    out.imag() = im;
    return 0.5 * (out + out.adjoint()).eval();
}

struct RealConstraint {
    MatrixXd A;
    VectorXd D;  // coefficients on the LP block (lin vars + slacks)
    double b = 0.0;
    bool diagonal = false;  // A has nonzeros only on the diagonal
    VectorXd adiag;         // diagonal of A when diagonal == true
};

// Largest step in [0, 1] keeping X + alpha * dX positive definite, found by
// Cholesky bisection with a small interior margin.
double psd_step_length(const MatrixXd& X, const MatrixXd& dX) {
    auto ok = [&](double a) {
        MatrixXd M = X + a * dX;
        return Eigen::LLT<MatrixXd>(M).info() == Eigen::Success;
    };
    if (ok(1.0)) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 30; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (ok(mid))
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

double lp_step_length(const VectorXd& v, const VectorXd& dv) {
    double a = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
    return a;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, double tol) {
    const int nc = static_cast<int>(problem.C.rows());
    if (nc < 1 || problem.C.cols() != nc)
        throw std::invalid_argument("solve_sdp: cost matrix must be square");
    if (nc > 512) throw std::invalid_argument("solve_sdp: dense solver limited to n <= 512");
    if ((problem.C - problem.C.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + problem.C.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("solve_sdp: cost matrix must be Hermitian");

    const double sense_flip = problem.maximize ? -1.0 : 1.0;
    const int n = 2 * nc;
    const int m = static_cast<int>(problem.constraints.size());
    const int p = problem.num_lin_vars;
    int q = 0;
    for (const auto& c : problem.constraints)
        if (c.sense == ConstraintSense::GreaterEqual) ++q;
    const int P = p + q;  // LP block size

    // Embed and row-normalize by the data norms; slack columns attach after
    // scaling so a unit slack coefficient never masks a tiny constraint.
    std::vector<RealConstraint> cons(m);
    VectorXd bvec(m), row_scale(m);
    {
        for (int i = 0; i < m; ++i) {
            const auto& src = problem.constraints[i];
            if (src.A.rows() != nc || src.A.cols() != nc)
                throw std::invalid_argument("solve_sdp: constraint matrix dimension mismatch");
            if ((src.A - src.A.adjoint()).cwiseAbs().maxCoeff() >
                1e-10 * (1.0 + src.A.cwiseAbs().maxCoeff()))
                throw std::invalid_argument("solve_sdp: constraint matrix must be Hermitian");
            RealConstraint& rc = cons[i];
            rc.A = embed_half(src.A);
            rc.D = VectorXd::Zero(P);
            if (src.lin.size() > 0) {
                if (src.lin.size() != p)
                    throw std::invalid_argument("solve_sdp: constraint lin size mismatch");
                rc.D.head(p) = src.lin;
            }
            double scale = std::max(rc.A.norm(), std::abs(src.b));
            if (scale <= 0.0) scale = std::max(rc.D.norm(), 1e-300);
            rc.A /= scale;
            rc.D /= scale;
            rc.b = src.b / scale;
            row_scale[i] = scale;
        }
    }
    // Column-equilibrate the user variables so they enter at unit size, then
    // attach unit slack columns for the inequalities.
    VectorXd col_scale = VectorXd::Ones(P);
    for (int j = 0; j < p; ++j) {
        double cmax = 0.0;
        for (int i = 0; i < m; ++i) cmax = std::max(cmax, std::abs(cons[i].D[j]));
        col_scale[j] = std::max(cmax, 1e-300);
        for (int i = 0; i < m; ++i) cons[i].D[j] /= col_scale[j];
    }
    {
        int slack = 0;
        for (int i = 0; i < m; ++i) {
            if (problem.constraints[i].sense == ConstraintSense::GreaterEqual)
                cons[i].D[p + slack++] = -1.0;
            bvec[i] = cons[i].b;
            cons[i].adiag = cons[i].A.diagonal();
            cons[i].diagonal =
                (cons[i].A - MatrixXd(cons[i].adiag.asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
        }
    }

    MatrixXd C = sense_flip * embed_half(problem.C);
    VectorXd cv = VectorXd::Zero(P);
    if (p > 0)
        cv.head(p) = sense_flip * problem.lin_cost.cwiseQuotient(col_scale.head(p));
    const double cost_scale = std::max({C.norm(), (P > 0 ? cv.cwiseAbs().maxCoeff() : 0.0), 1e-300});
    C /= cost_scale;
    cv /= cost_scale;

    // Starting point.
    const double bmax = m > 0 ? bvec.cwiseAbs().maxCoeff() : 0.0;
    const double kp = std::max({10.0, std::sqrt(static_cast<double>(n)), 5.0 * bmax});
    const double kd = std::max({10.0, std::sqrt(static_cast<double>(n)), C.norm()});
    MatrixXd X = kp * MatrixXd::Identity(n, n);
    MatrixXd Z = kd * MatrixXd::Identity(n, n);
    VectorXd v = VectorXd::Constant(P, kp);
    VectorXd z = VectorXd::Constant(P, kd);
    VectorXd y = VectorXd::Zero(m);

    SdpSolution sol;
    sol.lin_vars = VectorXd::Zero(p);
    sol.duals = VectorXd::Zero(m);

    const int max_iter = 100;
    const double dof = n + P;
    bool diverged = false;

    MatrixXd Rd(n, n), Zinv(n, n), E(n, n), dX(n, n), dZ(n, n);
    VectorXd rp(m), rd(P), dv(P), dz(P), dy(m);
    std::vector<MatrixXd> W(m);  // Z^-1 A_j X for dense constraints

    int iter = 0;
    double pinf = 0.0, dinf = 0.0, relgap = 0.0, pobj = 0.0, dobj = 0.0;
    for (iter = 0; iter < max_iter; ++iter) {
        // Residuals.
        for (int i = 0; i < m; ++i)
            rp[i] = cons[i].b - cons[i].A.cwiseProduct(X).sum() - cons[i].D.dot(v);
        Rd = C - Z;
        for (int i = 0; i < m; ++i) Rd.noalias() -= y[i] * cons[i].A;
        rd = cv - z;
        for (int i = 0; i < m; ++i) rd.noalias() -= y[i] * cons[i].D;

        const double mu = (X.cwiseProduct(Z).sum() + v.dot(z)) / dof;
        if (!std::isfinite(mu)) {
            diverged = true;
            break;
        }
        pobj = C.cwiseProduct(X).sum() + cv.dot(v);
        dobj = bvec.dot(y);

        pinf = m > 0 ? rp.cwiseAbs().maxCoeff() / (1.0 + bmax) : 0.0;
        dinf = std::max(Rd.cwiseAbs().maxCoeff(),
                        P > 0 ? rd.cwiseAbs().maxCoeff() : 0.0) /
               (1.0 + C.cwiseAbs().maxCoeff());
        relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

        if (std::getenv("IRSBC_SDP_TRACE"))
            std::fprintf(stderr, "it=%d mu=%.3e pinf=%.3e dinf=%.3e gap=%.3e pobj=%.6e dobj=%.6e\n",
                         iter, mu, pinf, dinf, relgap, pobj, dobj);
        if (pinf < tol && dinf < tol && relgap < tol) {
            sol.status = SdpStatus::Optimal;
            break;
        }
        if (y.size() > 0 && y.cwiseAbs().maxCoeff() > 1e11) {
            diverged = true;
            break;
        }

        // Scaling quantities shared by predictor and corrector.
        Eigen::LLT<MatrixXd> lltZ(Z);
        if (lltZ.info() != Eigen::Success) break;
        Zinv = lltZ.solve(MatrixXd::Identity(n, n));
        const MatrixXd H = X.cwiseProduct(Zinv);  // for diag-diag Schur entries

        for (int j = 0; j < m; ++j)
            if (!cons[j].diagonal) W[j] = Zinv * cons[j].A * X;

        MatrixXd B(m, m);
        for (int j = 0; j < m; ++j) {
            if (cons[j].diagonal) {
                for (int i = 0; i < m; ++i) {
                    if (cons[i].diagonal)
                        B(i, j) = cons[i].adiag.dot(H * cons[j].adiag);
                    else
                        B(i, j) = W[i].diagonal().dot(cons[j].adiag);
                }
            } else {
                for (int i = 0; i < m; ++i) {
                    if (cons[i].diagonal)
                        B(i, j) = cons[i].adiag.dot(W[j].diagonal());
                    else
                        B(i, j) = cons[i].A.cwiseProduct(W[j].transpose()).sum();
                }
            }
        }
        const VectorXd vz = P > 0 ? (v.array() / z.array()).matrix() : VectorXd();
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double acc = B(i, j);
                if (P > 0) acc += cons[i].D.cwiseProduct(vz).dot(cons[j].D);
                B(i, j) = acc;
            }
        Eigen::PartialPivLU<MatrixXd> lu(B);

        const MatrixXd XRdZinv = X * Rd * Zinv;

        auto solve_direction = [&](double sigma_mu, const MatrixXd& corrX,
                                   const VectorXd& corrLP) {
            E = sigma_mu * Zinv - X - XRdZinv - corrX;
            VectorXd f(P);
            for (int l = 0; l < P; ++l) f[l] = (sigma_mu - corrLP[l]) / z[l] - v[l];
            VectorXd rhs(m);
            for (int i = 0; i < m; ++i) {
                double val = rp[i];
                if (cons[i].diagonal)
                    val -= cons[i].adiag.dot(E.diagonal());
                else
                    val -= cons[i].A.cwiseProduct(E).sum();
                if (P > 0) val -= cons[i].D.dot(f - vz.cwiseProduct(rd));
                rhs[i] = val;
            }
            dy = lu.solve(rhs);
            dZ = Rd;
            for (int i = 0; i < m; ++i) dZ.noalias() -= dy[i] * cons[i].A;
            MatrixXd S = MatrixXd::Zero(n, n);
            for (int i = 0; i < m; ++i) S.noalias() += dy[i] * cons[i].A;
            // dX = E + X (sum dy_j A_j) Zinv, symmetrized.
            dX = E + X * S * Zinv;
            dX = 0.5 * (dX + dX.transpose()).eval();
            if (P > 0) {
                dz = rd - [&] {
                    VectorXd t = VectorXd::Zero(P);
                    for (int i = 0; i < m; ++i) t += dy[i] * cons[i].D;
                    return t;
                }();
                dv = f - vz.cwiseProduct(dz);
            }
        };

        // Predictor (affine scaling).
        solve_direction(0.0, MatrixXd::Zero(n, n), VectorXd::Zero(P));
        if (!dy.allFinite() || !dX.allFinite() || !dZ.allFinite()) {
            diverged = true;
            break;
        }
        double ap = std::min(psd_step_length(X, dX), P > 0 ? lp_step_length(v, dv) : 1.0);
        double ad = std::min(psd_step_length(Z, dZ), P > 0 ? lp_step_length(z, dz) : 1.0);
        double mu_aff = ((X + ap * dX).cwiseProduct(Z + ad * dZ).sum() +
                         (P > 0 ? (v + ap * dv).dot(z + ad * dz) : 0.0)) /
                        dof;
        mu_aff = std::max(mu_aff, 0.0);
        double sigma = std::pow(mu_aff / mu, 3);
        sigma = std::clamp(sigma, 1e-8, 1.0);

        // Corrector with Mehrotra second-order terms.
        const MatrixXd corrX = (dX * dZ * Zinv).eval();
        VectorXd corrLP = VectorXd::Zero(P);
        if (P > 0) corrLP = dv.cwiseProduct(dz);
        solve_direction(sigma * mu, 0.5 * (corrX + corrX.transpose()), corrLP);
        if (!dy.allFinite() || !dX.allFinite() || !dZ.allFinite()) {
            diverged = true;
            break;
        }

        const double tau = iter < 3 ? 0.95 : 0.98;
        ap = tau * std::min(psd_step_length(X, dX), P > 0 ? lp_step_length(v, dv) : 1.0);
        ad = tau * std::min(psd_step_length(Z, dZ), P > 0 ? lp_step_length(z, dz) : 1.0);
        ap = std::min(ap, 1.0);
        ad = std::min(ad, 1.0);

        X += ap * dX;
        v += ap * dv;
        Z += ad * dZ;
        z += ad * dz;
        y += ad * dy;

        if (ap < 1e-10 && ad < 1e-10) break;
    }

    sol.iterations = iter;
    if (sol.status != SdpStatus::Optimal) {
        // Primal infeasibility shows up as a dual ray: dual near-feasible,
        // dual objective running away above the primal while the primal
        // residual refuses to shrink.
        const bool dual_ray = dinf < std::sqrt(tol) && pinf > 1e2 * tol &&
                              (dobj > pobj + 1.0 || !std::isfinite(dobj));
        if ((diverged && pinf > 1e2 * tol) || dual_ray)
            sol.status = SdpStatus::Infeasible;
        else
            sol.status = SdpStatus::MaxIter;
    }

    sol.X = extract_complex(X);
    if (p > 0) sol.lin_vars = v.head(p).cwiseQuotient(col_scale.head(p));
    for (int i = 0; i < m; ++i) sol.duals[i] = sense_flip * y[i] * cost_scale / row_scale[i];
    sol.primal_obj = sense_flip * pobj * cost_scale;
    sol.dual_obj = sense_flip * dobj * cost_scale;
    sol.gap = std::abs(sol.primal_obj - sol.dual_obj);
    sol.primal_residual = pinf;
    sol.dual_residual = dinf;
    // Weak duality for the minimization form: primal >= dual up to gap noise.
    sol.weak_duality_ok = pobj >= dobj - 10.0 * tol * (1.0 + std::abs(pobj) + std::abs(dobj));
    return sol;
}

ComplexVector gaussian_randomize(const ComplexMatrix& X, int count_R,
                                 const std::function<double(const ComplexVector&)>& evaluator,
                                 const std::function<bool(const ComplexVector&)>& checker,
                                 Rng& rng, bool unit_modulus_projection, bool* feasible_out) {
    if (count_R < 1) throw std::invalid_argument("gaussian_randomize: count_R must be >= 1");
    const int n = static_cast<int>(X.rows());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (X + X.adjoint()));
    ComplexMatrix U = eig.eigenvectors();
    RealVector d = eig.eigenvalues().cwiseMax(0.0);
    ComplexMatrix factor = U * d.cwiseSqrt().asDiagonal();

    auto unit = [](Complex zv) {
        const double a = std::abs(zv);
        return a > 0.0 ? zv / a : Complex{1.0, 0.0};
    };

    ComplexVector best_feasible, best_any;
    double best_feasible_score = -std::numeric_limits<double>::infinity();
    double best_any_score = -std::numeric_limits<double>::infinity();

    ComplexVector r(n), cand(n);
    for (int qi = 0; qi < count_R; ++qi) {
        for (int i = 0; i < n; ++i) r[i] = std::polar(1.0, rng.uniform(0.0, kTwoPi));
        cand = factor * r;
        if (unit_modulus_projection) {
            const Complex rot = std::conj(unit(cand[n - 1]));
            for (int i = 0; i < n; ++i) cand[i] = unit(cand[i] * rot);
            cand[n - 1] = Complex{1.0, 0.0};
        }
        const double score = evaluator(cand);
        if (score > best_any_score) {
            best_any_score = score;
            best_any = cand;
        }
        if (checker(cand) && score > best_feasible_score) {
            best_feasible_score = score;
            best_feasible = cand;
        }
    }
    const bool found = best_feasible.size() > 0;
    if (feasible_out) *feasible_out = found;
    return found ? best_feasible : best_any;
}

std::optional<ComplexVector> scale_to_most_violated(
    const ComplexVector& w_candidate, const std::vector<std::pair<double, double>>& lhs_rhs) {
    double scale = 0.0;
    for (const auto& [lhs, rhs] : lhs_rhs) {
        if (rhs <= 0.0) continue;  // vacuous along any direction
        if (lhs <= 0.0) return std::nullopt;
        scale = std::max(scale, rhs / lhs);
    }
    if (scale == 0.0) scale = 1.0;  // no binding constraint: keep the candidate
    return ComplexVector(std::sqrt(scale) * w_candidate);
}

}  // namespace irsbc
