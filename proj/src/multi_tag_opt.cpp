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

#include "irsbc/multi_tag_opt.hpp"

#include <cmath>

#include "irsbc/signal_model.hpp"
#include "irsbc/single_tag_opt.hpp"
#include "sr_engine.hpp"

namespace irsbc {

AoConfig AoConfig::from_scenario(const Scenario& s, PhaseMethod method) {
    AoConfig cfg;
    cfg.phase_method = method;
    cfg.eps = s.conv_eps;
    cfg.sr_precision_T = s.sr_precision_T;
    cfg.rand_count_R = s.rand_count_R;
    return cfg;
}

TagQuadratics build_tag_quadratics(const ChannelSet& ch, const ComplexVector& w,
                                   const ComplexVector& g, int k) {
    const int N = ch.num_elements();
    TagQuadratics t;
    const ComplexVector rig = ch.H_RI * g;
    const ComplexVector hciw = ch.H_CI * w;
    t.a = rig.conjugate().cwiseProduct(ch.h_TI.at(k));
    t.c = ch.h_TI.at(k).conjugate().cwiseProduct(hciw);
    t.b = (g.adjoint() * ch.h_TR.at(k)).value();
    t.d = (ch.h_CT.at(k) * w).value();

    t.A.setZero(N + 1, N + 1);
    t.A.topLeftCorner(N, N) = t.a * t.a.adjoint();
    t.A.topRightCorner(N, 1) = std::conj(t.b) * t.a;
    t.A.bottomLeftCorner(1, N) = t.A.topRightCorner(N, 1).adjoint();
    t.C.setZero(N + 1, N + 1);
    t.C.topLeftCorner(N, N) = t.c * t.c.adjoint();
    t.C.topRightCorner(N, 1) = std::conj(t.d) * t.c;
    t.C.bottomLeftCorner(1, N) = t.C.topRightCorner(N, 1).adjoint();
    return t;
}

TxBeamformingResult solve_tx_beamforming(const ChannelSet& ch, const PhaseConfig& phases,
                                         const std::vector<double>& alphas,
                                         const std::vector<ComplexVector>& combiners,
                                         const Scenario& scn, Rng& rng) {
    const int K = ch.num_tags();
    const int L = ch.num_ce_antennas();
    const double noise = scn.noise_power_watts();
    const double gamma_th = scn.gamma_th_linear();
    const double xi = scn.xi_watts;

    TxBeamformingResult out;

    std::vector<ComplexRowVector> h1(K);
    std::vector<double> snr_gain(K), snr_rhs(K), circ_rhs(K);
    SdpProblem prob;
    prob.C = ComplexMatrix::Identity(L, L);
    for (int k = 0; k < K; ++k) {
        h1[k] = composite_ce_tag(ch, phases, k);
        const ComplexVector h2 = composite_tag_reader(ch, phases, k);
        const ComplexVector& g = combiners[k];
        snr_gain[k] = std::norm((g.adjoint() * h2).value());
        const double gn2 = g.squaredNorm();
        snr_rhs[k] = gamma_th * noise * gn2 / (alphas[k] * scn.b_mag_sq);
        const ComplexMatrix Hk1 = h1[k].adjoint() * h1[k];
        SdpConstraint snr;
        snr.A = snr_gain[k] * Hk1;
        snr.b = snr_rhs[k];
        prob.constraints.push_back(std::move(snr));
        if (xi > 0.0) {
            circ_rhs[k] = xi / ((1.0 - alphas[k]) * scn.eta);
            if (!std::isfinite(circ_rhs[k])) {
                out.status = SdpStatus::Infeasible;
                return out;
            }
            SdpConstraint circ;
            circ.A = Hk1;
            circ.b = circ_rhs[k];
            prob.constraints.push_back(std::move(circ));
        }
    }

    SdpSolution sdr = solve_sdp(prob);
    if (sdr.status == SdpStatus::Infeasible) {
        out.status = SdpStatus::Infeasible;
        return out;
    }
    out.sdr_trace = sdr.primal_obj;

    auto constraint_values = [&](const ComplexVector& w) {
        std::vector<std::pair<double, double>> lhs_rhs;
        lhs_rhs.reserve(xi > 0.0 ? 2 * K : K);
        for (int k = 0; k < K; ++k) {
            const double hw = std::norm((h1[k] * w).value());
            lhs_rhs.emplace_back(snr_gain[k] * hw, snr_rhs[k]);
            if (xi > 0.0) lhs_rhs.emplace_back(hw, circ_rhs[k]);
        }
        return lhs_rhs;
    };

    // Score = negative post-scaling power; unscalable directions are ranked out.
    auto evaluator = [&](const ComplexVector& w) {
        auto scaled = scale_to_most_violated(w, constraint_values(w));
        return scaled ? -scaled->squaredNorm() : -std::numeric_limits<double>::infinity();
    };
    auto checker = [&](const ComplexVector& w) {
        return scale_to_most_violated(w, constraint_values(w)).has_value();
    };

    bool feasible = false;
    const ComplexVector best =
        gaussian_randomize(sdr.X, scn.rand_count_R, evaluator, checker, rng, false, &feasible);
    if (!feasible) {
        out.status = SdpStatus::Infeasible;
        return out;
    }
    out.w = *scale_to_most_violated(best, constraint_values(best));
    out.status = SdpStatus::Optimal;
    return out;
}

namespace {

// True quartic constraint values at a lifted phase vector.
struct TagEval {
    double snr_lhs;   // |g^H h2|^2 |h1 w|^2
    double circ_lhs;  // |h1 w|^2
};

TagEval eval_tag(const TagQuadratics& t, const ComplexVector& v_bar) {
    const double qa = std::real((v_bar.adjoint() * t.A * v_bar).value()) + std::norm(t.b);
    const double qc = std::real((v_bar.adjoint() * t.C * v_bar).value()) + std::norm(t.d);
    return {qa * qc, qc};
}

}  // namespace

PhaseConfig phase_update_mm(const ChannelSet& ch, const ComplexVector& w,
                            const std::vector<double>& alphas,
                            const std::vector<ComplexVector>& combiners, const Scenario& scn,
                            const AoConfig& cfg, const PhaseConfig& current, Rng& rng,
                            bool* stalled) {
    const int K = ch.num_tags();
    const int N = ch.num_elements();
    const double noise = scn.noise_power_watts();
    const double xi = scn.xi_watts;
    const double ell = scn.lipschitz_ell;

    std::vector<TagQuadratics> tq(K);
    std::vector<double> snr_rhs(K), gn2(K);
    for (int k = 0; k < K; ++k) {
        tq[k] = build_tag_quadratics(ch, w, combiners[k], k);
        gn2[k] = combiners[k].squaredNorm();
        snr_rhs[k] = scn.gamma_th_linear() * noise * gn2[k] / (alphas[k] * scn.b_mag_sq);
    }

    auto surplus_score = [&](const ComplexVector& v_bar) {
        double total = 0.0;
        for (int k = 0; k < K; ++k) total += eval_tag(tq[k], v_bar).snr_lhs - snr_rhs[k];
        return total;
    };
    auto feasible_point = [&](const ComplexVector& v_bar) {
        for (int k = 0; k < K; ++k) {
            const TagEval e = eval_tag(tq[k], v_bar);
            if (e.snr_lhs < snr_rhs[k] * (1.0 - 1e-9)) return false;
            if (xi > 0.0 &&
                (1.0 - alphas[k]) * scn.eta * e.circ_lhs < xi * (1.0 - 1e-9))
                return false;
        }
        return true;
    };

    ComplexVector v0 = cfg.warm_start_phases
                           ? vbar_from_phases(current)
                           : vbar_from_phases(PhaseConfig::from_theta([&] {
                                 RealVector t(N);
                                 for (int n = 0; n < N; ++n) t[n] = rng.uniform(0.0, kTwoPi);
                                 return t;
                             }()));
    double best_score = surplus_score(v0);
    bool any_accepted = false;

    std::vector<double> sdp_obj_trace;
    for (int inner = 0; inner < cfg.mm_max_inner; ++inner) {
        // Exact-value minorizer per tag:
        //   minorizer_k(vbar) = -(ell/2)||vbar||^2 + 2 Re{vbar^H t_k} + kappa_k
        // packed as the (N+2) lifted matrix with the constant in the corner so
        // that tr(U_k V) + |b_k d_k|^2 reproduces the minorizer value under the
        // unit-diagonal constraints.
        SdpProblem prob;
        prob.maximize = true;
        prob.C = ComplexMatrix::Zero(N + 2, N + 2);
        prob.num_lin_vars = xi > 0.0 ? K : 0;
        if (xi > 0.0) prob.lin_cost = RealVector::Ones(K);

        for (int k = 0; k < K; ++k) {
            const ComplexVector tv = tq[k].T_apply(v0);
            const ComplexVector tvec = tv + 0.5 * ell * v0;
            const double g0 = eval_tag(tq[k], v0).snr_lhs;
            const double kappa = g0 - 2.0 * std::real((v0.adjoint() * tv).value()) -
                                 0.5 * ell * static_cast<double>(N + 1);

            ComplexMatrix Uk = ComplexMatrix::Zero(N + 2, N + 2);
            Uk.topLeftCorner(N + 1, N + 1) = -0.5 * ell * ComplexMatrix::Identity(N + 1, N + 1);
            Uk.topRightCorner(N + 1, 1) = tvec;
            Uk.bottomLeftCorner(1, N + 1) = tvec.adjoint();
            Uk(N + 1, N + 1) = kappa - std::norm(tq[k].b) * std::norm(tq[k].d);

            if (xi == 0.0) prob.C += Uk;

            SdpConstraint snr;
            snr.A = Uk;
            snr.b = snr_rhs[k] - std::norm(tq[k].b) * std::norm(tq[k].d);
            if (xi > 0.0) snr.lin = RealVector::Zero(K);
            prob.constraints.push_back(std::move(snr));

            if (xi > 0.0) {
                ComplexMatrix Ck = ComplexMatrix::Zero(N + 2, N + 2);
                Ck.topLeftCorner(N + 1, N + 1) = tq[k].C;
                const double scale = (1.0 - alphas[k]) * scn.eta;
                SdpConstraint circ;
                circ.A = scale * Ck;
                circ.lin = RealVector::Zero(K);
                circ.lin[k] = -1.0;
                circ.b = xi - scale * std::norm(tq[k].d);
                prob.constraints.push_back(std::move(circ));
            }
        }
        for (int i = 0; i < N + 2; ++i) {
            SdpConstraint diag;
            diag.A = ComplexMatrix::Zero(N + 2, N + 2);
            diag.A(i, i) = 1.0;
            diag.sense = ConstraintSense::Equal;
            diag.b = 1.0;
            if (xi > 0.0) diag.lin = RealVector::Zero(K);
            prob.constraints.push_back(std::move(diag));
        }

        SdpSolution sol = solve_sdp(prob);
        if (sol.status == SdpStatus::Infeasible) break;
        sdp_obj_trace.push_back(sol.primal_obj);

        auto project_to_vbar = [&](const ComplexVector& cand) {
            // Drop the lift entry, rotate the pinned entry to 1.
            ComplexVector vb = cand.head(N + 1);
            const Complex piv = vb[N];
            const Complex rot = std::abs(piv) > 0.0 ? std::conj(piv) / std::abs(piv)
                                                    : Complex{1.0, 0.0};
            for (int i = 0; i < N; ++i) {
                const Complex zi = vb[i] * rot;
                const double a = std::abs(zi);
                vb[i] = a > 0.0 ? zi / a : Complex{1.0, 0.0};
            }
            vb[N] = Complex{1.0, 0.0};
            return vb;
        };
        auto evaluator = [&](const ComplexVector& cand) {
            return surplus_score(project_to_vbar(cand));
        };
        auto checker = [&](const ComplexVector& cand) {
            return feasible_point(project_to_vbar(cand));
        };
        bool feasible = false;
        const ComplexVector cand = gaussian_randomize(sol.X, cfg.rand_count_R, evaluator, checker,
                                                      rng, false, &feasible);
        if (!feasible) break;
        const ComplexVector vb = project_to_vbar(cand);
        const double score = surplus_score(vb);
        if (score <= best_score) break;  // no improvement: stall out
        best_score = score;
        v0 = vb;
        any_accepted = true;

        const size_t nt = sdp_obj_trace.size();
        if (nt >= 2 && std::abs(sdp_obj_trace[nt - 1] - sdp_obj_trace[nt - 2]) <=
                           cfg.eps * std::max(std::abs(sdp_obj_trace[nt - 2]), 1e-30))
            break;
    }

    if (stalled) *stalled = !any_accepted;
    return any_accepted ? phase_config_from_vbar(v0) : current;
}

PhaseConfig phase_update_sr(const ChannelSet& ch, const ComplexVector& w,
                            const std::vector<double>& alphas,
                            const std::vector<ComplexVector>& combiners, const Scenario& scn,
                            const AoConfig& cfg, const PhaseConfig& current) {
    auto sweep = detail::sr_refine_phases(ch, w, alphas, combiners, scn, current, SrMode::Exact,
                                          cfg.eps, cfg.sr_max_sweeps);
    return sweep.phases;
}

RealVector normalize_residuals(const RealVector& residuals) {
    RealVector out = RealVector::Zero(residuals.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < residuals.size(); ++i) {
        if (residuals[i] > 0.0) {
            lo = std::min(lo, residuals[i]);
            hi = std::max(hi, residuals[i]);
        }
    }
    if (!(hi > 0.0)) return out;  // no positive entries
    const double range = hi - lo;
    for (Eigen::Index i = 0; i < residuals.size(); ++i) {
        if (residuals[i] <= 0.0) continue;
        // Degenerate range (single positive value): map it to 1.
        out[i] = range > 0.0 ? (residuals[i] - lo) / range : 1.0;
    }
    return out;
}

std::pair<double, double> alpha_interval(const ChannelSet& ch, const ComplexVector& w,
                                         const PhaseConfig& phases, const ComplexVector& g,
                                         int k, const Scenario& scn) {
    const ComplexRowVector h1 = composite_ce_tag(ch, phases, k);
    const ComplexVector h2 = composite_tag_reader(ch, phases, k);
    const double tr_wh = std::norm((h1 * w).value());
    const double gh2 = std::norm((g.adjoint() * h2).value());
    const double gn2 = g.squaredNorm();
    if (tr_wh <= 0.0 || gh2 <= 0.0)
        return {std::numeric_limits<double>::infinity(), 0.0};  // infeasible marker
    const double lo =
        scn.gamma_th_linear() * scn.noise_power_watts() * gn2 / (scn.b_mag_sq * tr_wh * gh2);
    const double hi = 1.0 - scn.xi_watts / (scn.eta * tr_wh);
    return {lo, hi};
}

ComplexVector optimal_combiner(const ChannelSet& ch, const PhaseConfig& phases,
                               const ComplexVector& w, int k) {
    const ComplexRowVector h1 = composite_ce_tag(ch, phases, k);
    const ComplexVector h2 = composite_tag_reader(ch, phases, k);
    const ComplexVector dir = h2 * (h1 * w).value();
    const double nrm = dir.norm();
    if (nrm <= 0.0) throw std::invalid_argument("optimal_combiner: cascaded channel is zero");
    return dir / nrm;
}

SolveReport ao_solve(const ChannelSet& ch, const Scenario& scn, const AoConfig& cfg, Rng& rng) {
    const int K = ch.num_tags();
    const int N = ch.num_elements();
    const int M = ch.num_reader_antennas();
    const double xi = scn.xi_watts;

    SolveReport rep;
    rep.point.tags.assign(K, TagState{xi > 0.0 ? 0.5 : 1.0, xi, scn.b_mag_sq});
    {
        RealVector t(N);
        for (int n = 0; n < N; ++n) t[n] = rng.uniform(0.0, kTwoPi);
        rep.point.phases = PhaseConfig::from_theta(t);
    }
    rep.point.combiners.resize(K);
    for (int k = 0; k < K; ++k) {
        ComplexVector g(M);
        for (int i = 0; i < M; ++i) g[i] = rng.cnormal();
        rep.point.combiners[k] = g / g.norm();
    }

    std::vector<double> alphas(K, xi > 0.0 ? 0.5 : 1.0);
    double prev_norm = std::numeric_limits<double>::infinity();
    ComplexVector w;
    bool any_alpha_update = xi == 0.0;

    for (int outer = 0; outer < cfg.max_outer_iters; ++outer) {
        TxBeamformingResult bf =
            solve_tx_beamforming(ch, rep.point.phases, alphas, rep.point.combiners, scn, rng);
        if (bf.status != SdpStatus::Optimal) {
            if (outer == 0) {
                rep.status = SolveStatus::Infeasible;
                return rep;
            }
            break;  // keep the previous feasible iterate
        }
        double norm2 = bf.w.squaredNorm();
        if (norm2 <= prev_norm * (1.0 + 1e-8)) {
            w = bf.w;
        } else {
            // Randomization slack would have raised the objective: the
            // previous beamformer is still feasible, keep it.
            norm2 = prev_norm;
        }
        rep.objective_trace.push_back(norm2);
        rep.iterations = outer + 1;

        if (std::isfinite(prev_norm) &&
            std::abs(norm2 - prev_norm) <= cfg.eps * std::max(prev_norm, 1e-30)) {
            prev_norm = norm2;
            break;
        }
        prev_norm = norm2;

        if (!cfg.skip_phase_updates) {
            if (cfg.phase_method == PhaseMethod::Mm) {
                // A stalled update returns the incoming phases, which the next
                // beamforming solve simply re-tightens.
                rep.point.phases = phase_update_mm(ch, w, alphas, rep.point.combiners, scn, cfg,
                                                   rep.point.phases, rng);
            } else {
                rep.point.phases = phase_update_sr(ch, w, alphas, rep.point.combiners, scn, cfg,
                                                   rep.point.phases);
            }
        }

        if (xi > 0.0) {
            for (int k = 0; k < K; ++k) {
                const auto [lo, hi] =
                    alpha_interval(ch, w, rep.point.phases, rep.point.combiners[k], k, scn);
                if (lo > hi) {
                    // The feasible range collapses to a point as the iteration
                    // converges and the phase step can nudge it past itself;
                    // keep the previous coefficient and let the next
                    // beamforming solve re-tighten.
                    continue;
                }
                any_alpha_update = true;
                alphas[k] = std::clamp(0.5 * (lo + hi), 1e-9, 1.0 - 1e-9);
                rep.point.tags[k].alpha = alphas[k];
            }
        }

        for (int k = 0; k < K; ++k)
            rep.point.combiners[k] = optimal_combiner(ch, rep.point.phases, w, k);
    }

    if (w.size() == 0) {
        rep.status = SolveStatus::Infeasible;
        return rep;
    }
    rep.point.w = w;
    rep.power_watts = prev_norm;
    if (!any_alpha_update) {
        // The splitting-coefficient range never opened up: the realization is
        // excluded from averages upstream.
        rep.status = SolveStatus::InfeasibleAtIterate;
        return rep;
    }
    rep.status = rep.iterations < cfg.max_outer_iters ? SolveStatus::Converged
                                                      : SolveStatus::MaxIterations;
    return rep;
}

}  // namespace irsbc
