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

#include "irsbc/single_tag_opt.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "irsbc/signal_model.hpp"
#include "sr_engine.hpp"

namespace irsbc {

namespace {

void require_base_case(const ChannelSet& ch) {
    if (ch.num_tags() != 1 || ch.num_reader_antennas() != 1)
        throw std::invalid_argument("single_tag_opt: requires K = 1 and M = 1");
}

}  // namespace

QuarticForm build_quartic(const ChannelSet& ch) {
    require_base_case(ch);
    const int N = ch.num_elements();
    const int L = ch.num_ce_antennas();

    // Phi_CIT = diag(h_TI^H) H_CI, Phi_TIR = diag(h_RI^H) h_TI.
    ComplexMatrix phi_cit(N, L);
    for (int n = 0; n < N; ++n)
        phi_cit.row(n) = std::conj(ch.h_TI[0][n]) * ch.H_CI.row(n);
    ComplexVector phi_tir = ch.H_RI.col(0).conjugate().cwiseProduct(ch.h_TI[0]);
    const Complex h_tr = ch.h_TR[0][0];

    QuarticForm form;
    form.R.setZero(N + 1, N + 1);
    form.R.topLeftCorner(N, N) = phi_cit * phi_cit.adjoint();
    form.R.topRightCorner(N, 1) = phi_cit * ch.h_CT[0].adjoint();
    form.R.bottomLeftCorner(1, N) = form.R.topRightCorner(N, 1).adjoint();
    form.S.setZero(N + 1, N + 1);
    form.S.topLeftCorner(N, N) = phi_tir * phi_tir.adjoint();
    form.S.topRightCorner(N, 1) = phi_tir * std::conj(h_tr);
    form.S.bottomLeftCorner(1, N) = form.S.topRightCorner(N, 1).adjoint();
    form.c1 = ch.h_CT[0].squaredNorm();
    form.c2 = std::norm(h_tr);
    return form;
}

double quartic_value(const QuarticForm& form, const ComplexVector& v_bar) {
    const double r = std::real((v_bar.adjoint() * form.R * v_bar).value());
    const double s = std::real((v_bar.adjoint() * form.S * v_bar).value());
    return (r + form.c1) * (s + form.c2);
}

PhaseConfig phase_config_from_vbar(const ComplexVector& v_bar) {
    const int N = static_cast<int>(v_bar.size()) - 1;
    const Complex pivot = v_bar[N];
    RealVector theta(N);
    for (int n = 0; n < N; ++n) {
        // v_n = e^{-j theta_n} relative to the last (pinned) entry.
        theta[n] = -std::arg(v_bar[n] / pivot);
    }
    return PhaseConfig::from_theta(theta);
}

ComplexVector vbar_from_phases(const PhaseConfig& phases) {
    const int N = phases.size();
    ComplexVector v_bar(N + 1);
    for (int n = 0; n < N; ++n) v_bar[n] = std::polar(1.0, -phases.theta[n]);
    v_bar[N] = Complex{1.0, 0.0};
    return v_bar;
}

namespace {

void refresh_surrogate(MmState& st, const QuarticForm& form, double ell) {
    const int n1 = static_cast<int>(st.v_bar0.size());
    const ComplexVector rv = form.R * st.v_bar0;
    const ComplexVector sv = form.S * st.v_bar0;
    st.T = rv * sv.adjoint() + sv * rv.adjoint() + form.c2 * form.R + form.c1 * form.S;

    const ComplexVector mvec = -(2.0 / ell) * (st.T * st.v_bar0) - st.v_bar0;
    st.U.setZero(n1 + 1, n1 + 1);
    st.U.topLeftCorner(n1, n1) = -ComplexMatrix::Identity(n1, n1);
    st.U.topRightCorner(n1, 1) = -mvec;
    st.U.bottomLeftCorner(1, n1) = -mvec.adjoint();

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(st.U, Eigen::EigenvaluesOnly);
    st.lambda_minus = eig.eigenvalues().minCoeff();
}

}  // namespace

MmState mm_init(const QuarticForm& form, const ComplexVector& v_bar0, double ell) {
    MmState st;
    st.v_bar0 = v_bar0;
    st.objective_trace.push_back(quartic_value(form, v_bar0));
    refresh_surrogate(st, form, ell);
    return st;
}

MmState mm_step(const MmState& state, const QuarticForm& form, double ell) {
    const int n1 = static_cast<int>(state.v_bar0.size());
    ComplexVector lifted(n1 + 1);
    lifted.head(n1) = state.v_bar0;
    lifted[n1] = Complex{1.0, 0.0};

    ComplexVector zv = state.U * lifted - state.lambda_minus * lifted;

    MmState next;
    next.objective_trace = state.objective_trace;
    next.v_bar0.resize(n1);
    // Free entries align with arg(z); the two pinned entries stay at 1, which
    // keeps the step feasible for the lifted problem and hence monotone.
    for (int i = 0; i < n1 - 1; ++i) next.v_bar0[i] = std::polar(1.0, std::arg(zv[i]));
    next.v_bar0[n1 - 1] = Complex{1.0, 0.0};
    next.objective_trace.push_back(quartic_value(form, next.v_bar0));
    refresh_surrogate(next, form, ell);
    return next;
}

PhaseOptResult mm_optimize(const ChannelSet& ch, const Scenario& scn, Rng& rng) {
    require_base_case(ch);
    const QuarticForm form = build_quartic(ch);
    const int N = ch.num_elements();

    RealVector theta0(N);
    for (int n = 0; n < N; ++n) theta0[n] = rng.uniform(0.0, kTwoPi);
    ComplexVector v_bar = vbar_from_phases(PhaseConfig::from_theta(theta0));

    double ell = scn.lipschitz_ell;
    const int max_iters = 500;
    const int max_restarts = 3;

    PhaseOptResult res;
    res.monotone = true;
    MmState st = mm_init(form, v_bar, ell);
    for (int restart = 0; restart <= max_restarts; ++restart) {
        bool violated = false;
        while (static_cast<int>(st.objective_trace.size()) - 1 < max_iters) {
            st = mm_step(st, form, ell);
            const auto& tr = st.objective_trace;
            const double prev = tr[tr.size() - 2];
            const double cur = tr.back();
            if (cur < prev * (1.0 - 1e-9)) {
                violated = true;
                break;
            }
            if (std::abs(cur - prev) <= scn.conv_eps * std::max(std::abs(prev), 1e-30)) break;
        }
        if (!violated) break;
        // Surrogate curvature too small for this instance: re-run from the
        // current point with a stiffer ell.
        ell *= 10.0;
        res.monotone = false;
        st = mm_init(form, st.v_bar0, ell);
    }

    res.phases = phase_config_from_vbar(st.v_bar0);
    res.objective_trace = st.objective_trace;
    res.iterations = static_cast<int>(st.objective_trace.size()) - 1;
    res.power_watts = min_power_given_phases(ch, res.phases, scn.gamma_th_linear(),
                                             scn.noise_power_watts(), scn.b_mag_sq);
    return res;
}

ComplexVector mrt_beamformer(const ChannelSet& ch, const PhaseConfig& phases, double power) {
    require_base_case(ch);
    const ComplexRowVector h1 = composite_ce_tag(ch, phases, 0);
    const Complex h2 = composite_tag_reader(ch, phases, 0)[0];
    const ComplexRowVector cascade = h2 * h1;
    const double nrm = cascade.norm();
    if (nrm <= 0.0) throw std::invalid_argument("mrt_beamformer: cascaded channel is zero");
    return std::sqrt(power) / nrm * cascade.adjoint();
}

double min_power_given_phases(const ChannelSet& ch, const PhaseConfig& phases,
                              double gamma_th_linear, double noise_watts, double b_mag_sq) {
    require_base_case(ch);
    const ComplexRowVector h1 = composite_ce_tag(ch, phases, 0);
    const Complex h2 = composite_tag_reader(ch, phases, 0)[0];
    const double cascade2 = std::norm(h2) * h1.squaredNorm();
    if (cascade2 <= 0.0) return std::numeric_limits<double>::infinity();
    return gamma_th_linear * noise_watts / (b_mag_sq * cascade2);
}

SrDecomposition sr_decompose(const ChannelSet& ch, const ComplexVector& w,
                             const PhaseConfig& phases, int n) {
    require_base_case(ch);
    const int N = ch.num_elements();
    if (n < 0 || n >= N) throw std::invalid_argument("sr_decompose: element index out of range");

    const ComplexVector hciw = ch.H_CI * w;
    Complex sum2 = ch.h_TR[0][0];
    Complex sum1 = (ch.h_CT[0] * w).value();
    ComplexVector pe(N), ce(N);
    for (int j = 0; j < N; ++j) {
        pe[j] = std::conj(ch.H_RI(j, 0)) * ch.h_TI[0][j];
        ce[j] = std::conj(ch.h_TI[0][j]) * hciw[j];
        const Complex e = std::polar(1.0, phases.theta[j]);
        sum2 += pe[j] * e;
        sum1 += ce[j] * e;
    }
    const Complex cur = std::polar(1.0, phases.theta[n]);
    const Complex P = sum2 - pe[n] * cur;
    const Complex Q = sum1 - ce[n] * cur;

    SrDecomposition d;
    d.h1 = pe[n] * ce[n];
    d.h_sigma = pe[n] * Q + ce[n] * P;
    d.h4 = P * Q;
    return d;
}

double sr_objective(const SrDecomposition& d, double theta) {
    const Complex e1 = std::polar(1.0, theta);
    const Complex e2 = e1 * e1;
    return std::norm(d.h1 * e2 + d.h_sigma * e1 + d.h4);
}

double sr_step(const SrDecomposition& d, SrMode mode, double precision_T) {
    if (mode == SrMode::Approx) {
        const double theta_sigma4 = std::arg(d.h_sigma * std::conj(d.h4));
        double t = std::fmod(kTwoPi - theta_sigma4, kTwoPi);
        if (t < 0.0) t += kTwoPi;
        return t;
    }
    const int grid = std::max(8, static_cast<int>(std::ceil(kTwoPi / precision_T)));
    double best = 0.0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
        const double t = i * precision_T;
        const double val = sr_objective(d, t);
        if (val > best_val) {
            best_val = val;
            best = t;
        }
    }
    return best;
}

PhaseOptResult sr_optimize(const ChannelSet& ch, const Scenario& scn, SrMode mode) {
    require_base_case(ch);
    const int N = ch.num_elements();

    PhaseConfig phases = PhaseConfig::zeros(N);
    const std::vector<double> alphas{1.0};
    const std::vector<ComplexVector> combiners{ComplexVector::Ones(1)};

    PhaseOptResult res;
    res.monotone = true;
    double prev_power = std::numeric_limits<double>::infinity();
    const int max_outer = 30;
    for (int outer = 0; outer < max_outer; ++outer) {
        const ComplexVector w = mrt_beamformer(ch, phases, 1.0);
        auto sweep = detail::sr_refine_phases(ch, w, alphas, combiners, scn, phases, mode,
                                              scn.conv_eps, 50);
        phases = sweep.phases;
        res.monotone = res.monotone && sweep.monotone;
        for (double s : sweep.min_snr_trace) res.objective_trace.push_back(s);

        const double power = min_power_given_phases(ch, phases, scn.gamma_th_linear(),
                                                    scn.noise_power_watts(), scn.b_mag_sq);
        res.iterations = outer + 1;
        if (std::isfinite(prev_power) &&
            std::abs(power - prev_power) <= scn.conv_eps * std::max(prev_power, 1e-30)) {
            prev_power = power;
            break;
        }
        prev_power = power;
    }
    res.phases = phases;
    res.power_watts = prev_power;
    return res;
}

}  // namespace irsbc
