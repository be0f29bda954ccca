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

#include "sr_engine.hpp"

#include "irsbc/multi_tag_opt.hpp"

#include <cmath>

namespace irsbc::detail {

namespace {

struct TagTerms {
    ComplexVector pe;   // coefficient of e^{j theta_n} in g^H h_{k,2}
    ComplexVector ce;   // coefficient of e^{j theta_n} in h_{k,1} w
    Complex c_reader;   // g^H h_TR
    Complex c_direct;   // h_CT w
    Complex sum2;       // current g^H h_{k,2}(Theta)
    Complex sum1;       // current h_{k,1}(Theta) w
    double beta = 1.0;  // alpha_k |b|^2
    double alpha = 1.0;
    double gnorm2 = 1.0;
};

}  // namespace

SrSweepResult sr_refine_phases(const ChannelSet& ch, const ComplexVector& w,
                               const std::vector<double>& alphas,
                               const std::vector<ComplexVector>& combiners,
                               const Scenario& scn, const PhaseConfig& start, SrMode mode,
                               double eps, int max_sweeps) {
    const int N = ch.num_elements();
    const int K = ch.num_tags();
    const double xi = scn.xi_watts;
    const double eta = scn.eta;
    const double noise = scn.noise_power_watts();
    const double gamma_rhs = scn.gamma_th_linear() * noise;

    std::vector<TagTerms> tags(K);
    for (int k = 0; k < K; ++k) {
        TagTerms& t = tags[k];
        const ComplexVector& g = combiners.at(k);
        const ComplexVector rig = ch.H_RI * g;  // N, (g^H H_RI^H)_n = conj(rig_n)
        const ComplexVector hciw = ch.H_CI * w;
        t.pe = rig.conjugate().cwiseProduct(ch.h_TI[k]);
        t.ce = ch.h_TI[k].conjugate().cwiseProduct(hciw);
        t.c_reader = (g.adjoint() * ch.h_TR[k]).value();
        t.c_direct = (ch.h_CT[k] * w).value();
        t.alpha = alphas.at(k);
        t.beta = t.alpha * scn.b_mag_sq;
        t.gnorm2 = g.squaredNorm();
    }

    RealVector theta = start.theta;
    ComplexVector phase(N);
    auto refresh_sums = [&] {
        for (int n = 0; n < N; ++n) phase[n] = std::polar(1.0, theta[n]);
        for (auto& t : tags) {
            t.sum2 = t.c_reader;
            t.sum1 = t.c_direct;
            for (int n = 0; n < N; ++n) {
                t.sum2 += t.pe[n] * phase[n];
                t.sum1 += t.ce[n] * phase[n];
            }
        }
    };
    refresh_sums();

    auto min_tag_snr = [&] {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& t : tags)
            m = std::min(m, t.beta * std::norm(t.sum2 * t.sum1) / (noise * t.gnorm2));
        return m;
    };

    const int grid = std::max(8, static_cast<int>(std::ceil(kTwoPi / scn.sr_precision_T)));
    std::vector<double> cand_theta(grid + 1);
    for (int i = 0; i < grid; ++i) cand_theta[i] = i * scn.sr_precision_T;

    std::vector<Complex> P(K), Q(K);
    std::vector<double> smin(grid + 1), cmin(grid + 1);

    SrSweepResult out;
    out.min_snr_trace.push_back(min_tag_snr());

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (int n = 0; n < N; ++n) {
            const Complex cur = phase[n];
            for (int k = 0; k < K; ++k) {
                P[k] = tags[k].sum2 - tags[k].pe[n] * cur;
                Q[k] = tags[k].sum1 - tags[k].ce[n] * cur;
            }
            cand_theta[grid] = theta[n];

            double new_theta = theta[n];
            if (mode == SrMode::Approx && K == 1 && xi == 0.0) {
                // Closed-form dominant-term update, guarded so the objective
                // never decreases.
                SrDecomposition d;
                d.h1 = tags[0].pe[n] * tags[0].ce[n];
                d.h_sigma = tags[0].pe[n] * Q[0] + tags[0].ce[n] * P[0];
                d.h4 = P[0] * Q[0];
                const double cand = sr_step(d, SrMode::Approx, scn.sr_precision_T);
                new_theta = sr_objective(d, cand) >= sr_objective(d, theta[n]) ? cand : theta[n];
            } else if (xi == 0.0) {
                // Worst-tag scaled gain; the gamma offset is common to all
                // tags and does not move the argmax.
                int best = 0;
                double best_val = -std::numeric_limits<double>::infinity();
                for (int i = 0; i <= grid; ++i) {
                    const Complex e = std::polar(1.0, cand_theta[i]);
                    double worst = std::numeric_limits<double>::infinity();
                    for (int k = 0; k < K; ++k) {
                        const Complex s2 = P[k] + tags[k].pe[n] * e;
                        const Complex s1 = Q[k] + tags[k].ce[n] * e;
                        worst = std::min(worst,
                                         tags[k].beta * std::norm(s2 * s1) / tags[k].gnorm2);
                    }
                    if (worst > best_val) {
                        best_val = worst;
                        best = i;
                    }
                }
                new_theta = cand_theta[best];
            } else {
                for (int i = 0; i <= grid; ++i) {
                    const Complex e = std::polar(1.0, cand_theta[i]);
                    double ws = std::numeric_limits<double>::infinity();
                    double wc = std::numeric_limits<double>::infinity();
                    for (int k = 0; k < K; ++k) {
                        const Complex s2 = P[k] + tags[k].pe[n] * e;
                        const Complex s1 = Q[k] + tags[k].ce[n] * e;
                        ws = std::min(ws, tags[k].beta * std::norm(s2 * s1) / tags[k].gnorm2 -
                                              gamma_rhs);
                        wc = std::min(wc, (1.0 - tags[k].alpha) * eta * std::norm(s1) - xi);
                    }
                    smin[i] = ws;
                    cmin[i] = wc;
                }
                const RealVector splus = normalize_residuals(
                    Eigen::Map<const RealVector>(smin.data(), grid + 1));
                const RealVector cplus = normalize_residuals(
                    Eigen::Map<const RealVector>(cmin.data(), grid + 1));
                const RealVector prod = splus.cwiseProduct(cplus);
                // Maximize the failing family over the support where the
                // other one stays satisfiable (falling back to a plain argmax
                // when that support is empty).
                auto restricted_argmax = [&](const std::vector<double>& goal,
                                             const std::vector<double>& keep) {
                    int arg = -1;
                    double val = -std::numeric_limits<double>::infinity();
                    for (int i = 0; i <= grid; ++i)
                        if (keep[i] > 0.0 && goal[i] > val) {
                            val = goal[i];
                            arg = i;
                        }
                    if (arg >= 0) return arg;
                    for (int i = 0; i <= grid; ++i)
                        if (goal[i] > val) {
                            val = goal[i];
                            arg = i;
                        }
                    return arg;
                };
                int best = 0;
                if (prod.maxCoeff() > 0.0) {
                    prod.maxCoeff(&best);
                } else if (splus.maxCoeff() > 0.0) {
                    best = restricted_argmax(cmin, smin);
                } else {
                    best = restricted_argmax(smin, cmin);
                }
                new_theta = cand_theta[best];
            }

            if (new_theta != theta[n]) {
                const Complex e_new = std::polar(1.0, new_theta);
                for (int k = 0; k < K; ++k) {
                    tags[k].sum2 = P[k] + tags[k].pe[n] * e_new;
                    tags[k].sum1 = Q[k] + tags[k].ce[n] * e_new;
                }
                theta[n] = new_theta;
                phase[n] = e_new;
            }
        }
        refresh_sums();  // kill incremental drift once per sweep
        const double snr = min_tag_snr();
        const double prev = out.min_snr_trace.back();
        if (snr < prev * (1.0 - 1e-9) - 1e-300) out.monotone = false;
        out.min_snr_trace.push_back(snr);
        out.sweeps = sweep + 1;
        if (std::abs(snr - prev) <= eps * std::max(std::abs(prev), 1e-30)) break;
    }

    out.phases = PhaseConfig::from_theta(theta);
    return out;
}

}  // namespace irsbc::detail
