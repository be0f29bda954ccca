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

#include "irsbc/signal_model.hpp"

#include <algorithm>

namespace irsbc {

ComplexRowVector composite_ce_tag(const ChannelSet& ch, const PhaseConfig& phases, int k) {
    // h_TI^H Theta H_CI + h_CT, evaluated as a weighted row sum of H_CI.
    ComplexRowVector weights = ch.h_TI.at(k).adjoint().cwiseProduct(phases.v.transpose());
    return weights * ch.H_CI + ch.h_CT.at(k);
}

ComplexVector composite_tag_reader(const ChannelSet& ch, const PhaseConfig& phases, int k) {
    ComplexVector weighted = phases.v.cwiseProduct(ch.h_TI.at(k));
    return ch.H_RI.adjoint() * weighted + ch.h_TR.at(k);
}

double tag_snr(const ChannelSet& ch, const DesignPoint& point, int k, double noise_power_watts) {
    const ComplexVector& g = point.combiners.at(k);
    const double gnorm2 = g.squaredNorm();
    if (gnorm2 <= 0.0) throw std::invalid_argument("tag_snr: combiner must be nonzero");
    const ComplexRowVector h1 = composite_ce_tag(ch, point.phases, k);
    const ComplexVector h2 = composite_tag_reader(ch, point.phases, k);
    const Complex y = (g.adjoint() * h2).value() * (h1 * point.w).value();
    const TagState& tag = point.tags.at(k);
    return tag.alpha * tag.b_mag_sq * std::norm(y) / (noise_power_watts * gnorm2);
}

double harvested_power(const ChannelSet& ch, const DesignPoint& point, int k, double eta) {
    const ComplexRowVector h1 = composite_ce_tag(ch, point.phases, k);
    const Complex incident = (h1 * point.w).value();
    return (1.0 - point.tags.at(k).alpha) * eta * std::norm(incident);
}

double FeasibilityReport::min_residual() const {
    double m = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < snr_residual.size(); ++k) {
        m = std::min(m, snr_residual[k]);
        m = std::min(m, circuit_residual[k]);
        m = std::min(m, combiner_slack[k]);
    }
    return m;
}

FeasibilityReport feasibility_report(const ChannelSet& ch, const DesignPoint& point,
                                     const Scenario& scn) {
    FeasibilityReport rep;
    const int K = ch.num_tags();
    rep.snr_residual.resize(K);
    rep.circuit_residual.resize(K);
    rep.combiner_slack.resize(K);
    const double gamma_th = scn.gamma_th_linear();
    const double noise = scn.noise_power_watts();
    for (int k = 0; k < K; ++k) {
        rep.snr_residual[k] = tag_snr(ch, point, k, noise) - gamma_th;
        const double xi = point.tags.at(k).xi;
        rep.circuit_residual[k] = xi > 0.0
                                      ? harvested_power(ch, point, k, scn.eta) - xi
                                      : std::numeric_limits<double>::infinity();
        rep.combiner_slack[k] = 1.0 - point.combiners.at(k).squaredNorm();
    }
    return rep;
}

}  // namespace irsbc
