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

#pragma once

#include "irsbc/rng.hpp"
#include "irsbc/sdp_core.hpp"
#include "irsbc/types.hpp"

namespace irsbc {

enum class PhaseMethod { Mm, Sr };

struct AoConfig {
    PhaseMethod phase_method = PhaseMethod::Sr;
    int max_outer_iters = 40;
    double eps = 1e-4;
    double sr_precision_T = kTwoPi / 180.0;
    int rand_count_R = 200;
    bool warm_start_phases = true;  // seed the MM inner loop from the current phases
    int mm_max_inner = 15;
    int sr_max_sweeps = 30;
    bool skip_phase_updates = false;  // no-IRS baseline: w/alpha/G only

    static AoConfig from_scenario(const Scenario& s, PhaseMethod method);
};

/// Per-tag quadratic lift of the two combined-link gains at fixed w and g:
///   vbar^H A vbar + |b|^2 = |g^H h_{k,2}(Theta)|^2
///   vbar^H C vbar + |d|^2 = |h_{k,1}(Theta) w|^2
struct TagQuadratics {
    ComplexMatrix A;  // (N+1) x (N+1)
    ComplexMatrix C;  // (N+1) x (N+1)
    ComplexVector a;  // N
    ComplexVector c;  // N
    Complex b{};
    Complex d{};

    /// T_k v0 with T_k = A v0 v0^H C + C v0 v0^H A + |b|^2 C + |d|^2 A.
    ComplexVector T_apply(const ComplexVector& v0) const {
        const ComplexVector av = A * v0;
        const ComplexVector cv = C * v0;
        const double vav = std::real((v0.adjoint() * av).value());
        const double vcv = std::real((v0.adjoint() * cv).value());
        return av * vcv + cv * vav + std::norm(b) * cv + std::norm(d) * av;
    }
};

TagQuadratics build_tag_quadratics(const ChannelSet& channels, const ComplexVector& w,
                                   const ComplexVector& combiner, int k);

struct TxBeamformingResult {
    ComplexVector w;
    SdpStatus status = SdpStatus::Infeasible;
    double sdr_trace = 0.0;  // tr(W) of the relaxed solution
};

/// Transmit beamforming step: SDR of the power minimization under all SNR and
/// circuit constraints, followed by randA randomization with per-candidate
/// scaling onto the most violated constraint.
TxBeamformingResult solve_tx_beamforming(const ChannelSet& channels, const PhaseConfig& phases,
                                         const std::vector<double>& alphas,
                                         const std::vector<ComplexVector>& combiners,
                                         const Scenario& scenario, Rng& rng);

/// MM-based phase feasibility update: per-tag minorized SNR constraints inside
/// a diagonal-constrained SDP, randA rank-one recovery filtered against the
/// true constraints. Keeps the incoming phases and sets *stalled when no
/// randomized candidate improves on them.
PhaseConfig phase_update_mm(const ChannelSet& channels, const ComplexVector& w,
                            const std::vector<double>& alphas,
                            const std::vector<ComplexVector>& combiners,
                            const Scenario& scenario, const AoConfig& config,
                            const PhaseConfig& current, Rng& rng, bool* stalled = nullptr);

/// Successive-refinement phase update over the residual ladder.
PhaseConfig phase_update_sr(const ChannelSet& channels, const ComplexVector& w,
                            const std::vector<double>& alphas,
                            const std::vector<ComplexVector>& combiners,
                            const Scenario& scenario, const AoConfig& config,
                            const PhaseConfig& current);

/// Affine map of the positive part onto [0, 1]: max positive -> 1, min
/// positive -> 0; nonpositive entries -> 0. A single positive entry maps to 1.
RealVector normalize_residuals(const RealVector& residuals);

/// Feasible splitting-coefficient interval for tag k at fixed (w, Theta, g).
/// first > second signals an infeasible iterate.
std::pair<double, double> alpha_interval(const ChannelSet& channels, const ComplexVector& w,
                                         const PhaseConfig& phases, const ComplexVector& combiner,
                                         int k, const Scenario& scenario);

/// Matched-filter combiner g = h_{k,2} h_{k,1} w / ||.||, unit norm.
ComplexVector optimal_combiner(const ChannelSet& channels, const PhaseConfig& phases,
                               const ComplexVector& w, int k);

/// Alternating optimization over (w, Theta, alpha, G) until the transmit
/// power is stationary.
SolveReport ao_solve(const ChannelSet& channels, const Scenario& scenario, const AoConfig& config,
                     Rng& rng);

}  // namespace irsbc
