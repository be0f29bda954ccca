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

#include "irsbc/single_tag_opt.hpp"
#include "irsbc/types.hpp"

namespace irsbc::detail {

/// Elementwise successive refinement of the IRS phases shared by the
/// single-tag optimizer and the multi-tag feasibility sweep. For each phase n
/// the candidate set is the grid 0:T:2pi plus the current value, so accepted
/// updates never lower the selection objective.
///
/// For semi-passive inputs (xi = 0) the selection objective per candidate is
/// the worst-tag scaled product gain min_k alpha_k |b|^2 F_k(theta); for
/// xi > 0 the normalized SNR/circuit residual product with its fallback
/// ladder is used.
struct SrSweepResult {
    PhaseConfig phases;
    std::vector<double> min_snr_trace;  // after each full sweep
    int sweeps = 0;
    bool monotone = true;
};

SrSweepResult sr_refine_phases(const ChannelSet& channels, const ComplexVector& w,
                               const std::vector<double>& alphas,
                               const std::vector<ComplexVector>& combiners,
                               const Scenario& scenario, const PhaseConfig& start, SrMode mode,
                               double eps, int max_sweeps);

}  // namespace irsbc::detail
