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

#include "irsbc/types.hpp"

namespace irsbc {

/// Combined CE-tag channel h_{k,1}(Theta) = h_TI^H Theta H_CI + h_CT, 1 x L.
ComplexRowVector composite_ce_tag(const ChannelSet& channels, const PhaseConfig& phases, int k);

/// Combined tag-reader channel h_{k,2}(Theta) = H_RI^H Theta h_TI + h_TR, M x 1.
ComplexVector composite_tag_reader(const ChannelSet& channels, const PhaseConfig& phases, int k);

/// Instantaneous linear SNR of tag k at the reader:
///   alpha_k |b|^2 |g_k^H h_{k,2} h_{k,1} w|^2 / (sigma^2 ||g_k||^2).
double tag_snr(const ChannelSet& channels, const DesignPoint& point, int k,
               double noise_power_watts);

/// Power available to the tag circuit: (1 - alpha_k) eta |h_{k,1} w|^2.
double harvested_power(const ChannelSet& channels, const DesignPoint& point, int k, double eta);

struct FeasibilityReport {
    std::vector<double> snr_residual;      // gamma_k - gamma_th (linear)
    std::vector<double> circuit_residual;  // harvested - xi; +inf when xi = 0
    std::vector<double> combiner_slack;    // 1 - ||g_k||^2
    double min_residual() const;
};

/// Residuals of every constraint of the joint problem at one design point.
FeasibilityReport feasibility_report(const ChannelSet& channels, const DesignPoint& point,
                                     const Scenario& scenario);

}  // namespace irsbc
