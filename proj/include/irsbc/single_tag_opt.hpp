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
#include "irsbc/types.hpp"

namespace irsbc {

// The base case: one semi-passive tag, single-antenna reader. The phase
// optimizers work on the lifted vector vbar = [v; 1] with v_n = exp(-j theta_n),
// so that h_TI^H Theta H_CI = v^H Phi_CIT.

/// Matrix form of the two combined-link gains:
///   ||h_1(Theta)||^2 = vbar^H R vbar + c1,   |h_2(Theta)|^2 = vbar^H S vbar + c2.
struct QuarticForm {
    ComplexMatrix R;  // (N+1) x (N+1)
    ComplexMatrix S;  // (N+1) x (N+1)
    double c1 = 0.0;  // ||h_CT||^2
    double c2 = 0.0;  // |h_TR|^2
};

QuarticForm build_quartic(const ChannelSet& channels);

/// Product objective F(vbar) = (vbar^H R vbar + c1)(vbar^H S vbar + c2).
double quartic_value(const QuarticForm& form, const ComplexVector& v_bar);

/// Maps between the optimizer vector and the physical phase shifts.
PhaseConfig phase_config_from_vbar(const ComplexVector& v_bar);
ComplexVector vbar_from_phases(const PhaseConfig& phases);

/// One minorize-maximize iterate.
struct MmState {
    ComplexVector v_bar0;              // (N+1), last entry 1, unit modulus
    ComplexMatrix T;                   // derivative matrix at v_bar0
    ComplexMatrix U;                   // (N+2) x (N+2) surrogate matrix
    double lambda_minus = 0.0;         // minimum eigenvalue of U
    std::vector<double> objective_trace;
};

MmState mm_init(const QuarticForm& form, const ComplexVector& v_bar0, double ell);

/// Closed-form surrogate maximization: aligns the free entries of the lifted
/// vector with (U - lambda_minus I) vbarbar_0 while both pinned entries stay
/// at 1, then refreshes T, U and the objective trace.
MmState mm_step(const MmState& state, const QuarticForm& form, double ell);

struct PhaseOptResult {
    PhaseConfig phases;
    double power_watts = 0.0;
    std::vector<double> objective_trace;
    int iterations = 0;
    bool monotone = true;
};

/// MM phase optimization from a random start, then the closed-form minimum
/// power at the converged phases. Restarts once with 10x ell if the surrogate
/// ever loses monotonicity.
PhaseOptResult mm_optimize(const ChannelSet& channels, const Scenario& scenario, Rng& rng);

/// Maximum ratio transmission onto the cascaded channel, scaled to power P.
ComplexVector mrt_beamformer(const ChannelSet& channels, const PhaseConfig& phases, double power);

/// Minimum transmit power meeting the SNR target at the given phases with MRT
/// beamforming. Returns +inf when the cascade is identically zero.
double min_power_given_phases(const ChannelSet& channels, const PhaseConfig& phases,
                              double gamma_th_linear, double noise_watts, double b_mag_sq);

/// Quadratic-in-s_n view of the objective when only phase n varies:
///   F(s_n) = |h1 s_n^2 + h_sigma s_n + h4|^2.
struct SrDecomposition {
    Complex h1;
    Complex h_sigma;
    Complex h4;
};

SrDecomposition sr_decompose(const ChannelSet& channels, const ComplexVector& w,
                             const PhaseConfig& phases, int n);

double sr_objective(const SrDecomposition& d, double theta);

enum class SrMode { Exact, Approx };

/// One-phase update: grid argmax at precision T in exact mode, or the
/// closed-form dominant-term solution mod(2pi - theta_sigma4, 2pi).
double sr_step(const SrDecomposition& d, SrMode mode, double precision_T);

/// Successive refinement alternated with MRT until the transmit power is
/// stationary.
PhaseOptResult sr_optimize(const ChannelSet& channels, const Scenario& scenario,
                           SrMode mode = SrMode::Exact);

}  // namespace irsbc
