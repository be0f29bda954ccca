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

#include <string>

#include "irsbc/rng.hpp"
#include "irsbc/types.hpp"

namespace irsbc {

/// Builds the IRS element grid and the CE/reader array layouts.
///
/// The IRS is a vertical sqrt(N) x sqrt(N) planar array centered at
/// irs_center. Its horizontal normal is the angular bisector of the extreme
/// bearings of all terminals seen from the IRS center, which keeps every
/// terminal strictly in front of the surface. CE and reader use vertical
/// uniform linear arrays with half-wavelength spacing.
Geometry build_geometry(const Scenario& scenario);

/// Amplitude gain of a direct link: (lambda / 4 pi) * d^(-delta/2).
double direct_path_gain(double dist_m, double delta, double lambda_m);

/// Amplitude gain of the two-hop path tx -> element -> rx, excluding one
/// lambda/(4 pi) factor that is accounted to the second hop when the gain is
/// split across the per-link channels:
///   (lambda/4pi) * pi * s * (cos_in)^q * (cos_out)^q / (d1 d2)^(delta/2)
/// where s scales with element aperture relative to a half-wavelength cell.
/// Zero at grazing incidence on either hop.
double irs_element_gain(const Vec3& tx_pos, int element_index, const Vec3& rx_pos,
                        const Geometry& geometry, const Scenario& scenario);

/// Rician sample: sqrt(K/(K+1)) * los + sqrt(1/(K+1)) * G, with G having
/// i.i.d. standard circular complex Gaussian entries.
ComplexMatrix sample_rician(int rows, int cols, double k_factor_linear,
                            const ComplexMatrix& los_matrix, Rng& rng);

/// Draws one realization of all six channel groups. Path-loss amplitudes are
/// absorbed at generation time; line-of-sight phases are geometric
/// (exp(-j 2 pi d / lambda) per antenna/element pair). Each link group uses
/// its own substream forked from rng, so enlarging N or K leaves the draws of
/// the other groups untouched.
ChannelSet generate_channels(const Scenario& scenario, const Geometry& geometry, Rng& rng);

/// Reads a Scenario from a key-value config file. Field names match the
/// Scenario struct; unknown keys are an error. Throws std::runtime_error with
/// a message naming the path on I/O or parse failure.
Scenario load_scenario(const std::string& path);

/// Writes a Scenario in the same key-value format.
void save_scenario(const Scenario& scenario, const std::string& path);

/// Tag positions for a cluster of K tags on a circle with equal angular
/// spacing, used by the multi-tag experiments. The first tag sits at
/// start_angle (default: the diagonal, a quarter turn up from the axis).
std::vector<Vec3> cluster_tag_positions(const Vec3& center, double radius, int count,
                                        double start_angle = kPi / 4.0);

}  // namespace irsbc
