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

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace irsbc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using ComplexRowVector = Eigen::RowVectorXcd;
using RealVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }
inline double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

/// Deployment, RF and solver parameters for one experiment.
/// Distances in meters, angles in radians. Powers carry their unit in the
/// field name (dBm, dB or Watts) and are converted to linear internally.
struct Scenario {
    Vec3 ce_position{0.0, 0.0, 0.0};
    Vec3 reader_position{100.0, 0.0, 0.0};
    Vec3 irs_center{20.0, 20.0, 0.0};
    std::vector<Vec3> tag_positions{Vec3{25.0, 0.0, 0.0}};

    int L = 4;   // CE antennas
    int M = 1;   // reader antennas
    int N = 64;  // IRS elements (perfect square)
    int K = 1;   // tags, must match tag_positions.size()

    double carrier_freq_hz = 915e6;
    double rician_k_db = 3.0;
    double pathloss_exponent = 2.1;  // delta
    double irs_q = 0.285;
    double element_spacing_m = 0.0;  // 0 selects half-wavelength pitch

    double noise_power_dbm = -110.0;  // sigma_R^2
    double gamma_th_db = 8.0;
    double xi_watts = 0.0;  // per-tag circuit requirement; 0 = semi-passive
    double eta = 1.0;       // energy conversion efficiency
    double b_mag_sq = 1.0;  // |b_k(t)|^2

    double lipschitz_ell = 2.5e-16;
    double conv_eps = 1e-4;
    int rand_count_R = 200;
    double sr_precision_T = kTwoPi / 180.0;

    double wavelength() const { return kSpeedOfLight / carrier_freq_hz; }
    double rician_k_linear() const { return db_to_linear(rician_k_db); }
    double noise_power_watts() const { return dbm_to_watts(noise_power_dbm); }
    double gamma_th_linear() const { return db_to_linear(gamma_th_db); }
    double element_spacing() const {
        return element_spacing_m > 0.0 ? element_spacing_m : 0.5 * wavelength();
    }

    void validate() const;
};

/// Concrete 3D layout derived from a Scenario: IRS element grid, surface
/// normal and the antenna positions of the CE/reader uniform linear arrays.
struct Geometry {
    std::vector<Vec3> element_positions;  // N entries
    Vec3 irs_normal{0.0, -1.0, 0.0};      // unit vector
    std::vector<Vec3> ce_antenna_positions;
    std::vector<Vec3> reader_antenna_positions;
};

/// One realization of all channel groups with amplitude path loss absorbed.
struct ChannelSet {
    std::vector<ComplexRowVector> h_CT;  // K entries, each 1 x L
    ComplexMatrix H_CI;                  // N x L
    ComplexMatrix H_CR;                  // M x L
    std::vector<ComplexVector> h_TI;     // K entries, each N x 1
    ComplexMatrix H_RI;                  // N x M
    std::vector<ComplexVector> h_TR;     // K entries, each M x 1

    int num_tags() const { return static_cast<int>(h_CT.size()); }
    int num_elements() const { return static_cast<int>(H_CI.rows()); }
    int num_ce_antennas() const { return static_cast<int>(H_CI.cols()); }
    int num_reader_antennas() const { return static_cast<int>(H_RI.cols()); }
};

/// IRS reflection state: theta[n] in [0, 2pi) and v[n] = exp(j theta[n]).
struct PhaseConfig {
    RealVector theta;
    ComplexVector v;

    static PhaseConfig from_theta(const RealVector& theta_in);
    static PhaseConfig zeros(int n);
    int size() const { return static_cast<int>(theta.size()); }
};

struct TagState {
    double alpha = 1.0;   // splitting coefficient in [0, 1]
    double xi = 0.0;      // circuit requirement, Watts
    double b_mag_sq = 1.0;
};

/// One candidate assignment of every optimization variable.
struct DesignPoint {
    ComplexVector w;                      // L
    PhaseConfig phases;                   // N
    std::vector<TagState> tags;           // K
    std::vector<ComplexVector> combiners; // K entries, each M, norm <= 1
};

enum class SolveStatus {
    Converged,
    MaxIterations,
    Infeasible,
    InfeasibleAtIterate,
};

/// Result of one optimization run.
struct SolveReport {
    double power_watts = std::numeric_limits<double>::infinity();
    std::vector<double> objective_trace;
    DesignPoint point;
    SolveStatus status = SolveStatus::Infeasible;
    int iterations = 0;
    bool monotonicity_violated = false;
};

inline void Scenario::validate() const {
    if (L < 1 || M < 1 || N < 1 || K < 1)
        throw std::invalid_argument("Scenario: all counts must be >= 1");
    if (K != static_cast<int>(tag_positions.size()))
        throw std::invalid_argument("Scenario: K must match tag_positions size");
    const int root = static_cast<int>(std::llround(std::sqrt(static_cast<double>(N))));
    if (root * root != N)
        throw std::invalid_argument("Scenario: N must be a perfect square");
    if (carrier_freq_hz <= 0.0)
        throw std::invalid_argument("Scenario: carrier frequency must be positive");
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("Scenario: eta must lie in [0, 1]");
    if (conv_eps <= 0.0)
        throw std::invalid_argument("Scenario: conv_eps must be positive");
    if (!std::isfinite(rician_k_db))
        throw std::invalid_argument("Scenario: Rician K-factor must be finite");
    if (xi_watts < 0.0)
        throw std::invalid_argument("Scenario: xi must be nonnegative");
    if (sr_precision_T <= 0.0 || sr_precision_T > kTwoPi / 8.0)
        throw std::invalid_argument("Scenario: sr_precision_T must split 2pi into >= 8 steps");
    if (rand_count_R < 1)
        throw std::invalid_argument("Scenario: rand_count_R must be >= 1");
}

inline PhaseConfig PhaseConfig::from_theta(const RealVector& theta_in) {
    PhaseConfig cfg;
    cfg.theta.resize(theta_in.size());
    cfg.v.resize(theta_in.size());
    for (Eigen::Index n = 0; n < theta_in.size(); ++n) {
        double t = std::fmod(theta_in[n], kTwoPi);
        if (t < 0.0) t += kTwoPi;
        cfg.theta[n] = t;
        cfg.v[n] = std::polar(1.0, t);
    }
    return cfg;
}

inline PhaseConfig PhaseConfig::zeros(int n) {
    return from_theta(RealVector::Zero(n));
}

}  // namespace irsbc
