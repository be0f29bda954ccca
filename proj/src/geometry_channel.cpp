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

#include "irsbc/geometry_channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace irsbc {

namespace {

std::vector<Vec3> ula_positions(const Vec3& center, int count, double spacing) {
    std::vector<Vec3> out(count);
    const double half = 0.5 * (count - 1);
    for (int i = 0; i < count; ++i)
        out[i] = center + Vec3{0.0, 0.0, (i - half) * spacing};
    return out;
}

// Horizontal bearing of p seen from origin_xy, in (-pi, pi].
double bearing(const Vec3& from, const Vec3& to) {
    return std::atan2(to.y() - from.y(), to.x() - from.x());
}

}  // namespace

Geometry build_geometry(const Scenario& scenario) {
    scenario.validate();
    Geometry geo;

    const double lambda = scenario.wavelength();
    const double pitch = scenario.element_spacing();
    const int side = static_cast<int>(std::llround(std::sqrt(static_cast<double>(scenario.N))));

    // Face the terminal cluster: bisector of the extreme horizontal bearings.
    // A plain "face the centroid" normal can leave the CE behind the surface
    // for the default layout, which zeroes its element gains.
    std::vector<double> bearings;
    bearings.push_back(bearing(scenario.irs_center, scenario.ce_position));
    bearings.push_back(bearing(scenario.irs_center, scenario.reader_position));
    for (const auto& t : scenario.tag_positions)
        bearings.push_back(bearing(scenario.irs_center, t));
    // Unwrap against the first bearing so the min/max spread is meaningful.
    const double ref = bearings.front();
    double lo = 0.0, hi = 0.0;
    for (double b : bearings) {
        double d = std::remainder(b - ref, kTwoPi);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    if (hi - lo >= kPi)
        throw std::invalid_argument("build_geometry: terminals span >= 180 degrees around the IRS");
    const double normal_angle = ref + 0.5 * (lo + hi);
    geo.irs_normal = Vec3{std::cos(normal_angle), std::sin(normal_angle), 0.0};

    // Vertical planar grid: rows along z, columns along the in-plane
    // horizontal tangent, both at the configured pitch.
    const Vec3 tangent{-geo.irs_normal.y(), geo.irs_normal.x(), 0.0};
    const Vec3 vertical{0.0, 0.0, 1.0};
    geo.element_positions.resize(scenario.N);
    const double half = 0.5 * (side - 1);
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c)
            geo.element_positions[r * side + c] =
                scenario.irs_center + (c - half) * pitch * tangent + (r - half) * pitch * vertical;

    geo.ce_antenna_positions = ula_positions(scenario.ce_position, scenario.L, 0.5 * lambda);
    geo.reader_antenna_positions = ula_positions(scenario.reader_position, scenario.M, 0.5 * lambda);
    return geo;
}

double direct_path_gain(double dist_m, double delta, double lambda_m) {
    if (dist_m <= 0.0)
        throw std::invalid_argument("direct_path_gain: distance must be positive");
    return lambda_m / (4.0 * kPi) * std::pow(dist_m, -0.5 * delta);
}

double irs_element_gain(const Vec3& tx_pos, int element_index, const Vec3& rx_pos,
                        const Geometry& geometry, const Scenario& scenario) {
    const Vec3& e = geometry.element_positions.at(element_index);
    const double d1 = (e - tx_pos).norm();
    const double d2 = (rx_pos - e).norm();
    if (d1 < 1e-9 || d2 < 1e-9)
        throw std::invalid_argument("irs_element_gain: terminal coincides with IRS element");

    const Vec3 r_in = (e - tx_pos) / d1;   // tx -> element
    const Vec3 r_out = (rx_pos - e) / d2;  // element -> rx
    const double cos_in = -r_in.dot(geometry.irs_normal);
    const double cos_out = r_out.dot(geometry.irs_normal);
    if (cos_in <= 0.0 || cos_out <= 0.0) return 0.0;

    const double lambda = scenario.wavelength();
    const double q = scenario.irs_q;
    const double delta = scenario.pathloss_exponent;
    const double half_cell = 0.5 * lambda;
    const double aperture_scale =
        (scenario.element_spacing() * scenario.element_spacing()) / (half_cell * half_cell);
    return lambda / (4.0 * kPi) * kPi * aperture_scale * std::pow(cos_in, q) *
           std::pow(cos_out, q) * std::pow(d1 * d2, -0.5 * delta);
}

ComplexMatrix sample_rician(int rows, int cols, double k_factor_linear,
                            const ComplexMatrix& los_matrix, Rng& rng) {
    if (los_matrix.rows() != rows || los_matrix.cols() != cols)
        throw std::invalid_argument("sample_rician: los_matrix dimensions mismatch");
    if (k_factor_linear < 0.0)
        throw std::invalid_argument("sample_rician: K factor must be nonnegative");
    const double los_amp = std::sqrt(k_factor_linear / (k_factor_linear + 1.0));
    const double nlos_amp = std::sqrt(1.0 / (k_factor_linear + 1.0));
    ComplexMatrix out(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            out(r, c) = los_amp * los_matrix(r, c) + nlos_amp * rng.cnormal();
    return out;
}

namespace {

Complex geometric_los(double dist, double lambda) {
    return std::polar(1.0, -kTwoPi * dist / lambda);
}

// Direct link block: per-pair amplitude and geometric phase, Rician faded.
ComplexMatrix direct_link(const std::vector<Vec3>& rx, const std::vector<Vec3>& tx,
                          const Scenario& scn, Rng& rng) {
    const double lambda = scn.wavelength();
    const int rows = static_cast<int>(rx.size());
    const int cols = static_cast<int>(tx.size());
    ComplexMatrix los(rows, cols);
    ComplexMatrix amp(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const double d = (rx[r] - tx[c]).norm();
            los(r, c) = geometric_los(d, lambda);
            amp(r, c) = direct_path_gain(d, scn.pathloss_exponent, lambda);
        }
    return amp.cwiseProduct(sample_rician(rows, cols, scn.rician_k_linear(), los, rng));
}

// IRS-side link block (element index on the rows). The two-hop per-element
// gain from irs_element_gain is distributed across the hop channels: the hop
// leaving (or entering) a terminal carries
//   sqrt(pi * aperture) * (lambda/4pi) * cos^q / d^(delta/2)
// so that the product over a cascade recovers (lambda/4pi) * element gain.
ComplexMatrix irs_link(const std::vector<Vec3>& terminals, const Scenario& scn,
                       const Geometry& geo, Rng& rng) {
    const double lambda = scn.wavelength();
    const double q = scn.irs_q;
    const double delta = scn.pathloss_exponent;
    const double half_cell = 0.5 * lambda;
    const double aperture_scale =
        (scn.element_spacing() * scn.element_spacing()) / (half_cell * half_cell);
    const double hop_coeff = lambda / (4.0 * kPi) * std::sqrt(kPi) * std::sqrt(aperture_scale);

    const int rows = scn.N;
    const int cols = static_cast<int>(terminals.size());
    ComplexMatrix los(rows, cols);
    ComplexMatrix amp(rows, cols);
    for (int n = 0; n < rows; ++n) {
        const Vec3& e = geo.element_positions[n];
        for (int c = 0; c < cols; ++c) {
            const Vec3 diff = e - terminals[c];
            const double d = diff.norm();
            const double cosang = (terminals[c] - e).dot(geo.irs_normal) / d;
            los(n, c) = geometric_los(d, lambda);
            amp(n, c) = cosang > 0.0
                            ? hop_coeff * std::pow(cosang, q) * std::pow(d, -0.5 * delta)
                            : 0.0;
        }
    }
    return amp.cwiseProduct(sample_rician(rows, cols, scn.rician_k_linear(), los, rng));
}

}  // namespace

ChannelSet generate_channels(const Scenario& scn, const Geometry& geo, Rng& rng) {
    ChannelSet ch;
    const auto& ce = geo.ce_antenna_positions;
    const auto& rd = geo.reader_antenna_positions;

    // Stable substream labels per link group; tag links get one stream each.
    enum : uint64_t { kHci = 1, kHcr = 2, kHri = 3, kHct = 100, kHti = 200, kHtr = 300 };

    {
        Rng r = rng.fork(kHci);
        ch.H_CI = irs_link(ce, scn, geo, r);
    }
    {
        Rng r = rng.fork(kHri);
        ch.H_RI = irs_link(rd, scn, geo, r);
    }
    {
        Rng r = rng.fork(kHcr);
        ch.H_CR = direct_link(rd, ce, scn, r);
    }
    ch.h_CT.resize(scn.K);
    ch.h_TI.resize(scn.K);
    ch.h_TR.resize(scn.K);
    for (int k = 0; k < scn.K; ++k) {
        const std::vector<Vec3> tag{scn.tag_positions[k]};
        {
            Rng r = rng.fork(kHct + k);
            ch.h_CT[k] = direct_link(tag, ce, scn, r).row(0);
        }
        {
            Rng r = rng.fork(kHti + k);
            ch.h_TI[k] = irs_link(tag, scn, geo, r).col(0);
        }
        {
            Rng r = rng.fork(kHtr + k);
            ch.h_TR[k] = direct_link(rd, tag, scn, r).col(0);
        }
    }
    return ch;
}

std::vector<Vec3> cluster_tag_positions(const Vec3& center, double radius, int count,
                                        double start_angle) {
    std::vector<Vec3> out(count);
    for (int k = 0; k < count; ++k) {
        const double ang = start_angle + kTwoPi * k / count;
        out[k] = center + Vec3{radius * std::cos(ang), radius * std::sin(ang), 0.0};
    }
    return out;
}

// ---------------------------------------------------------------------------
// Config file I/O
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_number_list(const std::string& text, const std::string& key) {
    std::vector<double> vals;
    std::string cur;
    for (char c : text) {
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+' ||
            c == 'e' || c == 'E') {
            cur += c;
        } else if (!cur.empty()) {
            vals.push_back(std::stod(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) vals.push_back(std::stod(cur));
    if (vals.empty()) throw std::runtime_error("config: no numbers in value for " + key);
    return vals;
}

Vec3 parse_vec3(const std::string& text, const std::string& key) {
    auto vals = parse_number_list(text, key);
    if (vals.size() != 3)
        throw std::runtime_error("config: " + key + " needs exactly 3 coordinates");
    return Vec3{vals[0], vals[1], vals[2]};
}

std::vector<Vec3> parse_vec3_list(const std::string& text, const std::string& key) {
    auto vals = parse_number_list(text, key);
    if (vals.size() % 3 != 0)
        throw std::runtime_error("config: " + key + " needs a multiple of 3 coordinates");
    std::vector<Vec3> out;
    for (size_t i = 0; i + 2 < vals.size(); i += 3)
        out.emplace_back(Vec3{vals[i], vals[i + 1], vals[i + 2]});
    return out;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    Scenario scn;
    bool k_given = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "ce_position") scn.ce_position = parse_vec3(val, key);
        else if (key == "reader_position") scn.reader_position = parse_vec3(val, key);
        else if (key == "irs_center") scn.irs_center = parse_vec3(val, key);
        else if (key == "tag_positions") scn.tag_positions = parse_vec3_list(val, key);
        else if (key == "L") scn.L = static_cast<int>(std::stol(val));
        else if (key == "M") scn.M = static_cast<int>(std::stol(val));
        else if (key == "N") scn.N = static_cast<int>(std::stol(val));
        else if (key == "K") { scn.K = static_cast<int>(std::stol(val)); k_given = true; }
        else if (key == "carrier_freq_hz") scn.carrier_freq_hz = std::stod(val);
        else if (key == "rician_k_db") scn.rician_k_db = std::stod(val);
        else if (key == "pathloss_exponent") scn.pathloss_exponent = std::stod(val);
        else if (key == "irs_q") scn.irs_q = std::stod(val);
        else if (key == "element_spacing_m") scn.element_spacing_m = std::stod(val);
        else if (key == "noise_power_dbm") scn.noise_power_dbm = std::stod(val);
        else if (key == "gamma_th_db") scn.gamma_th_db = std::stod(val);
        else if (key == "xi_watts") scn.xi_watts = std::stod(val);
        else if (key == "eta") scn.eta = std::stod(val);
        else if (key == "b_mag_sq") scn.b_mag_sq = std::stod(val);
        else if (key == "lipschitz_ell") scn.lipschitz_ell = std::stod(val);
        else if (key == "conv_eps") scn.conv_eps = std::stod(val);
        else if (key == "rand_count_R") scn.rand_count_R = static_cast<int>(std::stol(val));
        else if (key == "sr_precision_T") scn.sr_precision_T = std::stod(val);
        else throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key " + key);
    }
    if (!k_given) scn.K = static_cast<int>(scn.tag_positions.size());
    scn.validate();
    return scn;
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    auto vec = [](const Vec3& v) {
        std::ostringstream os;
        os << "[" << v.x() << ", " << v.y() << ", " << v.z() << "]";
        return os.str();
    };
    out << "ce_position = " << vec(s.ce_position) << "\n";
    out << "reader_position = " << vec(s.reader_position) << "\n";
    out << "irs_center = " << vec(s.irs_center) << "\n";
    out << "tag_positions = [";
    for (size_t i = 0; i < s.tag_positions.size(); ++i)
        out << (i ? ", " : "") << vec(s.tag_positions[i]);
    out << "]\n";
    out << "L = " << s.L << "\nM = " << s.M << "\nN = " << s.N << "\nK = " << s.K << "\n";
    out << "carrier_freq_hz = " << s.carrier_freq_hz << "\n";
    out << "rician_k_db = " << s.rician_k_db << "\n";
    out << "pathloss_exponent = " << s.pathloss_exponent << "\n";
    out << "irs_q = " << s.irs_q << "\n";
    out << "element_spacing_m = " << s.element_spacing_m << "\n";
    out << "noise_power_dbm = " << s.noise_power_dbm << "\n";
    out << "gamma_th_db = " << s.gamma_th_db << "\n";
    out << "xi_watts = " << s.xi_watts << "\n";
    out << "eta = " << s.eta << "\n";
    out << "b_mag_sq = " << s.b_mag_sq << "\n";
    out << "lipschitz_ell = " << s.lipschitz_ell << "\n";
    out << "conv_eps = " << s.conv_eps << "\n";
    out << "rand_count_R = " << s.rand_count_R << "\n";
    out << "sr_precision_T = " << s.sr_precision_T << "\n";
}

}  // namespace irsbc
