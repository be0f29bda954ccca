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

#include <iosfwd>
#include <string>

#include "irsbc/rng.hpp"
#include "irsbc/types.hpp"

namespace irsbc {

enum class SweptVariable { TagX, N, Xi, K };

enum class Method {
    Mm,
    Sr,
    NoIrs,
    RandomPhase,
    BenchC,
    BenchD,
    BenchE,
    BenchF,
};

std::string method_name(Method m);
Method method_from_name(const std::string& name);
std::string swept_variable_name(SweptVariable v);
SweptVariable swept_variable_from_name(const std::string& name);

enum class AverageMode { Linear, Db };  // dB of mean linear power vs mean of dB

struct SweepSpec {
    SweptVariable swept_variable = SweptVariable::TagX;
    std::vector<double> values;
    std::vector<Method> methods;
    int realizations = 100;
    uint64_t master_seed = 1;
    AverageMode average = AverageMode::Linear;

    void validate() const;
};

struct ResultRow {
    double swept_value = 0.0;
    Method method = Method::NoIrs;
    double mean_dbm = 0.0;
    double std_db = 0.0;
    int n_feasible = 0;
    int n_total = 0;
    double mean_iters = 0.0;
    double seconds = 0.0;
    double mean_alpha = 1.0;  // of the first tag; informative for xi sweeps
};

/// Loads a sweep spec from a key-value file (same format as the scenario).
SweepSpec load_sweep_spec(const std::string& path);

/// Runs the full (value x method x realization) grid. Channels are paired:
/// every method at a given (value, realization) consumes the identical
/// ChannelSet, and realization seeds do not depend on the swept value. Rows
/// come back in (value-major, method-minor) order.
std::vector<ResultRow> run_sweep(const SweepSpec& spec, const Scenario& base_scenario,
                                 int jobs = 1);

/// CSV with the fixed header
/// swept,method,mean_dbm,std_db,n_feasible,n_total,mean_iters,seconds.
/// When fixed_timing is set the seconds column is written as 0.000 so that
/// repeated runs with one seed are byte-identical.
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool fixed_timing = false);

enum class BaselineKind { Random, C, D, E, F };

/// Suboptimal phase baselines for the single-tag, single-antenna-reader setup:
/// (random) i.i.d. uniform phases; (c) alternating optimization of the
/// combined CE-tag link only; (d) closed-form alignment of the combined
/// tag-reader link; (e)/(f) reuse (c)/(d) phases but are evaluated under a
/// signal model whose other combined link has its IRS term deleted.
PhaseConfig baseline_phases(BaselineKind kind, const ChannelSet& channels,
                            const Scenario& scenario, Rng& rng);

/// Transmit power of a baseline evaluated through its own signal model.
double baseline_power(BaselineKind kind, const ChannelSet& channels, const Scenario& scenario,
                      Rng& rng);

/// Path-loss-independent alignment measures of the two combined links: all
/// channel entries are replaced by unit-magnitude copies (phases kept) and the
/// beamformer direction w/||w|| is applied to the CE-tag side.
std::pair<double, double> normalized_gains(const ChannelSet& channels, const PhaseConfig& phases,
                                           const ComplexVector& w);

/// Deterministic tag-reader range extension achievable by the IRS at the
/// no-IRS transmit power: moves the reader along the CE-reader axis until the
/// best-case IRS-aided SNR drops to the no-IRS SNR at the baseline range.
/// Element sums are phase-aligned (coherent within each combined link).
double range_improvement(const Scenario& scenario, int n_elements, double fixed_power);

struct CliOptions {
    std::string config_path;
    std::string sweep_path;
    std::string out_path;
    uint64_t seed = 0;
    bool seed_given = false;
    int realizations = -1;
    std::string methods;  // comma separated, overrides the sweep file
    int jobs = 1;
    std::string avg = "linear";
    bool fixed_timing = false;
    bool range_mode = false;  // emit N,delta_m rows instead of power rows
};

/// Batch driver behind the command line tool. Exit codes: 0 success, 2 config
/// error, 3 infeasible everywhere.
int cli_main(int argc, const char* const* argv);

}  // namespace irsbc
