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

#include <functional>
#include <optional>
#include <utility>

#include "irsbc/rng.hpp"
#include "irsbc/types.hpp"

namespace irsbc {

enum class ConstraintSense { GreaterEqual, Equal };

/// One linear constraint tr(A X) + lin . u  (>=|=)  b over a complex Hermitian
/// matrix variable X and a nonnegative scalar block u.
struct SdpConstraint {
    ComplexMatrix A;
    RealVector lin;  // size num_lin_vars or 0
    ConstraintSense sense = ConstraintSense::GreaterEqual;
    double b = 0.0;
};

/// Dense complex Hermitian SDP: optimize tr(C X) + lin_cost . u subject to the
/// constraints, X PSD, u >= 0. Solved internally by embedding into a real
/// symmetric cone program.
struct SdpProblem {
    ComplexMatrix C;
    RealVector lin_cost;  // size num_lin_vars
    int num_lin_vars = 0;
    std::vector<SdpConstraint> constraints;
    bool maximize = false;
};

enum class SdpStatus { Optimal, Infeasible, MaxIter };

struct SdpSolution {
    ComplexMatrix X;
    RealVector lin_vars;
    RealVector duals;  // one per constraint, signs for the minimization form
    double primal_obj = 0.0;
    double dual_obj = 0.0;
    double gap = 0.0;  // |primal - dual|
    SdpStatus status = SdpStatus::MaxIter;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    bool weak_duality_ok = false;
};

/// Primal-dual interior-point solve (HKM direction, Mehrotra corrector).
/// On Optimal the relative duality gap and feasibility residuals are <= tol.
SdpSolution solve_sdp(const SdpProblem& problem, double tol = 1e-7);

/// Rank-one recovery from a PSD matrix: eigendecompose X = U D U^H and draw
/// candidates U D^{1/2} r with r having unit-modulus i.i.d. random phases.
/// When unit_modulus_projection is set, candidates are rotated so the last
/// entry is 1 and every entry is projected onto the unit circle. Returns the
/// feasible candidate with the best (largest) evaluator score; if no candidate
/// passes the checker, returns the best-scoring candidate and clears
/// *feasible_out.
ComplexVector gaussian_randomize(const ComplexMatrix& X, int count_R,
                                 const std::function<double(const ComplexVector&)>& evaluator,
                                 const std::function<bool(const ComplexVector&)>& checker,
                                 Rng& rng, bool unit_modulus_projection = false,
                                 bool* feasible_out = nullptr);

/// Smallest uniform power scaling of a beamforming candidate that satisfies
/// every constraint lhs_k * c >= rhs_k, where lhs_k is the constraint value at
/// the candidate. Returns std::nullopt when some constraint cannot be met
/// along this direction (lhs <= 0 with rhs > 0).
std::optional<ComplexVector> scale_to_most_violated(
    const ComplexVector& w_candidate, const std::vector<std::pair<double, double>>& lhs_rhs);

}  // namespace irsbc
