// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "airs/channel.hpp"
#include "airs/config.hpp"
#include "airs/metrics.hpp"
#include "airs/rng.hpp"

namespace airs {

struct BaselineResult {
    Solution solution;      // psi = 0 for the no-IRS scheme
    bool feasible = false;  // false marks an outage drop
    double bs_power_w = 0.0;
    int iterations = 0;
    double seconds = 0.0;
    std::string message;
};

// Intermediate of the no-IRS SDR solve, kept for the IA warm start.
struct NoIrsSdr {
    bool feasible = false;
    std::vector<VecC> w;       // rank-one extracted beamformers
    std::vector<MatC> w_mats;  // SDR matrices
    double bs_power_w = 0.0;
    int iterations = 0;
    double seconds = 0.0;
    std::string message;
};

// min sum ||w_k||^2 s.t. SINR_k >= gamma with no IRS, solved by semidefinite
// relaxation over W_k = w_k w_k^H (the rank constraint is dropped; the
// relaxation is tight for this problem class).
NoIrsSdr solve_no_irs_sdr(const ChannelSet& ch, const SystemConfig& cfg);

BaselineResult baseline_no_irs(const ChannelSet& ch, const SystemConfig& cfg);

// ZF beamforming against the effective channels of a common-amplitude IRS
// with the given phases; the amplitude is calibrated by bisection so the IRS
// output power equals budget_fraction * p_a at the power-allocation optimum
// (per-user powers are the active lower bounds of the allocation LP).
struct ZfEqualAmplitude {
    bool ok = false;
    std::vector<VecC> wdir; // unit-norm ZF directions
    VecR p;                 // per-user transmit powers
    double amplitude = 0.0; // common element amplitude
    std::string message;
};
ZfEqualAmplitude zf_equal_amplitude(const ChannelSet& ch, const SystemConfig& cfg,
                                    const VecC& phases, double budget_fraction);

// Equal-amplification random-phase IRS with ZF beamforming and optimized
// per-user powers, at the full IRS budget.
BaselineResult baseline_zf_random(const ChannelSet& ch, const SystemConfig& cfg, Rng& rng);

} // namespace airs
