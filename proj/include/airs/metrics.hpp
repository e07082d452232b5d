// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "airs/channel.hpp"
#include "airs/config.hpp"
#include "airs/linalg.hpp"

namespace airs {

// Physical decision variables: beamformers w_k (units sqrt(W)) and the
// combined reflection coefficients psi_m = a_m * e^{j phase_m}. The diagonal
// reflection matrix is stored as its diagonal.
struct Solution {
    std::vector<VecC> w; // K vectors of length N_T
    VecC psi;            // M entries

    static Solution zeros(const SystemConfig& config);
};

struct FeasibilityReport {
    std::vector<double> sinr;       // linear, per user
    std::vector<double> c1_margin;  // sinr_k - gamma_req
    double c2_lhs = 0.0;            // IRS output power, W
    double c2_margin = 0.0;         // p_a - c2_lhs
    bool feasible = false;
};

// Effective downlink channel h_bar_k^H = h_d_k^H + h_r_k^H Psi G.
VecC effective_channel(const ChannelSet& ch, const VecC& psi, int k);

// SINR of user k:
//   |hbar_k^H w_k|^2 / (sum_{r!=k} |hbar_k^H w_r|^2
//                       + sigma_d^2 ||h_r_k^H Psi||^2 + sigma_n^2)
// The IRS static noise is not part of the SINR.
double compute_sinr(const ChannelSet& ch, const Solution& sol, const SystemConfig& config, int k);

// Amplification power drawn by the active IRS:
//   sum_k ||Psi G w_k||^2 + sigma_d^2 ||Psi||_F^2
double irs_output_power(const ChannelSet& ch, const Solution& sol, const SystemConfig& config);

double bs_transmit_power(const Solution& sol);

// C1/C2 margins with per-constraint relative tolerances: user k passes when
// sinr_k - gamma_req >= -tol*max(1, gamma_req), the power budget when
// p_a - output >= -tol*p_a.
FeasibilityReport check_feasibility(const ChannelSet& ch, const Solution& sol,
                                    const SystemConfig& config, double tol);

// Power consumption model for the energy-efficiency metric.
struct PowerModel {
    double eta = 0.5;      // amplifier efficiency
    double p_t = 0.1;      // per-BS-antenna circuit power, W
    double p_c = 0.085;    // BS static power, W
    double p_i = 0.002;    // per-IRS-element circuit power, W
    double p_a = 0.02;     // IRS amplification budget charged to the system, W
    bool include_irs = true; // false: no IRS deployed, drop the M*p_i and p_a terms
};

// xi = sum_k log2(1 + sinr_k) /
//      ( (1/eta) sum_k ||w_k||^2 + N_T p_t + p_c + M p_i + (1/eta) p_a )
// in bits/J/Hz. Rates use achieved SINRs.
double energy_efficiency(const ChannelSet& ch, const Solution& sol, const SystemConfig& config,
                         const PowerModel& pm);

} // namespace airs
