// SPDX-License-Identifier: Apache-2.0
#include "airs/metrics.hpp"

#include <stdexcept>

namespace airs {

Solution Solution::zeros(const SystemConfig& config) {
    Solution s;
    s.w.assign(config.k, VecC::Zero(config.n_t));
    s.psi = VecC::Zero(config.m);
    return s;
}

VecC effective_channel(const ChannelSet& ch, const VecC& psi, int k) {
    // h_r_k^H Psi G as a column vector: G^H Psi^H h_r_k
    return ch.h_d[k] + ch.g.adjoint() * (psi.conjugate().asDiagonal() * ch.h_r[k]);
}

double compute_sinr(const ChannelSet& ch, const Solution& sol, const SystemConfig& config, int k) {
    const VecC hbar = effective_channel(ch, sol.psi, k);
    double interference = 0.0;
    double desired = 0.0;
    for (int r = 0; r < config.k; ++r) {
        const double p = std::norm(hbar.dot(sol.w[r])); // hbar^H w_r
        if (r == k)
            desired = p;
        else
            interference += p;
    }
    // Dynamic IRS noise seen by user k: sigma_d^2 ||h_r_k^H Psi||^2
    const double dyn = config.sigma_d_sq *
                       (sol.psi.array() * ch.h_r[k].conjugate().array()).matrix().squaredNorm();
    return desired / (interference + dyn + config.sigma_n_sq);
}

double irs_output_power(const ChannelSet& ch, const Solution& sol, const SystemConfig& config) {
    double out = 0.0;
    for (int r = 0; r < config.k; ++r)
        out += (sol.psi.asDiagonal() * (ch.g * sol.w[r])).squaredNorm();
    out += config.sigma_d_sq * sol.psi.squaredNorm();
    return out;
}

double bs_transmit_power(const Solution& sol) {
    double p = 0.0;
    for (const auto& w : sol.w) p += w.squaredNorm();
    return p;
}

FeasibilityReport check_feasibility(const ChannelSet& ch, const Solution& sol,
                                    const SystemConfig& config, double tol) {
    if (tol <= 0) throw std::invalid_argument("check_feasibility: tol must be > 0");
    FeasibilityReport rep;
    rep.sinr.resize(config.k);
    rep.c1_margin.resize(config.k);
    bool ok = true;
    for (int k = 0; k < config.k; ++k) {
        rep.sinr[k] = compute_sinr(ch, sol, config, k);
        rep.c1_margin[k] = rep.sinr[k] - config.gamma_req;
        ok = ok && rep.c1_margin[k] >= -tol * std::max(1.0, config.gamma_req);
    }
    rep.c2_lhs = irs_output_power(ch, sol, config);
    rep.c2_margin = config.p_a - rep.c2_lhs;
    ok = ok && rep.c2_margin >= -tol * config.p_a;
    rep.feasible = ok;
    return rep;
}

double energy_efficiency(const ChannelSet& ch, const Solution& sol, const SystemConfig& config,
                         const PowerModel& pm) {
    if (!(pm.eta > 0 && pm.eta <= 1)) throw std::invalid_argument("energy_efficiency: eta in (0,1]");
    double rate = 0.0;
    for (int k = 0; k < config.k; ++k)
        rate += std::log2(1.0 + compute_sinr(ch, sol, config, k));
    double denom = bs_transmit_power(sol) / pm.eta + config.n_t * pm.p_t + pm.p_c;
    if (pm.include_irs) denom += config.m * pm.p_i + pm.p_a / pm.eta;
    return rate / denom;
}

} // namespace airs
