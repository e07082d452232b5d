// SPDX-License-Identifier: Apache-2.0
#include "airs/baselines.hpp"

#include <cmath>

#include "airs/conic_problem.hpp"
#include "airs/conic_solver.hpp"

namespace airs {

namespace {

// Distributed power-control polish: nudges per-user powers up until every
// SINR target holds. Repairs the small losses of rank-one extraction.
bool polish_sinr(const ChannelSet& ch, const SystemConfig& cfg, Solution& sol, int rounds,
                 double headroom) {
    for (int it = 0; it < rounds; ++it) {
        bool ok = true;
        for (int k = 0; k < cfg.k; ++k) {
            const double s = compute_sinr(ch, sol, cfg, k);
            if (s < cfg.gamma_req) {
                ok = false;
                sol.w[k] *= std::sqrt(cfg.gamma_req * (1.0 + headroom) / s);
            }
        }
        if (ok) return true;
    }
    for (int k = 0; k < cfg.k; ++k)
        if (compute_sinr(ch, sol, cfg, k) < cfg.gamma_req) return false;
    return true;
}

} // namespace

NoIrsSdr solve_no_irs_sdr(const ChannelSet& ch, const SystemConfig& cfg) {
    NoIrsSdr out;
    const int nt = cfg.n_t, ku = cfg.k;

    // condition the data: channels scaled to O(1)
    double alpha = 0.0;
    for (int k = 0; k < ku; ++k) alpha = std::max(alpha, ch.h_d[k].cwiseAbs().maxCoeff());
    if (alpha <= 0.0) {
        out.message = "direct channels are zero";
        return out;
    }
    std::vector<VecC> hd(ku);
    for (int k = 0; k < ku; ++k) hd[k] = ch.h_d[k] / alpha;
    const double noise = cfg.sigma_n_sq / (alpha * alpha);

    conic::Problem p;
    std::vector<int> wblk(ku);
    for (int k = 0; k < ku; ++k) wblk[k] = p.add_hermitian_block("W" + std::to_string(k), nt);
    for (int k = 0; k < ku; ++k)
        for (int i = 0; i < nt; ++i) p.add_objective(p.herm_diag_index(wblk[k], i), 1.0);

    // Tr(H_dk W_k) - gamma (sum_{r!=k} Tr(H_dk W_r) + noise) >= 0
    auto add_quadform = [&](conic::Lin& e, int blk, const VecC& h, double coef) {
        // coef * h^H W h = coef * Re<h h^H, W>
        for (int i = 0; i < nt; ++i) {
            e.add(p.herm_diag_index(blk, i), coef * std::norm(h(i)));
            for (int j = 0; j < i; ++j) {
                const cplx a = h(i) * std::conj(h(j)); // (h h^H)_{ij}
                e.add(p.herm_re_index(blk, i, j), coef * 2.0 * a.real());
                e.add(p.herm_im_index(blk, i, j), coef * 2.0 * a.imag());
            }
        }
    };
    for (int k = 0; k < ku; ++k) {
        conic::Lin e;
        add_quadform(e, wblk[k], hd[k], 1.0);
        for (int r = 0; r < ku; ++r)
            if (r != k) add_quadform(e, wblk[r], hd[k], -cfg.gamma_req);
        e.cst = -cfg.gamma_req * noise;
        p.add_nonneg(std::move(e));
    }
    for (int k = 0; k < ku; ++k) {
        std::vector<std::vector<conic::CLin>> lower(nt);
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j <= i; ++j) lower[i].push_back(p.herm_entry(wblk[k], i, j));
        p.add_psd_hermitian(lower);
    }

    const auto sol = conic::solve(p.assemble());
    out.iterations = sol.iterations;
    out.seconds = sol.solve_seconds;
    if (sol.status != conic::SolveStatus::optimal) {
        out.message = "solver: " + conic::to_string(sol.status);
        return out;
    }
    out.w_mats.resize(ku);
    out.w.resize(ku);
    out.bs_power_w = 0.0;
    for (int k = 0; k < ku; ++k) {
        out.w_mats[k] = p.extract_hermitian(sol.x, wblk[k]);
        out.w_mats[k] = hermitian_part(out.w_mats[k]);
        auto [lam, u] = hermitian_principal_eigenpair(out.w_mats[k]);
        lam = std::max(lam, 0.0);
        out.w[k] = std::sqrt(lam) * u;
        out.bs_power_w += lam;
    }
    out.feasible = true;
    return out;
}

BaselineResult baseline_no_irs(const ChannelSet& ch, const SystemConfig& cfg) {
    BaselineResult out;
    auto sdr = solve_no_irs_sdr(ch, cfg);
    out.iterations = sdr.iterations;
    out.seconds = sdr.seconds;
    out.message = sdr.message;
    if (!sdr.feasible) return out;

    out.solution = Solution::zeros(cfg);
    out.solution.w = sdr.w;
    if (!polish_sinr(ch, cfg, out.solution, 50, 1e-9)) {
        out.message = "rank-one polish failed";
        return out;
    }
    out.bs_power_w = bs_transmit_power(out.solution);
    out.feasible = true;
    return out;
}

ZfEqualAmplitude zf_equal_amplitude(const ChannelSet& ch, const SystemConfig& cfg,
                                    const VecC& phases, double budget_fraction) {
    ZfEqualAmplitude out;
    const int nt = cfg.n_t, ku = cfg.k, m = cfg.m;
    if (ku > nt) {
        out.message = "ZF needs K <= N_T";
        return out;
    }

    struct Eval {
        bool ok = false;
        std::vector<VecC> wdir; // unit-norm ZF directions
        VecR p;                 // per-user powers
        double output = 0.0;    // IRS output power at those powers
    };

    auto eval_at = [&](double a) {
        Eval ev;
        const VecC psi = a * phases;
        MatC hbar(nt, ku);
        for (int k = 0; k < ku; ++k) hbar.col(k) = effective_channel(ch, psi, k);
        // ZF directions: columns of Hbar (Hbar^H Hbar)^{-1}, unit-normalized
        const MatC gram = hbar.adjoint() * hbar;
        Eigen::FullPivLU<MatC> lu(gram);
        if (!lu.isInvertible()) return ev;
        const MatC dirs = hbar * lu.inverse();
        ev.wdir.resize(ku);
        ev.p.resize(ku);
        for (int k = 0; k < ku; ++k) {
            const double nrm = dirs.col(k).norm();
            if (!(nrm > 0) || !std::isfinite(nrm)) return ev;
            ev.wdir[k] = dirs.col(k) / nrm;
            const double gain = std::norm(hbar.col(k).dot(ev.wdir[k]));
            if (!(gain > 0)) return ev;
            const double dyn =
                cfg.sigma_d_sq * (psi.array() * ch.h_r[k].conjugate().array()).matrix().squaredNorm();
            ev.p(k) = cfg.gamma_req * (dyn + cfg.sigma_n_sq) / gain;
        }
        ev.output = cfg.sigma_d_sq * psi.squaredNorm();
        for (int k = 0; k < ku; ++k)
            ev.output += ev.p(k) * (psi.asDiagonal() * (ch.g * ev.wdir[k])).squaredNorm();
        ev.ok = true;
        return ev;
    };

    // Bracket the amplitude where the IRS output meets the budget, then bisect.
    const double target = cfg.p_a * budget_fraction;
    double lo = 0.0;
    double hi = std::sqrt(cfg.p_a / (cfg.sigma_d_sq * m)); // noise term alone exhausts the budget
    Eval ev_hi = eval_at(hi);
    int guard = 0;
    while (ev_hi.ok && ev_hi.output < target && guard++ < 60) {
        lo = hi;
        hi *= 2.0;
        ev_hi = eval_at(hi);
    }
    if (!ev_hi.ok) {
        out.message = "rank-deficient effective channel";
        return out;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Eval ev = eval_at(mid);
        if (!ev.ok) {
            out.message = "rank-deficient effective channel";
            return out;
        }
        if (ev.output < target)
            lo = mid;
        else
            hi = mid;
    }
    const double a_star = 0.5 * (lo + hi);
    const Eval ev = eval_at(a_star);
    if (!ev.ok) {
        out.message = "rank-deficient effective channel";
        return out;
    }
    out.ok = true;
    out.wdir = ev.wdir;
    out.p = ev.p;
    out.amplitude = a_star;
    return out;
}

BaselineResult baseline_zf_random(const ChannelSet& ch, const SystemConfig& cfg, Rng& rng) {
    BaselineResult out;
    VecC phases(cfg.m);
    for (int i = 0; i < cfg.m; ++i) phases(i) = std::polar(1.0, 2.0 * M_PI * rng.next_uniform());
    const auto zf = zf_equal_amplitude(ch, cfg, phases, 1.0 - 1e-9);
    if (!zf.ok) {
        out.message = zf.message;
        return out;
    }
    out.solution = Solution::zeros(cfg);
    out.solution.psi = zf.amplitude * phases;
    for (int k = 0; k < cfg.k; ++k) out.solution.w[k] = std::sqrt(zf.p(k)) * zf.wdir[k];
    const auto rep = check_feasibility(ch, out.solution, cfg, 1e-6);
    if (!rep.feasible) {
        out.message = "calibrated point failed the feasibility check";
        return out;
    }
    out.bs_power_w = bs_transmit_power(out.solution);
    out.feasible = true;
    return out;
}

} // namespace airs
