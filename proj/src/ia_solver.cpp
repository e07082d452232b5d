// SPDX-License-Identifier: Apache-2.0
#include "airs/ia.hpp"

#include <chrono>

#include "airs/baselines.hpp"
#include "airs/conic_problem.hpp"
#include "airs/conic_solver.hpp"

namespace airs::ia {

namespace {

double now_seconds(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Relative violation of the original constraints at a (W, psi) point.
double original_violation(const ChannelSet& ch, const SystemConfig& cfg,
                          const std::vector<MatC>& w, const VecC& psi) {
    double v = 0.0;
    for (int k = 0; k < cfg.k; ++k) {
        const double scale = std::max(c1_residual_scale(ch, cfg, w, psi, k), 1e-300);
        v = std::max(v, c1_residual(ch, cfg, w, psi, k) / scale);
    }
    v = std::max(v, c2_residual(ch, cfg, w, psi) / cfg.p_a);
    return v;
}

// Desired-signal power and required level (gamma * (interference + noise))
// of the trace-form SINR constraint.
std::pair<double, double> c1_components(const ChannelSet& ch, const SystemConfig& cfg,
                                        const std::vector<MatC>& w, const VecC& psi, int k) {
    const VecC& h = ch.h_r[k];
    const VecC& hd = ch.h_d[k];
    const VecC q = ch.g.adjoint() * (psi.conjugate().asDiagonal() * h);
    double interf = 0.0, desired = 0.0;
    for (int r = 0; r < cfg.k; ++r) {
        const double s = (hd.adjoint() * w[r] * hd).real()(0, 0) +
                         (q.adjoint() * w[r] * q).real()(0, 0) +
                         2.0 * (hd.adjoint() * w[r] * q)(0, 0).real();
        if (r == k)
            desired = s;
        else
            interf += s;
    }
    const double dyn =
        cfg.sigma_d_sq * (psi.array() * h.conjugate().array()).matrix().squaredNorm();
    return {desired, cfg.gamma_req * (interf + dyn + cfg.sigma_n_sq)};
}

// Feasibility restoration for a (W, psi) point: scale the W_k up until every
// SINR target holds (power control) and, when the IRS budget overflows,
// shrink psi to fit (the budget is exactly quadratic in psi). Returns false
// when the loop fails to reach a feasible point.
bool restore_candidate(const ChannelSet& ch, const SystemConfig& cfg, std::vector<MatC>& w,
                       VecC& psi) {
    for (int outer = 0; outer < 8; ++outer) {
        for (int round = 0; round < 80; ++round) {
            bool ok = true;
            for (int k = 0; k < cfg.k; ++k) {
                const auto [des, req] = c1_components(ch, cfg, w, psi, k);
                if (!(des > 0)) return false;
                if (des < req) {
                    ok = false;
                    w[k] *= (req / des) * (1.0 + 1e-12);
                }
            }
            if (ok) break;
        }
        bool c1_ok = true;
        for (int k = 0; k < cfg.k; ++k) {
            const auto [des, req] = c1_components(ch, cfg, w, psi, k);
            c1_ok = c1_ok && des >= req;
        }
        if (!c1_ok) return false;
        const double over = c2_residual(ch, cfg, w, psi);
        if (over <= 0.0) return true;
        // both budget terms are quadratic in psi, so one rescale lands on it
        psi *= std::sqrt(cfg.p_a * (1.0 - 1e-9) / (over + cfg.p_a));
    }
    return false;
}

// Exact minimization over the beamforming block at a fixed reflection: the
// original problem restricted to W is a small SDP (SINR rows are linear in
// the W_k, as is the IRS budget). Used as a descent accelerator between
// expansion updates; the first-order model alone creeps once the reflection
// is near stationary.
std::optional<std::vector<MatC>> exact_w_step(const ChannelSet& ch, const SystemConfig& cfg,
                                              const VecC& psi) {
    const int nt = cfg.n_t, ku = cfg.k;
    conic::Problem p;
    std::vector<int> wblk(ku);
    for (int k = 0; k < ku; ++k) wblk[k] = p.add_hermitian_block("W" + std::to_string(k), nt);
    for (int k = 0; k < ku; ++k)
        for (int i = 0; i < nt; ++i) p.add_objective(p.herm_diag_index(wblk[k], i), 1.0);

    auto add_herm_form = [&](conic::Lin& e, int blk, const MatC& a, double coef) {
        for (int i = 0; i < nt; ++i) {
            e.add(p.herm_diag_index(blk, i), coef * a(i, i).real());
            for (int j = 0; j < i; ++j) {
                e.add(p.herm_re_index(blk, i, j), coef * 2.0 * a(i, j).real());
                e.add(p.herm_im_index(blk, i, j), coef * 2.0 * a(i, j).imag());
            }
        }
    };

    for (int k = 0; k < ku; ++k) {
        const VecC hbar = effective_channel(ch, psi, k);
        const MatC hh = hbar * hbar.adjoint();
        const double dyn = cfg.sigma_d_sq *
                           (psi.array() * ch.h_r[k].conjugate().array()).matrix().squaredNorm();
        conic::Lin e;
        add_herm_form(e, wblk[k], hh, 1.0);
        for (int r = 0; r < ku; ++r)
            if (r != k) add_herm_form(e, wblk[r], hh, -cfg.gamma_req);
        e.cst = -cfg.gamma_req * (dyn + cfg.sigma_n_sq);
        p.add_nonneg(std::move(e));
    }
    { // IRS budget: sum_k Tr((Psi G)^H (Psi G) W_k) <= p_a - sigma_d^2 ||psi||^2
        const MatC pg = psi.asDiagonal() * ch.g;
        const MatC a = pg.adjoint() * pg;
        conic::Lin e;
        for (int k = 0; k < ku; ++k) add_herm_form(e, wblk[k], a, -1.0);
        e.cst = cfg.p_a - cfg.sigma_d_sq * psi.squaredNorm();
        p.add_nonneg(std::move(e));
    }
    for (int k = 0; k < ku; ++k) {
        std::vector<std::vector<conic::CLin>> lower(nt);
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j <= i; ++j) lower[i].push_back(p.herm_entry(wblk[k], i, j));
        p.add_psd_hermitian(lower);
    }
    const auto sol = conic::solve(p.assemble());
    if (sol.status != conic::SolveStatus::optimal) return std::nullopt;
    std::vector<MatC> w(ku);
    for (int k = 0; k < ku; ++k)
        w[k] = hermitian_part(p.extract_hermitian(sol.x, wblk[k]));
    return w;
}

} // namespace

void ConvergenceTrace::write_csv(std::ostream& os) const {
    os << "iteration,objective_w,max_violation,solver_status,seconds\n";
    os.precision(9);
    for (const auto& r : records)
        os << r.iteration << "," << r.objective_w << "," << r.max_violation << ","
           << r.solver_status << "," << r.seconds << "\n";
}

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::converged: return "converged";
        case RunStatus::max_iter: return "max_iter";
        case RunStatus::init_infeasible: return "init_infeasible";
        case RunStatus::stalled: return "stalled";
        case RunStatus::solver_failure: return "solver_failure";
    }
    return "?";
}

std::optional<ExpansionPoint> initialize(const ChannelSet& ch, const SystemConfig& cfg, Rng& rng,
                                         const IaSettings& st, std::string* why) {
    const auto b1 = solve_no_irs_sdr(ch, cfg);
    if (!b1.feasible) {
        if (why) *why = "no-IRS warm start infeasible: " + b1.message;
        return std::nullopt;
    }
    const double infl = 1.0 + st.margin;
    std::vector<MatC> w(cfg.k);
    Solution probe = Solution::zeros(cfg);
    for (int k = 0; k < cfg.k; ++k) {
        w[k] = infl * (b1.w[k] * b1.w[k].adjoint());
        probe.w[k] = std::sqrt(infl) * b1.w[k];
    }

    // Random unit phases; amplitude from the closed-form root of the
    // quadratic IRS output so the budget holds with 50% slack.
    VecC phases(cfg.m);
    for (int i = 0; i < cfg.m; ++i) phases(i) = std::polar(1.0, 2.0 * M_PI * rng.next_uniform());
    double quad = cfg.sigma_d_sq * cfg.m;
    for (int k = 0; k < cfg.k; ++k)
        quad += (phases.asDiagonal() * (ch.g * probe.w[k])).squaredNorm();
    double rho = std::sqrt(0.5 * cfg.p_a / quad);

    // Candidate A: the inflated no-IRS beamformers with the random
    // reflection, the amplitude halved until every SINR stays above target
    // (rho -> 0 recovers the strictly feasible warm start).
    bool ok = false;
    for (int tries = 0; tries < 200; ++tries) {
        probe.psi = rho * phases;
        const auto rep = check_feasibility(ch, probe, cfg, 1e-10);
        if (rep.feasible) {
            ok = true;
            break;
        }
        rho *= 0.5;
    }
    if (!ok) {
        probe.psi.setZero();
        const auto rep = check_feasibility(ch, probe, cfg, 1e-10);
        if (!rep.feasible) {
            if (why) *why = "inflated warm start failed the feasibility check";
            return std::nullopt;
        }
    }
    ExpansionPoint ep = ExpansionPoint::consistent(std::move(w), probe.psi, ch.g);
    ep.iteration = 0;

    // Candidate B: ZF against the effective channels of the same phases at
    // half the IRS budget. A working-amplitude anchor gives the first-order
    // model its coupling slopes; the near-zero anchor of candidate A starves
    // them and the loop stops on the epsilon rule almost immediately. Keep
    // whichever start is cheaper.
    const auto zf = zf_equal_amplitude(ch, cfg, phases, 0.5);
    if (zf.ok) {
        Solution zsol = Solution::zeros(cfg);
        zsol.psi = zf.amplitude * phases;
        std::vector<MatC> wz(cfg.k);
        double obj = 0.0;
        for (int k = 0; k < cfg.k; ++k) {
            zsol.w[k] = std::sqrt(infl * zf.p(k)) * zf.wdir[k];
            wz[k] = zsol.w[k] * zsol.w[k].adjoint();
            obj += infl * zf.p(k);
        }
        if (obj < ep.objective && check_feasibility(ch, zsol, cfg, 1e-10).feasible) {
            ExpansionPoint zep = ExpansionPoint::consistent(std::move(wz), zsol.psi, ch.g);
            zep.iteration = 0;
            return zep;
        }
    }
    return ep;
}

IterationOutcome solve_iteration(const ChannelSet& ch, const SystemConfig& cfg,
                                 const ExpansionPoint& ep, const TrustRegion& trust,
                                 const IaSettings& st) {
    IterationOutcome oc;
    const auto sp = build_subproblem(ch, cfg, ep, trust);
    const auto sol = conic::solve(sp.problem.assemble(), st.conic);
    oc.solver_status = sol.status;
    oc.seconds = sol.solve_seconds;
    // A numerical_limit iterate with nearly feasible primal slacks and a
    // nearly closed gap is still a usable candidate: the accept gate below
    // re-verifies it against the original constraints either way, so solver
    // shortfall only costs step quality, never soundness.
    const bool salvage = sol.status == conic::SolveStatus::numerical_limit && sol.x.size() > 0 &&
                         sol.pres <= 1e-3 &&
                         std::abs(sol.gap) <= 1e-3 * (1.0 + std::abs(sol.objective));
    if (sol.status != conic::SolveStatus::optimal && !salvage) {
        oc.note = "subproblem: " + conic::to_string(sol.status);
        return oc;
    }
    std::vector<MatC> w(cfg.k);
    for (int k = 0; k < cfg.k; ++k)
        w[k] = hermitian_part(sp.problem.extract_hermitian(sol.x, sp.blk_w0 + k));
    VecC psi = sp.problem.extract_complex_diag(sol.x, sp.blk_psi);

    // exact descent on the beamforming block at the candidate reflection
    if (auto wopt = exact_w_step(ch, cfg, psi)) {
        double obj_new = 0.0, obj_old = 0.0;
        for (int k = 0; k < cfg.k; ++k) {
            obj_new += (*wopt)[k].trace().real();
            obj_old += w[k].trace().real();
        }
        if (obj_new < obj_old) w = std::move(*wopt);
    }

    if (original_violation(ch, cfg, w, psi) > st.accept_tol &&
        !restore_candidate(ch, cfg, w, psi)) {
        oc.note = "candidate violates the original constraints";
        return oc;
    }
    ExpansionPoint cand = ExpansionPoint::consistent(std::move(w), std::move(psi), ch.g);
    cand.iteration = ep.iteration + 1;
    if (original_violation(ch, cfg, cand.w, cand.psi) > st.accept_tol) {
        oc.note = "candidate violates the original constraints";
        oc.next = std::move(cand);
        return oc;
    }
    if (cand.objective > ep.objective + 1e-7 * std::max(1.0, ep.objective)) {
        oc.note = "objective increased";
        oc.next = std::move(cand);
        return oc;
    }
    oc.accepted = true;
    oc.next = std::move(cand);
    return oc;
}

std::pair<std::vector<VecC>, std::vector<double>> extract_beamformers(
    const std::vector<MatC>& w) {
    std::vector<VecC> out(w.size());
    std::vector<double> ratios(w.size());
    for (size_t k = 0; k < w.size(); ++k) {
        const MatC wk = hermitian_part(w[k]);
        ratios[k] = rank_one_ratio(wk, 1e-6);
        auto [lam, u] = hermitian_principal_eigenpair(wk);
        out[k] = std::sqrt(std::max(lam, 0.0)) * u;
    }
    return {out, ratios};
}

RunResult run(const ChannelSet& ch, const SystemConfig& cfg, Rng& rng, const IaSettings& st) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult res;

    // Rescale the data so the subproblems are well conditioned: channels to
    // O(1) magnitude, noise powers and the IRS budget transformed to match.
    // Beamformers are invariant under this scaling; psi maps back by alpha/(beta*gamma).
    double alpha = 0.0, beta = 0.0, gcap = ch.g.cwiseAbs().maxCoeff();
    for (int k = 0; k < cfg.k; ++k) {
        alpha = std::max(alpha, ch.h_d[k].cwiseAbs().maxCoeff());
        beta = std::max(beta, ch.h_r[k].cwiseAbs().maxCoeff());
    }
    if (!(alpha > 0) || !(beta > 0) || !(gcap > 0)) {
        res.message = "degenerate channels";
        return res;
    }
    ChannelSet chs;
    chs.g = ch.g / gcap;
    chs.h_d.resize(cfg.k);
    chs.h_r.resize(cfg.k);
    for (int k = 0; k < cfg.k; ++k) {
        chs.h_d[k] = ch.h_d[k] / alpha;
        chs.h_r[k] = ch.h_r[k] / beta;
    }
    SystemConfig cfs = cfg;
    cfs.sigma_n_sq = cfg.sigma_n_sq / (alpha * alpha);
    cfs.sigma_d_sq = cfg.sigma_d_sq / (gcap * gcap);
    cfs.p_a = cfg.p_a * (beta / alpha) * (beta / alpha);
    double psi_unscale = alpha / (beta * gcap);

    std::string why;
    auto ep0 = initialize(chs, cfs, rng, st, &why);
    if (!ep0) {
        res.status = RunStatus::init_infeasible;
        res.message = why;
        res.seconds = now_seconds(t0);
        return res;
    }
    ExpansionPoint ep = std::move(*ep0);

    // Second normalization stage: the warm start fixes the power unit (W
    // scales by u, beamformer power maps back by u) and the reflection unit
    // c. The constraint builders split coupling traces with the polarization
    // identity, whose pieces ||Psi_H|| and ||G Z H|| must have comparable
    // magnitude or the split cancels catastrophically; c is set to the
    // balance point of those pieces at the warm start.
    const double power_unit = std::max(ep.objective, 1e-300);
    {
        const double u = power_unit;
        double d2 = 0.0;
        int cnt = 0;
        for (int k = 0; k < cfg.k; ++k) {
            const MatC hk = chs.h_r[k] * chs.h_r[k].adjoint();
            for (int r = 0; r < cfg.k; ++r) {
                d2 += (chs.g * ep.z[r] * hk).squaredNorm();
                ++cnt;
            }
        }
        // ep.z still carries W in watts here, so the balance point is
        // c^2 = u * ||psi|| / ||G Z H||.
        const double dbar = std::sqrt(d2 / std::max(cnt, 1));
        const double psi_norm = ep.psi.norm();
        double c = 1.0;
        if (psi_norm > 0 && dbar > 0) c = std::sqrt(u * psi_norm / dbar);
        c = std::clamp(c, 1e-8, 1e8);
        const double rc = std::sqrt(c);
        chs.g *= rc;
        for (int k = 0; k < cfg.k; ++k) chs.h_r[k] *= rc;
        cfs.sigma_d_sq = cfs.sigma_d_sq * c / u;
        cfs.sigma_n_sq /= u;
        cfs.p_a = cfs.p_a / (c * u);
        psi_unscale *= c;
        std::vector<MatC> w2(cfg.k);
        for (int k = 0; k < cfg.k; ++k) w2[k] = ep.w[k] / u;
        ep = ExpansionPoint::consistent(std::move(w2), ep.psi / c, chs.g);
    }
    res.trace.records.push_back({0, ep.objective * power_unit,
                                 original_violation(chs, cfs, ep.w, ep.psi), "init",
                                 now_seconds(t0)});

    TrustRegion trust = st.trust0;
    res.status = RunStatus::max_iter;
    for (int j = 1; j <= cfg.max_iter; ++j) {
        const auto it0 = std::chrono::steady_clock::now();
        TrustRegion tr = trust;
        IterationOutcome oc;
        bool solver_died = false;
        for (int attempt = 0; attempt < st.max_attempts; ++attempt) {
            oc = solve_iteration(chs, cfs, ep, tr, st);
            if (oc.accepted) break;
            solver_died = oc.note.rfind("subproblem:", 0) == 0;
            tr.delta /= st.trust_shrink;
            tr.theta /= st.trust_shrink;
            if (tr.delta < st.trust_min && tr.theta < st.trust_min) break;
        }
        if (!oc.accepted) {
            res.status = solver_died ? RunStatus::solver_failure : RunStatus::stalled;
            res.message = oc.note;
            break;
        }
        const double rel_dec =
            (ep.objective - oc.next.objective) / std::max(oc.next.objective, 1e-300);
        ep = std::move(oc.next);
        ep.iteration = j;
        res.trace.records.push_back({j, ep.objective * power_unit,
                                     original_violation(chs, cfs, ep.w, ep.psi),
                                     conic::to_string(oc.solver_status), now_seconds(it0)});
        res.iterations = j;
        if (rel_dec <= cfs.epsilon) {
            res.status = RunStatus::converged;
            break;
        }
        trust.delta = std::min(tr.delta * st.trust_grow, st.trust_max);
        trust.theta = std::min(tr.theta * st.trust_grow, st.trust_max);
    }

    auto [wvecs, ratios] = extract_beamformers(ep.w);
    res.rank_ratios = std::move(ratios);
    res.solution.w = std::move(wvecs);
    const double wback = std::sqrt(power_unit);
    for (auto& wk : res.solution.w) wk *= wback;
    res.solution.psi = psi_unscale * ep.psi;

    auto rep = check_feasibility(ch, res.solution, cfg, 1e-6);
    if (!rep.feasible) {
        // rank-one extraction can shave a hair off tight SINRs; nudge powers
        for (int round = 0; round < 20 && !rep.feasible; ++round) {
            for (int k = 0; k < cfg.k; ++k) {
                const double s = compute_sinr(ch, res.solution, cfg, k);
                if (s < cfg.gamma_req)
                    res.solution.w[k] *= std::sqrt(cfg.gamma_req * (1.0 + 1e-9) / s);
            }
            rep = check_feasibility(ch, res.solution, cfg, 1e-6);
        }
    }
    res.feasible = rep.feasible;
    res.bs_power_w = bs_transmit_power(res.solution);
    res.seconds = now_seconds(t0);
    return res;
}

} // namespace airs::ia
