// SPDX-License-Identifier: Apache-2.0
//
// Constraint builders for the successive convex restriction. Products of
// decision variables are decoupled through Z_r = W_r G^H Psi^H; the coupling
// traces are rewritten with the polarization identity
//   Re Tr(C^H D) = 1/2 ||C + D||_F^2 - 1/2 ||C||_F^2 - 1/2 ||D||_F^2
// with C = Psi^H, which reproduces Tr(Psi G W_r G^H Psi^H H_k) exactly at
// consistent points. Convex squared norms are kept; every concave piece is
// replaced by its tangent bound at the expansion point, so each built
// constraint is convex, touches the original residual at the expansion
// point, and implies the original constraint wherever it holds.

#include "airs/ia.hpp"

namespace airs::ia {

namespace {

double re_dot(const VecC& g, const VecC& x) { return g.dot(x).real(); } // Re sum conj(g) x

// ||Psi^H + G Z H_k||_F^2 with H_k = h h^H
double coupled_norm_sq(const VecC& psi, const MatC& g, const MatC& z, const VecC& h) {
    MatC x = (g * (z * h)) * h.adjoint();
    x += psi.conjugate().asDiagonal();
    return x.squaredNorm();
}

} // namespace

AffineFunctional linearize_psi_quadratic(const VecC& psi_j) {
    AffineFunctional f;
    f.grad = 2.0 * psi_j;
    f.constant = -psi_j.squaredNorm();
    return f;
}

AffineFunctional linearize_z_quadratic(const MatC& z_j, const MatC& g, const VecC& h) {
    AffineFunctional f;
    const MatC gtg = g.adjoint() * g;
    const double h2 = h.squaredNorm();
    f.grad = 2.0 * h2 * (gtg * ((z_j * h) * h.adjoint()));
    f.constant = -h2 * (g * (z_j * h)).squaredNorm();
    return f;
}

AffineFunctional linearize_w_quadratic(const MatC& w_j, const MatC& g) {
    AffineFunctional f;
    const MatC gtg = g.adjoint() * g;
    f.grad = gtg * w_j + w_j * gtg; // Hermitian for Hermitian w_j
    f.constant = -(g * w_j).squaredNorm();
    return f;
}

ExpansionPoint ExpansionPoint::consistent(std::vector<MatC> w, VecC psi, const MatC& g) {
    ExpansionPoint ep;
    ep.w = std::move(w);
    ep.psi = std::move(psi);
    const int ku = static_cast<int>(ep.w.size());
    ep.z.resize(ku);
    ep.u.resize(ku);
    ep.v.resize(ku);
    const MatC gh_psih = g.adjoint() * ep.psi.conjugate().asDiagonal(); // G^H Psi^H
    const MatC gtg = g.adjoint() * g;
    ep.objective = 0.0;
    for (int r = 0; r < ku; ++r) {
        ep.w[r] = hermitian_part(ep.w[r]);
        ep.z[r] = ep.w[r] * gh_psih;
        ep.u[r] = hermitian_part(ep.w[r] * gtg * ep.w[r]);
        ep.objective += ep.w[r].trace().real();
    }
    const MatC psim = ep.psi.asDiagonal();
    const MatC vv = psim * psim.adjoint();
    for (int r = 0; r < ku; ++r) ep.v[r] = vv;
    return ep;
}

double ExpansionPoint::consistency_error(const MatC& g) const {
    const MatC gh_psih = g.adjoint() * psi.conjugate().asDiagonal();
    double err = 0.0;
    for (size_t r = 0; r < w.size(); ++r) err = std::max(err, (z[r] - w[r] * gh_psih).norm());
    return err;
}

double c1_residual(const ChannelSet& ch, const SystemConfig& cfg, const std::vector<MatC>& w,
                   const VecC& psi, int k) {
    const VecC& h = ch.h_r[k];
    const VecC& hd = ch.h_d[k];
    const VecC q = ch.g.adjoint() * (psi.conjugate().asDiagonal() * h); // G^H Psi^H h
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
    return cfg.gamma_req * (interf + dyn + cfg.sigma_n_sq) - desired;
}

double c1_residual_scale(const ChannelSet& ch, const SystemConfig& cfg,
                         const std::vector<MatC>& w, const VecC& psi, int k) {
    const VecC& h = ch.h_r[k];
    const VecC& hd = ch.h_d[k];
    const VecC q = ch.g.adjoint() * (psi.conjugate().asDiagonal() * h);
    double acc = 0.0;
    for (int r = 0; r < cfg.k; ++r) {
        const double s = std::abs((hd.adjoint() * w[r] * hd).real()(0, 0)) +
                         std::abs((q.adjoint() * w[r] * q).real()(0, 0)) +
                         2.0 * std::abs((hd.adjoint() * w[r] * q)(0, 0).real());
        acc += (r == k ? 1.0 : cfg.gamma_req) * s;
    }
    const double dyn =
        cfg.sigma_d_sq * (psi.array() * h.conjugate().array()).matrix().squaredNorm();
    return acc + cfg.gamma_req * (dyn + cfg.sigma_n_sq);
}

double c2_residual(const ChannelSet& ch, const SystemConfig& cfg, const std::vector<MatC>& w,
                   const VecC& psi) {
    const MatC pg = psi.asDiagonal() * ch.g; // Psi G
    double out = cfg.sigma_d_sq * psi.squaredNorm();
    for (int r = 0; r < cfg.k; ++r) out += (pg * w[r] * pg.adjoint()).trace().real();
    return out - cfg.p_a;
}

C1barData build_c1bar(const ChannelSet& ch, const SystemConfig& cfg, const ExpansionPoint& ep,
                      int k) {
    const int ku = cfg.k;
    const double gam = cfg.gamma_req;
    const VecC& h = ch.h_r[k];
    const VecC& hd = ch.h_d[k];
    const MatC& g = ch.g;

    C1barData c;
    c.k = k;
    c.coef_interf = gam / 2.0;
    c.coef_dyn = gam * cfg.sigma_d_sq;
    c.coef_zq = 0.5;
    c.cst = gam * cfg.sigma_n_sq;
    c.w_grad.assign(ku, MatC());
    c.z_grad.assign(ku, MatC::Zero(g.cols(), g.rows()));
    c.psi_grad = VecC::Zero(ep.psi.size());

    const MatC hdhd = hd * hd.adjoint();
    for (int r = 0; r < ku; ++r) c.w_grad[r] = (r == k ? -1.0 : gam) * hdhd;

    // collected Psi-quadratic coefficient -[gamma(K-1) - 1]/2, minorized
    const double cpsi = -(gam * (ku - 1) - 1.0);
    const auto psi_lin = linearize_psi_quadratic(ep.psi);
    c.psi_grad += (cpsi / 2.0) * VecC(psi_lin.grad);
    c.cst += (cpsi / 2.0) * psi_lin.constant;

    // interference Z_r quadratics, minorized with weight -gamma/2
    for (int r = 0; r < ku; ++r) {
        if (r == k) continue;
        const auto zq = linearize_z_quadratic(ep.z[r], g, h);
        c.z_grad[r] -= (gam / 2.0) * zq.grad;
        c.cst -= (gam / 2.0) * zq.constant;
    }

    // desired-signal norm term -1/2 ||Psi^H + G Z_k H_k||^2, linearized at the
    // expansion point (tangent bound of the concave piece)
    {
        MatC xj = (g * (ep.z[k] * h)) * h.adjoint();
        xj += ep.psi.conjugate().asDiagonal();
        c.cst += 0.5 * xj.squaredNorm();
        c.psi_grad -= xj.diagonal().conjugate();
        c.z_grad[k] -= g.adjoint() * xj * (h * h.adjoint());
    }

    // cross-term block: 2 Re{hd^H (gamma sum_{r!=k} Z_r - Z_k) h}
    const MatC cross = 2.0 * (hd * h.adjoint());
    for (int r = 0; r < ku; ++r) c.z_grad[r] += (r == k ? -1.0 : gam) * cross;

    return c;
}

double C1barData::eval(const std::vector<MatC>& w, const VecC& psi, const std::vector<MatC>& z,
                       const ChannelSet& ch) const {
    const VecC& h = ch.h_r[k];
    double v = cst + re_dot(psi_grad, psi);
    for (size_t r = 0; r < w.size(); ++r) {
        v += frobenius_inner(w_grad[r], w[r]);
        v += frobenius_inner(z_grad[r], z[r]);
        if (static_cast<int>(r) != k) v += coef_interf * coupled_norm_sq(psi, ch.g, z[r], h);
    }
    v += coef_dyn * (psi.array() * h.conjugate().array()).matrix().squaredNorm();
    v += coef_zq * h.squaredNorm() * (ch.g * (z[k] * h)).squaredNorm();
    return v;
}

C2barData build_c2bar(const ChannelSet& ch, const SystemConfig& cfg, const ExpansionPoint& ep) {
    const int ku = cfg.k;
    const MatC& g = ch.g;
    C2barData c;
    c.coef_norm = 0.5;
    c.coef_psi = cfg.sigma_d_sq;
    c.cst = -cfg.p_a;
    c.z_grad.assign(ku, MatC());
    const MatC gtg = g.adjoint() * g;
    for (int r = 0; r < ku; ++r) {
        // -1/2 ||G Z_r||^2 replaced by its tangent bound
        c.z_grad[r] = -(gtg * ep.z[r]);
        c.cst += 0.5 * (g * ep.z[r]).squaredNorm();
    }
    // -K/2 ||psi||^2 replaced by its tangent bound
    const auto psi_lin = linearize_psi_quadratic(ep.psi);
    c.psi_grad = (-ku / 2.0) * VecC(psi_lin.grad);
    c.cst += (-ku / 2.0) * psi_lin.constant;
    return c;
}

double C2barData::eval(const VecC& psi, const std::vector<MatC>& z, const ChannelSet& ch) const {
    double v = cst + re_dot(psi_grad, psi) + coef_psi * psi.squaredNorm();
    for (size_t r = 0; r < z.size(); ++r) {
        v += frobenius_inner(z_grad[r], z[r]);
        MatC x = ch.g * z[r];
        x += psi.conjugate().asDiagonal();
        v += coef_norm * x.squaredNorm();
    }
    return v;
}

C6barData build_c6bar(const ExpansionPoint& ep, const MatC& g, int r) {
    C6barData c;
    c.r = r;
    c.w_minorant = linearize_w_quadratic(ep.w[r], g);
    return c;
}

// ---------------------------------------------------------------------------
// subproblem assembly

namespace {

using conic::CLin;
using conic::Lin;
using conic::Problem;

// Re<A, W> over a Hermitian block (A Hermitian)
Lin lin_herm_inner(const Problem& p, int blk, const MatC& a) {
    Lin e;
    const int n = static_cast<int>(a.rows());
    for (int i = 0; i < n; ++i) {
        e.add(p.herm_diag_index(blk, i), a(i, i).real());
        for (int j = 0; j < i; ++j) {
            e.add(p.herm_re_index(blk, i, j), 2.0 * a(i, j).real());
            e.add(p.herm_im_index(blk, i, j), 2.0 * a(i, j).imag());
        }
    }
    return e;
}

// Re<g, psi> over the complex-diagonal block
Lin lin_psi_inner(const Problem& p, int blk, const VecC& g) {
    Lin e;
    for (int i = 0; i < g.size(); ++i) {
        e.add(p.cd_re_index(blk, i), g(i).real());
        e.add(p.cd_im_index(blk, i), g(i).imag());
    }
    return e;
}

// Re<B, Z> over a complex matrix block
Lin lin_cm_inner(const Problem& p, int blk, const MatC& b) {
    Lin e;
    for (int c2 = 0; c2 < b.cols(); ++c2)
        for (int r = 0; r < b.rows(); ++r) {
            e.add(p.cm_re_index(blk, r, c2), b(r, c2).real());
            e.add(p.cm_im_index(blk, r, c2), b(r, c2).imag());
        }
    return e;
}

// q_a = (G Z h)_a as a complex affine expression
CLin q_entry(const Problem& p, int zblk, const MatC& g, const VecC& h, int a) {
    CLin q;
    const int nt = static_cast<int>(g.cols());
    const int m = static_cast<int>(h.size());
    for (int i = 0; i < nt; ++i)
        for (int c = 0; c < m; ++c) {
            const cplx coef = g(a, i) * h(c);
            if (coef == cplx(0, 0)) continue;
            q.re.add(p.cm_re_index(zblk, i, c), coef.real());
            q.re.add(p.cm_im_index(zblk, i, c), -coef.imag());
            q.im.add(p.cm_re_index(zblk, i, c), coef.imag());
            q.im.add(p.cm_im_index(zblk, i, c), coef.real());
        }
    return q;
}

void push_clin(std::vector<Lin>& out, const CLin& e) {
    out.push_back(e.re);
    out.push_back(e.im);
}

Lin scale_row(Lin e) {
    double mx = std::abs(e.cst);
    for (const auto& [i, v] : e.terms) mx = std::max(mx, std::abs(v));
    if (mx > 0.0) e *= 1.0 / mx;
    return e;
}

} // namespace

Subproblem build_subproblem(const ChannelSet& ch, const SystemConfig& cfg,
                            const ExpansionPoint& ep, const TrustRegion& trust) {
    const int ku = cfg.k, nt = cfg.n_t, m = cfg.m;
    const MatC& g = ch.g;

    Subproblem sp;
    Problem& p = sp.problem;
    sp.blk_w0 = p.add_hermitian_block("W0", nt);
    for (int k = 1; k < ku; ++k) p.add_hermitian_block("W" + std::to_string(k), nt);
    sp.blk_psi = p.add_complex_diag_block("psi", m);
    sp.blk_z0 = p.add_complex_matrix_block("Z0", nt, m);
    for (int k = 1; k < ku; ++k) p.add_complex_matrix_block("Z" + std::to_string(k), nt, m);
    sp.blk_u0 = p.add_hermitian_block("U0", nt);
    for (int k = 1; k < ku; ++k) p.add_hermitian_block("U" + std::to_string(k), nt);
    sp.blk_v0 = p.add_hermitian_block("V0", m);
    for (int k = 1; k < ku; ++k) p.add_hermitian_block("V" + std::to_string(k), m);
    sp.epi_count = (ku + 1) * (ku + 1);
    sp.blk_epi = p.add_scalar_block("epi", sp.epi_count);

    auto wblk = [&](int k) { return sp.blk_w0 + k; };
    auto zblk = [&](int k) { return sp.blk_z0 + k; };
    auto ublk = [&](int k) { return sp.blk_u0 + k; };
    auto vblk = [&](int k) { return sp.blk_v0 + k; };
    // epigraph layout: per k, (K-1) interference norms then dyn then zq;
    // after that K C2-norm epigraphs and one psi-quadratic epigraph.
    auto epi_c1 = [&](int k, int slot) { return p.scalar_index(sp.blk_epi, k * (ku + 1) + slot); };
    auto epi_c2 = [&](int slot) { return p.scalar_index(sp.blk_epi, ku * (ku + 1) + slot); };

    for (int k = 0; k < ku; ++k)
        for (int i = 0; i < nt; ++i) p.add_objective(p.herm_diag_index(wblk(k), i), 1.0);

    // ---- nonneg rows
    std::vector<C1barData> c1(ku);
    for (int k = 0; k < ku; ++k) {
        c1[k] = build_c1bar(ch, cfg, ep, k);
        Lin row;
        row.cst = -c1[k].cst;
        for (int r = 0; r < ku; ++r) {
            Lin t = lin_herm_inner(p, wblk(r), c1[k].w_grad[r]);
            t *= -1.0;
            row += t;
            t = lin_cm_inner(p, zblk(r), c1[k].z_grad[r]);
            t *= -1.0;
            row += t;
        }
        Lin t = lin_psi_inner(p, sp.blk_psi, c1[k].psi_grad);
        t *= -1.0;
        row += t;
        int slot = 0;
        for (int r = 0; r < ku; ++r)
            if (r != k) row.add(epi_c1(k, slot++), -c1[k].coef_interf);
        row.add(epi_c1(k, ku - 1), -c1[k].coef_dyn);
        row.add(epi_c1(k, ku), -c1[k].coef_zq);
        p.add_nonneg(scale_row(row));
    }
    const C2barData c2 = build_c2bar(ch, cfg, ep);
    {
        Lin row;
        row.cst = -c2.cst;
        for (int r = 0; r < ku; ++r) {
            Lin t = lin_cm_inner(p, zblk(r), c2.z_grad[r]);
            t *= -1.0;
            row += t;
            row.add(epi_c2(r), -c2.coef_norm);
        }
        Lin t = lin_psi_inner(p, sp.blk_psi, c2.psi_grad);
        t *= -1.0;
        row += t;
        row.add(epi_c2(ku), -c2.coef_psi);
        p.add_nonneg(scale_row(row));
    }
    // trace cap on U_r (linearized, with trust slack)
    const double g2 = g.squaredNorm();
    for (int r = 0; r < ku; ++r) {
        const auto c6 = build_c6bar(ep, g, r);
        const double scale_u = (g * ep.w[r]).squaredNorm() + 1e-9 * g2 * std::max(1.0, ep.objective);
        Lin row = lin_herm_inner(p, wblk(r), c6.w_minorant.grad);
        row.cst = c6.w_minorant.constant + trust.delta * scale_u;
        for (int i = 0; i < nt; ++i) row.add(p.herm_diag_index(ublk(r), i), -1.0);
        p.add_nonneg(scale_row(row));
    }
    // trace cap on V_r around ||psi_j||^2 (with trust slack)
    const double psi2 = ep.psi.squaredNorm();
    const double scale_v = psi2 + 1e-9 * cfg.p_a / cfg.sigma_d_sq;
    for (int r = 0; r < ku; ++r) {
        Lin row;
        row.cst = psi2 + trust.theta * scale_v;
        for (int i = 0; i < m; ++i) row.add(p.herm_diag_index(vblk(r), i), -1.0);
        p.add_nonneg(scale_row(row));
    }

    // ---- second-order cones (epigraphs of the kept quadratics)
    for (int k = 0; k < ku; ++k) {
        const VecC& h = ch.h_r[k];
        const double h2 = h.squaredNorm();
        int slot = 0;
        for (int r = 0; r < ku; ++r) {
            if (r == k) continue;
            // ||Psi^H + G Z_r H_k||^2 reduced over the diagonal-plus-rank-one
            // structure: sum_a |conj(psi_a) + q_a conj(h_a)|^2 + |q_a|^2 (||h||^2 - |h_a|^2)
            std::vector<Lin> u;
            u.reserve(4 * m);
            for (int a = 0; a < m; ++a) {
                CLin e = q_entry(p, zblk(r), g, h, a) * std::conj(h(a));
                e += p.cd_entry(sp.blk_psi, a).conj();
                push_clin(u, e);
            }
            for (int a = 0; a < m; ++a) {
                const double s = std::sqrt(std::max(0.0, h2 - std::norm(h(a))));
                CLin e = q_entry(p, zblk(r), g, h, a) * cplx(s, 0.0);
                push_clin(u, e);
            }
            p.add_quad_epigraph(epi_c1(k, slot++), std::move(u));
        }
        { // sum_m |h_m|^2 |psi_m|^2
            std::vector<Lin> u;
            for (int a = 0; a < m; ++a) {
                CLin e = p.cd_entry(sp.blk_psi, a) * cplx(std::abs(h(a)), 0.0);
                push_clin(u, e);
            }
            p.add_quad_epigraph(epi_c1(k, ku - 1), std::move(u));
        }
        { // ||G Z_k H_k||^2 = ||h||^2 ||G Z_k h||^2
            std::vector<Lin> u;
            const double s = std::sqrt(h2);
            for (int a = 0; a < m; ++a) {
                CLin e = q_entry(p, zblk(k), g, h, a) * cplx(s, 0.0);
                push_clin(u, e);
            }
            p.add_quad_epigraph(epi_c1(k, ku), std::move(u));
        }
    }
    for (int k = 0; k < ku; ++k) { // ||Psi^H + G Z_k||_F^2, full M x M
        std::vector<Lin> u;
        u.reserve(2 * m * m);
        for (int b = 0; b < m; ++b)
            for (int a = 0; a < m; ++a) {
                CLin e;
                for (int i = 0; i < nt; ++i) {
                    const cplx coef = g(a, i);
                    e.re.add(p.cm_re_index(zblk(k), i, b), coef.real());
                    e.re.add(p.cm_im_index(zblk(k), i, b), -coef.imag());
                    e.im.add(p.cm_re_index(zblk(k), i, b), coef.imag());
                    e.im.add(p.cm_im_index(zblk(k), i, b), coef.real());
                }
                if (a == b) e += p.cd_entry(sp.blk_psi, a).conj();
                push_clin(u, e);
            }
        p.add_quad_epigraph(epi_c2(k), std::move(u));
    }
    { // ||psi||^2
        std::vector<Lin> u;
        for (int a = 0; a < m; ++a) push_clin(u, p.cd_entry(sp.blk_psi, a));
        p.add_quad_epigraph(epi_c2(ku), std::move(u));
    }

    // ---- PSD cones
    for (int k = 0; k < ku; ++k) {
        std::vector<std::vector<CLin>> lower(nt);
        for (int i = 0; i < nt; ++i)
            for (int j = 0; j <= i; ++j) lower[i].push_back(p.herm_entry(wblk(k), i, j));
        p.add_psd_hermitian(lower);
    }
    // 3x3 block LMI per user: [[U, Z, W G^H], [Z^H, V, Psi], [G W^H, Psi^H, I]]
    for (int r = 0; r < ku; ++r) {
        const int q = nt + 2 * m;
        std::vector<std::vector<CLin>> lower(q);
        for (int i = 0; i < q; ++i) lower[i].resize(i + 1);
        for (int i = 0; i < q; ++i)
            for (int j = 0; j <= i; ++j) {
                CLin e;
                if (i < nt) { // (U) block
                    e = p.herm_entry(ublk(r), i, j);
                } else if (i < nt + m) {
                    const int il = i - nt;
                    if (j < nt) { // Z^H block: conj(Z(j, il))
                        e = p.cm_entry(zblk(r), j, il).conj();
                    } else { // V block
                        e = p.herm_entry(vblk(r), il, j - nt);
                    }
                } else {
                    const int il = i - nt - m;
                    if (j < nt) { // G W^H = G W: sum_l G(il, l) W(l, j)
                        for (int l = 0; l < nt; ++l) e += p.herm_entry(wblk(r), l, j) * g(il, l);
                    } else if (j < nt + m) { // Psi^H block
                        if (il == j - nt) e = p.cd_entry(sp.blk_psi, il).conj();
                    } else { // identity
                        if (il == j - nt - m) e.re.cst = 1.0;
                    }
                }
                lower[i][j] = std::move(e);
            }
        p.add_psd_hermitian(lower);
    }

    return sp;
}

} // namespace airs::ia
