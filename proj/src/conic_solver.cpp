// SPDX-License-Identifier: Apache-2.0
//
// Homogeneous self-dual interior-point method with Nesterov-Todd scaling and
// a Mehrotra predictor-corrector over R+^l x SOC x PSD cone products. PSD
// blocks live in scaled svec coordinates, so plain dot products are trace
// inner products. The KKT systems are reduced to normal equations
// G' (W'W)^{-1} G and factored densely; problem sizes here are a few hundred
// to a couple thousand variables.

#include "airs/conic_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <tuple>

namespace airs::conic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Layout {
    int nn = 0;
    std::vector<int> soc, soc_off;
    std::vector<int> psd, psd_off; // real symmetric sizes, offsets in cone space
    int total = 0;
    int degree = 0;

    static Layout from(const StandardForm& sf) {
        Layout L;
        L.nn = sf.nonneg_dim;
        L.total = L.nn;
        L.degree = L.nn;
        for (int d : sf.soc_dims) {
            L.soc.push_back(d);
            L.soc_off.push_back(L.total);
            L.total += d;
            L.degree += 1;
        }
        for (int p : sf.psd_dims) {
            L.psd.push_back(p);
            L.psd_off.push_back(L.total);
            L.total += svec_dim(p);
            L.degree += p;
        }
        return L;
    }

    VecR unit() const { // the cone identity element e
        VecR e = VecR::Zero(total);
        e.head(nn).setOnes();
        for (size_t k = 0; k < soc.size(); ++k) e(soc_off[k]) = 1.0;
        for (size_t k = 0; k < psd.size(); ++k) {
            const int p = psd[k];
            int idx = psd_off[k];
            for (int j = 0; j < p; ++j) {
                e(idx) = 1.0;
                idx += p - j;
            }
        }
        return e;
    }
};

// Jordan-frame minimum eigenvalue of a cone vector.
double min_eig(const Layout& L, const VecR& u) {
    double me = kInf;
    if (L.nn > 0) me = std::min(me, u.head(L.nn).minCoeff());
    for (size_t k = 0; k < L.soc.size(); ++k) {
        const auto seg = u.segment(L.soc_off[k], L.soc[k]);
        me = std::min(me, seg(0) - seg.tail(L.soc[k] - 1).norm());
    }
    for (size_t k = 0; k < L.psd.size(); ++k) {
        const MatR S = smat(u.segment(L.psd_off[k], svec_dim(L.psd[k])), L.psd[k]);
        Eigen::SelfAdjointEigenSolver<MatR> es(S, Eigen::EigenvaluesOnly);
        me = std::min(me, es.eigenvalues()(0));
    }
    return me;
}

struct Scaling {
    VecR w_nn; // nonneg scaling
    struct Soc {
        double beta = 1.0;
        VecR v;
    };
    std::vector<Soc> soc;
    struct Psd {
        MatR r, rti, m; // m = rti * rti'
        VecR lam;       // NT eigenvalues (diagonal of the scaled point)
    };
    std::vector<Psd> psd;
    VecR lambda; // scaled point, lambda = W z = W^{-T} s
};

enum class WMode { W, WT, Winv, WinvT };

void apply_w(const Layout& L, const Scaling& sc, WMode mode, const VecR& in, VecR& out) {
    out.resize(L.total);
    const bool inv = (mode == WMode::Winv || mode == WMode::WinvT);
    if (L.nn > 0) {
        if (inv)
            out.head(L.nn) = in.head(L.nn).cwiseQuotient(sc.w_nn);
        else
            out.head(L.nn) = in.head(L.nn).cwiseProduct(sc.w_nn);
    }
    for (size_t k = 0; k < L.soc.size(); ++k) {
        const int d = L.soc[k], off = L.soc_off[k];
        const auto x = in.segment(off, d);
        VecR vv = sc.soc[k].v;
        if (inv) { // W^{-1} uses u = Jv
            vv.tail(d - 1) *= -1.0;
        }
        const double vx = vv.dot(x);
        VecR y = 2.0 * vx * vv;
        y(0) -= x(0);
        y.tail(d - 1) += x.tail(d - 1);
        const double b = inv ? 1.0 / sc.soc[k].beta : sc.soc[k].beta;
        out.segment(off, d) = b * y;
    }
    for (size_t k = 0; k < L.psd.size(); ++k) {
        const int p = L.psd[k], off = L.psd_off[k], sd = svec_dim(p);
        const MatR X = smat(in.segment(off, sd), p);
        const auto& P = sc.psd[k];
        MatR Y;
        switch (mode) {
            case WMode::W: Y = P.r.transpose() * X * P.r; break;
            case WMode::WT: Y = P.r * X * P.r.transpose(); break;
            case WMode::Winv: Y = P.rti * X * P.rti.transpose(); break;
            case WMode::WinvT: Y = P.rti.transpose() * X * P.rti; break;
        }
        out.segment(off, sd) = svec(0.5 * (Y + Y.transpose()));
    }
}

bool compute_scaling(const Layout& L, const VecR& s, const VecR& z, Scaling& sc) {
    if (L.nn > 0) {
        sc.w_nn = (s.head(L.nn).cwiseQuotient(z.head(L.nn))).cwiseSqrt();
        if (!sc.w_nn.allFinite() || (sc.w_nn.array() <= 0).any()) return false;
    }
    sc.soc.resize(L.soc.size());
    for (size_t k = 0; k < L.soc.size(); ++k) {
        const int d = L.soc[k], off = L.soc_off[k];
        const auto sk = s.segment(off, d);
        const auto zk = z.segment(off, d);
        const double a2 = sk(0) * sk(0) - sk.tail(d - 1).squaredNorm();
        const double b2 = zk(0) * zk(0) - zk.tail(d - 1).squaredNorm();
        if (!(a2 > 0) || !(b2 > 0)) return false;
        const double a = std::sqrt(a2), b = std::sqrt(b2);
        VecR st = sk / a, zt = zk / b;
        const double gamma = std::sqrt((1.0 + st.dot(zt)) / 2.0);
        if (!(gamma > 0)) return false;
        VecR wbar = st;
        wbar(0) += zt(0);
        wbar.tail(d - 1) -= zt.tail(d - 1);
        wbar /= (2.0 * gamma);
        VecR v = wbar;
        v(0) += 1.0;
        v /= std::sqrt(2.0 * (wbar(0) + 1.0));
        sc.soc[k].beta = std::sqrt(a / b);
        sc.soc[k].v = v;
    }
    sc.psd.resize(L.psd.size());
    for (size_t k = 0; k < L.psd.size(); ++k) {
        const int p = L.psd[k], off = L.psd_off[k], sd = svec_dim(p);
        const MatR S = smat(s.segment(off, sd), p);
        const MatR Z = smat(z.segment(off, sd), p);
        Eigen::SelfAdjointEigenSolver<MatR> es(S), ez(Z);
        if (es.info() != Eigen::Success || ez.info() != Eigen::Success) return false;
        const double floor_s = std::max(es.eigenvalues().maxCoeff(), 0.0) * 1e-15 + 1e-300;
        const double floor_z = std::max(ez.eigenvalues().maxCoeff(), 0.0) * 1e-15 + 1e-300;
        const MatR Ls = es.eigenvectors() *
                        es.eigenvalues().cwiseMax(floor_s).cwiseSqrt().asDiagonal();
        const MatR Lz = ez.eigenvectors() *
                        ez.eigenvalues().cwiseMax(floor_z).cwiseSqrt().asDiagonal();
        Eigen::JacobiSVD<MatR> svd(Lz.transpose() * Ls, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const VecR sig = svd.singularValues();
        const double floor_sig = sig(0) * 1e-15 + 1e-300;
        const VecR isq = sig.cwiseMax(floor_sig).cwiseSqrt().cwiseInverse();
        auto& P = sc.psd[k];
        P.r = Ls * svd.matrixV() * isq.asDiagonal();
        P.rti = Lz * svd.matrixU() * isq.asDiagonal();
        P.m = P.rti * P.rti.transpose();
        P.lam = sig;
        if (!P.r.allFinite() || !P.rti.allFinite()) return false;
    }
    apply_w(L, sc, WMode::W, z, sc.lambda);
    return sc.lambda.allFinite();
}

// w = u o v (Jordan product)
void jprod(const Layout& L, const VecR& u, const VecR& v, VecR& w) {
    w.resize(L.total);
    if (L.nn > 0) w.head(L.nn) = u.head(L.nn).cwiseProduct(v.head(L.nn));
    for (size_t k = 0; k < L.soc.size(); ++k) {
        const int d = L.soc[k], off = L.soc_off[k];
        const auto uk = u.segment(off, d);
        const auto vk = v.segment(off, d);
        w(off) = uk.dot(vk);
        w.segment(off + 1, d - 1) = uk(0) * vk.tail(d - 1) + vk(0) * uk.tail(d - 1);
    }
    for (size_t k = 0; k < L.psd.size(); ++k) {
        const int p = L.psd[k], off = L.psd_off[k], sd = svec_dim(p);
        const MatR U = smat(u.segment(off, sd), p);
        const MatR V = smat(v.segment(off, sd), p);
        const MatR W2 = U * V;
        w.segment(off, sd) = svec(0.5 * (W2 + W2.transpose()));
    }
}

// v = lambda \ d (inverse Jordan product by the scaled point; PSD blocks of
// lambda are diagonal by construction)
void jdiv_lambda(const Layout& L, const Scaling& sc, const VecR& lambda, const VecR& d, VecR& v) {
    v.resize(L.total);
    if (L.nn > 0) v.head(L.nn) = d.head(L.nn).cwiseQuotient(lambda.head(L.nn));
    for (size_t k = 0; k < L.soc.size(); ++k) {
        const int dim = L.soc[k], off = L.soc_off[k];
        const auto lk = lambda.segment(off, dim);
        const auto dk = d.segment(off, dim);
        const double rho = lk(0) * lk(0) - lk.tail(dim - 1).squaredNorm();
        const double zeta = lk.tail(dim - 1).dot(dk.tail(dim - 1));
        v(off) = (lk(0) * dk(0) - zeta) / rho;
        v.segment(off + 1, dim - 1) =
            ((zeta / lk(0) - dk(0)) / rho) * lk.tail(dim - 1) + dk.tail(dim - 1) / lk(0);
    }
    for (size_t k = 0; k < L.psd.size(); ++k) {
        const int p = L.psd[k], off = L.psd_off[k], sd = svec_dim(p);
        const MatR D = smat(d.segment(off, sd), p);
        const VecR& lam = sc.psd[k].lam;
        MatR X(p, p);
        for (int j = 0; j < p; ++j)
            for (int i = 0; i < p; ++i) X(i, j) = 2.0 * D(i, j) / (lam(i) + lam(j));
        v.segment(off, sd) = svec(X);
    }
}

// Largest alpha with lambda + alpha*du in the cone (lambda interior).
double max_step(const Layout& L, const Scaling& sc, const VecR& lambda, const VecR& du) {
    double amax = kInf;
    for (int i = 0; i < L.nn; ++i)
        if (du(i) < 0) amax = std::min(amax, -lambda(i) / du(i));
    for (size_t k = 0; k < L.soc.size(); ++k) {
        const int d = L.soc[k], off = L.soc_off[k];
        const auto lk = lambda.segment(off, d);
        const auto dk = du.segment(off, d);
        const double A = dk(0) * dk(0) - dk.tail(d - 1).squaredNorm();
        const double B = 2.0 * (lk(0) * dk(0) - lk.tail(d - 1).dot(dk.tail(d - 1)));
        const double C = lk(0) * lk(0) - lk.tail(d - 1).squaredNorm();
        double root = kInf;
        if (A == 0.0) {
            if (B < 0.0) root = -C / B;
        } else {
            const double disc = B * B - 4.0 * A * C;
            if (A < 0.0) {
                root = (-B - std::sqrt(std::max(disc, 0.0))) / (2.0 * A);
            } else if (B < 0.0 && disc > 0.0) {
                root = (-B - std::sqrt(disc)) / (2.0 * A);
            }
        }
        if (root > 0.0) amax = std::min(amax, root);
        // stay on the correct branch of the cone
        if (dk(0) < 0.0) amax = std::min(amax, -lk(0) / dk(0));
    }
    for (size_t k = 0; k < L.psd.size(); ++k) {
        const int p = L.psd[k], off = L.psd_off[k], sd = svec_dim(p);
        const MatR D = smat(du.segment(off, sd), p);
        const VecR isq = sc.psd[k].lam.cwiseSqrt().cwiseInverse();
        const MatR T = isq.asDiagonal() * D * isq.asDiagonal();
        Eigen::SelfAdjointEigenSolver<MatR> es(T, Eigen::EigenvaluesOnly);
        const double worst = -es.eigenvalues()(0);
        if (worst > 0.0) amax = std::min(amax, 1.0 / worst);
    }
    return amax;
}

// Per-cone structures for assembling the normal matrix G'(W'W)^{-1}G.
struct NormalPrep {
    // nonneg rows as sparse lists
    std::vector<std::vector<std::pair<int, double>>> nn_rows;
    struct SocPrep {
        std::vector<int> vars;   // sorted global columns touched by the cone
        MatR rows;               // dim x k local dense rows
        MatR gtg;                // k x k, rows' * rows
    };
    std::vector<SocPrep> soc;
    struct PsdVar {
        int var; // global column
        std::vector<std::tuple<int, int, double>> entries; // (i, j, coef), i >= j
    };
    std::vector<std::vector<PsdVar>> psd;
};

NormalPrep prepare_normal(const StandardForm& sf, const Layout& L) {
    NormalPrep np;
    const auto& G = sf.G;
    np.nn_rows.resize(L.nn);
    for (int r = 0; r < L.nn; ++r)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(G, r); it; ++it)
            np.nn_rows[r].emplace_back(static_cast<int>(it.col()), it.value());

    np.soc.resize(L.soc.size());
    for (size_t k = 0; k < L.soc.size(); ++k) {
        const int d = L.soc[k], off = L.soc_off[k];
        auto& sp = np.soc[k];
        std::vector<int> cols;
        for (int r = off; r < off + d; ++r)
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(G, r); it; ++it)
                cols.push_back(static_cast<int>(it.col()));
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        sp.vars = cols;
        sp.rows = MatR::Zero(d, static_cast<int>(cols.size()));
        for (int r = off; r < off + d; ++r)
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(G, r); it; ++it) {
                const auto pos = std::lower_bound(cols.begin(), cols.end(), it.col()) - cols.begin();
                sp.rows(r - off, static_cast<int>(pos)) = it.value();
            }
        sp.gtg = sp.rows.transpose() * sp.rows;
    }

    const double irt2 = 1.0 / std::sqrt(2.0);
    np.psd.resize(L.psd.size());
    for (size_t k = 0; k < L.psd.size(); ++k) {
        const int p = L.psd[k], off = L.psd_off[k], sd = svec_dim(p);
        std::map<int, std::vector<std::tuple<int, int, double>>> bucket;
        int idx = 0;
        for (int j = 0; j < p; ++j)
            for (int i = j; i < p; ++i, ++idx) {
                const int r = off + idx;
                const double unscale = (i == j) ? 1.0 : irt2;
                for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(G, r); it; ++it)
                    bucket[static_cast<int>(it.col())].emplace_back(i, j, it.value() * unscale);
            }
        (void)sd;
        auto& vars = np.psd[k];
        vars.reserve(bucket.size());
        for (auto& [var, entries] : bucket) vars.push_back({var, std::move(entries)});
    }
    return np;
}

// H = G'(W'W)^{-1}G accumulated into the lower triangle of a dense matrix.
void build_normal(const NormalPrep& np, const Layout& L, const Scaling& sc, MatR& H,
                  std::vector<MatR>& ybuf) {
    H.setZero();
    for (int r = 0; r < L.nn; ++r) {
        const double coef = 1.0 / (sc.w_nn(r) * sc.w_nn(r));
        const auto& row = np.nn_rows[r];
        for (size_t a = 0; a < row.size(); ++a)
            for (size_t b = 0; b <= a; ++b) {
                const auto [ia, va] = row[a];
                const auto [ib, vb] = row[b];
                H(std::max(ia, ib), std::min(ia, ib)) += coef * va * vb;
            }
    }
    for (size_t k = 0; k < L.soc.size(); ++k) {
        const auto& sp = np.soc[k];
        const int d = L.soc[k];
        const auto& S = sc.soc[k];
        VecR u = S.v; // u = J v
        u.tail(d - 1) *= -1.0;
        const double ib2 = 1.0 / (S.beta * S.beta);
        const VecR p = sp.rows.transpose() * u;
        const VecR q = sp.rows.transpose() * S.v;
        const double uu = u.squaredNorm();
        const int kn = static_cast<int>(sp.vars.size());
        MatR Hl = ib2 * sp.gtg;
        Hl.noalias() += (4.0 * uu * ib2) * p * p.transpose();
        Hl.noalias() -= (2.0 * ib2) * (p * q.transpose() + q * p.transpose());
        for (int a = 0; a < kn; ++a)
            for (int b = 0; b <= a; ++b)
                H(std::max(sp.vars[a], sp.vars[b]), std::min(sp.vars[a], sp.vars[b])) += Hl(a, b);
    }
    for (size_t k = 0; k < L.psd.size(); ++k) {
        const auto& vars = np.psd[k];
        const int p = L.psd[k];
        const MatR& M = sc.psd[k].m;
        const int nv = static_cast<int>(vars.size());
        if (static_cast<int>(ybuf.size()) < nv) ybuf.resize(nv);
        for (int a = 0; a < nv; ++a) {
            MatR& Y = ybuf[a];
            Y.setZero(p, p);
            for (const auto& [i, j, c] : vars[a].entries) {
                Y.noalias() += c * (M.col(i) * M.row(j));
                if (i != j) Y.noalias() += c * (M.col(j) * M.row(i));
            }
        }
        for (int a = 0; a < nv; ++a)
            for (int b = 0; b <= a; ++b) {
                double acc = 0.0;
                const MatR& Y = ybuf[a];
                for (const auto& [i, j, c] : vars[b].entries)
                    acc += c * (i == j ? Y(i, i) : Y(i, j) + Y(j, i));
                H(std::max(vars[a].var, vars[b].var), std::min(vars[a].var, vars[b].var)) += acc;
            }
    }
}

struct Kkt {
    Eigen::LLT<MatR> llt;
    double reg = 0.0;
};

// Solve [0 G'; G -W'W] (ux, uz) = (bx, bz) through the normal equations,
// with one iterative-refinement pass.
struct KktSolver {
    const StandardForm& sf;
    const Layout& L;
    const Scaling& sc;
    const Kkt& f;

    void solve(const VecR& bx, const VecR& bz, VecR& ux, VecR& uz) const {
        once(bx, bz, ux, uz);
        const double b_norm = std::max(bx.cwiseAbs().maxCoeff(), bz.cwiseAbs().maxCoeff()) + 1e-300;
        double prev = std::numeric_limits<double>::infinity();
        for (int pass = 0; pass < 2; ++pass) {
            VecR tmp, tmp2;
            apply_w(L, sc, WMode::W, uz, tmp);
            apply_w(L, sc, WMode::WT, tmp, tmp2);
            const VecR rb_x = bx - sf.G.transpose() * uz;
            const VecR rb_z = bz - sf.G * ux + tmp2;
            const double rn = std::max(rb_x.cwiseAbs().maxCoeff(), rb_z.cwiseAbs().maxCoeff());
            if (rn <= 1e-14 * b_norm || rn >= 0.5 * prev) break;
            prev = rn;
            VecR cx, cz;
            once(rb_x, rb_z, cx, cz);
            ux += cx;
            uz += cz;
        }
    }

  private:
    void once(const VecR& bx, const VecR& bz, VecR& ux, VecR& uz) const {
        VecR t1, t2;
        apply_w(L, sc, WMode::WinvT, bz, t1);
        apply_w(L, sc, WMode::Winv, t1, t2); // (W'W)^{-1} bz
        const VecR rhs = bx + sf.G.transpose() * t2;
        ux = f.llt.solve(rhs);
        const VecR gz = sf.G * ux - bz;
        apply_w(L, sc, WMode::WinvT, gz, t1);
        apply_w(L, sc, WMode::Winv, t1, uz);
    }
};

} // namespace

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::numerical_limit: return "numerical_limit";
    }
    return "?";
}

namespace {

// Ruiz-style equilibration: alternating row and column rescaling of G, with
// one common factor per cone block so cone membership is preserved. Returns
// the scaled problem plus the diagonal factors needed to map a solution back.
struct Equilibration {
    StandardForm sf;
    VecR dcol; // x = dcol .* x_scaled
    VecR erow; // s = s_scaled ./ erow, z = erow .* z_scaled
};

Equilibration equilibrate(const StandardForm& in, int passes = 3) {
    Equilibration eq;
    const int n = in.n;
    const int m = static_cast<int>(in.G.rows());
    eq.dcol = VecR::Ones(n);
    eq.erow = VecR::Ones(m);

    // cone block boundaries: [start, length] with uniform scaling inside
    std::vector<std::pair<int, int>> blocks;
    for (int i = 0; i < in.nonneg_dim; ++i) blocks.emplace_back(i, 1);
    int off = in.nonneg_dim;
    for (int d : in.soc_dims) {
        blocks.emplace_back(off, d);
        off += d;
    }
    for (int p : in.psd_dims) {
        blocks.emplace_back(off, svec_dim(p));
        off += svec_dim(p);
    }

    Eigen::SparseMatrix<double, Eigen::RowMajor> g = in.G;
    for (int pass = 0; pass < passes; ++pass) {
        VecR colmax = VecR::Zero(n);
        for (int r = 0; r < g.outerSize(); ++r)
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(g, r); it; ++it)
                colmax(it.col()) = std::max(colmax(it.col()), std::abs(it.value()));
        VecR dc = VecR::Ones(n);
        for (int j = 0; j < n; ++j)
            if (colmax(j) > 0) dc(j) = 1.0 / std::sqrt(colmax(j));
        VecR rowmax = VecR::Zero(m);
        for (int r = 0; r < g.outerSize(); ++r)
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(g, r); it; ++it)
                rowmax(r) = std::max(rowmax(r), std::abs(it.value()) * dc(it.col()));
        VecR er = VecR::Ones(m);
        for (const auto& [b0, len] : blocks) {
            const double bm = rowmax.segment(b0, len).maxCoeff();
            if (bm > 0) er.segment(b0, len).setConstant(1.0 / std::sqrt(bm));
        }
        for (int r = 0; r < g.outerSize(); ++r)
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(g, r); it; ++it)
                it.valueRef() *= er(r) * dc(it.col());
        eq.dcol.array() *= dc.array();
        eq.erow.array() *= er.array();
    }

    eq.sf.n = n;
    eq.sf.nonneg_dim = in.nonneg_dim;
    eq.sf.soc_dims = in.soc_dims;
    eq.sf.psd_dims = in.psd_dims;
    eq.sf.G = std::move(g);
    eq.sf.h = in.h.cwiseProduct(eq.erow);
    eq.sf.c = in.c.cwiseProduct(eq.dcol);
    return eq;
}

ConicSolution solve_scaled(const StandardForm& sf, const SolverSettings& st);

} // namespace

ConicSolution solve(const StandardForm& sf, const SolverSettings& st) {
    Equilibration eq = equilibrate(sf);
    ConicSolution out = solve_scaled(eq.sf, st);
    if (out.x.size() > 0) out.x.array() *= eq.dcol.array();
    if (out.s.size() > 0) out.s.array() /= eq.erow.array();
    if (out.z.size() > 0) out.z.array() *= eq.erow.array();

    // Independent verification of an optimal claim on the ORIGINAL data:
    // recompute the slack from (x, h, G) and check every cone residual at
    // 10x the solver tolerance.
    if (out.status == SolveStatus::optimal) {
        const Layout L = Layout::from(sf);
        const VecR s_chk = sf.h - sf.G * out.x;
        const double scale =
            1.0 + std::max(s_chk.cwiseAbs().maxCoeff(), out.x.cwiseAbs().maxCoeff());
        const double lim = 10.0 * st.feastol * scale;
        if (min_eig(L, s_chk) < -lim) {
            out.status = SolveStatus::numerical_limit;
            out.message = "verification gate: cone residual too large";
        }
    }
    return out;
}

namespace {

ConicSolution solve_scaled(const StandardForm& sf, const SolverSettings& st) {
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    ConicSolution out;
    const Layout L = Layout::from(sf);
    const int n = sf.n, m = L.total;
    if (sf.G.rows() != m) {
        out.message = "cone dimensions do not match G";
        return out;
    }
    const NormalPrep np = prepare_normal(sf, L);
    const VecR e = L.unit();

    MatR H(n, n);
    std::vector<MatR> ybuf;
    Kkt kkt;

    auto factor = [&](const Scaling& sc) -> bool {
        build_normal(np, L, sc, H, ybuf);
        double base = 0.0;
        for (int i = 0; i < n; ++i) base = std::max(base, H(i, i));
        double reg = 1e-14 * (base + 1.0);
        for (int tries = 0; tries < 4; ++tries) {
            MatR Hr = H;
            Hr.diagonal().array() += reg;
            kkt.llt.compute(Hr.selfadjointView<Eigen::Lower>());
            if (kkt.llt.info() == Eigen::Success) {
                kkt.reg = reg;
                return true;
            }
            reg *= 1e3;
        }
        return false;
    };

    // ---- initial point: W = I
    Scaling sc;
    sc.w_nn = VecR::Ones(L.nn);
    sc.soc.resize(L.soc.size());
    for (size_t k = 0; k < L.soc.size(); ++k) {
        sc.soc[k].beta = 1.0;
        sc.soc[k].v = VecR::Zero(L.soc[k]);
        sc.soc[k].v(0) = 1.0;
    }
    sc.psd.resize(L.psd.size());
    for (size_t k = 0; k < L.psd.size(); ++k) {
        sc.psd[k].r = MatR::Identity(L.psd[k], L.psd[k]);
        sc.psd[k].rti = sc.psd[k].r;
        sc.psd[k].m = sc.psd[k].r;
        sc.psd[k].lam = VecR::Ones(L.psd[k]);
    }
    if (!factor(sc)) {
        out.message = "initial factorization failed";
        return out;
    }
    KktSolver ks{sf, L, sc, kkt};

    VecR x(n), s(m), z(m), tmp(m);
    {
        VecR bz = sf.h;
        VecR bx = VecR::Zero(n);
        VecR uz;
        ks.solve(bx, bz, x, uz);
        // with W = I the z-branch of the KKT solve returns -(h - Gx)
        s = sf.h - sf.G * x;
        const double me_s = min_eig(L, s);
        if (me_s < 1e-8 * (1.0 + s.cwiseAbs().maxCoeff())) s += (1.0 - me_s) * e;
        VecR xd;
        ks.solve(-sf.c, VecR::Zero(m), xd, z); // enforces G'z = -c; z is the least-norm dual start
        const double me_z = min_eig(L, z);
        if (me_z < 1e-8 * (1.0 + z.cwiseAbs().maxCoeff())) z += (1.0 - me_z) * e;
    }
    double tau = 1.0, kap = 1.0;

    const double resx0 = std::max(1.0, sf.c.norm());
    const double resz0 = std::max(1.0, sf.h.norm());

    VecR resx(n), resz(m);
    VecR ds_rhs(m), lmb_div(m), wl(m), bz2(m);
    VecR x1(n), z1(m), x2(n), z2(m);
    VecR dsc(m), dzc(m), ds(m), dz(m);

    // best iterate seen, restored on numerical breakdown
    struct Snapshot {
        VecR x, s, z;
        double tau = 1.0, kap = 1.0;
        double score = kInf;
    } best;
    int stalled_iters = 0;
    double stall_marker = kInf;

    for (int it = 0; it <= st.max_iter; ++it) {
        resx = sf.c * tau + sf.G.transpose() * z;
        resz = s + sf.G * x - sf.h * tau;
        const double rest = kap + sf.c.dot(x) + sf.h.dot(z);

        const double cx = sf.c.dot(x), hz = sf.h.dot(z);
        const double pcost = cx / tau, dcost = -hz / tau;
        const double gap = s.dot(z) / (tau * tau);
        double relgap = kInf;
        if (pcost < 0)
            relgap = gap / -pcost;
        else if (dcost > 0)
            relgap = gap / dcost;
        const double pres = resz.norm() / (tau * resz0);
        const double dres = resx.norm() / (tau * resx0);

        out.iterations = it;
        out.pres = pres;
        out.dres = dres;
        out.gap = gap;
        if (st.verbose)
            std::fprintf(stderr,
                         "it %2d pcost %+.6e dcost %+.6e gap %.2e pres %.2e dres %.2e tau %.2e kap %.2e\n",
                         it, pcost, dcost, gap, pres, dres, tau, kap);

        if (pres <= st.feastol && dres <= st.feastol &&
            (gap <= st.abstol || relgap <= st.reltol)) {
            out.x = x / tau;
            out.s = s / tau;
            out.z = z / tau;
            out.objective = pcost;
            out.status = SolveStatus::optimal;
            break;
        }
        if (hz < 0) {
            const double pinfres = (sf.G.transpose() * z).norm() / resx0 / (-hz);
            if (pinfres <= st.feastol) {
                out.z = z / (-hz);
                out.status = SolveStatus::infeasible;
                out.message = "primal infeasibility certificate found";
                break;
            }
        }
        if (cx < 0) {
            const double dinfres = (sf.G * x + s).norm() / resz0 / (-cx);
            if (dinfres <= st.feastol) {
                out.x = x / (-cx);
                out.status = SolveStatus::unbounded;
                out.message = "dual infeasibility certificate found";
                break;
            }
        }
        if (it == st.max_iter) {
            out.message = "iteration limit";
            break;
        }

        // Track the best iterate; bail out when the residuals blow up or the
        // run plateaus (the certificate checks above have already had their
        // chance this round).
        const double score = std::max({pres, dres, std::abs(gap) / (1.0 + std::abs(pcost))});
        if (score < best.score) best = {x, s, z, tau, kap, score};
        if (score < 0.98 * stall_marker) {
            stall_marker = score;
            stalled_iters = 0;
        } else if (++stalled_iters >= 10) {
            out.message = "progress stalled, best iterate restored";
            break;
        }
        if (it > 5 && score > 1e3 * best.score) {
            out.message = "residuals diverged, best iterate restored";
            break;
        }

        const double mu = (s.dot(z) + tau * kap) / (L.degree + 1);

        Scaling scw;
        if (!compute_scaling(L, s, z, scw)) {
            out.message = "scaling breakdown";
            break;
        }
        if (!factor(scw)) {
            out.message = "factorization breakdown";
            break;
        }
        KktSolver kw{sf, L, scw, kkt};

        kw.solve(-sf.c, sf.h, x1, z1);
        const double denom = sf.c.dot(x1) + sf.h.dot(z1) - kap / tau;

        // affine direction
        jprod(L, scw.lambda, scw.lambda, ds_rhs);
        ds_rhs = -ds_rhs;
        double dk_rhs = -tau * kap;
        jdiv_lambda(L, scw, scw.lambda, ds_rhs, lmb_div);
        apply_w(L, scw, WMode::WT, lmb_div, wl);
        bz2 = -resz - wl;
        kw.solve(-resx, bz2, x2, z2);
        double dtau = (-rest - sf.c.dot(x2) - sf.h.dot(z2) - dk_rhs / tau) / denom;
        dz = z2 + dtau * z1;
        VecR dx = x2 + dtau * x1;
        apply_w(L, scw, WMode::W, dz, dzc);
        dsc = lmb_div - dzc;
        double dkap = (dk_rhs - kap * dtau) / tau;

        double amax = std::min(max_step(L, scw, scw.lambda, dsc), max_step(L, scw, scw.lambda, dzc));
        if (dtau < 0) amax = std::min(amax, -tau / dtau);
        if (dkap < 0) amax = std::min(amax, -kap / dkap);
        const double alpha_aff = std::min(1.0, amax);
        const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3.0), 1e-8, 0.999);

        // combined direction
        VecR corr;
        jprod(L, dsc, dzc, corr);
        jprod(L, scw.lambda, scw.lambda, ds_rhs);
        ds_rhs = -ds_rhs - corr + sigma * mu * e;
        dk_rhs = -tau * kap - dtau * dkap + sigma * mu;
        jdiv_lambda(L, scw, scw.lambda, ds_rhs, lmb_div);
        apply_w(L, scw, WMode::WT, lmb_div, wl);
        const double oms = 1.0 - sigma;
        bz2 = -oms * resz - wl;
        kw.solve(-oms * resx, bz2, x2, z2);
        dtau = (-oms * rest - sf.c.dot(x2) - sf.h.dot(z2) - dk_rhs / tau) / denom;
        dz = z2 + dtau * z1;
        dx = x2 + dtau * x1;
        apply_w(L, scw, WMode::W, dz, dzc);
        dsc = lmb_div - dzc;
        apply_w(L, scw, WMode::WT, dsc, ds);
        dkap = (dk_rhs - kap * dtau) / tau;

        amax = std::min(max_step(L, scw, scw.lambda, dsc), max_step(L, scw, scw.lambda, dzc));
        if (dtau < 0) amax = std::min(amax, -tau / dtau);
        if (dkap < 0) amax = std::min(amax, -kap / dkap);
        const double alpha = std::min(1.0, 0.99 * amax);

        if (!std::isfinite(alpha) || alpha <= 1e-10) {
            out.message = "step size collapsed";
            break;
        }
        x += alpha * dx;
        z += alpha * dz;
        s += alpha * ds;
        tau += alpha * dtau;
        kap += alpha * dkap;
        if (!(tau > 0) || !x.allFinite() || !s.allFinite() || !z.allFinite()) {
            out.message = "iterate diverged";
            break;
        }
    }

    // On breakdown, re-examine the best iterate: report it as optimal when it
    // meets the tolerances, otherwise surface it for diagnostics.
    if (out.status == SolveStatus::numerical_limit && best.score < kInf) {
        const VecR bresx = sf.c * best.tau + sf.G.transpose() * best.z;
        const VecR bresz = best.s + sf.G * best.x - sf.h * best.tau;
        const double bpres = bresz.norm() / (best.tau * resz0);
        const double bdres = bresx.norm() / (best.tau * resx0);
        const double bgap = best.s.dot(best.z) / (best.tau * best.tau);
        const double bpcost = sf.c.dot(best.x) / best.tau;
        const double bdcost = -sf.h.dot(best.z) / best.tau;
        double brelgap = kInf;
        if (bpcost < 0)
            brelgap = bgap / -bpcost;
        else if (bdcost > 0)
            brelgap = bgap / bdcost;
        out.x = best.x / best.tau;
        out.s = best.s / best.tau;
        out.z = best.z / best.tau;
        out.objective = bpcost;
        out.pres = bpres;
        out.dres = bdres;
        out.gap = bgap;
        if (bpres <= st.feastol && bdres <= st.feastol &&
            (bgap <= st.abstol || brelgap <= st.reltol))
            out.status = SolveStatus::optimal;
    }

    out.solve_seconds = elapsed();
    if (out.status == SolveStatus::numerical_limit && out.message.empty())
        out.message = "did not converge";
    return out;
}

} // namespace

} // namespace airs::conic
