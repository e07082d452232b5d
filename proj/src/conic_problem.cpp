// SPDX-License-Identifier: Apache-2.0
#include "airs/conic_problem.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace airs::conic {

Lin& Lin::operator+=(const Lin& o) {
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    cst += o.cst;
    return *this;
}

Lin& Lin::operator*=(double a) {
    for (auto& t : terms) t.second *= a;
    cst *= a;
    return *this;
}

void Lin::canonicalize() {
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<int, double>> out;
    out.reserve(terms.size());
    for (const auto& t : terms) {
        if (!out.empty() && out.back().first == t.first)
            out.back().second += t.second;
        else
            out.push_back(t);
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const auto& t) { return t.second == 0.0; }),
              out.end());
    terms = std::move(out);
}

double Lin::eval(const VecR& x) const {
    double v = cst;
    for (const auto& [i, c] : terms) v += c * x(i);
    return v;
}

CLin CLin::operator*(cplx a) const {
    // (re + i im)(ar + i ai) = (re*ar - im*ai) + i(re*ai + im*ar)
    CLin out;
    Lin t;
    t = re;
    t *= a.real();
    out.re += t;
    t = im;
    t *= -a.imag();
    out.re += t;
    t = re;
    t *= a.imag();
    out.im += t;
    t = im;
    t *= a.real();
    out.im += t;
    return out;
}

int svec_dim(int p) { return p * (p + 1) / 2; }

static int svec_index(int p, int i, int j) { // i >= j
    return j * p - j * (j - 1) / 2 + (i - j);
}

VecR svec(const MatR& s) {
    const int p = static_cast<int>(s.rows());
    VecR v(svec_dim(p));
    const double rt2 = std::sqrt(2.0);
    int idx = 0;
    for (int j = 0; j < p; ++j)
        for (int i = j; i < p; ++i) v(idx++) = (i == j) ? s(i, j) : rt2 * s(i, j);
    return v;
}

MatR smat(const VecR& v, int p) {
    MatR s(p, p);
    const double irt2 = 1.0 / std::sqrt(2.0);
    int idx = 0;
    for (int j = 0; j < p; ++j)
        for (int i = j; i < p; ++i) {
            const double val = (i == j) ? v(idx) : irt2 * v(idx);
            s(i, j) = val;
            s(j, i) = val;
            ++idx;
        }
    return s;
}

const Problem::BlockInfo& Problem::blk(int b) const {
    if (b < 0 || b >= static_cast<int>(blocks_.size()))
        throw std::invalid_argument("conic::Problem: bad block id");
    return blocks_[b];
}

int Problem::add_scalar_block(const std::string& name, int count) {
    blocks_.push_back({name, BlockKind::Scalars, next_var_, count, count, 1});
    next_var_ += count;
    return static_cast<int>(blocks_.size()) - 1;
}

int Problem::add_hermitian_block(const std::string& name, int n) {
    blocks_.push_back({name, BlockKind::Hermitian, next_var_, n * n, n, n});
    next_var_ += n * n;
    return static_cast<int>(blocks_.size()) - 1;
}

int Problem::add_complex_matrix_block(const std::string& name, int rows, int cols) {
    blocks_.push_back({name, BlockKind::ComplexMatrix, next_var_, 2 * rows * cols, rows, cols});
    next_var_ += 2 * rows * cols;
    return static_cast<int>(blocks_.size()) - 1;
}

int Problem::add_complex_diag_block(const std::string& name, int m) {
    blocks_.push_back({name, BlockKind::ComplexDiag, next_var_, 2 * m, m, 1});
    next_var_ += 2 * m;
    return static_cast<int>(blocks_.size()) - 1;
}

int Problem::block_by_name(const std::string& name) const {
    for (size_t i = 0; i < blocks_.size(); ++i)
        if (blocks_[i].name == name) return static_cast<int>(i);
    return -1;
}

int Problem::scalar_index(int b, int i) const { return blk(b).offset + i; }

// Hermitian layout, column-major lower triangle: for column j, the diagonal
// entry then (re, im) pairs for rows i > j.
static int herm_col_start(int n, int j) {
    // sum over columns c < j of (1 + 2*(n-1-c))
    return j + (2 * n - j - 1) * j; // j*1 + 2*(n-1)*j - 2*(j-1)j/2
}

int Problem::herm_diag_index(int b, int i) const {
    const auto& bi = blk(b);
    return bi.offset + herm_col_start(bi.rows, i);
}

int Problem::herm_re_index(int b, int i, int j) const {
    const auto& bi = blk(b);
    if (i < j) std::swap(i, j);
    return bi.offset + herm_col_start(bi.rows, j) + 1 + 2 * (i - j - 1);
}

int Problem::herm_im_index(int b, int i, int j) const {
    const auto& bi = blk(b);
    if (i < j) std::swap(i, j);
    return bi.offset + herm_col_start(bi.rows, j) + 2 + 2 * (i - j - 1);
}

int Problem::cm_re_index(int b, int r, int c) const {
    const auto& bi = blk(b);
    return bi.offset + 2 * (c * bi.rows + r);
}
int Problem::cm_im_index(int b, int r, int c) const { return cm_re_index(b, r, c) + 1; }
int Problem::cd_re_index(int b, int i) const { return blk(b).offset + 2 * i; }
int Problem::cd_im_index(int b, int i) const { return blk(b).offset + 2 * i + 1; }

CLin Problem::herm_entry(int b, int i, int j) const {
    CLin e;
    if (i == j) {
        e.re = Lin::var(herm_diag_index(b, i));
    } else {
        e.re = Lin::var(herm_re_index(b, i, j));
        e.im = Lin::var(herm_im_index(b, i, j), i > j ? 1.0 : -1.0);
    }
    return e;
}

CLin Problem::cm_entry(int b, int r, int c) const {
    CLin e;
    e.re = Lin::var(cm_re_index(b, r, c));
    e.im = Lin::var(cm_im_index(b, r, c));
    return e;
}

CLin Problem::cd_entry(int b, int i) const {
    CLin e;
    e.re = Lin::var(cd_re_index(b, i));
    e.im = Lin::var(cd_im_index(b, i));
    return e;
}

void Problem::add_objective(int var, double coef) { obj_.emplace_back(var, coef); }

void Problem::add_nonneg(Lin expr) {
    expr.canonicalize();
    nonneg_.push_back(std::move(expr));
}

void Problem::add_soc(Lin head, std::vector<Lin> tail) {
    head.canonicalize();
    for (auto& t : tail) t.canonicalize();
    socs_.push_back({std::move(head), std::move(tail)});
}

void Problem::add_quad_epigraph(int t_var, std::vector<Lin> u) {
    // t >= sum u_i^2  <=>  (t+1, t-1, 2u) in SOC
    Lin head = Lin::var(t_var);
    head.cst = 1.0;
    std::vector<Lin> tail;
    tail.reserve(u.size() + 1);
    Lin t0 = Lin::var(t_var);
    t0.cst = -1.0;
    tail.push_back(std::move(t0));
    for (auto& e : u) {
        e *= 2.0;
        tail.push_back(std::move(e));
    }
    add_soc(std::move(head), std::move(tail));
}

void Problem::add_psd_hermitian(const std::vector<std::vector<CLin>>& lower) {
    const int q = static_cast<int>(lower.size());
    PsdCon con;
    con.q = q;
    con.lower.resize(q);
    for (int i = 0; i < q; ++i) {
        if (static_cast<int>(lower[i].size()) != i + 1)
            throw std::invalid_argument("add_psd_hermitian: expected lower triangle rows of length i+1");
        con.lower[i] = lower[i];
        for (auto& e : con.lower[i]) {
            e.re.canonicalize();
            e.im.canonicalize();
        }
        if (!con.lower[i][i].im.terms.empty() || con.lower[i][i].im.cst != 0.0)
            throw std::invalid_argument("add_psd_hermitian: diagonal entries must be real");
    }
    psds_.push_back(std::move(con));
}

StandardForm Problem::assemble() const {
    StandardForm sf;
    sf.n = next_var_;
    sf.c = VecR::Zero(sf.n);
    for (const auto& [i, v] : obj_) sf.c(i) += v;

    // total cone dimension
    int m = static_cast<int>(nonneg_.size());
    sf.nonneg_dim = m;
    for (const auto& s : socs_) {
        sf.soc_dims.push_back(1 + static_cast<int>(s.tail.size()));
        m += sf.soc_dims.back();
    }
    for (const auto& p : psds_) {
        sf.psd_dims.push_back(2 * p.q);
        m += svec_dim(2 * p.q);
    }

    std::vector<Eigen::Triplet<double>> trips;
    sf.h = VecR::Zero(m);
    int row = 0;
    auto put = [&](int r, const Lin& e, double scale) {
        // s_r = scale * e(x) => h_r = scale*cst, G(r,i) = -scale*coef
        sf.h(r) += scale * e.cst;
        for (const auto& [i, v] : e.terms) trips.emplace_back(r, i, -scale * v);
    };

    for (const auto& e : nonneg_) put(row++, e, 1.0);
    for (const auto& s : socs_) {
        put(row++, s.head, 1.0);
        for (const auto& t : s.tail) put(row++, t, 1.0);
    }
    const double rt2 = std::sqrt(2.0);
    for (const auto& p : psds_) {
        const int q = p.q;
        const int pdim = 2 * q;
        // lower-triangle complex entry, with Hermitian sign handling
        auto centry = [&](int i, int j) -> const CLin& { return p.lower[std::max(i, j)][std::min(i, j)]; };
        auto re_of = [&](int i, int j) { return centry(i, j).re; };
        auto im_of = [&](int i, int j, double& sign) {
            sign = (i >= j) ? 1.0 : -1.0; // Im H_ij = -Im H_ji
            return centry(i, j).im;
        };
        // E = [[Re, -Im], [Im, Re]]; emit svec (column-major lower) rows.
        for (int J = 0; J < pdim; ++J)
            for (int I = J; I < pdim; ++I) {
                const double scale = (I == J) ? 1.0 : rt2;
                const int r = row + svec_index(pdim, I, J);
                if (I < q && J < q) {
                    put(r, re_of(I, J), scale);
                } else if (I >= q && J < q) {
                    const int i = I - q, j = J;
                    if (i == j) continue; // Im diagonal is zero
                    double sign;
                    const Lin& e = im_of(i, j, sign);
                    put(r, e, scale * sign);
                } else { // both >= q
                    put(r, re_of(I - q, J - q), scale);
                }
            }
        row += svec_dim(pdim);
    }

    // deterministic duplicate combination
    std::sort(trips.begin(), trips.end(), [](const auto& a, const auto& b) {
        return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
    });
    sf.G.resize(m, sf.n);
    sf.G.setFromTriplets(trips.begin(), trips.end());
    sf.G.makeCompressed();
    return sf;
}

void Problem::dump(std::ostream& os) const {
    const StandardForm sf = assemble();
    os << "airs-conic-v1\n";
    os << "vars " << sf.n << "\n";
    int obj_nnz = 0;
    for (int i = 0; i < sf.n; ++i)
        if (sf.c(i) != 0.0) ++obj_nnz;
    os << "objective " << obj_nnz << "\n";
    os.precision(17);
    for (int i = 0; i < sf.n; ++i)
        if (sf.c(i) != 0.0) os << i << " " << sf.c(i) << "\n";
    os << "nonneg " << sf.nonneg_dim << "\n";
    os << "soc " << sf.soc_dims.size();
    for (int d : sf.soc_dims) os << " " << d;
    os << "\n";
    os << "psd " << sf.psd_dims.size();
    for (int d : sf.psd_dims) os << " " << d;
    os << "\n";
    os << "G " << sf.G.rows() << " " << sf.n << " " << sf.G.nonZeros() << "\n";
    for (int r = 0; r < sf.G.outerSize(); ++r)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(sf.G, r); it; ++it)
            os << r << " " << it.col() << " " << it.value() << "\n";
    int h_nnz = 0;
    for (Eigen::Index i = 0; i < sf.h.size(); ++i)
        if (sf.h(i) != 0.0) ++h_nnz;
    os << "h " << sf.h.size() << " " << h_nnz << "\n";
    for (Eigen::Index i = 0; i < sf.h.size(); ++i)
        if (sf.h(i) != 0.0) os << i << " " << sf.h(i) << "\n";
}

double Problem::extract_scalar(const VecR& x, int b, int i) const { return x(scalar_index(b, i)); }

MatC Problem::extract_hermitian(const VecR& x, int b) const {
    const auto& bi = blk(b);
    if (bi.kind != BlockKind::Hermitian) throw std::invalid_argument("extract_hermitian: wrong kind");
    const int n = bi.rows;
    MatC out(n, n);
    for (int j = 0; j < n; ++j) {
        out(j, j) = x(herm_diag_index(b, j));
        for (int i = j + 1; i < n; ++i) {
            const cplx v(x(herm_re_index(b, i, j)), x(herm_im_index(b, i, j)));
            out(i, j) = v;
            out(j, i) = std::conj(v);
        }
    }
    return out;
}

MatC Problem::extract_complex_matrix(const VecR& x, int b) const {
    const auto& bi = blk(b);
    if (bi.kind != BlockKind::ComplexMatrix) throw std::invalid_argument("extract_complex_matrix: wrong kind");
    MatC out(bi.rows, bi.cols);
    for (int c = 0; c < bi.cols; ++c)
        for (int r = 0; r < bi.rows; ++r)
            out(r, c) = cplx(x(cm_re_index(b, r, c)), x(cm_im_index(b, r, c)));
    return out;
}

VecC Problem::extract_complex_diag(const VecR& x, int b) const {
    const auto& bi = blk(b);
    if (bi.kind != BlockKind::ComplexDiag) throw std::invalid_argument("extract_complex_diag: wrong kind");
    VecC out(bi.rows);
    for (int i = 0; i < bi.rows; ++i) out(i) = cplx(x(cd_re_index(b, i)), x(cd_im_index(b, i)));
    return out;
}

} // namespace airs::conic
