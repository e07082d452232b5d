// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Sparse>
#include <iosfwd>
#include <string>
#include <vector>

#include "airs/linalg.hpp"

namespace airs::conic {

// Sparse real affine functional over the catalog's scalar variables.
struct Lin {
    std::vector<std::pair<int, double>> terms;
    double cst = 0.0;

    Lin() = default;
    explicit Lin(double c) : cst(c) {}
    static Lin var(int idx, double coef = 1.0) {
        Lin e;
        e.terms.emplace_back(idx, coef);
        return e;
    }
    void add(int idx, double coef) {
        if (coef != 0.0) terms.emplace_back(idx, coef);
    }
    Lin& operator+=(const Lin& o);
    Lin& operator*=(double a);
    // combine duplicate indices, sort by index, drop zeros
    void canonicalize();
    double eval(const VecR& x) const;
};

// Complex affine scalar.
struct CLin {
    Lin re, im;
    CLin conj() const {
        CLin c{re, im};
        c.im *= -1.0;
        return c;
    }
    CLin& operator+=(const CLin& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    CLin operator*(cplx a) const; // complex-constant times affine
};

// Solver-facing standard form:
//   minimize    c'x
//   subject to  s = h - G x,  s in K
// with K = R+^nonneg x SOC(soc_dims) x PSD(psd_dims), PSD blocks in scaled
// svec coordinates (sqrt(2) off-diagonals, so plain dot products are trace
// inner products). psd_dims are the REAL symmetric sizes (a Hermitian q x q
// constraint embeds as 2q).
struct StandardForm {
    int n = 0;
    VecR c;
    Eigen::SparseMatrix<double, Eigen::RowMajor> G;
    VecR h;
    int nonneg_dim = 0;
    std::vector<int> soc_dims;
    std::vector<int> psd_dims;
};

// svec helpers over real symmetric matrices (column-major lower triangle,
// off-diagonals scaled by sqrt(2)).
int svec_dim(int p);
VecR svec(const MatR& s);
MatR smat(const VecR& v, int p);

// Variable catalog + constraint list for one convex subproblem. Hermitian and
// complex blocks are parametrized by their free real entries; diagonal or
// Hermitian structure is never encoded as constraints. Assembly order is the
// insertion order within each cone family, so identical input produces
// byte-identical standard forms.
class Problem {
  public:
    enum class BlockKind { Scalars, Hermitian, ComplexMatrix, ComplexDiag };
    struct BlockInfo {
        std::string name;
        BlockKind kind;
        int offset; // first scalar index
        int count;  // number of real scalars
        int rows, cols;
    };

    int add_scalar_block(const std::string& name, int count);
    int add_hermitian_block(const std::string& name, int n);
    int add_complex_matrix_block(const std::string& name, int rows, int cols);
    int add_complex_diag_block(const std::string& name, int m);

    int num_vars() const { return next_var_; }
    const std::vector<BlockInfo>& blocks() const { return blocks_; }
    int block_by_name(const std::string& name) const; // -1 when absent

    // scalar index accessors
    int scalar_index(int blk, int i) const;
    int herm_diag_index(int blk, int i) const;
    int herm_re_index(int blk, int i, int j) const; // i != j
    int herm_im_index(int blk, int i, int j) const; // sign: entry (i,j), i>j
    int cm_re_index(int blk, int r, int c) const;
    int cm_im_index(int blk, int r, int c) const;
    int cd_re_index(int blk, int i) const;
    int cd_im_index(int blk, int i) const;

    // complex affine views of block entries
    CLin herm_entry(int blk, int i, int j) const;
    CLin cm_entry(int blk, int r, int c) const;
    CLin cd_entry(int blk, int i) const;

    void add_objective(int var, double coef);

    void add_nonneg(Lin expr);                        // expr(x) >= 0
    void add_soc(Lin head, std::vector<Lin> tail);    // head >= ||tail||
    void add_quad_epigraph(int t_var, std::vector<Lin> u); // t >= sum_i u_i(x)^2
    // Hermitian PSD constraint from the lower triangle (entries[i][j], i>=j).
    // Lowered through the real embedding to a PSD block of size 2q.
    void add_psd_hermitian(const std::vector<std::vector<CLin>>& lower);

    StandardForm assemble() const;

    // Plain-text interchange dump (cones, dimensions, sparse triplets).
    void dump(std::ostream& os) const;

    // primal extraction
    double extract_scalar(const VecR& x, int blk, int i) const;
    MatC extract_hermitian(const VecR& x, int blk) const;
    MatC extract_complex_matrix(const VecR& x, int blk) const;
    VecC extract_complex_diag(const VecR& x, int blk) const;

  private:
    struct SocCon {
        Lin head;
        std::vector<Lin> tail;
    };
    struct PsdCon {
        int q; // complex side
        std::vector<std::vector<CLin>> lower;
    };

    std::vector<BlockInfo> blocks_;
    int next_var_ = 0;
    std::vector<std::pair<int, double>> obj_;
    std::vector<Lin> nonneg_;
    std::vector<SocCon> socs_;
    std::vector<PsdCon> psds_;

    const BlockInfo& blk(int b) const;
};

} // namespace airs::conic
