// SPDX-License-Identifier: Apache-2.0
#include "airs/linalg.hpp"

#include <stdexcept>

namespace airs {

double hermitian_deviation(const MatC& x) {
    if (x.rows() != x.cols()) return std::numeric_limits<double>::infinity();
    return (x - x.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const MatC& x, double tol) {
    return x.rows() == x.cols() && hermitian_deviation(x) <= tol;
}

MatC hermitian_part(const MatC& x) { return 0.5 * (x + x.adjoint()); }

MatR hermitian_real_embedding(const MatC& x, double tol) {
    if (x.rows() != x.cols())
        throw std::invalid_argument("hermitian_real_embedding: matrix must be square");
    if (!is_hermitian(x, tol))
        throw std::invalid_argument("hermitian_real_embedding: matrix is not Hermitian");
    const MatC h = hermitian_part(x);
    const auto n = h.rows();
    MatR e(2 * n, 2 * n);
    e.topLeftCorner(n, n) = h.real();
    e.topRightCorner(n, n) = -h.imag();
    e.bottomLeftCorner(n, n) = h.imag();
    e.bottomRightCorner(n, n) = h.real();
    return e;
}

VecR hermitian_eigenvalues(const MatC& x) {
    const MatR e = hermitian_real_embedding(x);
    Eigen::SelfAdjointEigenSolver<MatR> es(e, Eigen::EigenvaluesOnly);
    const VecR all = es.eigenvalues(); // ascending, each value doubled
    const auto n = x.rows();
    VecR out(n);
    for (Eigen::Index i = 0; i < n; ++i) out(i) = all(2 * i);
    return out;
}

std::pair<double, VecC> hermitian_principal_eigenpair(const MatC& x) {
    const MatR e = hermitian_real_embedding(x);
    Eigen::SelfAdjointEigenSolver<MatR> es(e);
    const auto n = x.rows();
    const double lam = es.eigenvalues()(2 * n - 1);
    const VecR v = es.eigenvectors().col(2 * n - 1); // unit norm in R^{2n}
    VecC w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = cplx(v(i), v(n + i));
    return {lam, w};
}

bool is_psd(const MatC& x, double tol) {
    const VecR ev = hermitian_eigenvalues(x);
    const double lmax = std::max(ev(ev.size() - 1), 0.0);
    return ev(0) >= -tol * std::max(1.0, lmax);
}

double rank_one_ratio(const MatC& x, double psd_tol) {
    const VecR ev = hermitian_eigenvalues(x); // ascending
    const auto n = ev.size();
    const double l1 = ev(n - 1);
    if (ev(0) < -psd_tol * std::max(1.0, l1))
        throw std::invalid_argument("rank_one_ratio: matrix is not PSD");
    if (l1 <= 0.0) return 0.0;
    if (n == 1) return 0.0;
    const double l2 = std::max(ev(n - 2), 0.0);
    return l2 / l1;
}

double frobenius_inner(const MatC& a, const MatC& b) {
    return (a.conjugate().cwiseProduct(b)).sum().real();
}

} // namespace airs
