// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>

namespace airs {

using cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using VecR = Eigen::VectorXd;

// Absolute tolerance for accepting a matrix as Hermitian; inputs within this
// band are symmetrized to absorb solver roundoff.
inline constexpr double kHermitianTol = 1e-12;

// Max entry-wise deviation from Hermitian symmetry, |X - X^H|_inf.
double hermitian_deviation(const MatC& x);

bool is_hermitian(const MatC& x, double tol = kHermitianTol);

// (X + X^H)/2
MatC hermitian_part(const MatC& x);

// Real embedding of a Hermitian matrix:
//   [[Re(X), -Im(X)], [Im(X), Re(X)]]
// The result is symmetric, PSD iff X is PSD, and carries each eigenvalue of X
// twice. Throws std::invalid_argument for non-square or non-Hermitian input.
MatR hermitian_real_embedding(const MatC& x, double tol = kHermitianTol);

// Eigenvalues of a Hermitian matrix, ascending. Computed with a symmetric
// eigensolver on the real embedding (each doubled eigenvalue reported once);
// no complex eigensolver is used anywhere in this project.
VecR hermitian_eigenvalues(const MatC& x);

// Principal eigenpair (largest eigenvalue) of a Hermitian matrix, via the
// real embedding. The returned vector has unit norm.
std::pair<double, VecC> hermitian_principal_eigenpair(const MatC& x);

// lambda_min(X) >= -tol * max(1, lambda_max)
bool is_psd(const MatC& x, double tol = 1e-9);

// lambda2/lambda1 for a Hermitian PSD matrix (two largest eigenvalues);
// 0 when lambda1 == 0. Throws for indefinite input.
double rank_one_ratio(const MatC& x, double psd_tol = 1e-9);

// Re Tr(A^H B)
double frobenius_inner(const MatC& a, const MatC& b);

} // namespace airs
