// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "airs/linalg.hpp"
#include "airs/rng.hpp"

using namespace airs;

namespace {
MatC random_hermitian(Rng& rng, int n) {
    MatC a(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) a(i, j) = rng.next_cgauss();
    return hermitian_part(a);
}
} // namespace

TEST_CASE("embedding of the identity") {
    const MatC x = MatC::Identity(2, 2);
    const MatR e = hermitian_real_embedding(x);
    CHECK((e - MatR::Identity(4, 4)).norm() == doctest::Approx(0.0));
}

TEST_CASE("embedding doubles the spectrum") {
    // X = [[0, -i], [i, 0]] has eigenvalues +-1
    MatC x(2, 2);
    x << cplx(0, 0), cplx(0, -1), cplx(0, 1), cplx(0, 0);
    const MatR e = hermitian_real_embedding(x);
    Eigen::SelfAdjointEigenSolver<MatR> es(e, Eigen::EigenvaluesOnly);
    const VecR ev = es.eigenvalues();
    CHECK(ev(0) == doctest::Approx(-1.0));
    CHECK(ev(1) == doctest::Approx(-1.0));
    CHECK(ev(2) == doctest::Approx(1.0));
    CHECK(ev(3) == doctest::Approx(1.0));
}

TEST_CASE("embedding preserves definiteness") {
    Rng rng(7);
    MatC a(3, 3);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) a(i, j) = rng.next_cgauss();
    const MatC x = a * a.adjoint(); // PSD
    CHECK(is_psd(x));
    const VecR ev = hermitian_eigenvalues(x);
    const double lmin = ev(0);
    const MatC shifted = x - (lmin * 2.0 + 1e-6) * MatC::Identity(3, 3);
    CHECK_FALSE(is_psd(shifted, 1e-12));
}

TEST_CASE("embedding rejects bad input") {
    CHECK_THROWS_AS(hermitian_real_embedding(MatC::Random(2, 3)), std::invalid_argument);
    MatC x(2, 2);
    x << cplx(1, 0), cplx(1, 0), cplx(2, 0), cplx(1, 0); // not Hermitian
    CHECK_THROWS_AS(hermitian_real_embedding(x), std::invalid_argument);
}

TEST_CASE("embedding linearity and trace doubling") {
    Rng rng(11);
    const MatC x = random_hermitian(rng, 4);
    const MatC y = random_hermitian(rng, 4);
    const double a = 0.7, b = -1.3;
    const MatR lhs = hermitian_real_embedding(a * x + b * y);
    const MatR rhs = a * hermitian_real_embedding(x) + b * hermitian_real_embedding(y);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(hermitian_real_embedding(x).trace() ==
          doctest::Approx(2.0 * x.trace().real()).epsilon(1e-12));
}

TEST_CASE("PSD equivalence over random matrices") {
    Rng rng(13);
    for (int t = 0; t < 1000; ++t) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 4);
        const MatC x = random_hermitian(rng, n);
        const MatR e = hermitian_real_embedding(x);
        Eigen::SelfAdjointEigenSolver<MatR> es(e, Eigen::EigenvaluesOnly);
        const double l_embed = es.eigenvalues()(0);
        const double l_cplx = hermitian_eigenvalues(x)(0);
        CHECK(std::abs(l_embed - l_cplx) < 1e-10);
    }
}

TEST_CASE("rank_one_ratio basics") {
    Rng rng(17);
    VecC v(3);
    for (int i = 0; i < 3; ++i) v(i) = rng.next_cgauss();
    const MatC r1 = v * v.adjoint();
    CHECK(rank_one_ratio(r1) < 1e-12);

    CHECK(rank_one_ratio(MatC::Identity(2, 2)) == doctest::Approx(1.0));

    MatC d = MatC::Zero(3, 3);
    d(0, 0) = 4.0;
    d(1, 1) = 1.0;
    CHECK(rank_one_ratio(d) == doctest::Approx(0.25));

    CHECK(rank_one_ratio(MatC::Zero(2, 2)) == 0.0);

    MatC indef = MatC::Identity(2, 2);
    indef(1, 1) = -1.0;
    CHECK_THROWS_AS(rank_one_ratio(indef), std::invalid_argument);
}

TEST_CASE("principal eigenpair recovers a rank-one factor") {
    Rng rng(23);
    VecC v(4);
    for (int i = 0; i < 4; ++i) v(i) = rng.next_cgauss();
    const MatC w = v * v.adjoint();
    const auto [lam, u] = hermitian_principal_eigenpair(w);
    CHECK(lam == doctest::Approx(v.squaredNorm()));
    const VecC rec = std::sqrt(lam) * u;
    // equal up to a global phase
    const cplx phase = v.dot(rec) / std::abs(v.dot(rec));
    CHECK((rec - phase * v).norm() < 1e-9 * v.norm());
}
