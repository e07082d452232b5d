// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <sstream>

#include "airs/conic_problem.hpp"
#include "airs/conic_solver.hpp"
#include "airs/rng.hpp"

using namespace airs;
using namespace airs::conic;

TEST_CASE("LP corner: min x s.t. x >= 3") {
    Problem p;
    const int b = p.add_scalar_block("x", 1);
    const int x = p.scalar_index(b, 0);
    p.add_objective(x, 1.0);
    Lin e = Lin::var(x);
    e.cst = -3.0;
    p.add_nonneg(e); // x - 3 >= 0
    auto sol = solve(p.assemble());
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.x(0) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("contradictory box is infeasible") {
    Problem p;
    const int b = p.add_scalar_block("x", 1);
    const int x = p.scalar_index(b, 0);
    p.add_objective(x, 1.0);
    Lin ge1 = Lin::var(x);
    ge1.cst = -1.0;
    p.add_nonneg(ge1); // x >= 1
    Lin le0 = Lin::var(x, -1.0);
    p.add_nonneg(le0); // -x >= 0
    auto sol = solve(p.assemble());
    CHECK(sol.status == SolveStatus::infeasible);
}

TEST_CASE("unbounded direction is detected") {
    Problem p;
    const int b = p.add_scalar_block("x", 1);
    const int x = p.scalar_index(b, 0);
    p.add_objective(x, 1.0);
    p.add_nonneg(Lin::var(x, -1.0)); // -x >= 0, objective goes to -inf
    auto sol = solve(p.assemble());
    CHECK(sol.status == SolveStatus::unbounded);
}

TEST_CASE("SOC: distance to a constant point") {
    Problem p;
    const int b = p.add_scalar_block("t", 1);
    const int t = p.scalar_index(b, 0);
    p.add_objective(t, 1.0);
    std::vector<Lin> tail{Lin(3.0), Lin(4.0)};
    p.add_soc(Lin::var(t), tail);
    auto sol = solve(p.assemble());
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.x(0) == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("quadratic epigraph under a linear bound") {
    // min t s.t. t >= x^2, x >= 2  ->  t = 4
    Problem p;
    const int b = p.add_scalar_block("v", 2);
    const int t = p.scalar_index(b, 0);
    const int x = p.scalar_index(b, 1);
    p.add_objective(t, 1.0);
    p.add_quad_epigraph(t, {Lin::var(x)});
    Lin e = Lin::var(x);
    e.cst = -2.0;
    p.add_nonneg(e);
    auto sol = solve(p.assemble());
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.x(0) == doctest::Approx(4.0).epsilon(1e-5));
    CHECK(sol.x(1) == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("real PSD 2x2: min t with [[t,1],[1,t]] psd") {
    Problem p;
    const int b = p.add_scalar_block("t", 1);
    const int t = p.scalar_index(b, 0);
    p.add_objective(t, 1.0);
    CLin tt;
    tt.re = Lin::var(t);
    CLin one;
    one.re = Lin(1.0);
    p.add_psd_hermitian({{tt}, {one, tt}});
    auto sol = solve(p.assemble());
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("complex PSD 2x2: min t with [[t,-i],[i,t]] psd") {
    // eigenvalues are t -+ 1, so t* = 1
    Problem p;
    const int b = p.add_scalar_block("t", 1);
    const int t = p.scalar_index(b, 0);
    p.add_objective(t, 1.0);
    CLin tt;
    tt.re = Lin::var(t);
    CLin lower; // entry (1,0) = i
    lower.im = Lin(1.0);
    p.add_psd_hermitian({{tt}, {lower, tt}});
    auto sol = solve(p.assemble());
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Hermitian variable block: min Tr W s.t. W >= A") {
    Rng rng(5);
    MatC a(3, 3);
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) a(i, j) = rng.next_cgauss();
    a = hermitian_part(a);

    Problem p;
    const int wb = p.add_hermitian_block("W", 3);
    for (int i = 0; i < 3; ++i) p.add_objective(p.herm_diag_index(wb, i), 1.0);
    // W - A >= 0
    std::vector<std::vector<CLin>> lower(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j <= i; ++j) {
            CLin e = p.herm_entry(wb, i, j);
            e.re.cst -= a(i, j).real();
            if (i != j) e.im.cst -= a(i, j).imag();
            lower[i].push_back(e);
        }
    p.add_psd_hermitian(lower);
    auto sol = solve(p.assemble());
    REQUIRE(sol.status == SolveStatus::optimal);
    const MatC w = p.extract_hermitian(sol.x, wb);
    CHECK((w - a).cwiseAbs().maxCoeff() < 1e-5);
    CHECK(sol.objective == doctest::Approx(a.trace().real()).epsilon(1e-6));
}

TEST_CASE("assembly is deterministic") {
    auto build = [] {
        Problem p;
        const int b = p.add_scalar_block("x", 2);
        p.add_objective(p.scalar_index(b, 0), 1.0);
        Lin e = Lin::var(p.scalar_index(b, 0));
        e.add(p.scalar_index(b, 1), -2.0);
        e.cst = 1.5;
        p.add_nonneg(e);
        p.add_quad_epigraph(p.scalar_index(b, 0), {Lin::var(p.scalar_index(b, 1))});
        std::ostringstream os;
        p.dump(os);
        return os.str();
    };
    CHECK(build() == build());
}

TEST_CASE("solver determinism: identical problem, identical result") {
    auto run = [] {
        Problem p;
        const int b = p.add_scalar_block("t", 1);
        const int t = p.scalar_index(b, 0);
        p.add_objective(t, 1.0);
        std::vector<Lin> tail{Lin(1.0), Lin(2.0)};
        p.add_soc(Lin::var(t), tail);
        return solve(p.assemble());
    };
    auto a = run();
    auto b = run();
    REQUIRE(a.status == SolveStatus::optimal);
    CHECK(a.status == b.status);
    CHECK(a.objective == b.objective);
    CHECK(a.iterations == b.iterations);
}
