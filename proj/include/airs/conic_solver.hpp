// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "airs/conic_problem.hpp"

namespace airs::conic {

enum class SolveStatus { optimal, infeasible, unbounded, numerical_limit };

std::string to_string(SolveStatus s);

struct SolverSettings {
    double feastol = 1e-8;
    double abstol = 1e-8;
    double reltol = 1e-8;
    int max_iter = 100;
    bool verbose = false;
};

struct ConicSolution {
    SolveStatus status = SolveStatus::numerical_limit;
    VecR x;          // primal variables (valid for status == optimal)
    VecR s, z;       // cone slack and dual (cone-space coordinates)
    double objective = 0.0;
    int iterations = 0;
    double solve_seconds = 0.0;
    double pres = 0.0, dres = 0.0, gap = 0.0; // final scaled residuals
    std::string message;
};

// Primal-dual interior-point method on the homogeneous self-dual embedding
// with Nesterov-Todd scaling and a Mehrotra predictor-corrector, over
// products of nonnegative, second-order, and PSD cones. An "optimal" status
// is only reported after an independent recomputation of the cone residuals
// from (x, s); solutions whose residuals exceed 10x the tolerance are
// demoted to numerical_limit.
ConicSolution solve(const StandardForm& sf, const SolverSettings& settings = {});

} // namespace airs::conic
