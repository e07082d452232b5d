// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "airs/channel.hpp"
#include "airs/conic_problem.hpp"
#include "airs/conic_solver.hpp"
#include "airs/config.hpp"
#include "airs/metrics.hpp"
#include "airs/rng.hpp"

namespace airs::ia {

// Affine global minorant of a convex quadratic, f(X) >= Re<grad, X> + constant
// with equality at the expansion point.
struct AffineFunctional {
    MatC grad;
    double constant = 0.0;
    double eval(const MatC& x) const { return frobenius_inner(grad, x) + constant; }
};

// Minorant of Tr(Psi^H Psi) = ||psi||^2 at psi_j (diagonal Psi).
AffineFunctional linearize_psi_quadratic(const VecC& psi_j);

// Minorant of Tr(H^H Z^H G^H G Z H) = ||G Z H||_F^2 at z_j, H = h h^H.
AffineFunctional linearize_z_quadratic(const MatC& z_j, const MatC& g, const VecC& h);

// Minorant of Tr(W G^H G W^H) at Hermitian w_j.
AffineFunctional linearize_w_quadratic(const MatC& w_j, const MatC& g);

// One expansion point of the inner-approximation loop. At a consistent point
// z[r] = w[r] G^H Psi^H, u[r] = w[r] G^H G w[r]^H, v[r] = Psi Psi^H.
struct ExpansionPoint {
    std::vector<MatC> w; // K Hermitian N_T x N_T
    VecC psi;            // M diagonal entries
    std::vector<MatC> z; // K, N_T x M
    std::vector<MatC> u; // K Hermitian N_T x N_T
    std::vector<MatC> v; // K Hermitian M x M
    double objective = 0.0;
    int iteration = 0;

    // Rebuilds the auxiliaries from (w, psi) so the point is exactly consistent.
    static ExpansionPoint consistent(std::vector<MatC> w, VecC psi, const MatC& g);
    double consistency_error(const MatC& g) const; // max_r ||z_r - w_r G^H Psi^H||_F
};

// Residuals of the trace-reformulated problem (<= 0 when feasible):
// C1: gamma*(interference + dynamic noise + sigma_n^2) - desired signal
double c1_residual(const ChannelSet& ch, const SystemConfig& cfg, const std::vector<MatC>& w,
                   const VecC& psi, int k);
// positive-part scale of the same expression, for relative comparisons
double c1_residual_scale(const ChannelSet& ch, const SystemConfig& cfg,
                         const std::vector<MatC>& w, const VecC& psi, int k);
// C2: IRS output power - p_a
double c2_residual(const ChannelSet& ch, const SystemConfig& cfg, const std::vector<MatC>& w,
                   const VecC& psi);

// Convex restriction of C1 for user k around an expansion point. The
// squared-norm terms stay quadratic (second-order-cone representable), the
// concave pieces are replaced by their tangent bounds; value <= 0 is the
// constraint.
struct C1barData {
    int k = 0;
    double cst = 0.0;
    std::vector<MatC> w_grad; // Re<w_grad[r], W_r>
    VecC psi_grad;            // Re<psi_grad, psi>
    std::vector<MatC> z_grad; // Re<z_grad[r], Z_r>
    double coef_interf = 0.0; // * ||Psi^H + G Z_r H_k||_F^2 for each r != k
    double coef_dyn = 0.0;    // * sum_m |h_km|^2 |psi_m|^2
    double coef_zq = 0.0;     // * ||G Z_k H_k||_F^2

    double eval(const std::vector<MatC>& w, const VecC& psi, const std::vector<MatC>& z,
                const ChannelSet& ch) const;
};

C1barData build_c1bar(const ChannelSet& ch, const SystemConfig& cfg, const ExpansionPoint& ep,
                      int k);

// Convex restriction of the IRS power budget around an expansion point.
struct C2barData {
    double cst = 0.0; // includes -p_a
    VecC psi_grad;
    std::vector<MatC> z_grad;
    double coef_norm = 0.0; // * ||Psi^H + G Z_k||_F^2 for each k
    double coef_psi = 0.0;  // * ||psi||^2

    double eval(const VecC& psi, const std::vector<MatC>& z, const ChannelSet& ch) const;
};

C2barData build_c2bar(const ChannelSet& ch, const SystemConfig& cfg, const ExpansionPoint& ep);

// Affine surrogate of the trace cap Tr(U_r) <= Tr(W_r G^H G W_r^H):
// value = Tr(U_r) - minorant(W_r) <= 0.
struct C6barData {
    int r = 0;
    AffineFunctional w_minorant;
    double eval(const MatC& u_r, const MatC& w_r) const {
        return u_r.trace().real() - w_minorant.eval(w_r);
    }
};

C6barData build_c6bar(const ExpansionPoint& ep, const MatC& g, int r);

// Trust slack on the two difference-of-convex trace caps (the U_r cap and the
// V_r cap). With zero slack the exact caps pin the subproblem to the
// expansion point; the slack admits a controlled neighborhood and the outer
// loop only accepts candidates that verify against the original constraints.
struct TrustRegion {
    double delta = 0.5; // relative slack on Tr U_r
    double theta = 0.5; // relative slack on Tr V_r
};

struct Subproblem {
    conic::Problem problem;
    int blk_w0 = 0, blk_psi = 0, blk_z0 = 0, blk_u0 = 0, blk_v0 = 0, blk_epi = 0;
    int epi_count = 0; // (K+1)^2 by construction
};

// Assembles the convex subproblem: objective sum_k Tr(W_k), constraints
// C1bar (all k), C2bar, W_k psd, the 3x3 block LMI per user, the linearized
// trace cap per user, and the V trace cap.
Subproblem build_subproblem(const ChannelSet& ch, const SystemConfig& cfg,
                            const ExpansionPoint& ep, const TrustRegion& trust);

struct IterRecord {
    int iteration = 0;
    double objective_w = 0.0;
    double max_violation = 0.0; // against the original constraints
    std::string solver_status;
    double seconds = 0.0;
};

struct ConvergenceTrace {
    std::vector<IterRecord> records;
    void write_csv(std::ostream& os) const;
};

struct IaSettings {
    double margin = 0.05;       // initialization inflation (1 + margin)
    TrustRegion trust0;         // initial trust slack
    double trust_grow = 2.0;
    double trust_shrink = 8.0;
    double trust_max = 2.0;
    double trust_min = 1e-9;
    int max_attempts = 6;       // subproblem retries per outer iteration
    double accept_tol = 1e-8;   // relative feasibility margin for accepting an iterate
    double rank_warn = 1e-4;
    conic::SolverSettings conic = subproblem_solver_defaults();

    static conic::SolverSettings subproblem_solver_defaults() {
        conic::SolverSettings s;
        s.max_iter = 60; // the accept gate tolerates plateaued subproblem solves
        return s;
    }
};

std::optional<ExpansionPoint> initialize(const ChannelSet& ch, const SystemConfig& cfg, Rng& rng,
                                         const IaSettings& st, std::string* why = nullptr);

struct IterationOutcome {
    bool accepted = false;
    ExpansionPoint next;
    conic::SolveStatus solver_status = conic::SolveStatus::numerical_limit;
    double seconds = 0.0;
    std::string note;
};

// One subproblem solve + candidate extraction + verification against the
// original constraints. Does not mutate the expansion point.
IterationOutcome solve_iteration(const ChannelSet& ch, const SystemConfig& cfg,
                                 const ExpansionPoint& ep, const TrustRegion& trust,
                                 const IaSettings& st);

// Principal-eigenpair extraction w_k = sqrt(lambda1) u1 plus the rank-one
// certificates lambda2/lambda1.
std::pair<std::vector<VecC>, std::vector<double>> extract_beamformers(const std::vector<MatC>& w);

enum class RunStatus { converged, max_iter, init_infeasible, stalled, solver_failure };

std::string to_string(RunStatus s);

struct RunResult {
    RunStatus status = RunStatus::solver_failure;
    bool feasible = false; // final solution passes the original constraints at 1e-6
    Solution solution;
    ConvergenceTrace trace;
    std::vector<double> rank_ratios;
    int iterations = 0;
    double bs_power_w = 0.0;
    double seconds = 0.0;
    std::string message;
};

// Full pipeline on physical channels: conditioning rescale, feasible
// initialization, the iterative loop with the relative-decrease stopping
// rule, rank-one extraction, and the final feasibility check.
RunResult run(const ChannelSet& ch, const SystemConfig& cfg, Rng& rng, const IaSettings& st = {});

} // namespace airs::ia
