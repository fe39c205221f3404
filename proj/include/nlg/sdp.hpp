// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "nlg/numerics.hpp"

namespace nlg {

// Linear matrix inequality form over real variables z:
//   maximize c.z   subject to   S_k(z) = F0[k] + sum_j z_j * F[j][k]  psd
// with Hermitian blocks. The Lagrangian dual is
//   minimize sum_k tr(F0[k] X_k)   s.t.  sum_k tr(F[j][k] X_k) = -c_j, X psd.
struct SdpProblem {
    std::vector<double> c;
    std::vector<CMatrix> f0;                // one per block
    std::vector<std::vector<CMatrix>> fj;   // [variable][block]
};

struct SdpOptions {
    double tol = 1e-7;
    int max_newton = 600;
    // Strictly feasible start; when absent a phase-1 problem finds one.
    std::optional<std::vector<double>> z0;
};

struct SdpSolution {
    double value = 0.0;
    std::vector<double> z;
    std::vector<CMatrix> s_blocks;  // S(z) at the optimum
    std::vector<CMatrix> x_blocks;  // dual certificate X = mu * S(z)^-1
    double gap = 0.0;               // tr(X S) = mu * total dimension
    double dual_residual = 0.0;     // max_j |c_j + sum_k tr(X_k F_jk)|
    int newton_steps = 0;
};

// Two-phase log-barrier path following. Throws SolverFailure when no
// strictly feasible point exists or centering stalls.
SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

// Dense LP: maximize c.p s.t. A p = b, p >= 0, via log-barrier Newton on the
// equality-eliminated coordinates. Independent of solve_sdp by design; the
// tests cross-check one against the other.
struct LpProblem {
    std::vector<double> c;
    std::vector<std::vector<double>> a_eq;
    std::vector<double> b_eq;
    // Strictly positive feasible start (required).
    std::vector<double> p0;
};

struct LpSolution {
    double value = 0.0;
    std::vector<double> p;
    double gap = 0.0;
};

LpSolution solve_lp(const LpProblem& problem, double tol = 1e-9);

// Nullspace machinery shared by the LP/NPA reductions: returns an
// orthonormal basis (columns) of {z : E z = 0} and a particular solution of
// E z = d via the pseudo-inverse. Real matrices carried as CMatrix.
struct AffineSolveResult {
    std::vector<double> particular;
    std::vector<std::vector<double>> nullspace;  // basis vectors
    double residual = 0.0;                       // ||E*particular - d||
};
AffineSolveResult solve_affine(const std::vector<std::vector<double>>& e,
                               const std::vector<double>& d);

}  // namespace nlg
