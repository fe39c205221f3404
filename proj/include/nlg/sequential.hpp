// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nlg/games.hpp"
#include "nlg/numerics.hpp"
#include "nlg/values.hpp"

namespace nlg {

// Single-player two-round strategy: subnormalized post-first-round states
// sigma_xa (sum_a tr sigma_xa = 1 per x) and Bob POVMs B_yb on the same
// space.
struct SequentialQuantumStrategy {
    std::size_t dim = 0, nA = 0, kA = 0, nB = 0, kB = 0;
    std::vector<CMatrix> sigma;               // [x*kA + a]
    std::vector<std::vector<CMatrix>> bob;    // [y][b]

    const CMatrix& sigma_at(std::size_t x, std::size_t a) const { return sigma[x * kA + a]; }
    CMatrix& sigma_at(std::size_t x, std::size_t a) { return sigma[x * kA + a]; }
    CMatrix sigma_x(std::size_t x) const;
    void validate(double tol = 1e-8) const;
    Correlation correlation() const;  // p(a,b|x,y) = tr(sigma_xa B_yb)
};

struct SequentialClassicalStrategy {
    std::size_t nA = 0, kA = 0, nB = 0, kB = 0, n_omega = 0;
    std::vector<double> paw;  // [x][a][omega]: p(a, omega | x)
    std::vector<double> qb;   // [omega][y][b]

    double paw_at(std::size_t x, std::size_t a, std::size_t w) const {
        return paw[(x * kA + a) * n_omega + w];
    }
    double qb_at(std::size_t w, std::size_t y, std::size_t b) const {
        return qb[(w * nB + y) * kB + b];
    }
    Correlation correlation() const;
};

// Noncommutative polynomial in the generators B_(y,b).
struct NCPolynomial {
    using Letter = std::pair<std::size_t, std::size_t>;  // (y, b)
    using Monomial = std::vector<Letter>;
    std::vector<std::pair<cplx, Monomial>> terms;

    static NCPolynomial monomial(Monomial word, cplx coeff = 1.0);
};

CMatrix eval_polynomial(const NCPolynomial& p, const std::vector<std::vector<CMatrix>>& bob,
                        std::size_t dim);

struct StrongNonsigReport {
    double max_residual = 0.0;
    NCPolynomial::Monomial witness;
    std::size_t x1 = 0, x2 = 0;
};

// max over x,x' and monomials of degree <= d of |tr(sigma_x W) - tr(sigma_x' W)|.
StrongNonsigReport strong_nonsig_residual(const SequentialQuantumStrategy& s, std::size_t degree);

// gamma(omega) := p(omega|x); requires the omega-marginals x-independent
// within tol.
ClassicalStrategy convert_classical(const SequentialClassicalStrategy& s, double tol);

// Purification + Uhlmann construction; requires sigma_x equal across x
// within trace-norm tol. Output lives on C^{kA * dim} (x) C^{dim}.
QuantumStrategy convert_purify(const SequentialQuantumStrategy& s, double tol);

struct AlgebraBlockDecomposition {
    struct Block {
        std::size_t n = 0, m = 0;   // C^n (x) C^m
        CMatrix isometry;           // dim x (n*m), columns ordered (i, j) -> i*m + j
    };
    std::vector<Block> blocks;
    double residual = 0.0;  // off-block leakage of the B_yb under the basis change
};

// Block-diagonalizes the *-algebra generated by {B_yb} and pinches sigma to
// sigma~ = (+)_i tr_m(P_i sigma P_i) (x) 1_m / m.
std::pair<AlgebraBlockDecomposition, SequentialQuantumStrategy> block_reduce(
    const SequentialQuantumStrategy& s, double tol);

// max_x tr(sigma_x {B_0, B_1}^2) with B_y = B_y0 - B_y1; needs nB = kB = 2.
double chsh_selftest_residual(const SequentialQuantumStrategy& s);

// Forward constructions.
SequentialQuantumStrategy sequential_from_commuting(const CommutingStrategy& s);
SequentialQuantumStrategy sequential_from_quantum(const QuantumStrategy& s);

// Linear basis of the *-algebra generated by {1} and the B_yb (numerical
// Burnside closure), and of its commutant. Exposed for tests.
std::vector<CMatrix> algebra_basis(const std::vector<std::vector<CMatrix>>& bob, std::size_t dim,
                                   double tol = 1e-10);
std::vector<CMatrix> commutant_hermitian_basis(const std::vector<std::vector<CMatrix>>& bob,
                                               std::size_t dim);

}  // namespace nlg
