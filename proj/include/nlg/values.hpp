// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "nlg/games.hpp"
#include "nlg/npa.hpp"
#include "nlg/numerics.hpp"

namespace nlg {

// Shared randomness omega, local response distributions.
struct ClassicalStrategy {
    std::size_t n_omega = 0, nA = 0, nB = 0, kA = 0, kB = 0;
    std::vector<double> gamma;  // n_omega
    std::vector<double> pa;     // [omega][x][a]
    std::vector<double> qb;     // [omega][y][b]

    double pa_at(std::size_t w, std::size_t x, std::size_t a) const {
        return pa[(w * nA + x) * kA + a];
    }
    double qb_at(std::size_t w, std::size_t y, std::size_t b) const {
        return qb[(w * nB + y) * kB + b];
    }
    Correlation correlation() const;
};

// Tensor-product strategy |psi> in C^dA (x) C^dB with per-setting POVMs.
struct QuantumStrategy {
    std::size_t dA = 0, dB = 0;
    std::vector<cplx> psi;                     // dA*dB
    std::vector<std::vector<CMatrix>> alice;   // [x][a], dA x dA
    std::vector<std::vector<CMatrix>> bob;     // [y][b], dB x dB

    Correlation correlation() const;
    void validate(double tol = 1e-8) const;
};

// Single Hilbert space, commuting POVM families.
struct CommutingStrategy {
    std::size_t d = 0;
    std::vector<cplx> psi;
    std::vector<std::vector<CMatrix>> alice;
    std::vector<std::vector<CMatrix>> bob;
    double commutation_residual = 0.0;

    Correlation correlation() const;
    double max_commutator_norm() const;
};

struct ClassicalValueResult {
    double value = 0.0;
    ClassicalStrategy strategy;  // deterministic, |Omega| = 1
    std::vector<std::size_t> alice_assignment;
    std::vector<std::size_t> bob_assignment;
};

// Exact maximum over deterministic strategies; ties resolved toward the
// lowest lexicographic (alice, bob) assignment index.
ClassicalValueResult classical_value(const Game& g);

double nonsignaling_value(const Game& g, double tol = 1e-9);
// The non-signaling LP's optimal correlation (used by the key-stealing
// adversary).
Correlation nonsignaling_optimal_correlation(const Game& g, double tol = 1e-9);

struct SeesawResult {
    double value = 0.0;
    QuantumStrategy strategy;
    std::vector<double> per_restart;  // best value per restart
};

SeesawResult seesaw_lower_bound(const Game& g, std::size_t d, std::size_t restarts,
                                std::size_t iters, std::uint64_t seed);

// Closed-form reference strategies used by the compiled-game provers and in
// tests.
QuantumStrategy chsh_optimal_strategy();
QuantumStrategy magic_square_perfect_strategy();

}  // namespace nlg
