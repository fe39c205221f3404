// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "nlg/errors.hpp"

namespace nlg {

// Two-player nonlocal game: question distribution mu over nA x nB and a
// binary rule tensor V indexed [x][y][a][b]. Questions and answers are
// 0-based index ranges; any labeling is external.
struct Game {
    std::string name;
    std::size_t nA = 0, nB = 0, kA = 0, kB = 0;
    std::vector<double> mu;   // nA*nB, row-major
    std::vector<int> v;       // nA*nB*kA*kB

    double& mu_at(std::size_t x, std::size_t y) { return mu[x * nB + y]; }
    double mu_at(std::size_t x, std::size_t y) const { return mu[x * nB + y]; }
    int& v_at(std::size_t x, std::size_t y, std::size_t a, std::size_t b) {
        return v[((x * nB + y) * kA + a) * kB + b];
    }
    int v_at(std::size_t x, std::size_t y, std::size_t a, std::size_t b) const {
        return v[((x * nB + y) * kA + a) * kB + b];
    }
    void validate() const;  // throws SchemaError on bad mu/V
};

// The tensor p(a,b|x,y); the common currency between all strategy models.
struct Correlation {
    std::size_t nA = 0, nB = 0, kA = 0, kB = 0;
    std::vector<double> p;  // [x][y][a][b]

    Correlation() = default;
    Correlation(std::size_t nA_, std::size_t nB_, std::size_t kA_, std::size_t kB_)
        : nA(nA_), nB(nB_), kA(kA_), kB(kB_), p(nA_ * nB_ * kA_ * kB_, 0.0) {}
    double& at(std::size_t x, std::size_t y, std::size_t a, std::size_t b) {
        return p[((x * nB + y) * kA + a) * kB + b];
    }
    double at(std::size_t x, std::size_t y, std::size_t a, std::size_t b) const {
        return p[((x * nB + y) * kA + a) * kB + b];
    }
    void validate(double tol = 1e-9) const;
};

struct NonsignalingReport {
    double bob_to_alice_max_violation = 0.0;
    double alice_to_bob_max_violation = 0.0;
};

double winning_probability(const Game& g, const Correlation& p);
NonsignalingReport check_nonsignaling(const Correlation& p, double tol = 1e-9);

// Built-in games: "chsh", "magic-square", and "xor:<nA>x<nB>:<bits>"
// (row-major target bits t(x,y); win iff a xor b = t).
Game catalog(const std::string& name);

namespace magic_square {
// Row triples have even parity; column triples have odd parity exactly for
// column 2 (matching the operator square's signs). Answers carry the two
// free bits; the third bit is the parity completion.
std::array<int, 3> alice_triple(std::size_t a);
std::array<int, 3> bob_triple(std::size_t b, std::size_t y);
}  // namespace magic_square

}  // namespace nlg
