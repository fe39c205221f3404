// SPDX-License-Identifier: Apache-2.0
#include "nlg/games.hpp"

#include <array>
#include <cmath>
#include <cstdlib>

namespace nlg {

void Game::validate() const {
    if (nA == 0 || nB == 0 || kA == 0 || kB == 0) throw SchemaError("zero-sized question/answer set");
    if (mu.size() != nA * nB) throw SchemaError("mu shape");
    if (v.size() != nA * nB * kA * kB) throw SchemaError("V shape");
    double sum = 0.0;
    for (double m : mu) {
        if (!(m >= 0.0)) throw SchemaError("negative or non-finite mu entry");
        sum += m;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw SchemaError("mu does not sum to 1");
    for (int x : v)
        if (x != 0 && x != 1) throw SchemaError("V entries must be 0/1");
}

void Correlation::validate(double tol) const {
    if (p.size() != nA * nB * kA * kB) throw SchemaError("correlation shape");
    for (double x : p)
        if (x < -1e-12 || !std::isfinite(x)) throw SchemaError("negative correlation entry");
    for (std::size_t x = 0; x < nA; ++x)
        for (std::size_t y = 0; y < nB; ++y) {
            double s = 0.0;
            for (std::size_t a = 0; a < kA; ++a)
                for (std::size_t b = 0; b < kB; ++b) s += at(x, y, a, b);
            if (std::abs(s - 1.0) > tol) throw SchemaError("correlation not normalized");
        }
}

double winning_probability(const Game& g, const Correlation& p) {
    if (g.nA != p.nA || g.nB != p.nB || g.kA != p.kA || g.kB != p.kB)
        throw DimensionMismatch("game vs correlation shape");
    double w = 0.0;
    for (std::size_t x = 0; x < g.nA; ++x)
        for (std::size_t y = 0; y < g.nB; ++y) {
            const double m = g.mu_at(x, y);
            if (m == 0.0) continue;
            for (std::size_t a = 0; a < g.kA; ++a)
                for (std::size_t b = 0; b < g.kB; ++b)
                    if (g.v_at(x, y, a, b)) w += m * p.at(x, y, a, b);
        }
    return w;
}

NonsignalingReport check_nonsignaling(const Correlation& p, double tol) {
    (void)tol;
    NonsignalingReport r;
    // Bob -> Alice: Alice's marginal must not depend on y.
    for (std::size_t x = 0; x < p.nA; ++x)
        for (std::size_t a = 0; a < p.kA; ++a)
            for (std::size_t y = 0; y + 1 < p.nB; ++y)
                for (std::size_t y2 = y + 1; y2 < p.nB; ++y2) {
                    double s1 = 0.0, s2 = 0.0;
                    for (std::size_t b = 0; b < p.kB; ++b) {
                        s1 += p.at(x, y, a, b);
                        s2 += p.at(x, y2, a, b);
                    }
                    r.bob_to_alice_max_violation =
                        std::max(r.bob_to_alice_max_violation, std::abs(s1 - s2));
                }
    // Alice -> Bob: Bob's marginal must not depend on x.
    for (std::size_t y = 0; y < p.nB; ++y)
        for (std::size_t b = 0; b < p.kB; ++b)
            for (std::size_t x = 0; x + 1 < p.nA; ++x)
                for (std::size_t x2 = x + 1; x2 < p.nA; ++x2) {
                    double s1 = 0.0, s2 = 0.0;
                    for (std::size_t a = 0; a < p.kA; ++a) {
                        s1 += p.at(x, y, a, b);
                        s2 += p.at(x2, y, a, b);
                    }
                    r.alice_to_bob_max_violation =
                        std::max(r.alice_to_bob_max_violation, std::abs(s1 - s2));
                }
    return r;
}

namespace magic_square {

std::array<int, 3> alice_triple(std::size_t a) {
    const int a0 = static_cast<int>(a & 1u);
    const int a1 = static_cast<int>((a >> 1) & 1u);
    return {a0, a1, a0 ^ a1};
}

std::array<int, 3> bob_triple(std::size_t b, std::size_t y) {
    const int b0 = static_cast<int>(b & 1u);
    const int b1 = static_cast<int>((b >> 1) & 1u);
    const int parity = (y == 2) ? 1 : 0;
    return {b0, b1, b0 ^ b1 ^ parity};
}

}  // namespace magic_square

namespace {

Game make_xor_game(std::size_t nA, std::size_t nB, const std::vector<int>& target) {
    Game g;
    g.name = "xor";
    g.nA = nA;
    g.nB = nB;
    g.kA = g.kB = 2;
    g.mu.assign(nA * nB, 1.0 / static_cast<double>(nA * nB));
    g.v.assign(nA * nB * 4, 0);
    for (std::size_t x = 0; x < nA; ++x)
        for (std::size_t y = 0; y < nB; ++y)
            for (std::size_t a = 0; a < 2; ++a)
                for (std::size_t b = 0; b < 2; ++b)
                    g.v_at(x, y, a, b) = (static_cast<int>(a ^ b) == target[x * nB + y]) ? 1 : 0;
    return g;
}

Game make_magic_square() {
    Game g;
    g.name = "magic-square";
    g.nA = g.nB = 3;
    g.kA = g.kB = 4;
    g.mu.assign(9, 1.0 / 9.0);
    g.v.assign(9 * 16, 0);
    for (std::size_t x = 0; x < 3; ++x)
        for (std::size_t y = 0; y < 3; ++y)
            for (std::size_t a = 0; a < 4; ++a)
                for (std::size_t b = 0; b < 4; ++b) {
                    const auto at = magic_square::alice_triple(a);
                    const auto bt = magic_square::bob_triple(b, y);
                    g.v_at(x, y, a, b) = (at[y] == bt[x]) ? 1 : 0;
                }
    return g;
}

}  // namespace

Game catalog(const std::string& name) {
    if (name == "chsh") {
        Game g = make_xor_game(2, 2, {0, 0, 0, 1});  // t(x,y) = x AND y
        g.name = "chsh";
        return g;
    }
    if (name == "magic-square") return make_magic_square();
    if (name.rfind("xor:", 0) == 0) {
        // Format: xor:<nA>x<nB>:<row-major target bits>
        const std::string rest = name.substr(4);
        const auto colon = rest.find(':');
        const auto cross = rest.find('x');
        if (colon == std::string::npos || cross == std::string::npos || cross > colon)
            throw UnknownGame("bad xor game spec: " + name);
        const std::size_t nA = std::strtoul(rest.substr(0, cross).c_str(), nullptr, 10);
        const std::size_t nB = std::strtoul(rest.substr(cross + 1, colon - cross - 1).c_str(), nullptr, 10);
        const std::string bits = rest.substr(colon + 1);
        if (nA == 0 || nB == 0 || bits.size() != nA * nB)
            throw UnknownGame("xor game table size mismatch: " + name);
        std::vector<int> target;
        for (char c : bits) {
            if (c != '0' && c != '1') throw UnknownGame("xor game table must be 0/1 bits");
            target.push_back(c - '0');
        }
        return make_xor_game(nA, nB, target);
    }
    throw UnknownGame(name);
}

}  // namespace nlg
