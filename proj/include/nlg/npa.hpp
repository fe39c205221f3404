// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlg/games.hpp"
#include "nlg/numerics.hpp"

namespace nlg {

// Generators of the projective game algebra: Alice projectors E(x,a) and Bob
// projectors F(y,b). E's and F's commute across the cut; within a side,
// same-setting distinct outcomes are orthogonal and E^2 = E.
struct Generator {
    enum class Side : std::uint8_t { E, F };
    Side side;
    std::uint16_t setting;
    std::uint16_t outcome;

    friend auto operator<=>(const Generator&, const Generator&) = default;
};

// Canonical form: E factors before F factors, each side reduced. An empty
// word is the identity.
struct Word {
    std::vector<Generator> es;
    std::vector<Generator> fs;

    bool identity() const { return es.empty() && fs.empty(); }
    std::size_t length() const { return es.size() + fs.size(); }
    Word adjoint() const;
    friend auto operator<=>(const Word&, const Word&) = default;
};

std::string to_string(const Word& w);

// Normal form of a generator sequence; nullopt encodes the zero element
// (adjacent same-setting distinct projectors annihilate).
std::optional<Word> canonicalize_word(const std::vector<Generator>& gens);
// Product of two canonical words.
std::optional<Word> word_product(const Word& lhs, const Word& rhs);

struct NpaProblem {
    std::size_t level = 1;
    std::vector<Word> words;                       // row/column index words, words[0] = 1
    // -1 encodes a structural zero; otherwise index into `classes`.
    std::vector<std::vector<int>> moment_index;    // words x words
    std::vector<Word> classes;                     // canonical representative per variable
    std::vector<double> objective;                 // over classes
    double objective_constant = 0.0;
};

struct NpaResult {
    double value = 0.0;
    NpaProblem problem;
    CMatrix moment_matrix;
    std::vector<double> moments;  // per class
    double sdp_gap = 0.0;
};

NpaProblem build_npa_problem(const Game& g, std::size_t level);
NpaResult npa_upper_bound(const Game& g, std::size_t level, double tol = 1e-7);

// Moment matrix of an explicit strategy: evaluate(word) must return the word
// operator's expectation. Used by the feasibility oracle in tests.
struct NpaFeasibility {
    double max_equality_violation = 0.0;   // identifications, row sums, zeros
    double min_eigenvalue = 0.0;
    double min_p_entry = 0.0;              // smallest p(a,b|x,y) block entry
};
NpaFeasibility check_npa_feasibility(const NpaProblem& problem, const CMatrix& moment_matrix);

}  // namespace nlg
