// SPDX-License-Identifier: Apache-2.0
#include "nlg/npa.hpp"

#include <algorithm>
#include <set>

#include "nlg/sdp.hpp"

namespace nlg {

namespace {

// Reduce a single-side word: idempotent collapse and same-setting
// orthogonality. Returns false for the zero element.
bool reduce_side(std::vector<Generator>& side) {
    std::vector<Generator> out;
    for (const Generator& g : side) {
        if (!out.empty() && out.back().setting == g.setting) {
            if (out.back().outcome == g.outcome) continue;  // projector idempotence
            return false;                                   // orthogonal outcomes
        }
        out.push_back(g);
    }
    side = std::move(out);
    return true;
}

}  // namespace

Word Word::adjoint() const {
    Word w;
    w.es.assign(es.rbegin(), es.rend());
    w.fs.assign(fs.rbegin(), fs.rend());
    return w;
}

std::string to_string(const Word& w) {
    if (w.identity()) return "1";
    std::string s;
    auto app = [&s](const Generator& g) {
        if (!s.empty()) s += "*";
        s += (g.side == Generator::Side::E ? "E(" : "F(") + std::to_string(g.setting) + "," +
             std::to_string(g.outcome) + ")";
    };
    for (const auto& g : w.es) app(g);
    for (const auto& g : w.fs) app(g);
    return s;
}

std::optional<Word> canonicalize_word(const std::vector<Generator>& gens) {
    Word w;
    for (const Generator& g : gens)
        (g.side == Generator::Side::E ? w.es : w.fs).push_back(g);
    if (!reduce_side(w.es) || !reduce_side(w.fs)) return std::nullopt;
    return w;
}

std::optional<Word> word_product(const Word& lhs, const Word& rhs) {
    Word w;
    w.es = lhs.es;
    w.es.insert(w.es.end(), rhs.es.begin(), rhs.es.end());
    w.fs = lhs.fs;
    w.fs.insert(w.fs.end(), rhs.fs.begin(), rhs.fs.end());
    if (!reduce_side(w.es) || !reduce_side(w.fs)) return std::nullopt;
    return w;
}

namespace {

std::vector<Generator> generators_of(const Game& g) {
    std::vector<Generator> out;
    for (std::uint16_t x = 0; x < g.nA; ++x)
        for (std::uint16_t a = 0; a < g.kA; ++a)
            out.push_back({Generator::Side::E, x, a});
    for (std::uint16_t y = 0; y < g.nB; ++y)
        for (std::uint16_t b = 0; b < g.kB; ++b)
            out.push_back({Generator::Side::F, y, b});
    return out;
}

// Class representative: a word and its adjoint carry the same (real) moment.
Word class_rep(const Word& w) {
    Word adj = w.adjoint();
    return std::min(w, adj);
}

}  // namespace

NpaProblem build_npa_problem(const Game& g, std::size_t level) {
    if (level < 1) throw BudgetExceeded("NPA level must be >= 1");
    NpaProblem pb;
    pb.level = level;

    // Words of length <= level, canonical, deduplicated, sorted.
    std::set<Word> seen;
    std::vector<Word> frontier{Word{}};
    seen.insert(Word{});
    const auto gens = generators_of(g);
    for (std::size_t len = 1; len <= level; ++len) {
        std::vector<Word> next;
        for (const Word& w : frontier)
            for (const Generator& gen : gens) {
                Word gw;
                (gen.side == Generator::Side::E ? gw.es : gw.fs).push_back(gen);
                auto prod = word_product(w, gw);
                if (!prod) continue;
                if (prod->length() != len) continue;  // collapsed to shorter; already present
                if (seen.insert(*prod).second) next.push_back(*prod);
            }
        frontier = std::move(next);
    }
    pb.words.assign(seen.begin(), seen.end());
    std::sort(pb.words.begin(), pb.words.end(), [](const Word& a, const Word& b) {
        if (a.length() != b.length()) return a.length() < b.length();
        return a < b;
    });
    // words[0] is the identity by construction of the ordering.

    const std::size_t nw = pb.words.size();
    if (nw > 500) throw BudgetExceeded("moment matrix side above 500");

    std::map<Word, int> class_of;
    pb.moment_index.assign(nw, std::vector<int>(nw, -1));
    for (std::size_t i = 0; i < nw; ++i)
        for (std::size_t j = 0; j < nw; ++j) {
            auto prod = word_product(pb.words[i].adjoint(), pb.words[j]);
            if (!prod) continue;  // structural zero
            const Word rep = class_rep(*prod);
            auto [it, inserted] = class_of.emplace(rep, static_cast<int>(pb.classes.size()));
            if (inserted) pb.classes.push_back(rep);
            pb.moment_index[i][j] = it->second;
        }

    // Objective: sum mu V p(a,b|x,y) with p = moment of E(x,a)F(y,b).
    pb.objective.assign(pb.classes.size(), 0.0);
    for (std::uint16_t x = 0; x < g.nA; ++x)
        for (std::uint16_t y = 0; y < g.nB; ++y)
            for (std::uint16_t a = 0; a < g.kA; ++a)
                for (std::uint16_t b = 0; b < g.kB; ++b) {
                    if (!g.v_at(x, y, a, b)) continue;
                    Word w;
                    w.es = {{Generator::Side::E, x, a}};
                    w.fs = {{Generator::Side::F, y, b}};
                    pb.objective[class_of.at(class_rep(w))] += g.mu_at(x, y);
                }
    return pb;
}

namespace {

struct NpaConstraints {
    std::vector<std::vector<double>> e;  // equality rows over classes
    std::vector<double> d;
};

// Normalization and completeness row sums, deduplicated.
NpaConstraints npa_equalities(const Game& g, const NpaProblem& pb) {
    std::map<Word, int> class_of;
    for (std::size_t k = 0; k < pb.classes.size(); ++k) class_of[pb.classes[k]] = static_cast<int>(k);
    const std::size_t nc = pb.classes.size();

    std::set<std::vector<std::pair<int, double>>> dedup;
    NpaConstraints out;
    auto add_row = [&](std::map<int, double> coeffs, double rhs) {
        std::vector<std::pair<int, double>> key;
        for (auto& [k, v] : coeffs)
            if (std::abs(v) > 1e-15) key.emplace_back(k, v);
        if (key.empty()) return;
        // Scale-normalize the dedup key on the first coefficient's sign.
        if (key[0].second < 0.0) {
            for (auto& kv : key) kv.second = -kv.second;
            rhs = -rhs;
        }
        auto key_with_rhs = key;
        key_with_rhs.emplace_back(-1, rhs);
        if (!dedup.insert(key_with_rhs).second) return;
        std::vector<double> row(nc, 0.0);
        for (auto& [k, v] : key) row[static_cast<std::size_t>(k)] = v;
        out.e.push_back(std::move(row));
        out.d.push_back(rhs);
    };

    // moment(1) = 1.
    add_row({{class_of.at(Word{}), 1.0}}, 1.0);

    // For each row word v and word w with |w| < level:
    //   sum_a moment(v* E(x,a) w) = moment(v* w), same for F.
    for (const Word& v : pb.words) {
        for (const Word& w : pb.words) {
            if (w.length() + 1 > pb.level) continue;
            auto base = word_product(v.adjoint(), w);
            for (std::uint16_t x = 0; x < g.nA; ++x) {
                std::map<int, double> coeffs;
                for (std::uint16_t a = 0; a < g.kA; ++a) {
                    Word e_w;
                    e_w.es = {{Generator::Side::E, x, a}};
                    auto mid = word_product(e_w, w);
                    if (!mid) continue;
                    auto full = word_product(v.adjoint(), *mid);
                    if (!full) continue;
                    coeffs[class_of.at(class_rep(*full))] += 1.0;
                }
                if (base) coeffs[class_of.at(class_rep(*base))] -= 1.0;
                add_row(std::move(coeffs), 0.0);
            }
            for (std::uint16_t y = 0; y < g.nB; ++y) {
                std::map<int, double> coeffs;
                for (std::uint16_t b = 0; b < g.kB; ++b) {
                    Word f_w;
                    f_w.fs = {{Generator::Side::F, y, b}};
                    auto mid = word_product(w, f_w);
                    if (!mid) continue;
                    auto full = word_product(v.adjoint(), *mid);
                    if (!full) continue;
                    coeffs[class_of.at(class_rep(*full))] += 1.0;
                }
                if (base) coeffs[class_of.at(class_rep(*base))] -= 1.0;
                add_row(std::move(coeffs), 0.0);
            }
        }
    }
    return out;
}

CMatrix moment_matrix_from_class_values(const NpaProblem& pb, const std::vector<double>& vals) {
    const std::size_t nw = pb.words.size();
    CMatrix m(nw, nw);
    for (std::size_t i = 0; i < nw; ++i)
        for (std::size_t j = 0; j < nw; ++j) {
            const int k = pb.moment_index[i][j];
            if (k >= 0) m(i, j) = vals[static_cast<std::size_t>(k)];
        }
    return m;
}

}  // namespace

NpaResult npa_upper_bound(const Game& g, std::size_t level, double tol) {
    g.validate();
    NpaProblem pb = build_npa_problem(g, level);
    NpaConstraints eq = npa_equalities(g, pb);
    AffineSolveResult aff = solve_affine(eq.e, eq.d);
    if (aff.residual > 1e-9) throw SolverFailure("inconsistent NPA equalities");

    const std::size_t nc = pb.classes.size();
    const std::size_t q = aff.nullspace.size();

    // Entrywise nonnegativity of the p(a,b|x,y) block, as 1x1 blocks. These
    // hold for every commuting strategy, keep the relaxation sound, and pin
    // the optimum at or below 1 for predicate games.
    std::vector<int> p_classes;
    {
        std::set<int> uniq;
        std::map<Word, int> class_of;
        for (std::size_t k = 0; k < nc; ++k) class_of[pb.classes[k]] = static_cast<int>(k);
        for (std::uint16_t x = 0; x < g.nA; ++x)
            for (std::uint16_t a = 0; a < g.kA; ++a)
                for (std::uint16_t y = 0; y < g.nB; ++y)
                    for (std::uint16_t b = 0; b < g.kB; ++b) {
                        Word w;
                        w.es = {{Generator::Side::E, x, a}};
                        w.fs = {{Generator::Side::F, y, b}};
                        uniq.insert(class_of.at(class_rep(w)));
                    }
        p_classes.assign(uniq.begin(), uniq.end());
    }

    SdpProblem sdp;
    const std::size_t nblocks = 1 + p_classes.size();
    auto class_matrix = [&](const std::vector<double>& class_vec) {
        return moment_matrix_from_class_values(pb, class_vec);
    };
    std::vector<double> part(nc, 0.0);
    for (std::size_t k = 0; k < nc; ++k) part[k] = aff.particular[k];
    sdp.f0.push_back(class_matrix(part));
    for (int pc : p_classes) {
        CMatrix cell(1, 1);
        cell(0, 0) = part[static_cast<std::size_t>(pc)];
        sdp.f0.push_back(cell);
    }
    sdp.c.assign(q, 0.0);
    sdp.fj.resize(q);
    for (std::size_t j = 0; j < q; ++j) {
        sdp.fj[j].resize(nblocks);
        sdp.fj[j][0] = class_matrix(aff.nullspace[j]);
        for (std::size_t t = 0; t < p_classes.size(); ++t) {
            const double v = aff.nullspace[j][static_cast<std::size_t>(p_classes[t])];
            if (v == 0.0) {
                sdp.fj[j][1 + t] = CMatrix();
                continue;
            }
            CMatrix cell(1, 1);
            cell(0, 0) = v;
            sdp.fj[j][1 + t] = cell;
        }
        double cj = 0.0;
        for (std::size_t k = 0; k < nc; ++k) cj += pb.objective[k] * aff.nullspace[j][k];
        sdp.c[j] = cj;
    }
    double c0 = 0.0;
    for (std::size_t k = 0; k < nc; ++k) c0 += pb.objective[k] * part[k];
    pb.objective_constant = c0;

    SdpOptions opts;
    opts.tol = std::min(tol * 0.1, 1e-8);
    SdpSolution sol = solve_sdp(sdp, opts);

    NpaResult out;
    out.problem = pb;
    out.value = sol.value + c0;
    out.sdp_gap = sol.gap;
    std::vector<double> vals = part;
    for (std::size_t j = 0; j < q; ++j)
        for (std::size_t k = 0; k < nc; ++k) vals[k] += sol.z[j] * aff.nullspace[j][k];
    out.moments = vals;
    out.moment_matrix = moment_matrix_from_class_values(pb, vals);
    return out;
}

NpaFeasibility check_npa_feasibility(const NpaProblem& pb, const CMatrix& m) {
    NpaFeasibility out;
    const std::size_t nw = pb.words.size();
    if (m.rows() != nw || m.cols() != nw) throw DimensionMismatch("moment matrix side");
    // Identification: entries with the same class must agree; zeros must vanish.
    std::vector<double> rep(pb.classes.size(), 0.0);
    std::vector<bool> seen(pb.classes.size(), false);
    for (std::size_t i = 0; i < nw; ++i)
        for (std::size_t j = 0; j < nw; ++j) {
            const int k = pb.moment_index[i][j];
            const double v = m(i, j).real();
            out.max_equality_violation = std::max(out.max_equality_violation, std::abs(m(i, j).imag()));
            if (k < 0) {
                out.max_equality_violation = std::max(out.max_equality_violation, std::abs(v));
                continue;
            }
            if (!seen[static_cast<std::size_t>(k)]) {
                seen[static_cast<std::size_t>(k)] = true;
                rep[static_cast<std::size_t>(k)] = v;
            } else {
                out.max_equality_violation =
                    std::max(out.max_equality_violation, std::abs(v - rep[static_cast<std::size_t>(k)]));
            }
        }
    out.min_eigenvalue = min_eigenvalue(m);
    out.min_p_entry = 1.0;
    for (std::size_t i = 0; i < nw; ++i)
        for (std::size_t j = 0; j < nw; ++j) {
            if (pb.words[i].length() == 1 && pb.words[j].length() == 1 &&
                !pb.words[i].es.empty() && !pb.words[j].fs.empty())
                out.min_p_entry = std::min(out.min_p_entry, m(i, j).real());
        }
    return out;
}

}  // namespace nlg
