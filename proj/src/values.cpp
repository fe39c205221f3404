// SPDX-License-Identifier: Apache-2.0
#include "nlg/values.hpp"

#include <algorithm>
#include <cmath>

#include "nlg/quantum.hpp"
#include "nlg/sdp.hpp"

namespace nlg {

Correlation ClassicalStrategy::correlation() const {
    Correlation c(nA, nB, kA, kB);
    for (std::size_t w = 0; w < n_omega; ++w)
        for (std::size_t x = 0; x < nA; ++x)
            for (std::size_t y = 0; y < nB; ++y)
                for (std::size_t a = 0; a < kA; ++a)
                    for (std::size_t b = 0; b < kB; ++b)
                        c.at(x, y, a, b) += gamma[w] * pa_at(w, x, a) * qb_at(w, y, b);
    return c;
}

namespace {

// <psi| M (x) N |psi> = tr(Psi^* M Psi N^T) with Psi the dA x dB reshape.
CMatrix reshape_state(const std::vector<cplx>& psi, std::size_t dA, std::size_t dB) {
    CMatrix m(dA, dB);
    for (std::size_t i = 0; i < dA; ++i)
        for (std::size_t j = 0; j < dB; ++j) m(i, j) = psi[i * dB + j];
    return m;
}

}  // namespace

Correlation QuantumStrategy::correlation() const {
    const std::size_t nA = alice.size(), nB = bob.size();
    const std::size_t kA = nA ? alice[0].size() : 0, kB = nB ? bob[0].size() : 0;
    Correlation c(nA, nB, kA, kB);
    CMatrix psi_m = reshape_state(psi, dA, dB);
    for (std::size_t x = 0; x < nA; ++x)
        for (std::size_t a = 0; a < kA; ++a) {
            CMatrix left = psi_m.adjoint() * alice[x][a] * psi_m;  // dB x dB
            for (std::size_t y = 0; y < nB; ++y)
                for (std::size_t b = 0; b < kB; ++b) {
                    double v = (left * bob[y][b].transpose()).trace().real();
                    c.at(x, y, a, b) = std::max(0.0, v);
                }
        }
    return c;
}

void QuantumStrategy::validate(double tol) const {
    if (psi.size() != dA * dB) throw DimensionMismatch("state dimension");
    if (std::abs(vec_norm(psi) - 1.0) > tol) throw SchemaError("state not normalized");
    auto check_family = [&](const std::vector<std::vector<CMatrix>>& fam, std::size_t d) {
        for (const auto& setting : fam) {
            CMatrix sum(d, d);
            for (const auto& e : setting) {
                if (e.rows() != d || e.cols() != d) throw DimensionMismatch("POVM element size");
                if (e.hermiticity_defect() > tol) throw SchemaError("POVM element not Hermitian");
                if (!is_psd(e, tol)) throw SchemaError("POVM element not PSD");
                sum += e;
            }
            if ((sum - CMatrix::identity(d)).max_abs() > tol * 10.0)
                throw SchemaError("POVM does not sum to identity");
        }
    };
    check_family(alice, dA);
    check_family(bob, dB);
}

Correlation CommutingStrategy::correlation() const {
    const std::size_t nA = alice.size(), nB = bob.size();
    const std::size_t kA = nA ? alice[0].size() : 0, kB = nB ? bob[0].size() : 0;
    Correlation c(nA, nB, kA, kB);
    for (std::size_t x = 0; x < nA; ++x)
        for (std::size_t y = 0; y < nB; ++y)
            for (std::size_t a = 0; a < kA; ++a)
                for (std::size_t b = 0; b < kB; ++b) {
                    const auto mv = bob[y][b].apply(psi);
                    const auto mnv = alice[x][a].apply(mv);
                    c.at(x, y, a, b) = std::max(0.0, vec_dot(psi, mnv).real());
                }
    return c;
}

double CommutingStrategy::max_commutator_norm() const {
    double m = 0.0;
    for (const auto& ms : alice)
        for (const auto& e : ms)
            for (const auto& ns : bob)
                for (const auto& f : ns) {
                    CMatrix comm = e * f - f * e;
                    m = std::max(m, comm.norm_fro());
                }
    return m;
}

ClassicalValueResult classical_value(const Game& g) {
    g.validate();
    const double budget = std::pow(static_cast<double>(g.kA), static_cast<double>(g.nA)) *
                          std::pow(static_cast<double>(g.kB), static_cast<double>(g.nB));
    if (budget > 1e8) throw BudgetExceeded("deterministic enumeration above 1e8");

    std::vector<std::size_t> alice(g.nA, 0);
    std::vector<std::size_t> best_alice, best_bob;
    double best = -1.0;

    std::vector<double> w(g.nB * g.kB);
    while (true) {
        // Best Bob response given Alice's assignment; smallest b on ties.
        std::fill(w.begin(), w.end(), 0.0);
        for (std::size_t x = 0; x < g.nA; ++x)
            for (std::size_t y = 0; y < g.nB; ++y) {
                const double m = g.mu_at(x, y);
                if (m == 0.0) continue;
                for (std::size_t b = 0; b < g.kB; ++b)
                    if (g.v_at(x, y, alice[x], b)) w[y * g.kB + b] += m;
            }
        double total = 0.0;
        std::vector<std::size_t> bob(g.nB, 0);
        for (std::size_t y = 0; y < g.nB; ++y) {
            double mx = w[y * g.kB];
            std::size_t arg = 0;
            for (std::size_t b = 1; b < g.kB; ++b)
                if (w[y * g.kB + b] > mx) {
                    mx = w[y * g.kB + b];
                    arg = b;
                }
            bob[y] = arg;
            total += mx;
        }
        if (total > best) {
            best = total;
            best_alice = alice;
            best_bob = bob;
        }
        // Lexicographic odometer with x = 0 most significant.
        std::size_t pos = g.nA;
        while (pos-- > 0) {
            if (++alice[pos] < g.kA) break;
            alice[pos] = 0;
            if (pos == 0) goto done;
        }
        if (g.nA == 0) break;
    }
done:

    ClassicalValueResult out;
    out.value = best;
    out.alice_assignment = best_alice;
    out.bob_assignment = best_bob;
    ClassicalStrategy s;
    s.n_omega = 1;
    s.nA = g.nA;
    s.nB = g.nB;
    s.kA = g.kA;
    s.kB = g.kB;
    s.gamma = {1.0};
    s.pa.assign(g.nA * g.kA, 0.0);
    s.qb.assign(g.nB * g.kB, 0.0);
    for (std::size_t x = 0; x < g.nA; ++x) s.pa[x * g.kA + best_alice[x]] = 1.0;
    for (std::size_t y = 0; y < g.nB; ++y) s.qb[y * g.kB + best_bob[y]] = 1.0;
    out.strategy = std::move(s);
    return out;
}

namespace {

LpProblem nonsignaling_lp(const Game& g) {
    const std::size_t n = g.nA * g.nB * g.kA * g.kB;
    auto idx = [&](std::size_t x, std::size_t y, std::size_t a, std::size_t b) {
        return ((x * g.nB + y) * g.kA + a) * g.kB + b;
    };
    LpProblem lp;
    lp.c.assign(n, 0.0);
    for (std::size_t x = 0; x < g.nA; ++x)
        for (std::size_t y = 0; y < g.nB; ++y)
            for (std::size_t a = 0; a < g.kA; ++a)
                for (std::size_t b = 0; b < g.kB; ++b)
                    if (g.v_at(x, y, a, b)) lp.c[idx(x, y, a, b)] = g.mu_at(x, y);
    // Normalization per question pair.
    for (std::size_t x = 0; x < g.nA; ++x)
        for (std::size_t y = 0; y < g.nB; ++y) {
            std::vector<double> row(n, 0.0);
            for (std::size_t a = 0; a < g.kA; ++a)
                for (std::size_t b = 0; b < g.kB; ++b) row[idx(x, y, a, b)] = 1.0;
            lp.a_eq.push_back(std::move(row));
            lp.b_eq.push_back(1.0);
        }
    // Non-signaling Bob -> Alice (consecutive y suffice by transitivity).
    for (std::size_t x = 0; x < g.nA; ++x)
        for (std::size_t a = 0; a < g.kA; ++a)
            for (std::size_t y = 0; y + 1 < g.nB; ++y) {
                std::vector<double> row(n, 0.0);
                for (std::size_t b = 0; b < g.kB; ++b) {
                    row[idx(x, y, a, b)] += 1.0;
                    row[idx(x, y + 1, a, b)] -= 1.0;
                }
                lp.a_eq.push_back(std::move(row));
                lp.b_eq.push_back(0.0);
            }
    // Non-signaling Alice -> Bob.
    for (std::size_t y = 0; y < g.nB; ++y)
        for (std::size_t b = 0; b < g.kB; ++b)
            for (std::size_t x = 0; x + 1 < g.nA; ++x) {
                std::vector<double> row(n, 0.0);
                for (std::size_t a = 0; a < g.kA; ++a) {
                    row[idx(x, y, a, b)] += 1.0;
                    row[idx(x + 1, y, a, b)] -= 1.0;
                }
                lp.a_eq.push_back(std::move(row));
                lp.b_eq.push_back(0.0);
            }
    lp.p0.assign(n, 1.0 / static_cast<double>(g.kA * g.kB));
    return lp;
}

}  // namespace

double nonsignaling_value(const Game& g, double tol) {
    g.validate();
    return solve_lp(nonsignaling_lp(g), tol).value;
}

Correlation nonsignaling_optimal_correlation(const Game& g, double tol) {
    g.validate();
    LpSolution sol = solve_lp(nonsignaling_lp(g), tol);
    Correlation c(g.nA, g.nB, g.kA, g.kB);
    c.p = sol.p;
    for (double& v : c.p) v = std::max(0.0, v);
    return c;
}

// ---------------------------------------------------------------------------
// See-saw

namespace {

std::vector<CMatrix> hermitian_basis(std::size_t d) {
    std::vector<CMatrix> basis;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < d; ++i) {
        CMatrix m(d, d);
        m(i, i) = 1.0;
        basis.push_back(std::move(m));
    }
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            CMatrix m(d, d);
            m(i, j) = inv_sqrt2;
            m(j, i) = inv_sqrt2;
            basis.push_back(std::move(m));
            CMatrix m2(d, d);
            m2(i, j) = cplx(0.0, -inv_sqrt2);
            m2(j, i) = cplx(0.0, inv_sqrt2);
            basis.push_back(std::move(m2));
        }
    return basis;
}

// Optimal POVM for max sum_a tr(M_a R_a): dual of min tr Y s.t. Y >= R_a.
std::vector<CMatrix> best_povm(const std::vector<CMatrix>& r) {
    const std::size_t k = r.size();
    const std::size_t d = r[0].rows();
    if (k == 2) {
        // Closed form: projector onto the nonnegative eigenspace of R0 - R1.
        Povm p = Povm::from_observable_sign(r[0] - r[1]);
        return {p.elements[0], p.elements[1]};
    }
    const auto basis = hermitian_basis(d);
    SdpProblem pb;
    pb.c.resize(basis.size());
    pb.f0.resize(k);
    for (std::size_t a = 0; a < k; ++a) pb.f0[a] = -r[a];
    pb.fj.resize(basis.size());
    for (std::size_t t = 0; t < basis.size(); ++t) {
        pb.c[t] = -basis[t].trace().real();  // maximize -tr(Y)
        pb.fj[t].assign(k, basis[t]);
    }
    // Strictly feasible start: Y = (max eigenvalue + 1) I.
    double top = 0.0;
    for (const auto& m : r) {
        EigResult e = hermitian_eig(m, 1e-7);
        if (!e.eigenvalues.empty()) top = std::max(top, e.eigenvalues[0]);
    }
    std::vector<double> z0(basis.size(), 0.0);
    for (std::size_t t = 0; t < d; ++t) z0[t] = top + 1.0;  // diagonal basis elements first
    SdpOptions opt;
    opt.tol = 1e-10;
    opt.z0 = z0;
    SdpSolution sol = solve_sdp(pb, opt);

    // The dual blocks are the POVM up to solver tolerance; polish to an
    // exact POVM (PSD clip, then symmetric normalization).
    std::vector<CMatrix> povm;
    CMatrix total(d, d);
    for (std::size_t a = 0; a < k; ++a) {
        EigResult e = hermitian_eig(0.5 * (sol.x_blocks[a] + sol.x_blocks[a].adjoint()), 1e-6);
        CMatrix clipped(d, d);
        for (std::size_t t = 0; t < d; ++t) {
            const double lam = std::max(0.0, e.eigenvalues[t]);
            if (lam == 0.0) continue;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    clipped(i, j) += lam * e.eigenvectors(i, t) * std::conj(e.eigenvectors(j, t));
        }
        total += clipped;
        povm.push_back(std::move(clipped));
    }
    // total ~ I; normalize exactly.
    EigResult te = hermitian_eig(total, 1e-6);
    CMatrix t_inv_sqrt(d, d);
    for (std::size_t t = 0; t < d; ++t) {
        const double lam = std::max(1e-12, te.eigenvalues[t]);
        const double s = 1.0 / std::sqrt(lam);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                t_inv_sqrt(i, j) += s * te.eigenvectors(i, t) * std::conj(te.eigenvectors(j, t));
    }
    CMatrix residual = CMatrix::identity(d);
    for (auto& m : povm) {
        m = t_inv_sqrt * m * t_inv_sqrt;
        residual -= m;
    }
    // Fold any leftover into the last element to make the sum exact.
    povm.back() += residual;
    return povm;
}

double strategy_value(const Game& g, const QuantumStrategy& s) {
    return winning_probability(g, s.correlation());
}

}  // namespace

SeesawResult seesaw_lower_bound(const Game& g, std::size_t d, std::size_t restarts,
                                std::size_t iters, std::uint64_t seed) {
    g.validate();
    if (d < 2) throw BudgetExceeded("seesaw requires dimension >= 2");
    Rng root(seed);
    SeesawResult best;
    best.value = -1.0;

    for (std::size_t r = 0; r < restarts; ++r) {
        Rng rng = root.split("seesaw-restart").split(r);
        QuantumStrategy s;
        s.dA = s.dB = d;
        auto random_povm_family = [&](std::size_t n_settings, std::size_t k) {
            std::vector<std::vector<CMatrix>> fam;
            for (std::size_t q = 0; q < n_settings; ++q) {
                CMatrix u = random_unitary(d, rng);
                std::vector<CMatrix> setting(k, CMatrix(d, d));
                for (std::size_t col = 0; col < d; ++col) {
                    const std::size_t bucket = col % k;
                    for (std::size_t i = 0; i < d; ++i)
                        for (std::size_t j = 0; j < d; ++j)
                            setting[bucket](i, j) += u(i, col) * std::conj(u(j, col));
                }
                fam.push_back(std::move(setting));
            }
            return fam;
        };
        s.alice = random_povm_family(g.nA, g.kA);
        s.bob = random_povm_family(g.nB, g.kB);
        s.psi.assign(d * d, cplx(0.0, 0.0));
        for (auto& x : s.psi) x = cplx(rng.gaussian(), rng.gaussian());
        const double nrm = vec_norm(s.psi);
        for (auto& x : s.psi) x /= nrm;

        double current = strategy_value(g, s);
        for (std::size_t it = 0; it < iters; ++it) {
            const double before = current;

            // State step: top eigenvector of the game operator.
            {
                CMatrix game_op(d * d, d * d);
                for (std::size_t x = 0; x < g.nA; ++x)
                    for (std::size_t y = 0; y < g.nB; ++y) {
                        const double m = g.mu_at(x, y);
                        if (m == 0.0) continue;
                        for (std::size_t a = 0; a < g.kA; ++a)
                            for (std::size_t b = 0; b < g.kB; ++b)
                                if (g.v_at(x, y, a, b))
                                    game_op += m * kron(s.alice[x][a], s.bob[y][b]);
                    }
                EigResult e = hermitian_eig(game_op, 1e-7);
                QuantumStrategy cand = s;
                for (std::size_t i = 0; i < d * d; ++i) cand.psi[i] = e.eigenvectors(i, 0);
                const double v = strategy_value(g, cand);
                if (v > current) {
                    s = std::move(cand);
                    current = v;
                }
            }

            CMatrix psi_m = reshape_state(s.psi, d, d);
            // Alice step, one setting at a time.
            for (std::size_t x = 0; x < g.nA; ++x) {
                std::vector<CMatrix> r(g.kA, CMatrix(d, d));
                for (std::size_t y = 0; y < g.nB; ++y) {
                    const double m = g.mu_at(x, y);
                    if (m == 0.0) continue;
                    for (std::size_t b = 0; b < g.kB; ++b) {
                        CMatrix f = psi_m * s.bob[y][b].transpose() * psi_m.adjoint();
                        for (std::size_t a = 0; a < g.kA; ++a)
                            if (g.v_at(x, y, a, b)) r[a] += m * f;
                    }
                }
                auto cand = best_povm(r);
                double old_part = 0.0, new_part = 0.0;
                for (std::size_t a = 0; a < g.kA; ++a) {
                    old_part += (s.alice[x][a] * r[a]).trace().real();
                    new_part += (cand[a] * r[a]).trace().real();
                }
                if (new_part > old_part) {
                    s.alice[x] = std::move(cand);
                    current += new_part - old_part;
                }
            }
            // Bob step.
            for (std::size_t y = 0; y < g.nB; ++y) {
                std::vector<CMatrix> r(g.kB, CMatrix(d, d));
                for (std::size_t x = 0; x < g.nA; ++x) {
                    const double m = g.mu_at(x, y);
                    if (m == 0.0) continue;
                    for (std::size_t a = 0; a < g.kA; ++a) {
                        CMatrix f = (psi_m.adjoint() * s.alice[x][a] * psi_m).transpose();
                        for (std::size_t b = 0; b < g.kB; ++b)
                            if (g.v_at(x, y, a, b)) r[b] += m * f;
                    }
                }
                auto cand = best_povm(r);
                double old_part = 0.0, new_part = 0.0;
                for (std::size_t b = 0; b < g.kB; ++b) {
                    old_part += (s.bob[y][b] * r[b]).trace().real();
                    new_part += (cand[b] * r[b]).trace().real();
                }
                if (new_part > old_part) {
                    s.bob[y] = std::move(cand);
                    current += new_part - old_part;
                }
            }

            current = strategy_value(g, s);
            if (current - before < 1e-13 && it > 2) break;
        }

        best.per_restart.push_back(current);
        if (current > best.value) {
            best.value = current;
            best.strategy = s;
        }
    }
    // Report the value of the returned strategy itself.
    best.value = strategy_value(g, best.strategy);
    return best;
}

QuantumStrategy chsh_optimal_strategy() {
    QuantumStrategy s;
    s.dA = s.dB = 2;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    s.psi = {inv_sqrt2, 0.0, 0.0, inv_sqrt2};  // |00> + |11>
    CMatrix z(2, 2), x(2, 2);
    z(0, 0) = 1.0;
    z(1, 1) = -1.0;
    x(0, 1) = 1.0;
    x(1, 0) = 1.0;
    auto observable_povm = [](const CMatrix& obs) {
        Povm p = Povm::from_observable_sign(obs);
        return std::vector<CMatrix>{p.elements[0], p.elements[1]};
    };
    s.alice = {observable_povm(z), observable_povm(x)};
    CMatrix b0 = inv_sqrt2 * (z + x);
    CMatrix b1 = inv_sqrt2 * (z - x);
    s.bob = {observable_povm(b0), observable_povm(b1)};
    return s;
}

namespace {

CMatrix pauli(char p) {
    CMatrix m(2, 2);
    switch (p) {
        case 'I': m(0, 0) = 1.0; m(1, 1) = 1.0; break;
        case 'X': m(0, 1) = 1.0; m(1, 0) = 1.0; break;
        case 'Y': m(0, 1) = cplx(0.0, -1.0); m(1, 0) = cplx(0.0, 1.0); break;
        case 'Z': m(0, 0) = 1.0; m(1, 1) = -1.0; break;
        default: throw Error("unknown pauli");
    }
    return m;
}

CMatrix pauli2(const char* two) { return kron(pauli(two[0]), pauli(two[1])); }

// Joint +-1-outcome measurement of two commuting observables; returns the 4
// projectors indexed by (bit0, bit1) with bit = 0 for eigenvalue +1.
std::vector<CMatrix> joint_pauli_measurement(const CMatrix& o1, const CMatrix& o2) {
    const std::size_t d = o1.rows();
    CMatrix id = CMatrix::identity(d);
    std::vector<CMatrix> proj;
    for (int bits = 0; bits < 4; ++bits) {
        const double s1 = (bits & 1) ? -1.0 : 1.0;
        const double s2 = (bits & 2) ? -1.0 : 1.0;
        CMatrix p = 0.25 * ((id + s1 * o1) * (id + s2 * o2));
        proj.push_back(std::move(p));
    }
    return proj;
}

}  // namespace

QuantumStrategy magic_square_perfect_strategy() {
    // Operator square (rows multiply to +1; columns to +1, +1, -1):
    //   X(x)I  I(x)X  X(x)X
    //   I(x)Z  Z(x)I  Z(x)Z
    //   X(x)Z  Z(x)X  Y(x)Y
    // Alice measures the first two cells of her row; Bob the first two cells
    // of his column; all cells are real, so the maximally entangled state on
    // C^4 (x) C^4 correlates identical cells perfectly.
    QuantumStrategy s;
    s.dA = s.dB = 4;
    s.psi.assign(16, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < 4; ++i) s.psi[i * 4 + i] = 0.5;
    const char* cells[3][3] = {{"XI", "IX", "XX"}, {"IZ", "ZI", "ZZ"}, {"XZ", "ZX", "YY"}};
    s.alice.resize(3);
    s.bob.resize(3);
    for (std::size_t x = 0; x < 3; ++x)
        s.alice[x] = joint_pauli_measurement(pauli2(cells[x][0]), pauli2(cells[x][1]));
    for (std::size_t y = 0; y < 3; ++y)
        s.bob[y] = joint_pauli_measurement(pauli2(cells[0][y]), pauli2(cells[1][y]));
    return s;
}

}  // namespace nlg
