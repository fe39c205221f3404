// SPDX-License-Identifier: Apache-2.0
#include "nlg/sequential.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "nlg/quantum.hpp"

namespace nlg {

CMatrix SequentialQuantumStrategy::sigma_x(std::size_t x) const {
    CMatrix s(dim, dim);
    for (std::size_t a = 0; a < kA; ++a) s += sigma_at(x, a);
    return s;
}

void SequentialQuantumStrategy::validate(double tol) const {
    if (sigma.size() != nA * kA) throw ShapeMismatch("sigma table shape");
    if (bob.size() != nB) throw ShapeMismatch("bob family shape");
    for (std::size_t x = 0; x < nA; ++x) {
        for (std::size_t a = 0; a < kA; ++a) {
            const CMatrix& m = sigma_at(x, a);
            if (m.rows() != dim || m.cols() != dim) throw ShapeMismatch("sigma dims");
            if (m.hermiticity_defect() > tol) throw SchemaError("sigma not Hermitian");
            if (!is_psd(m, tol)) throw SchemaError("sigma not PSD");
        }
        if (std::abs(sigma_x(x).trace().real() - 1.0) > tol)
            throw SchemaError("sigma_x must have unit trace");
    }
    for (const auto& setting : bob) {
        if (setting.size() != kB) throw ShapeMismatch("bob outcome count");
        Povm p{setting};
        if (!p.valid(tol)) throw SchemaError("bob POVM invalid");
    }
}

Correlation SequentialQuantumStrategy::correlation() const {
    Correlation c(nA, nB, kA, kB);
    for (std::size_t x = 0; x < nA; ++x)
        for (std::size_t a = 0; a < kA; ++a)
            for (std::size_t y = 0; y < nB; ++y)
                for (std::size_t b = 0; b < kB; ++b)
                    c.at(x, y, a, b) = std::max(0.0, (sigma_at(x, a) * bob[y][b]).trace().real());
    return c;
}

Correlation SequentialClassicalStrategy::correlation() const {
    Correlation c(nA, nB, kA, kB);
    for (std::size_t x = 0; x < nA; ++x)
        for (std::size_t y = 0; y < nB; ++y)
            for (std::size_t a = 0; a < kA; ++a)
                for (std::size_t b = 0; b < kB; ++b) {
                    double s = 0.0;
                    for (std::size_t w = 0; w < n_omega; ++w)
                        s += paw_at(x, a, w) * qb_at(w, y, b);
                    c.at(x, y, a, b) = s;
                }
    return c;
}

NCPolynomial NCPolynomial::monomial(Monomial word, cplx coeff) {
    NCPolynomial p;
    p.terms.emplace_back(coeff, std::move(word));
    return p;
}

CMatrix eval_polynomial(const NCPolynomial& p, const std::vector<std::vector<CMatrix>>& bob,
                        std::size_t dim) {
    CMatrix acc(dim, dim);
    for (const auto& [coeff, word] : p.terms) {
        CMatrix term = CMatrix::identity(dim);
        for (const auto& [y, b] : word) term = term * bob.at(y).at(b);
        acc += coeff * term;
    }
    return acc;
}

StrongNonsigReport strong_nonsig_residual(const SequentialQuantumStrategy& s, std::size_t degree) {
    if (degree < 1) throw BudgetExceeded("degree must be >= 1");
    StrongNonsigReport report;
    std::vector<CMatrix> sx;
    for (std::size_t x = 0; x < s.nA; ++x) sx.push_back(s.sigma_x(x));

    // Enumerate monomials of degree 1..degree over the (y,b) alphabet; the
    // degree-0 monomial contributes |tr sigma_x - tr sigma_x'| = 0.
    const std::size_t alphabet = s.nB * s.kB;
    std::vector<std::pair<NCPolynomial::Monomial, CMatrix>> current;
    current.emplace_back(NCPolynomial::Monomial{}, CMatrix::identity(s.dim));
    for (std::size_t d = 1; d <= degree; ++d) {
        std::vector<std::pair<NCPolynomial::Monomial, CMatrix>> next;
        next.reserve(current.size() * alphabet);
        for (const auto& [word, op] : current)
            for (std::size_t y = 0; y < s.nB; ++y)
                for (std::size_t b = 0; b < s.kB; ++b) {
                    NCPolynomial::Monomial w2 = word;
                    w2.emplace_back(y, b);
                    CMatrix op2 = op * s.bob[y][b];
                    for (std::size_t x1 = 0; x1 < s.nA; ++x1)
                        for (std::size_t x2 = x1 + 1; x2 < s.nA; ++x2) {
                            const cplx t1 = (sx[x1] * op2).trace();
                            const cplx t2 = (sx[x2] * op2).trace();
                            const double r = std::abs(t1 - t2);
                            if (r > report.max_residual) {
                                report.max_residual = r;
                                report.witness = w2;
                                report.x1 = x1;
                                report.x2 = x2;
                            }
                        }
                    next.emplace_back(std::move(w2), std::move(op2));
                }
        current = std::move(next);
    }
    return report;
}

ClassicalStrategy convert_classical(const SequentialClassicalStrategy& s, double tol) {
    // p(omega|x) must be x-independent within tol.
    std::vector<double> gamma(s.n_omega, 0.0);
    for (std::size_t w = 0; w < s.n_omega; ++w) {
        for (std::size_t a = 0; a < s.kA; ++a) gamma[w] += s.paw_at(0, a, w);
        for (std::size_t x = 1; x < s.nA; ++x) {
            double px = 0.0;
            for (std::size_t a = 0; a < s.kA; ++a) px += s.paw_at(x, a, w);
            if (std::abs(px - gamma[w]) > tol)
                throw NotStronglyNonsignaling("omega marginal depends on x");
        }
    }
    ClassicalStrategy out;
    out.n_omega = s.n_omega;
    out.nA = s.nA;
    out.nB = s.nB;
    out.kA = s.kA;
    out.kB = s.kB;
    out.gamma = gamma;
    out.pa.assign(s.n_omega * s.nA * s.kA, 0.0);
    out.qb.assign(s.n_omega * s.nB * s.kB, 0.0);
    for (std::size_t w = 0; w < s.n_omega; ++w) {
        for (std::size_t x = 0; x < s.nA; ++x)
            for (std::size_t a = 0; a < s.kA; ++a)
                out.pa[(w * s.nA + x) * s.kA + a] =
                    gamma[w] > tol ? s.paw_at(x, a, w) / gamma[w]
                                   : (a == 0 ? 1.0 : 0.0);  // arbitrary on null omega
        for (std::size_t y = 0; y < s.nB; ++y)
            for (std::size_t b = 0; b < s.kB; ++b)
                out.qb[(w * s.nB + y) * s.kB + b] = s.qb_at(w, y, b);
    }
    return out;
}

QuantumStrategy convert_purify(const SequentialQuantumStrategy& s, double tol) {
    // The sigma_x must agree (the strongly-non-signaling-for-B(H) case).
    for (std::size_t x = 1; x < s.nA; ++x) {
        const double dist = trace_norm(s.sigma_x(x) - s.sigma_x(0));
        if (dist > tol) throw NotStronglyNonsignaling("sigma_x differ beyond tolerance");
    }
    const std::size_t d = s.dim;
    const std::size_t dA = s.kA * d;  // C^{kA} (x) purifying register
    // psi_x = sum_a |a> (x) |psi_xa>, with |psi_xa> in (purifier (x) H_B).
    std::vector<std::vector<cplx>> psi_x(s.nA, std::vector<cplx>(dA * d, cplx(0.0, 0.0)));
    for (std::size_t x = 0; x < s.nA; ++x)
        for (std::size_t a = 0; a < s.kA; ++a) {
            StateVector p = purify(DensityOperator(s.sigma_at(x, a)));
            // purify returns sum_k sqrt(l_k) |v_k>(x)|k>: system factor first;
            // swap so the purifier comes first and H_B second.
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t k = 0; k < d; ++k) {
                    const cplx amp = p.amplitudes[i * d + k];
                    if (amp == cplx(0.0, 0.0)) continue;
                    psi_x[x][((a * d + k) * d) + i] = amp;  // |a>|k>_purifier|i>_B
                }
        }

    QuantumStrategy out;
    out.dA = dA;
    out.dB = d;
    StateVector base(dA * d, psi_x[0]);
    out.psi = base.amplitudes;
    out.alice.resize(s.nA);
    for (std::size_t x = 0; x < s.nA; ++x) {
        CMatrix u = (x == 0) ? CMatrix::identity(dA)
                             : uhlmann_unitary(StateVector(dA * d, psi_x[x]), base, dA, d,
                                               std::max(tol, 1e-7));
        out.alice[x].resize(s.kA);
        for (std::size_t a = 0; a < s.kA; ++a) {
            CMatrix proj(dA, dA);
            for (std::size_t k = 0; k < d; ++k) proj(a * d + k, a * d + k) = 1.0;
            out.alice[x][a] = u.adjoint() * proj * u;
        }
    }
    out.bob = s.bob;
    return out;
}

// ---------------------------------------------------------------------------
// Algebra machinery

namespace {

cplx hs_inner(const CMatrix& a, const CMatrix& b) {
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < a.data().size(); ++i) s += std::conj(a.data()[i]) * b.data()[i];
    return s;
}

// Gram-Schmidt append; returns true if the candidate added a new direction.
bool gs_append(std::vector<CMatrix>& basis, CMatrix cand, double tol) {
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) {
            const cplx ov = hs_inner(b, cand);
            if (ov != cplx(0.0, 0.0)) cand -= ov * b;
        }
    const double n = cand.norm_fro();
    if (n < tol) return false;
    basis.push_back(cand * cplx(1.0 / n, 0.0));
    return true;
}

}  // namespace

std::vector<CMatrix> algebra_basis(const std::vector<std::vector<CMatrix>>& bob, std::size_t dim,
                                   double tol) {
    std::vector<CMatrix> gens{CMatrix::identity(dim)};
    for (const auto& setting : bob)
        for (const auto& e : setting) gens.push_back(e);

    std::vector<CMatrix> basis;
    for (const auto& g : gens) gs_append(basis, g, tol);
    // Multiply-and-orthonormalize until the span stabilizes.
    for (int round = 0; round < 64; ++round) {
        bool grew = false;
        const std::size_t snapshot = basis.size();
        for (std::size_t i = 0; i < snapshot; ++i)
            for (const auto& g : gens) {
                if (basis.size() >= dim * dim) break;
                grew |= gs_append(basis, basis[i] * g, tol);
            }
        if (!grew || basis.size() >= dim * dim) break;
        if (round == 63) throw NoConvergence("algebra closure did not stabilize");
    }
    return basis;
}

std::vector<CMatrix> commutant_hermitian_basis(const std::vector<std::vector<CMatrix>>& bob,
                                               std::size_t dim) {
    // Solve [X, B] = 0 for all generators: rows of the linear system are
    // (B^T (x) 1 - 1 (x) B) acting on vec(X) with vec row-major.
    std::vector<CMatrix> gens;
    for (const auto& setting : bob)
        for (const auto& e : setting) gens.push_back(e);
    const std::size_t n2 = dim * dim;
    CMatrix sys(gens.size() * n2, n2);
    std::size_t row0 = 0;
    for (const auto& g : gens) {
        // (XB - BX)_{ij} = sum_k X_ik B_kj - B_ik X_kj
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) {
                const std::size_t r = row0 + i * dim + j;
                for (std::size_t k = 0; k < dim; ++k) {
                    sys(r, i * dim + k) += g(k, j);
                    sys(r, k * dim + j) -= g(i, k);
                }
            }
        row0 += n2;
    }
    SvdResult sv = svd(sys);
    const double cutoff = 1e-10 * std::max(1.0, sv.s.empty() ? 0.0 : sv.s[0]);
    std::vector<CMatrix> null_mats;
    for (std::size_t k = 0; k < n2; ++k) {
        if (k < sv.s.size() && sv.s[k] > cutoff) continue;
        CMatrix x(dim, dim);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j) x(i, j) = sv.v(i * dim + j, k);
        null_mats.push_back(std::move(x));
    }
    // Hermitize and re-orthonormalize.
    std::vector<CMatrix> herm;
    for (const auto& x : null_mats) {
        gs_append(herm, 0.5 * (x + x.adjoint()), 1e-9);
        CMatrix anti = (x - x.adjoint()) * cplx(0.0, -0.5);
        gs_append(herm, anti, 1e-9);
    }
    return herm;
}

std::pair<AlgebraBlockDecomposition, SequentialQuantumStrategy> block_reduce(
    const SequentialQuantumStrategy& s, double tol) {
    const std::size_t d = s.dim;
    auto comm = commutant_hermitian_basis(s.bob, d);
    if (comm.empty()) throw NoConvergence("empty commutant basis");

    // Generic Hermitian commutant element; fixed seed keeps the output
    // deterministic.
    Rng rng(0x9e3779b97f4a7c15ULL);
    CMatrix r(d, d);
    for (const auto& h : comm) r += rng.gaussian() * h;
    EigResult eig = hermitian_eig(r, 1e-7);

    // Cluster eigenvalues with gap threshold sqrt(tol).
    const double scale = std::max(1.0, std::abs(eig.eigenvalues.empty() ? 0.0 : eig.eigenvalues[0]));
    const double gap = std::sqrt(tol) * scale;
    std::vector<std::pair<std::size_t, std::size_t>> clusters;  // [begin, end)
    std::size_t begin = 0;
    for (std::size_t i = 1; i <= d; ++i) {
        if (i == d || eig.eigenvalues[i - 1] - eig.eigenvalues[i] > gap) {
            clusters.emplace_back(begin, i);
            begin = i;
        }
    }

    // Cluster projector overlap through the commutant links clusters of the
    // same block.
    const std::size_t nc = clusters.size();
    std::vector<std::size_t> parent(nc);
    for (std::size_t i = 0; i < nc; ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    auto cluster_cols = [&](std::size_t c) {
        const auto [b, e] = clusters[c];
        CMatrix cols(d, e - b);
        for (std::size_t j = b; j < e; ++j)
            for (std::size_t i = 0; i < d; ++i) cols(i, j - b) = eig.eigenvectors(i, j);
        return cols;
    };
    for (std::size_t c1 = 0; c1 < nc; ++c1)
        for (std::size_t c2 = c1 + 1; c2 < nc; ++c2) {
            const CMatrix u1 = cluster_cols(c1), u2 = cluster_cols(c2);
            double link = 0.0;
            for (const auto& h : comm) link = std::max(link, (u1.adjoint() * h * u2).norm_fro());
            if (link > std::sqrt(tol)) parent[find(c1)] = find(c2);
        }

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t c = 0; c < nc; ++c) groups[find(c)].push_back(c);

    AlgebraBlockDecomposition decomp;
    for (auto& [root, members] : groups) {
        std::sort(members.begin(), members.end());
        const std::size_t n = clusters[members[0]].second - clusters[members[0]].first;
        for (std::size_t c : members)
            if (clusters[c].second - clusters[c].first != n)
                throw NoConvergence("inconsistent cluster dimensions in one block");
        const std::size_t m = members.size();

        // Align cluster bases so the algebra acts identically on each copy:
        // polar part of the commutant link from the first cluster.
        CMatrix ref = cluster_cols(members[0]);
        std::vector<CMatrix> aligned{ref};
        for (std::size_t t = 1; t < m; ++t) {
            CMatrix uj = cluster_cols(members[t]);
            // Generic commutant element restricted cluster_0 -> cluster_t is a
            // scalar times the alignment unitary.
            CMatrix best_link(n, n);
            double best_norm = -1.0;
            for (const auto& h : comm) {
                CMatrix link = uj.adjoint() * h * ref;
                const double nrm = link.norm_fro();
                if (nrm > best_norm) {
                    best_norm = nrm;
                    best_link = link;
                }
            }
            SvdResult sv = svd(best_link);
            CMatrix w = sv.u * sv.v.adjoint();
            aligned.push_back(uj * w);
        }
        AlgebraBlockDecomposition::Block blk;
        blk.n = n;
        blk.m = m;
        blk.isometry = CMatrix(d, n * m);
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t rr = 0; rr < d; ++rr)
                    blk.isometry(rr, i * m + j) = aligned[j](rr, i);
        decomp.blocks.push_back(std::move(blk));
    }
    std::sort(decomp.blocks.begin(), decomp.blocks.end(),
              [](const auto& a, const auto& b) {
                  return a.n != b.n ? a.n < b.n : a.m < b.m;
              });

    // Leakage: distance of each B_yb from block-diagonal (A_i (x) 1_m) form.
    double leak = 0.0;
    for (const auto& setting : s.bob)
        for (const auto& e : setting) {
            CMatrix recon(d, d);
            for (const auto& blk : decomp.blocks) {
                CMatrix inner = blk.isometry.adjoint() * e * blk.isometry;  // (n*m) square
                // Average over the multiplicity factor: A_i = (1/m) tr_m(inner).
                CMatrix a_i = partial_trace(inner, blk.n, blk.m, TraceSide::B) *
                              cplx(1.0 / static_cast<double>(blk.m), 0.0);
                recon += blk.isometry * kron(a_i, CMatrix::identity(blk.m)) * blk.isometry.adjoint();
            }
            leak = std::max(leak, (recon - e).norm_fro());
        }
    decomp.residual = leak;
    if (leak > std::sqrt(tol) * 10.0)
        throw NoConvergence("block structure leakage above tolerance");

    // sigma~_xa = (+)_i tr_m(P_i sigma P_i) (x) 1_m / m.
    SequentialQuantumStrategy reduced = s;
    for (std::size_t x = 0; x < s.nA; ++x)
        for (std::size_t a = 0; a < s.kA; ++a) {
            CMatrix acc(d, d);
            for (const auto& blk : decomp.blocks) {
                CMatrix inner = blk.isometry.adjoint() * s.sigma_at(x, a) * blk.isometry;
                CMatrix tr_m = partial_trace(inner, blk.n, blk.m, TraceSide::B);
                acc += blk.isometry *
                       kron(tr_m, CMatrix::identity(blk.m) * cplx(1.0 / static_cast<double>(blk.m), 0.0)) *
                       blk.isometry.adjoint();
            }
            reduced.sigma_at(x, a) = acc;
        }
    return {std::move(decomp), std::move(reduced)};
}

double chsh_selftest_residual(const SequentialQuantumStrategy& s) {
    if (s.nB != 2 || s.kB != 2) throw ShapeMismatch("needs nB = kB = 2");
    const CMatrix b0 = s.bob[0][0] - s.bob[0][1];
    const CMatrix b1 = s.bob[1][0] - s.bob[1][1];
    const CMatrix anti = b0 * b1 + b1 * b0;
    const CMatrix anti2 = anti * anti;
    double r = 0.0;
    for (std::size_t x = 0; x < s.nA; ++x)
        r = std::max(r, (s.sigma_x(x) * anti2).trace().real());
    return r;
}

SequentialQuantumStrategy sequential_from_commuting(const CommutingStrategy& s) {
    SequentialQuantumStrategy out;
    out.dim = s.d;
    out.nA = s.alice.size();
    out.kA = out.nA ? s.alice[0].size() : 0;
    out.nB = s.bob.size();
    out.kB = out.nB ? s.bob[0].size() : 0;
    CMatrix rho = CMatrix::outer(s.psi, s.psi);
    out.sigma.resize(out.nA * out.kA);
    for (std::size_t x = 0; x < out.nA; ++x)
        for (std::size_t a = 0; a < out.kA; ++a) {
            CMatrix root = mat_sqrt_psd(s.alice[x][a], 1e-8);
            out.sigma[x * out.kA + a] = root * rho * root;
        }
    out.bob = s.bob;
    return out;
}

SequentialQuantumStrategy sequential_from_quantum(const QuantumStrategy& s) {
    SequentialQuantumStrategy out;
    out.dim = s.dB;
    out.nA = s.alice.size();
    out.kA = out.nA ? s.alice[0].size() : 0;
    out.nB = s.bob.size();
    out.kB = out.nB ? s.bob[0].size() : 0;
    out.sigma.resize(out.nA * out.kA);
    CMatrix psi_m(s.dA, s.dB);
    for (std::size_t i = 0; i < s.dA; ++i)
        for (std::size_t j = 0; j < s.dB; ++j) psi_m(i, j) = s.psi[i * s.dB + j];
    for (std::size_t x = 0; x < out.nA; ++x)
        for (std::size_t a = 0; a < out.kA; ++a)
            // tr_A((M_xa (x) 1) |psi><psi|) = Psi^T M^T conj(Psi) reshaped.
            out.sigma[x * out.kA + a] = psi_m.transpose() * s.alice[x][a].transpose() * psi_m.conj();
    out.bob = s.bob;
    return out;
}

}  // namespace nlg
