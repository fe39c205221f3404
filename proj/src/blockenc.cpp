// SPDX-License-Identifier: Apache-2.0
#include "nlg/blockenc.hpp"

#include <algorithm>
#include <cmath>

namespace nlg {

CMatrix BlockEncoding::corner() const {
    const std::size_t d = system_dim();
    CMatrix out(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) out(i, j) = u(i, j);
    return out;
}

CMatrix BlockEncoding::encoded() const { return corner() * cplx(scale, 0.0); }

double BlockEncoding::unitarity_defect() const {
    const std::size_t n = u.rows();
    if (n <= 256) return (u.adjoint() * u - CMatrix::identity(n)).max_abs();
    // Sampled check for large unitaries: column norms and a few overlaps.
    double defect = 0.0;
    Rng rng(0x5eedu);
    for (int t = 0; t < 64; ++t) {
        const std::size_t c1 = rng.below(n), c2 = rng.below(n);
        cplx ov(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) ov += std::conj(u(i, c1)) * u(i, c2);
        defect = std::max(defect, std::abs(ov - (c1 == c2 ? cplx(1.0, 0.0) : cplx(0.0, 0.0))));
    }
    return defect;
}

CMatrix pad_pow2(const CMatrix& m) {
    if (!m.square()) throw DimensionMismatch("pad_pow2 expects square input");
    std::size_t d = 1;
    while (d < m.rows()) d <<= 1;
    if (d == m.rows()) return m;
    CMatrix out(d, d);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

namespace {

std::size_t log2_exact(std::size_t d) {
    std::size_t w = 0;
    while ((std::size_t{1} << w) < d) ++w;
    if ((std::size_t{1} << w) != d) throw NotPowerOfTwo("dimension is not a power of two");
    return w;
}

// Permutation matrix moving factor order (A,B,C) -> (A,C,B) for dims a,b,c.
CMatrix swap_last_two(std::size_t da, std::size_t db, std::size_t dc) {
    CMatrix p(da * db * dc, da * db * dc);
    for (std::size_t i = 0; i < da; ++i)
        for (std::size_t j = 0; j < db; ++j)
            for (std::size_t k = 0; k < dc; ++k)
                p((i * dc + k) * db + j, (i * db + j) * dc + k) = 1.0;
    return p;
}

}  // namespace

BlockEncoding encode_contraction(const CMatrix& m_in) {
    if (!m_in.square()) throw DimensionMismatch("encode_contraction expects a square operator");
    CMatrix m = pad_pow2(m_in);
    const std::size_t d = m.rows();
    const double nrm = operator_norm(m);
    if (nrm > 1.0 + 1e-9) throw NormExceeded("operator norm above 1");

    CMatrix id = CMatrix::identity(d);
    // Clip the tiny negative drift before the square roots.
    CMatrix s1 = mat_sqrt_psd(id - m * m.adjoint(), 1e-7);
    CMatrix s2 = mat_sqrt_psd(id - m.adjoint() * m, 1e-7);

    BlockEncoding e;
    e.system_qubits = log2_exact(d);
    e.ancilla_qubits = 1;
    e.scale = 1.0;
    e.u = CMatrix(2 * d, 2 * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            e.u(i, j) = m(i, j);
            e.u(i, d + j) = s1(i, j);
            e.u(d + i, j) = s2(i, j);
            e.u(d + i, d + j) = -std::conj(m(j, i));
        }
    return e;
}

BlockEncoding product(const BlockEncoding& e1, const BlockEncoding& e2) {
    if (e1.system_qubits != e2.system_qubits)
        throw DimensionMismatch("block encodings act on different system sizes");
    const std::size_t d = e1.system_dim();
    const std::size_t a1 = std::size_t{1} << e1.ancilla_qubits;
    const std::size_t a2 = std::size_t{1} << e2.ancilla_qubits;
    // Factor order (anc1, anc2, sys): U = U1~ * U2~ with
    // U2~ = 1_{a1} (x) U2 and U1~ = P (U1 (x) 1_{a2}) P^T where P swaps the
    // last two factors of (anc1, sys, anc2).
    CMatrix u2t = kron(CMatrix::identity(a1), e2.u);
    CMatrix p = swap_last_two(a1, d, a2);  // (anc1, sys, anc2) -> (anc1, anc2, sys)
    CMatrix u1t = p * kron(e1.u, CMatrix::identity(a2)) * p.transpose();

    BlockEncoding e;
    e.system_qubits = e1.system_qubits;
    e.ancilla_qubits = e1.ancilla_qubits + e2.ancilla_qubits;
    e.scale = e1.scale * e2.scale;
    e.u = u1t * u2t;
    return e;
}

BlockEncoding adjoint_encoding(const BlockEncoding& e) {
    BlockEncoding out = e;
    out.u = e.u.adjoint();
    return out;
}

BlockEncoding linear_combination(const std::vector<BlockEncoding>& encodings,
                                 const std::vector<cplx>& coefficients) {
    if (encodings.empty()) throw EmptyList("linear_combination of nothing");
    if (encodings.size() != coefficients.size())
        throw DimensionMismatch("coefficient count mismatch");
    const std::size_t n_sys = encodings[0].system_qubits;
    std::size_t m_max = 0;
    double total = 0.0;
    for (std::size_t i = 0; i < encodings.size(); ++i) {
        if (encodings[i].system_qubits != n_sys)
            throw DimensionMismatch("mixed system sizes in linear_combination");
        m_max = std::max(m_max, encodings[i].ancilla_qubits);
        total += std::abs(coefficients[i]) * encodings[i].scale;
    }
    if (total <= 0.0) throw EmptyList("all coefficients vanish");

    // Selector register of s qubits; SELECT applies phase_i * U_i~ on branch i.
    std::size_t sel = 0;
    while ((std::size_t{1} << sel) < encodings.size()) ++sel;
    sel = std::max<std::size_t>(sel, 1);
    const std::size_t n_branches = std::size_t{1} << sel;
    const std::size_t d = std::size_t{1} << n_sys;
    const std::size_t a_max = std::size_t{1} << m_max;
    const std::size_t inner = a_max * d;

    // Prepare |w>: amplitudes sqrt(|c_i| t_i / total) with the coefficient
    // phases folded into SELECT.
    std::vector<cplx> w(n_branches, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < encodings.size(); ++i)
        w[i] = std::sqrt(std::abs(coefficients[i]) * encodings[i].scale / total);
    CMatrix w_cols(n_branches, 1);
    for (std::size_t i = 0; i < n_branches; ++i) w_cols(i, 0) = w[i];
    CMatrix prep = complete_unitary(w_cols);  // prep |0> = |w>

    // SELECT: block diagonal over the selector basis.
    CMatrix select(n_branches * inner, n_branches * inner);
    for (std::size_t i = 0; i < n_branches; ++i) {
        CMatrix block = CMatrix::identity(inner);
        if (i < encodings.size()) {
            const auto& ei = encodings[i];
            const std::size_t pad = m_max - ei.ancilla_qubits;
            // Extra ancillas in front: 1_{2^pad} (x) U_i keeps the |0...> corner.
            block = kron(CMatrix::identity(std::size_t{1} << pad), ei.u);
            const cplx mag = std::abs(coefficients[i]);
            const cplx phase = mag == cplx(0.0, 0.0) ? cplx(1.0, 0.0) : coefficients[i] / mag;
            block = block * phase;
        }
        for (std::size_t r = 0; r < inner; ++r)
            for (std::size_t c = 0; c < inner; ++c)
                select(i * inner + r, i * inner + c) = block(r, c);
    }

    CMatrix prep_full = kron(prep, CMatrix::identity(inner));
    BlockEncoding out;
    out.system_qubits = n_sys;
    out.ancilla_qubits = sel + m_max;
    out.scale = total;
    out.u = prep_full.adjoint() * select * prep_full;
    return out;
}

BlockEncoding real_part(const BlockEncoding& e) {
    return linear_combination({e, adjoint_encoding(e)}, {cplx(0.5, 0.0), cplx(0.5, 0.0)});
}

BlockEncoding imag_part(const BlockEncoding& e) {
    const cplx half_over_i(0.0, -0.5);  // 1/(2i)
    return linear_combination({e, adjoint_encoding(e)}, {half_over_i, -half_over_i});
}

BlockEncoding encode_polynomial(const std::vector<std::vector<CMatrix>>& bob,
                                const NCPolynomial& p) {
    if (p.terms.empty()) throw EmptyList("empty polynomial");
    const std::size_t d_raw = bob.at(0).at(0).rows();
    CMatrix id = CMatrix::identity(d_raw);

    std::vector<BlockEncoding> term_encodings;
    std::vector<cplx> coeffs;
    for (const auto& [coeff, word] : p.terms) {
        // POVM elements are contractions (0 <= B <= 1), so every letter has
        // a dilation encoding with t = 1.
        BlockEncoding acc = word.empty() ? encode_contraction(id)
                                         : encode_contraction(bob.at(word[0].first).at(word[0].second));
        for (std::size_t i = 1; i < word.size(); ++i)
            acc = product(acc, encode_contraction(bob.at(word[i].first).at(word[i].second)));
        term_encodings.push_back(std::move(acc));
        coeffs.push_back(coeff);
    }
    if (term_encodings.size() == 1 && coeffs[0] == cplx(1.0, 0.0)) return term_encodings[0];
    return linear_combination(term_encodings, coeffs);
}

}  // namespace nlg
