// SPDX-License-Identifier: Apache-2.0
#include "nlg/quantum.hpp"

#include <algorithm>
#include <cmath>

namespace nlg {

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
    std::vector<cplx> a(dim, cplx(0.0, 0.0));
    a.at(index) = 1.0;
    return StateVector(dim, std::move(a));
}

CMatrix StateVector::projector() const {
    return CMatrix::outer(amplitudes, amplitudes);
}

bool DensityOperator::valid(double tol) const {
    if (matrix.hermiticity_defect() > tol) return false;
    if (!is_psd(matrix, tol)) return false;
    const double t = trace();
    return t >= -tol && t <= 1.0 + tol;
}

bool Povm::valid(double tol) const {
    if (elements.empty()) return false;
    const std::size_t d = elements[0].rows();
    CMatrix sum(d, d);
    for (const auto& e : elements) {
        if (e.rows() != d || e.cols() != d) return false;
        if (e.hermiticity_defect() > tol) return false;
        if (!is_psd(e, tol)) return false;
        sum += e;
    }
    return (sum - CMatrix::identity(d)).max_abs() <= tol * 10.0;
}

Povm Povm::from_observable_sign(const CMatrix& obs) {
    EigResult e = hermitian_eig(obs);
    const std::size_t d = obs.rows();
    CMatrix pos(d, d), neg(d, d);
    for (std::size_t k = 0; k < d; ++k) {
        CMatrix proj(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                proj(i, j) = e.eigenvectors(i, k) * std::conj(e.eigenvectors(j, k));
        if (e.eigenvalues[k] >= 0.0)
            pos += proj;
        else
            neg += proj;
    }
    return Povm{{pos, neg}};
}

Povm Povm::computational(std::size_t dim) {
    Povm p;
    for (std::size_t i = 0; i < dim; ++i) {
        CMatrix proj(dim, dim);
        proj(i, i) = 1.0;
        p.elements.push_back(std::move(proj));
    }
    return p;
}

bool Instrument::trace_preserving(std::size_t dim_in, double tol) const {
    CMatrix sum(dim_in, dim_in);
    for (const auto& [outcome, kraus] : branches)
        for (const auto& k : kraus) {
            if (k.cols() != dim_in) return false;
            sum += k.adjoint() * k;
        }
    return (sum - CMatrix::identity(dim_in)).max_abs() <= tol * 10.0;
}

std::vector<double> outcome_distribution(const DensityOperator& rho, const Povm& m) {
    if (m.dim() != rho.dim) throw DimensionMismatch("outcome_distribution");
    const double t = rho.trace();
    if (t <= 0.0) throw NotPsd("state has nonpositive trace");
    std::vector<double> p;
    p.reserve(m.outcomes());
    for (const auto& e : m.elements) {
        double v = (e * rho.matrix).trace().real() / t;
        p.push_back(std::max(0.0, v));
    }
    double sum = 0.0;
    for (double v : p) sum += v;
    if (sum > 0.0)
        for (double& v : p) v /= sum;
    return p;
}

std::size_t measure(const DensityOperator& rho, const Povm& m, std::uint64_t rng_seed) {
    std::vector<double> p = outcome_distribution(rho, m);
    Rng rng(rng_seed);
    double u = rng.uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) return i;
    }
    return p.size() - 1;
}

std::map<std::size_t, DensityOperator> apply_instrument(const DensityOperator& rho,
                                                        const Instrument& inst) {
    std::map<std::size_t, DensityOperator> out;
    for (const auto& [outcome, kraus] : inst.branches) {
        if (kraus.empty()) continue;
        const std::size_t dout = kraus[0].rows();
        CMatrix acc(dout, dout);
        for (const auto& k : kraus) {
            if (k.cols() != rho.dim) throw DimensionMismatch("instrument Kraus vs state");
            acc += k * rho.matrix * k.adjoint();
        }
        out.emplace(outcome, DensityOperator(std::move(acc)));
    }
    return out;
}

namespace {

// Phase-canonicalize a vector in place: first component with magnitude above
// the cutoff becomes positive real. Deterministic for golden tests.
void canonical_phase(std::vector<cplx>& v) {
    for (const auto& x : v) {
        if (std::abs(x) > 1e-12) {
            const cplx ph = std::conj(x) / std::abs(x);
            for (auto& y : v) y *= ph;
            return;
        }
    }
}

}  // namespace

StateVector purify(const DensityOperator& sigma) {
    if (sigma.matrix.hermiticity_defect() > 1e-8) throw NotPsd("purify expects Hermitian input");
    EigResult e = hermitian_eig(sigma.matrix);
    const std::size_t d = sigma.dim;
    const double scale = std::max(1.0, std::abs(e.eigenvalues.empty() ? 0.0 : e.eigenvalues[0]));
    std::vector<cplx> out(d * d, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < d; ++k) {
        double lam = e.eigenvalues[k];
        if (lam < -1e-9 * scale) throw NotPsd("negative eigenvalue in purify");
        if (lam <= 0.0) continue;
        std::vector<cplx> vk(d);
        for (std::size_t i = 0; i < d; ++i) vk[i] = e.eigenvectors(i, k);
        canonical_phase(vk);
        const double s = std::sqrt(lam);
        for (std::size_t i = 0; i < d; ++i) out[i * d + k] += s * vk[i];
    }
    return StateVector(d * d, std::move(out));
}

CMatrix uhlmann_unitary(const StateVector& psi1, const StateVector& psi2, std::size_t dim_a,
                        std::size_t dim_b, double tol) {
    if (psi1.dim != dim_a * dim_b || psi2.dim != dim_a * dim_b)
        throw DimensionMismatch("uhlmann_unitary factor dims");
    // Reshape |psi> = sum_ij Psi_ij |i>_A |j>_B.
    CMatrix m1(dim_a, dim_b), m2(dim_a, dim_b);
    for (std::size_t i = 0; i < dim_a; ++i)
        for (std::size_t j = 0; j < dim_b; ++j) {
            m1(i, j) = psi1.amplitudes[i * dim_b + j];
            m2(i, j) = psi2.amplitudes[i * dim_b + j];
        }
    // Equal B-side reductions Psi^T conj(Psi) are the precondition.
    CMatrix red1 = m1.transpose() * m1.conj();
    CMatrix red2 = m2.transpose() * m2.conj();
    if ((red1 - red2).norm_fro() > tol)
        throw ReducedStatesDiffer("purifications reduce to different operators");

    CMatrix w = m1 * m2.adjoint();  // dA x dA overlap
    SvdResult sv = svd(w);
    return sv.u * sv.v.adjoint();
}

double trace_norm(const CMatrix& a) {
    SvdResult s = svd(a);
    double t = 0.0;
    for (double x : s.s) t += x;
    return t;
}

}  // namespace nlg
