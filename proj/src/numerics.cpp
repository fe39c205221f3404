// SPDX-License-Identifier: Apache-2.0
#include "nlg/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nlg {

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (a_.size() != rows_ * cols_)
        throw DimensionMismatch("entry count does not match rows*cols");
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diag(const std::vector<double>& d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

CMatrix CMatrix::outer(const std::vector<cplx>& u, const std::vector<cplx>& v) {
    CMatrix m(u.size(), v.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * std::conj(v[j]);
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) m(c, r) = std::conj((*this)(r, c));
    return m;
}

CMatrix CMatrix::transpose() const {
    CMatrix m(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
    return m;
}

CMatrix CMatrix::conj() const {
    CMatrix m(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = std::conj(a_[i]);
    return m;
}

CMatrix CMatrix::operator+(const CMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("add");
    CMatrix m = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] += o.a_[i];
    return m;
}

CMatrix CMatrix::operator-(const CMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("sub");
    CMatrix m = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] -= o.a_[i];
    return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("add");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("sub");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

CMatrix CMatrix::operator*(const CMatrix& o) const {
    if (cols_ != o.rows_) throw DimensionMismatch("mul");
    CMatrix m(rows_, o.cols_);
    // ikj order keeps the inner loop contiguous in both operands.
    for (std::size_t i = 0; i < rows_; ++i) {
        const cplx* arow = a_.data() + i * cols_;
        cplx* mrow = m.a_.data() + i * o.cols_;
        for (std::size_t k = 0; k < cols_; ++k) {
            const cplx aik = arow[k];
            if (aik == cplx(0.0, 0.0)) continue;
            const cplx* brow = o.a_.data() + k * o.cols_;
            for (std::size_t j = 0; j < o.cols_; ++j) mrow[j] += aik * brow[j];
        }
    }
    return m;
}

CMatrix CMatrix::operator*(cplx s) const {
    CMatrix m = *this;
    for (auto& x : m.a_) x *= s;
    return m;
}

std::vector<cplx> CMatrix::apply(const std::vector<cplx>& v) const {
    if (v.size() != cols_) throw DimensionMismatch("apply");
    std::vector<cplx> out(rows_, cplx(0.0, 0.0));
    for (std::size_t r = 0; r < rows_; ++r) {
        cplx acc(0.0, 0.0);
        const cplx* row = a_.data() + r * cols_;
        for (std::size_t c = 0; c < cols_; ++c) acc += row[c] * v[c];
        out[r] = acc;
    }
    return out;
}

cplx CMatrix::trace() const {
    cplx t(0.0, 0.0);
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

double CMatrix::norm_fro() const {
    double s = 0.0;
    for (const auto& x : a_) s += std::norm(x);
    return std::sqrt(s);
}

double CMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& x : a_) m = std::max(m, std::abs(x));
    return m;
}

double CMatrix::hermiticity_defect() const {
    if (!square()) return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = r; c < cols_; ++c)
            m = std::max(m, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
    return m;
}

bool CMatrix::finite() const {
    for (const auto& x : a_)
        if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
}

double vec_norm(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}

cplx vec_dot(const std::vector<cplx>& u, const std::vector<cplx>& v) {
    if (u.size() != v.size()) throw DimensionMismatch("dot");
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
    return s;
}

EigResult hermitian_eig(const CMatrix& a, double tol) {
    if (!a.square()) throw DimensionMismatch("hermitian_eig expects a square matrix");
    if (!a.finite()) throw NotHermitian("non-finite entries");
    const double scale = std::max(1.0, a.max_abs());
    if (a.hermiticity_defect() > tol * std::max(1.0, scale))
        throw NotHermitian("symmetry defect above tolerance");

    const std::size_t n = a.rows();
    CMatrix w = a;
    // Fold in the adjoint so roundoff asymmetry cannot bias the rotations.
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            w(r, c) = 0.5 * (w(r, c) + std::conj(a(c, r)));
    CMatrix v = CMatrix::identity(n);

    const int max_sweeps = 100;
    const double thresh = 1e-15 * std::max(1.0, scale);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(w(p, q)));
        if (off <= thresh) break;
        if (sweep == max_sweeps - 1) throw NoConvergence("jacobi sweep budget exhausted");

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = w(p, q);
                if (std::abs(apq) <= thresh) continue;
                const double app = w(p, p).real();
                const double aqq = w(q, q).real();
                // Unitary 2x2 rotation [[c, s],[-conj(s), c]] zeroing apq.
                const double phi = std::arg(apq);
                const double r = std::abs(apq);
                const double tau = (aqq - app) / (2.0 * r);
                double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const cplx s = std::polar(t * c, phi);

                for (std::size_t k = 0; k < n; ++k) {
                    const cplx wkp = w(k, p), wkq = w(k, q);
                    w(k, p) = c * wkp - std::conj(s) * wkq;
                    w(k, q) = s * wkp + c * wkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx wpk = w(p, k), wqk = w(q, k);
                    w(p, k) = c * wpk - s * wqk;
                    w(q, k) = std::conj(s) * wpk + c * wqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - std::conj(s) * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = w(i, i).real();
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return diag[i] > diag[j]; });

    EigResult out;
    out.eigenvalues.resize(n);
    out.eigenvectors = CMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = diag[order[j]];
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
    }
    return out;
}

SvdResult svd(const CMatrix& a) {
    if (a.rows() < a.cols()) {
        SvdResult t = svd(a.adjoint());
        return SvdResult{std::move(t.v), std::move(t.s), std::move(t.u)};
    }
    const std::size_t m = a.rows(), n = a.cols();
    CMatrix w = a;                       // columns get orthogonalized in place
    CMatrix v = CMatrix::identity(n);

    const double scale = std::max(1.0, a.max_abs());
    const double eps = 1e-15;
    const int max_sweeps = 60;
    bool converged = (n <= 1);
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        converged = true;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                cplx apq(0.0, 0.0);
                double app = 0.0, aqq = 0.0;
                for (std::size_t i = 0; i < m; ++i) {
                    app += std::norm(w(i, p));
                    aqq += std::norm(w(i, q));
                    apq += std::conj(w(i, p)) * w(i, q);
                }
                if (std::abs(apq) <= eps * std::sqrt(app * aqq) + eps * scale * scale) continue;
                converged = false;
                // Rotate columns p,q to zero the Gram off-diagonal.
                const double phi = std::arg(apq);
                const double r = std::abs(apq);
                const double tau = (aqq - app) / (2.0 * r);
                double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const cplx s = std::polar(t * c, phi);
                for (std::size_t i = 0; i < m; ++i) {
                    const cplx wip = w(i, p), wiq = w(i, q);
                    w(i, p) = c * wip - std::conj(s) * wiq;
                    w(i, q) = s * wip + c * wiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const cplx vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - std::conj(s) * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    if (!converged) throw NoConvergence("svd sweep budget exhausted");

    std::vector<double> sig(n);
    for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) sum += std::norm(w(i, j));
        sig[j] = std::sqrt(sum);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sig[i] > sig[j]; });

    SvdResult out;
    out.s.resize(n);
    out.v = CMatrix(n, n);
    const double rank_tol = 1e-13 * std::max(1.0, sig.empty() ? 0.0 : sig[order[0]]);
    std::size_t rank = 0;
    for (std::size_t j = 0; j < n; ++j)
        if (sig[order[j]] > rank_tol) ++rank;
    CMatrix ucols(m, rank);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.s[j] = sig[src];
        for (std::size_t i = 0; i < n; ++i) out.v(i, j) = v(i, src);
        if (j < rank)
            for (std::size_t i = 0; i < m; ++i) ucols(i, j) = w(i, src) / sig[src];
    }
    // Columns past the rank (zero singular values) take any orthonormal
    // completion; they multiply zeros in u diag(s) v*.
    out.u = complete_unitary(ucols);
    return out;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar)
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const cplx f = a(ar, ac);
            if (f == cplx(0.0, 0.0)) continue;
            for (std::size_t br = 0; br < b.rows(); ++br)
                for (std::size_t bc = 0; bc < b.cols(); ++bc)
                    m(ar * b.rows() + br, ac * b.cols() + bc) = f * b(br, bc);
        }
    return m;
}

std::vector<cplx> kron_vec(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    std::vector<cplx> out(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
    return out;
}

CMatrix partial_trace(const CMatrix& a, std::size_t dim_a, std::size_t dim_b, TraceSide side) {
    if (!a.square() || a.rows() != dim_a * dim_b)
        throw DimensionMismatch("partial_trace dims do not factor the matrix");
    if (side == TraceSide::B) {
        CMatrix out(dim_a, dim_a);
        for (std::size_t i = 0; i < dim_a; ++i)
            for (std::size_t j = 0; j < dim_a; ++j) {
                cplx s(0.0, 0.0);
                for (std::size_t k = 0; k < dim_b; ++k) s += a(i * dim_b + k, j * dim_b + k);
                out(i, j) = s;
            }
        return out;
    }
    CMatrix out(dim_b, dim_b);
    for (std::size_t i = 0; i < dim_b; ++i)
        for (std::size_t j = 0; j < dim_b; ++j) {
            cplx s(0.0, 0.0);
            for (std::size_t k = 0; k < dim_a; ++k) s += a(k * dim_b + i, k * dim_b + j);
            out(i, j) = s;
        }
    return out;
}

CMatrix mat_sqrt_psd(const CMatrix& a, double tol) {
    EigResult e = hermitian_eig(a, tol);
    const double scale = std::max(1.0, std::abs(e.eigenvalues.empty() ? 0.0 : e.eigenvalues[0]));
    CMatrix out(a.rows(), a.rows());
    for (std::size_t k = 0; k < e.eigenvalues.size(); ++k) {
        double lam = e.eigenvalues[k];
        if (lam < -tol * scale) throw NotPsd("negative eigenvalue in mat_sqrt_psd");
        if (lam < 0.0) lam = 0.0;
        const double s = std::sqrt(lam);
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.rows(); ++j)
                out(i, j) += s * e.eigenvectors(i, k) * std::conj(e.eigenvectors(j, k));
    }
    return out;
}

bool is_psd(const CMatrix& a, double tol) { return min_eigenvalue(a) >= -tol; }

double min_eigenvalue(const CMatrix& a) {
    EigResult e = hermitian_eig(a, 1e-7);
    return e.eigenvalues.empty() ? 0.0 : e.eigenvalues.back();
}

double operator_norm(const CMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    SvdResult s = svd(a);
    return s.s.empty() ? 0.0 : s.s[0];
}

std::vector<cplx> solve_hermitian(const CMatrix& a, const std::vector<cplx>& b) {
    EigResult e = hermitian_eig(a, 1e-7);
    const std::size_t n = a.rows();
    const double cutoff = 1e-14 * std::max(1.0, std::abs(e.eigenvalues.empty() ? 0.0 : e.eigenvalues[0]));
    std::vector<cplx> out(n, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        cplx proj(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) proj += std::conj(e.eigenvectors(i, k)) * b[i];
        const double lam = e.eigenvalues[k];
        if (std::abs(lam) <= cutoff) continue;
        proj /= lam;
        for (std::size_t i = 0; i < n; ++i) out[i] += proj * e.eigenvectors(i, k);
    }
    return out;
}

CMatrix complete_unitary(const CMatrix& columns) {
    const std::size_t n = columns.rows();
    const std::size_t k = columns.cols();
    if (k > n) throw DimensionMismatch("more columns than rows");
    CMatrix u(n, n);
    std::vector<std::vector<cplx>> basis;
    basis.reserve(n);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<cplx> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = columns(i, j);
        basis.push_back(std::move(col));
    }
    // Extend with standard basis vectors, re-orthogonalized twice.
    for (std::size_t cand = 0; cand < n && basis.size() < n; ++cand) {
        std::vector<cplx> v(n, cplx(0.0, 0.0));
        v[cand] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) {
                const cplx ov = vec_dot(b, v);
                for (std::size_t i = 0; i < n; ++i) v[i] -= ov * b[i];
            }
        const double nv = vec_norm(v);
        if (nv < 1e-8) continue;
        for (auto& x : v) x /= nv;
        basis.push_back(std::move(v));
    }
    if (basis.size() != n) throw NoConvergence("failed to complete unitary basis");
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) u(i, j) = basis[j][i];
    return u;
}

CMatrix random_unitary(std::size_t n, Rng& rng) {
    CMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = cplx(rng.gaussian(), rng.gaussian());
    // Gram-Schmidt the columns.
    std::vector<std::vector<cplx>> cols;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<cplx> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = g(i, j);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : cols) {
                const cplx ov = vec_dot(b, v);
                for (std::size_t i = 0; i < n; ++i) v[i] -= ov * b[i];
            }
        double nv = vec_norm(v);
        if (nv < 1e-12) {  // essentially impossible; regenerate deterministically
            v.assign(n, cplx(0.0, 0.0));
            v[j] = 1.0;
            nv = 1.0;
        }
        for (auto& x : v) x /= nv;
        cols.push_back(std::move(v));
    }
    CMatrix u(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) u(i, j) = cols[j][i];
    return u;
}

CMatrix random_hermitian(std::size_t n, Rng& rng) {
    CMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = cplx(rng.gaussian(), rng.gaussian());
    CMatrix h = g + g.adjoint();
    return 0.5 * h;
}

CMatrix random_density(std::size_t n, Rng& rng) {
    CMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = cplx(rng.gaussian(), rng.gaussian());
    CMatrix rho = g * g.adjoint();
    const double t = rho.trace().real();
    return rho * cplx(1.0 / t, 0.0);
}

}  // namespace nlg
