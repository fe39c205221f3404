// SPDX-License-Identifier: Apache-2.0
#include "nlg/sdp.hpp"

#include <algorithm>
#include <cmath>

namespace nlg {

namespace {

// Hermitian Cholesky A = L L*. Returns false if A is not positive definite.
bool cholesky(const CMatrix& a, CMatrix& l) {
    const std::size_t n = a.rows();
    l = CMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (d <= 0.0 || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / ljj;
        }
    }
    return true;
}

// Inverse from the Cholesky factor: A^-1 = L^-* L^-1.
CMatrix inverse_from_cholesky(const CMatrix& l) {
    const std::size_t n = l.rows();
    CMatrix linv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        linv(j, j) = 1.0 / l(j, j);
        for (std::size_t i = j + 1; i < n; ++i) {
            cplx s(0.0, 0.0);
            for (std::size_t k = j; k < i; ++k) s += l(i, k) * linv(k, j);
            linv(i, j) = -s / l(i, i);
        }
    }
    CMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cplx s(0.0, 0.0);
            for (std::size_t k = std::max(i, j); k < n; ++k)
                s += std::conj(linv(k, i)) * linv(k, j);
            inv(i, j) = s;
        }
    return inv;
}

double logdet_from_cholesky(const CMatrix& l) {
    double s = 0.0;
    for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i).real());
    return 2.0 * s;
}

// Real symmetric positive definite solve via Cholesky (for Newton systems).
bool solve_spd(std::vector<std::vector<double>> h, std::vector<double> g,
               std::vector<double>& out) {
    const std::size_t n = g.size();
    for (std::size_t j = 0; j < n; ++j) {
        double d = h[j][j];
        for (std::size_t k = 0; k < j; ++k) d -= h[j][k] * h[j][k];
        if (d <= 0.0 || !std::isfinite(d)) return false;
        h[j][j] = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = h[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= h[i][k] * h[j][k];
            h[i][j] = s / h[j][j];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = g[i];
        for (std::size_t k = 0; k < i; ++k) s -= h[i][k] * g[k];
        g[i] = s / h[i][i];
    }
    out.assign(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = g[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= h[k][ii] * out[k];
        out[ii] = s / h[ii][ii];
    }
    return true;
}

struct Blocks {
    std::vector<CMatrix> s;
    bool factor(std::vector<CMatrix>& l) const {
        l.resize(s.size());
        for (std::size_t k = 0; k < s.size(); ++k)
            if (!cholesky(s[k], l[k])) return false;
        return true;
    }
};

Blocks eval_blocks(const SdpProblem& pb, const std::vector<double>& z) {
    Blocks b;
    b.s = pb.f0;
    for (std::size_t j = 0; j < pb.fj.size(); ++j) {
        if (z[j] == 0.0) continue;
        for (std::size_t k = 0; k < b.s.size(); ++k) {
            const CMatrix& f = pb.fj[j][k];
            if (f.rows() == 0) continue;
            for (std::size_t t = 0; t < f.data().size(); ++t) b.s[k].data()[t] += z[j] * f.data()[t];
        }
    }
    return b;
}

std::size_t total_dim(const SdpProblem& pb) {
    std::size_t n = 0;
    for (const auto& f : pb.f0) n += f.rows();
    return n;
}

// One centering stage: damped Newton on  c.z + mu * sum_k logdet S_k(z)
// until the Newton decrement falls under `target`. Returns false on stall.
bool center(const SdpProblem& pb, std::vector<double>& z, double mu, double target,
            int& newton_budget, int& steps_used, std::vector<CMatrix>* sinv_out) {
    const std::size_t p = pb.c.size();
    while (newton_budget > 0) {
        --newton_budget;
        ++steps_used;
        Blocks blk = eval_blocks(pb, z);
        std::vector<CMatrix> l;
        if (!blk.factor(l)) return false;  // lost feasibility (should not happen)
        std::vector<CMatrix> sinv(blk.s.size());
        for (std::size_t k = 0; k < blk.s.size(); ++k) sinv[k] = inverse_from_cholesky(l[k]);

        // T[j][k] = S_k^-1 F_jk, gradient and Hessian of the barrier.
        std::vector<std::vector<CMatrix>> t(p);
        std::vector<double> g(p, 0.0);
        for (std::size_t j = 0; j < p; ++j) {
            t[j].resize(blk.s.size());
            double acc = 0.0;
            for (std::size_t k = 0; k < blk.s.size(); ++k) {
                const CMatrix& f = pb.fj[j][k];
                if (f.rows() == 0) continue;
                t[j][k] = sinv[k] * f;
                acc += t[j][k].trace().real();
            }
            g[j] = pb.c[j] + mu * acc;
        }
        std::vector<std::vector<double>> h(p, std::vector<double>(p, 0.0));
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t j2 = j; j2 < p; ++j2) {
                double acc = 0.0;
                for (std::size_t k = 0; k < blk.s.size(); ++k) {
                    const CMatrix& tj = t[j][k];
                    const CMatrix& tj2 = t[j2][k];
                    if (tj.rows() == 0 || tj2.rows() == 0) continue;
                    // tr(T_j T_j2)
                    const std::size_t n = tj.rows();
                    for (std::size_t r = 0; r < n; ++r)
                        for (std::size_t cidx = 0; cidx < n; ++cidx)
                            acc += (tj(r, cidx) * tj2(cidx, r)).real();
                }
                h[j][j2] = h[j2][j] = mu * acc;  // -Hessian (positive definite)
            }

        std::vector<double> dz;
        if (!solve_spd(h, g, dz)) return false;
        double lambda2 = 0.0;
        for (std::size_t j = 0; j < p; ++j) lambda2 += g[j] * dz[j];
        if (!(lambda2 >= 0.0) || !std::isfinite(lambda2)) return false;
        const double lambda = std::sqrt(lambda2);
        if (lambda <= target) {
            if (sinv_out) *sinv_out = sinv;
            return true;
        }
        double step = (lambda > 0.25) ? 1.0 / (1.0 + lambda) : 1.0;
        // Keep strictly feasible.
        for (int tries = 0; tries < 60; ++tries) {
            std::vector<double> zt = z;
            for (std::size_t j = 0; j < p; ++j) zt[j] += step * dz[j];
            Blocks bt = eval_blocks(pb, zt);
            std::vector<CMatrix> lt;
            if (bt.factor(lt)) {
                z = zt;
                break;
            }
            step *= 0.5;
            if (tries == 59) return false;
        }
    }
    return false;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& pb, const SdpOptions& opt) {
    const std::size_t p = pb.c.size();
    if (pb.fj.size() != p) throw SolverFailure("variable count mismatch");
    for (const auto& per_var : pb.fj)
        if (per_var.size() != pb.f0.size()) throw SolverFailure("block count mismatch");
    const std::size_t nd = total_dim(pb);
    if (nd == 0) throw SolverFailure("empty problem");
    for (const auto& f : pb.f0)
        if (f.rows() > 500) throw BudgetExceeded("SDP block side above 500");

    std::vector<double> z;
    if (opt.z0) {
        z = *opt.z0;
        Blocks b0 = eval_blocks(pb, z);
        std::vector<CMatrix> l;
        if (!b0.factor(l)) throw SolverFailure("provided start is not strictly feasible");
    } else {
        // Phase 1: maximize tau s.t. S(z) - tau I psd, from the analytic
        // strictly feasible start z = 0, tau = lambda_min(F0) - 1.
        SdpProblem ph;
        ph.c.assign(p + 1, 0.0);
        ph.c[p] = 1.0;
        ph.f0 = pb.f0;
        ph.fj = pb.fj;
        for (auto& per_var : ph.fj) per_var.resize(pb.f0.size());
        std::vector<CMatrix> tau_dir;
        for (const auto& f : pb.f0) {
            CMatrix m = CMatrix::identity(f.rows());
            tau_dir.push_back(m * cplx(-1.0, 0.0));
        }
        ph.fj.push_back(tau_dir);

        double lam_min = 0.0;
        for (const auto& f : pb.f0) lam_min = std::min(lam_min, min_eigenvalue(f));
        std::vector<double> zp(p + 1, 0.0);
        zp[p] = lam_min - 1.0;

        int budget = opt.max_newton;
        int used = 0;
        double mu = 1.0 + std::abs(zp[p]);
        const double feas_target = 1e-4;
        bool ok = false;
        for (int stage = 0; stage < 80; ++stage) {
            if (!center(ph, zp, mu, 0.3, budget, used, nullptr))
                throw SolverFailure("phase-1 centering stalled");
            if (zp[p] >= feas_target) {
                ok = true;
                break;
            }
            if (mu * static_cast<double>(nd) < 1e-10 && zp[p] < feas_target)
                break;  // phase-1 converged without reaching the margin
            mu /= 6.0;
        }
        if (!ok) throw SolverFailure("no strictly feasible point (phase 1)");
        z.assign(zp.begin(), zp.begin() + p);
        // Margin tau > 0 certifies S(z) strictly psd.
    }

    int budget = opt.max_newton;
    int used = 0;
    // Initial mu from the scale of the start.
    double mu = 1.0;
    {
        double cz = 0.0;
        for (std::size_t j = 0; j < p; ++j) cz += pb.c[j] * z[j];
        mu = std::max(1.0, std::abs(cz)) / static_cast<double>(nd);
    }
    std::vector<CMatrix> sinv;
    const double mu_final = opt.tol / (4.0 * static_cast<double>(nd));
    for (int stage = 0; stage < 200; ++stage) {
        if (!center(pb, z, mu, 0.25, budget, used, nullptr))
            throw SolverFailure("centering stalled");
        if (mu <= mu_final) break;
        mu = std::max(mu / 8.0, mu_final);
        if (stage == 199) throw SolverFailure("mu schedule exhausted");
    }
    // Tight final centering so the dual certificate is accurate.
    if (!center(pb, z, mu, 1e-7, budget, used, &sinv))
        throw SolverFailure("final centering stalled");

    SdpSolution out;
    out.z = z;
    out.newton_steps = used;
    Blocks blk = eval_blocks(pb, z);
    out.s_blocks = blk.s;
    out.x_blocks.resize(blk.s.size());
    for (std::size_t k = 0; k < blk.s.size(); ++k) out.x_blocks[k] = sinv[k] * cplx(mu, 0.0);
    out.gap = mu * static_cast<double>(nd);
    double cz = 0.0;
    for (std::size_t j = 0; j < p; ++j) cz += pb.c[j] * z[j];
    out.value = cz;
    double dres = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        double acc = pb.c[j];
        for (std::size_t k = 0; k < blk.s.size(); ++k) {
            const CMatrix& f = pb.fj[j][k];
            if (f.rows() == 0) continue;
            acc += (out.x_blocks[k] * f).trace().real();
        }
        dres = std::max(dres, std::abs(acc));
    }
    out.dual_residual = dres;
    return out;
}

AffineSolveResult solve_affine(const std::vector<std::vector<double>>& e,
                               const std::vector<double>& d) {
    const std::size_t m = e.size();
    const std::size_t p = m == 0 ? 0 : e[0].size();
    AffineSolveResult out;
    if (m == 0) {
        out.particular.assign(p, 0.0);
        return out;
    }
    CMatrix em(m, p);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < p; ++j) em(i, j) = e[i][j];
    SvdResult sv = svd(em);
    const double cutoff = 1e-11 * std::max(1.0, sv.s.empty() ? 0.0 : sv.s[0]);
    // particular = V diag(1/s) U* d on the range.
    out.particular.assign(p, 0.0);
    const std::size_t r = std::min(m, p);
    for (std::size_t k = 0; k < r; ++k) {
        if (sv.s[k] <= cutoff) continue;
        cplx coef(0.0, 0.0);
        for (std::size_t i = 0; i < m; ++i) coef += std::conj(sv.u(i, k)) * d[i];
        coef /= sv.s[k];
        for (std::size_t j = 0; j < p; ++j) out.particular[j] += (coef * sv.v(j, k)).real();
    }
    for (std::size_t k = 0; k < p; ++k) {
        if (k < r && sv.s[k] > cutoff) continue;
        std::vector<double> base(p);
        for (std::size_t j = 0; j < p; ++j) base[j] = sv.v(j, k).real();
        out.nullspace.push_back(std::move(base));
    }
    double res = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double acc = -d[i];
        for (std::size_t j = 0; j < p; ++j) acc += e[i][j] * out.particular[j];
        res += acc * acc;
    }
    out.residual = std::sqrt(res);
    return out;
}

LpSolution solve_lp(const LpProblem& pb, double tol) {
    const std::size_t n = pb.c.size();
    if (pb.p0.size() != n) throw SolverFailure("LP start size mismatch");
    for (double v : pb.p0)
        if (v <= 0.0) throw SolverFailure("LP start must be strictly positive");

    AffineSolveResult aff = solve_affine(pb.a_eq, pb.b_eq);
    const std::size_t q = aff.nullspace.size();
    // p(z) = p0 + N z stays on the equality manifold (p0 is feasible).
    auto eval_p = [&](const std::vector<double>& zz) {
        std::vector<double> pv = pb.p0;
        for (std::size_t j = 0; j < q; ++j)
            for (std::size_t i = 0; i < n; ++i) pv[i] += zz[j] * aff.nullspace[j][i];
        return pv;
    };

    std::vector<double> z(q, 0.0);
    double mu = 1.0;
    const double mu_final = tol / (4.0 * static_cast<double>(std::max<std::size_t>(1, n)));
    for (int stage = 0; stage < 200 && mu > mu_final; ++stage, mu = std::max(mu / 8.0, mu_final)) {
        for (int it = 0; it < 200; ++it) {
            std::vector<double> pv = eval_p(z);
            for (double v : pv)
                if (v <= 0.0) throw SolverFailure("LP iterate left the cone");
            // gradient / Hessian in z of c.p + mu sum log p_i
            std::vector<double> g(q, 0.0);
            std::vector<std::vector<double>> h(q, std::vector<double>(q, 0.0));
            for (std::size_t j = 0; j < q; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    acc += aff.nullspace[j][i] * (pb.c[i] + mu / pv[i]);
                g[j] = acc;
            }
            for (std::size_t j = 0; j < q; ++j)
                for (std::size_t j2 = j; j2 < q; ++j2) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < n; ++i)
                        acc += aff.nullspace[j][i] * aff.nullspace[j2][i] * mu / (pv[i] * pv[i]);
                    h[j][j2] = h[j2][j] = acc;
                }
            std::vector<double> dz;
            if (!solve_spd(h, g, dz)) throw SolverFailure("LP Newton system singular");
            double lambda2 = 0.0;
            for (std::size_t j = 0; j < q; ++j) lambda2 += g[j] * dz[j];
            const double lambda = std::sqrt(std::max(0.0, lambda2));
            if (lambda < 0.2) break;
            double step = (lambda > 0.25) ? 1.0 / (1.0 + lambda) : 1.0;
            for (int tries = 0; tries < 80; ++tries) {
                std::vector<double> zt = z;
                for (std::size_t j = 0; j < q; ++j) zt[j] += step * dz[j];
                std::vector<double> pt = eval_p(zt);
                bool pos = true;
                for (double v : pt)
                    if (v <= 0.0) pos = false;
                if (pos) {
                    z = zt;
                    break;
                }
                step *= 0.5;
                if (tries == 79) throw SolverFailure("LP line search stalled");
            }
        }
    }
    // Final tight centering at mu_final.
    for (int it = 0; it < 400; ++it) {
        std::vector<double> pv = eval_p(z);
        std::vector<double> g(q, 0.0);
        std::vector<std::vector<double>> h(q, std::vector<double>(q, 0.0));
        for (std::size_t j = 0; j < q; ++j) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += aff.nullspace[j][i] * (pb.c[i] + mu / pv[i]);
            g[j] = acc;
        }
        for (std::size_t j = 0; j < q; ++j)
            for (std::size_t j2 = j; j2 < q; ++j2) {
                double acc = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    acc += aff.nullspace[j][i] * aff.nullspace[j2][i] * mu / (pv[i] * pv[i]);
                h[j][j2] = h[j2][j] = acc;
            }
        std::vector<double> dz;
        if (!solve_spd(h, g, dz)) break;
        double lambda2 = 0.0;
        for (std::size_t j = 0; j < q; ++j) lambda2 += g[j] * dz[j];
        if (std::sqrt(std::max(0.0, lambda2)) < 1e-9) break;
        double step = 1.0;
        for (int tries = 0; tries < 80; ++tries) {
            std::vector<double> zt = z;
            for (std::size_t j = 0; j < q; ++j) zt[j] += step * dz[j];
            std::vector<double> pt = eval_p(zt);
            bool pos = true;
            for (double v : pt)
                if (v <= 0.0) pos = false;
            if (pos) {
                z = zt;
                break;
            }
            step *= 0.5;
        }
    }

    LpSolution out;
    out.p = eval_p(z);
    out.value = 0.0;
    for (std::size_t i = 0; i < n; ++i) out.value += pb.c[i] * out.p[i];
    out.gap = mu * static_cast<double>(n);
    return out;
}

}  // namespace nlg
