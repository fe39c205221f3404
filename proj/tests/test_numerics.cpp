// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nlg/numerics.hpp"

using namespace nlg;

namespace {

CMatrix pauli_x() { return CMatrix(2, 2, {0, 1, 1, 0}); }

double reconstruction_error(const CMatrix& a, const EigResult& e) {
    const std::size_t n = a.rows();
    CMatrix recon(n, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                recon(i, j) += e.eigenvalues[k] * e.eigenvectors(i, k) * std::conj(e.eigenvectors(j, k));
    return (recon - a).max_abs();
}

}  // namespace

TEST_CASE("hermitian_eig identity") {
    EigResult e = hermitian_eig(CMatrix::identity(3));
    for (double v : e.eigenvalues) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hermitian_eig pauli x") {
    EigResult e = hermitian_eig(pauli_x());
    CHECK(e.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e.eigenvalues[1] == doctest::Approx(-1.0).epsilon(1e-12));
    // Eigenvectors are |+> and |-> up to phase: components equal magnitude.
    for (std::size_t k = 0; k < 2; ++k)
        CHECK(std::abs(e.eigenvectors(0, k)) == doctest::Approx(std::abs(e.eigenvectors(1, k))).epsilon(1e-10));
}

TEST_CASE("hermitian_eig random reconstruction and orthonormality") {
    Rng rng(7);
    for (int trial = 0; trial < 4; ++trial) {
        CMatrix a = random_hermitian(8, rng);
        EigResult e = hermitian_eig(a);
        const double scale = std::max(1.0, a.max_abs());
        CHECK(reconstruction_error(a, e) <= 1e-10 * scale);
        CMatrix vtv = e.eigenvectors.adjoint() * e.eigenvectors;
        CHECK((vtv - CMatrix::identity(8)).max_abs() <= 1e-10);
        // Residual A v = lambda v.
        for (std::size_t k = 0; k < 8; ++k) {
            std::vector<cplx> v(8);
            for (std::size_t i = 0; i < 8; ++i) v[i] = e.eigenvectors(i, k);
            auto av = a.apply(v);
            for (std::size_t i = 0; i < 8; ++i) av[i] -= e.eigenvalues[k] * v[i];
            CHECK(vec_norm(av) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("hermitian_eig rejects non-hermitian") {
    CMatrix a(2, 2, {1.0, cplx(0.0, 1.0), cplx(0.0, 1.0), 1.0});  // symmetric, not Hermitian
    CHECK_THROWS_AS(hermitian_eig(a, 1e-9), NotHermitian);
}

TEST_CASE("svd zero and unitary") {
    SvdResult z = svd(CMatrix(3, 3));
    for (double s : z.s) CHECK(s == doctest::Approx(0.0));
    Rng rng(11);
    CMatrix u = random_unitary(5, rng);
    SvdResult su = svd(u);
    for (double s : su.s) CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("svd random rectangular reconstruction and norm identity") {
    Rng rng(13);
    CMatrix a(4, 6);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 6; ++j) a(i, j) = cplx(rng.gaussian(), rng.gaussian());
    SvdResult sv = svd(a);
    double ssum = 0.0;
    for (double s : sv.s) ssum += s * s;
    CHECK(std::sqrt(ssum) == doctest::Approx(a.norm_fro()).epsilon(1e-10));

    CMatrix sigma(4, 6);
    for (std::size_t k = 0; k < sv.s.size(); ++k) sigma(k, k) = sv.s[k];
    CMatrix recon = sv.u * sigma * sv.v.adjoint();
    CHECK((recon - a).max_abs() <= 1e-10 * std::max(1.0, a.max_abs()));
    CHECK((sv.u.adjoint() * sv.u - CMatrix::identity(4)).max_abs() <= 1e-10);
    CHECK((sv.v.adjoint() * sv.v - CMatrix::identity(6)).max_abs() <= 1e-10);
}

TEST_CASE("kron identities and associativity") {
    CMatrix i2 = CMatrix::identity(2);
    CHECK((kron(i2, i2) - CMatrix::identity(4)).max_abs() == 0.0);
    Rng rng(17);
    CMatrix a = random_hermitian(2, rng), b = random_hermitian(3, rng), c = random_hermitian(2, rng);
    CHECK((kron(kron(a, b), c) - kron(a, kron(b, c))).max_abs() <= 1e-12);
    // (A (x) B)(C (x) D) = AC (x) BD
    CMatrix d = random_hermitian(3, rng);
    CHECK((kron(a, b) * kron(c, d) - kron(a * c, b * d)).max_abs() <= 1e-10);
}

TEST_CASE("partial trace") {
    // |00><00| over B -> |0><0|
    CMatrix rho(4, 4);
    rho(0, 0) = 1.0;
    CMatrix red = partial_trace(rho, 2, 2, TraceSide::B);
    CHECK(red(0, 0) == cplx(1.0, 0.0));
    CHECK(std::abs(red(1, 1)) == 0.0);

    // tr(partial_trace(rho)) = tr(rho) on random states.
    Rng rng(23);
    CMatrix r = random_density(6, rng);
    CHECK(partial_trace(r, 2, 3, TraceSide::A).trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(partial_trace(r, 2, 3, TraceSide::B).trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    // partial_trace(X (x) Y, B) = tr(Y) X.
    CMatrix x = random_hermitian(2, rng), y = random_hermitian(3, rng);
    CMatrix lhs = partial_trace(kron(x, y), 2, 3, TraceSide::B);
    CHECK((lhs - x * y.trace()).max_abs() <= 1e-12);
}

TEST_CASE("mat_sqrt_psd diagonal and random") {
    CMatrix d = CMatrix::diag({4.0, 9.0});
    CMatrix r = mat_sqrt_psd(d);
    CHECK(r(0, 0).real() == doctest::Approx(2.0));
    CHECK(r(1, 1).real() == doctest::Approx(3.0));

    Rng rng(29);
    CMatrix rho = random_density(5, rng);
    CMatrix root = mat_sqrt_psd(rho);
    CHECK((root * root - rho).max_abs() <= 1e-9);
    CHECK_THROWS_AS(mat_sqrt_psd(CMatrix::diag({1.0, -0.5})), NotPsd);
}

TEST_CASE("is_psd threshold") {
    CHECK(is_psd(CMatrix::diag({1.0, 0.0}), 1e-9));
    CHECK(is_psd(CMatrix::diag({1.0, -1e-10}), 1e-9));
    CHECK_FALSE(is_psd(CMatrix::diag({1.0, -1e-3}), 1e-9));
}

TEST_CASE("complete_unitary extends isometries") {
    Rng rng(31);
    CMatrix u = random_unitary(6, rng);
    CMatrix cols(6, 2);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 2; ++j) cols(i, j) = u(i, j);
    CMatrix full = complete_unitary(cols);
    CHECK((full.adjoint() * full - CMatrix::identity(6)).max_abs() <= 1e-10);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(full(i, j) - cols(i, j)) <= 1e-12);
}
