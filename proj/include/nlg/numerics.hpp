// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "nlg/errors.hpp"
#include "nlg/rng.hpp"

namespace nlg {

using cplx = std::complex<double>;

// Dense complex matrix, row-major. Value type; all operations below are
// pure functions and safe to use concurrently.
class CMatrix {
  public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, cplx(0.0, 0.0)) {}
    CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    static CMatrix identity(std::size_t n);
    static CMatrix zero(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }
    static CMatrix diag(const std::vector<double>& d);
    static CMatrix outer(const std::vector<cplx>& u, const std::vector<cplx>& v);  // u v*

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }
    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

    CMatrix adjoint() const;
    CMatrix transpose() const;
    CMatrix conj() const;

    CMatrix operator+(const CMatrix& o) const;
    CMatrix operator-(const CMatrix& o) const;
    CMatrix operator*(const CMatrix& o) const;
    CMatrix operator*(cplx s) const;
    CMatrix operator-() const { return *this * cplx(-1.0, 0.0); }
    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);

    std::vector<cplx> apply(const std::vector<cplx>& v) const;  // A v

    cplx trace() const;
    double norm_fro() const;
    double max_abs() const;
    // Largest |A - A*| entry; 0 for exactly Hermitian.
    double hermiticity_defect() const;
    bool finite() const;

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<cplx> a_;
};

inline CMatrix operator*(cplx s, const CMatrix& m) { return m * s; }
inline CMatrix operator*(double s, const CMatrix& m) { return m * cplx(s, 0.0); }

struct EigResult {
    std::vector<double> eigenvalues;  // descending
    CMatrix eigenvectors;             // columns, orthonormal
};

struct SvdResult {
    CMatrix u;                       // rows x rows unitary
    std::vector<double> s;           // min(rows,cols), descending, >= 0
    CMatrix v;                       // cols x cols unitary; a = u diag(s) v*
};

// Cyclic Jacobi for Hermitian matrices. Throws NotHermitian if the symmetry
// check at `tol` fails, NoConvergence if the sweep budget is exhausted.
EigResult hermitian_eig(const CMatrix& a, double tol = 1e-9);

// One-sided Jacobi SVD.
SvdResult svd(const CMatrix& a);

CMatrix kron(const CMatrix& a, const CMatrix& b);
std::vector<cplx> kron_vec(const std::vector<cplx>& a, const std::vector<cplx>& b);

enum class TraceSide { A, B };
// Partial trace of an operator on C^dA (x) C^dB; side names the factor
// that is traced OUT.
CMatrix partial_trace(const CMatrix& a, std::size_t dim_a, std::size_t dim_b, TraceSide side);

CMatrix mat_sqrt_psd(const CMatrix& a, double tol = 1e-9);
bool is_psd(const CMatrix& a, double tol = 1e-9);
double min_eigenvalue(const CMatrix& a);
double operator_norm(const CMatrix& a);  // largest singular value

// Hermitian linear solve A x = b via eigendecomposition (A must be
// invertible for the use sites; tiny eigenvalues are regularized).
std::vector<cplx> solve_hermitian(const CMatrix& a, const std::vector<cplx>& b);

// Gram-Schmidt completion: given k orthonormal columns (rows x k), return a
// rows x rows unitary whose first k columns are the input.
CMatrix complete_unitary(const CMatrix& columns);

// Haar-ish random unitary: Gram-Schmidt on a Gaussian matrix.
CMatrix random_unitary(std::size_t n, Rng& rng);
CMatrix random_hermitian(std::size_t n, Rng& rng);
// Random density operator of full rank (normalized G G*).
CMatrix random_density(std::size_t n, Rng& rng);

double vec_norm(const std::vector<cplx>& v);
cplx vec_dot(const std::vector<cplx>& u, const std::vector<cplx>& v);  // <u|v>

}  // namespace nlg
