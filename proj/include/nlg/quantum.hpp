// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "nlg/numerics.hpp"

namespace nlg {

struct StateVector {
    std::size_t dim = 0;
    std::vector<cplx> amplitudes;

    StateVector() = default;
    StateVector(std::size_t d, std::vector<cplx> a) : dim(d), amplitudes(std::move(a)) {
        if (amplitudes.size() != dim) throw DimensionMismatch("statevector size");
    }
    static StateVector basis(std::size_t dim, std::size_t index);
    double norm() const { return vec_norm(amplitudes); }
    CMatrix projector() const;  // |psi><psi|
};

// Subnormalized density operators are first-class: trace may be < 1.
struct DensityOperator {
    std::size_t dim = 0;
    CMatrix matrix;

    DensityOperator() = default;
    explicit DensityOperator(CMatrix m) : dim(m.rows()), matrix(std::move(m)) {
        if (!matrix.square()) throw DimensionMismatch("density operator must be square");
    }
    static DensityOperator pure(const StateVector& psi) { return DensityOperator(psi.projector()); }
    double trace() const { return matrix.trace().real(); }
    // Hermitian within tol, PSD within tol, trace <= 1 + tol.
    bool valid(double tol = 1e-9) const;
};

struct Povm {
    std::vector<CMatrix> elements;

    std::size_t outcomes() const { return elements.size(); }
    std::size_t dim() const { return elements.empty() ? 0 : elements[0].rows(); }
    bool valid(double tol = 1e-9) const;
    // Two-outcome projective POVM from the nonnegative/negative eigenspaces
    // of a Hermitian observable.
    static Povm from_observable_sign(const CMatrix& obs);
    static Povm computational(std::size_t dim);
};

struct Instrument {
    // outcome -> Kraus operators (possibly rectangular: rows = output dim).
    std::map<std::size_t, std::vector<CMatrix>> branches;
    bool trace_preserving(std::size_t dim_in, double tol = 1e-9) const;
};

std::vector<double> outcome_distribution(const DensityOperator& rho, const Povm& m);
std::size_t measure(const DensityOperator& rho, const Povm& m, std::uint64_t rng_seed);

std::map<std::size_t, DensityOperator> apply_instrument(const DensityOperator& rho,
                                                        const Instrument& inst);

// Purification on dim^2: sigma = sum_i lambda_i |v_i><v_i|  ->
// sum_i sqrt(lambda_i) |v_i> (x) |i>, eigenvalues descending, eigenvector
// phases canonicalized so the first non-negligible component is positive
// real. Output norm^2 equals tr(sigma).
StateVector purify(const DensityOperator& sigma);

// For unit vectors psi1, psi2 in C^{dA*dB} with equal reduced operators on
// the B factor (within tol), returns a dA x dA unitary U with
// (U (x) I) psi2 ~= psi1. Construction: polar part of the dA x dA overlap
// matrix, completed by the SVD's orthonormal frames on the null space.
CMatrix uhlmann_unitary(const StateVector& psi1, const StateVector& psi2, std::size_t dim_a,
                        std::size_t dim_b, double tol = 1e-7);

// Trace-norm distance ||a - b||_1 / 2 style helper (full Schatten-1 norm).
double trace_norm(const CMatrix& a);

}  // namespace nlg
