// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "nlg/numerics.hpp"
#include "nlg/sequential.hpp"

namespace nlg {

// Unitary U on 2^(m+n) dims whose top-left block equals (encoded operator)/t;
// t is the scale factor. encoded() recovers t * corner(U).
struct BlockEncoding {
    CMatrix u;
    std::size_t ancilla_qubits = 0;  // m
    std::size_t system_qubits = 0;   // n
    double scale = 1.0;              // t

    std::size_t system_dim() const { return std::size_t{1} << system_qubits; }
    CMatrix corner() const;          // (<0|^m (x) 1) U (|0>^m (x) 1)
    CMatrix encoded() const;         // scale * corner()
    double unitarity_defect() const; // ||U*U - 1||_max (sampled for big U)
};

// Zero-pads a square operator to the next power-of-two side (direct sum
// with 0).
CMatrix pad_pow2(const CMatrix& m);

// Unitary dilation [[M, sqrt(1-MM*)],[sqrt(1-M*M), -M*]]; requires a
// contraction. t = 1, one ancilla qubit.
BlockEncoding encode_contraction(const CMatrix& m);

// Concatenation: encodes the product with t = t1*t2, m = m1+m2.
BlockEncoding product(const BlockEncoding& e1, const BlockEncoding& e2);

// Prepare-select-unprepare: encodes sum c_i M_i with t = sum |c_i| t_i.
BlockEncoding linear_combination(const std::vector<BlockEncoding>& encodings,
                                 const std::vector<cplx>& coefficients);

BlockEncoding adjoint_encoding(const BlockEncoding& e);
BlockEncoding real_part(const BlockEncoding& e);
BlockEncoding imag_part(const BlockEncoding& e);

// Composes contraction/product/linear_combination over a POVM family's
// elements (indexed by the polynomial's (y,b) letters).
BlockEncoding encode_polynomial(const std::vector<std::vector<CMatrix>>& bob,
                                const NCPolynomial& p);

}  // namespace nlg
