// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlg/numerics.hpp"

namespace nlg {

// Pauli operator i^phase * prod_w X_w^{x[w]} Z_w^{z[w]}.
struct PauliFrame {
    std::vector<int> x, z;
    int phase = 0;  // power of i, mod 4

    explicit PauliFrame(std::size_t wires = 0) : x(wires, 0), z(wires, 0) {}
};

struct CliffordGate {
    std::string name;              // X,Y,Z,H,S,SDG,CNOT,CZ,SWAP
    std::vector<std::size_t> wires;
};

bool is_clifford_gate_name(const std::string& name);

// Heisenberg conjugation frame -> G frame G^dagger, gate by gate in circuit
// order (the frame is a pad applied before the circuit).
void conjugate(PauliFrame& frame, const CliffordGate& gate);
void conjugate(PauliFrame& frame, const std::vector<CliffordGate>& circuit);

// Dense unitary of a named Clifford gate (for statevector cross-checks).
CMatrix clifford_gate_matrix(const std::string& name);

}  // namespace nlg
