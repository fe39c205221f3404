// SPDX-License-Identifier: Apache-2.0
#include "nlg/clifford.hpp"

#include <algorithm>

namespace nlg {

bool is_clifford_gate_name(const std::string& name) {
    static const char* names[] = {"X", "Y", "Z", "H", "S", "SDG", "CNOT", "CZ", "SWAP"};
    return std::find(std::begin(names), std::end(names), name) != std::end(names);
}

namespace {

void conj_h(PauliFrame& f, std::size_t w) {
    // H X H = Z, H Z H = X, H Y H = -Y.
    std::swap(f.x[w], f.z[w]);
    f.phase = (f.phase + 2 * (f.x[w] & f.z[w])) & 3;
}

void conj_s(PauliFrame& f, std::size_t w) {
    // S X S* = Y = i X Z, S Z S* = Z.
    f.phase = (f.phase + f.x[w]) & 3;
    f.z[w] ^= f.x[w];
}

void conj_sdg(PauliFrame& f, std::size_t w) {
    f.phase = (f.phase + 3 * f.x[w]) & 3;
    f.z[w] ^= f.x[w];
}

void conj_x(PauliFrame& f, std::size_t w) { f.phase = (f.phase + 2 * f.z[w]) & 3; }
void conj_z(PauliFrame& f, std::size_t w) { f.phase = (f.phase + 2 * f.x[w]) & 3; }
void conj_y(PauliFrame& f, std::size_t w) {
    f.phase = (f.phase + 2 * (f.x[w] ^ f.z[w])) & 3;
}

void conj_cnot(PauliFrame& f, std::size_t c, std::size_t t) {
    // In the per-wire X-then-Z normal form this update is phase-free:
    // X_c -> X_c X_t and Z_t -> Z_c Z_t introduce no reordering signs.
    f.x[t] ^= f.x[c];
    f.z[c] ^= f.z[t];
}

}  // namespace

void conjugate(PauliFrame& f, const CliffordGate& g) {
    const auto need = [&](std::size_t n) {
        if (g.wires.size() != n) throw DimensionMismatch("gate arity: " + g.name);
        for (std::size_t w : g.wires)
            if (w >= f.x.size()) throw DimensionMismatch("gate wire out of range");
    };
    if (g.name == "H") { need(1); conj_h(f, g.wires[0]); }
    else if (g.name == "S") { need(1); conj_s(f, g.wires[0]); }
    else if (g.name == "SDG") { need(1); conj_sdg(f, g.wires[0]); }
    else if (g.name == "X") { need(1); conj_x(f, g.wires[0]); }
    else if (g.name == "Y") { need(1); conj_y(f, g.wires[0]); }
    else if (g.name == "Z") { need(1); conj_z(f, g.wires[0]); }
    else if (g.name == "CNOT") { need(2); conj_cnot(f, g.wires[0], g.wires[1]); }
    else if (g.name == "CZ") {
        need(2);
        conj_h(f, g.wires[1]);
        conj_cnot(f, g.wires[0], g.wires[1]);
        conj_h(f, g.wires[1]);
    } else if (g.name == "SWAP") {
        need(2);
        std::swap(f.x[g.wires[0]], f.x[g.wires[1]]);
        std::swap(f.z[g.wires[0]], f.z[g.wires[1]]);
    } else {
        throw UnsupportedCircuit("not a Clifford gate: " + g.name);
    }
}

void conjugate(PauliFrame& f, const std::vector<CliffordGate>& circuit) {
    for (const auto& g : circuit) conjugate(f, g);
}

CMatrix clifford_gate_matrix(const std::string& name) {
    const cplx i(0.0, 1.0);
    if (name == "X") return CMatrix(2, 2, {0, 1, 1, 0});
    if (name == "Y") return CMatrix(2, 2, {0, -i, i, 0});
    if (name == "Z") return CMatrix(2, 2, {1, 0, 0, -1});
    if (name == "H") {
        const double s = 1.0 / std::sqrt(2.0);
        return CMatrix(2, 2, {s, s, s, -s});
    }
    if (name == "S") return CMatrix(2, 2, {1, 0, 0, i});
    if (name == "SDG") return CMatrix(2, 2, {1, 0, 0, -i});
    if (name == "CNOT")
        return CMatrix(4, 4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0});
    if (name == "CZ") return CMatrix(4, 4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, -1});
    if (name == "SWAP")
        return CMatrix(4, 4, {1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1});
    throw UnsupportedCircuit("no matrix for gate: " + name);
}

}  // namespace nlg
