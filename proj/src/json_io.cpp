// SPDX-License-Identifier: Apache-2.0
#include "nlg/json_io.hpp"

#include <cmath>
#include <fstream>

namespace nlg {

json game_to_json(const Game& g) {
    json mu = json::array();
    for (std::size_t x = 0; x < g.nA; ++x) {
        json row = json::array();
        for (std::size_t y = 0; y < g.nB; ++y) row.push_back(g.mu_at(x, y));
        mu.push_back(std::move(row));
    }
    json v = json::array();
    for (std::size_t x = 0; x < g.nA; ++x) {
        json vx = json::array();
        for (std::size_t y = 0; y < g.nB; ++y) {
            json vy = json::array();
            for (std::size_t a = 0; a < g.kA; ++a) {
                json va = json::array();
                for (std::size_t b = 0; b < g.kB; ++b) va.push_back(g.v_at(x, y, a, b));
                vy.push_back(std::move(va));
            }
            vx.push_back(std::move(vy));
        }
        v.push_back(std::move(vx));
    }
    return json{{"name", g.name}, {"nA", g.nA}, {"nB", g.nB},
                {"kA", g.kA},     {"kB", g.kB}, {"mu", mu},
                {"V", v}};
}

Game game_from_json(const json& j) {
    for (const char* key : {"name", "nA", "nB", "kA", "kB", "mu", "V"})
        if (!j.contains(key)) throw SchemaError(std::string("game missing key ") + key);
    Game g;
    g.name = j.at("name").get<std::string>();
    const auto get_count = [&](const char* key) {
        const auto& v = j.at(key);
        if (!v.is_number_integer() || v.get<long long>() <= 0)
            throw SchemaError(std::string(key) + " must be a positive integer");
        return static_cast<std::size_t>(v.get<long long>());
    };
    g.nA = get_count("nA");
    g.nB = get_count("nB");
    g.kA = get_count("kA");
    g.kB = get_count("kB");

    const json& mu = j.at("mu");
    if (!mu.is_array() || mu.size() != g.nA) throw SchemaError("mu shape");
    double sum = 0.0;
    for (std::size_t x = 0; x < g.nA; ++x) {
        if (!mu[x].is_array() || mu[x].size() != g.nB) throw SchemaError("mu shape");
        for (std::size_t y = 0; y < g.nB; ++y) {
            const double m = mu[x][y].get<double>();
            if (m < 0.0 || !std::isfinite(m)) throw SchemaError("negative mu entry");
            g.mu.push_back(m);
            sum += m;
        }
    }
    if (std::abs(sum - 1.0) > 1e-9) throw SchemaError("mu must sum to 1 within 1e-9");

    const json& v = j.at("V");
    if (!v.is_array() || v.size() != g.nA) throw SchemaError("V shape");
    for (std::size_t x = 0; x < g.nA; ++x) {
        if (!v[x].is_array() || v[x].size() != g.nB) throw SchemaError("V shape");
        for (std::size_t y = 0; y < g.nB; ++y) {
            if (!v[x][y].is_array() || v[x][y].size() != g.kA) throw SchemaError("V shape");
            for (std::size_t a = 0; a < g.kA; ++a) {
                if (!v[x][y][a].is_array() || v[x][y][a].size() != g.kB) throw SchemaError("V shape");
                for (std::size_t b = 0; b < g.kB; ++b) {
                    const int bit = v[x][y][a][b].get<int>();
                    if (bit != 0 && bit != 1) throw SchemaError("V entries must be 0/1");
                    g.v.push_back(bit);
                }
            }
        }
    }
    g.validate();
    return g;
}

Game load_game_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open game file: " + path);
    json j;
    in >> j;
    return game_from_json(j);
}

json matrix_to_json(const CMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw SchemaError("matrix must be a non-empty array");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    CMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw SchemaError("ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c) {
            const json& e = j[r][c];
            if (!e.is_array() || e.size() != 2) throw SchemaError("matrix entries are [re, im]");
            m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

json vector_to_json(const std::vector<cplx>& v) {
    json out = json::array();
    for (const auto& x : v) out.push_back(json::array({x.real(), x.imag()}));
    return out;
}

std::vector<cplx> vector_from_json(const json& j) {
    if (!j.is_array()) throw SchemaError("vector must be an array");
    std::vector<cplx> v;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) throw SchemaError("vector entries are [re, im]");
        v.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return v;
}

json povm_family_to_json(const std::vector<std::vector<CMatrix>>& fam) {
    json out = json::array();
    for (const auto& setting : fam) {
        json s = json::array();
        for (const auto& e : setting) s.push_back(matrix_to_json(e));
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::vector<CMatrix>> povm_family_from_json(const json& j) {
    if (!j.is_array()) throw SchemaError("POVM family must be an array");
    std::vector<std::vector<CMatrix>> fam;
    for (const auto& s : j) {
        if (!s.is_array()) throw SchemaError("POVM setting must be an array");
        std::vector<CMatrix> setting;
        for (const auto& e : s) setting.push_back(matrix_from_json(e));
        fam.push_back(std::move(setting));
    }
    return fam;
}

json quantum_strategy_to_json(const QuantumStrategy& s) {
    return json{{"dA", s.dA},
                {"dB", s.dB},
                {"psi", vector_to_json(s.psi)},
                {"alice", povm_family_to_json(s.alice)},
                {"bob", povm_family_to_json(s.bob)}};
}

QuantumStrategy quantum_strategy_from_json(const json& j) {
    for (const char* key : {"dA", "dB", "psi", "alice", "bob"})
        if (!j.contains(key)) throw SchemaError(std::string("strategy missing key ") + key);
    QuantumStrategy s;
    s.dA = j.at("dA").get<std::size_t>();
    s.dB = j.at("dB").get<std::size_t>();
    s.psi = vector_from_json(j.at("psi"));
    s.alice = povm_family_from_json(j.at("alice"));
    s.bob = povm_family_from_json(j.at("bob"));
    return s;
}

}  // namespace nlg
