// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <json.hpp>

#include "nlg/games.hpp"
#include "nlg/numerics.hpp"
#include "nlg/values.hpp"

namespace nlg {

using json = nlohmann::json;

// Game schema: {"name","nA","nB","kA","kB","mu","V"}; parsers reject missing
// keys, negative mu, or mu summing outside [1 - 1e-9, 1 + 1e-9].
json game_to_json(const Game& g);
Game game_from_json(const json& j);
Game load_game_file(const std::string& path);

// Complex matrices as nested arrays of [re, im] pairs.
json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

json vector_to_json(const std::vector<cplx>& v);
std::vector<cplx> vector_from_json(const json& j);

// POVM families indexed [setting][outcome].
json povm_family_to_json(const std::vector<std::vector<CMatrix>>& fam);
std::vector<std::vector<CMatrix>> povm_family_from_json(const json& j);

json quantum_strategy_to_json(const QuantumStrategy& s);
QuantumStrategy quantum_strategy_from_json(const json& j);

}  // namespace nlg
