#pragma once

#include <string>

#include <json.hpp>

#include "pcot/circuit.hpp"

namespace pcot {

using json = nlohmann::ordered_json;

json leaf_to_json(const Leaf& l);
Leaf leaf_from_json(const json& j);

json circuit_to_json(const Circuit& c);
// Enforces dense topologically ordered ids, renormalizes sum weights and
// categorical probs once when within 1e-9 of one, restores the sigma floor.
// Throws FormatError / CycleError / EmptyChildrenError on bad input.
Circuit circuit_from_json(const json& j);

void save_circuit(const std::string& path, const Circuit& c);
Circuit load_circuit(const std::string& path);

} // namespace pcot
