#pragma once

#include <json.hpp>

#include "fixpt/spaces/json.hpp"
#include "fixpt/synth/enumerator.hpp"

namespace fixpt::synth {

/// {"box":{...},"halfspaces":[{...},...]}
void to_json(nlohmann::json& j, const PolytopeSpec& p);
void from_json(const nlohmann::json& j, PolytopeSpec& p);

/// One JSON-lines record of the enumerator output.
nlohmann::json emission_json(const Emission& e);

}  // namespace fixpt::synth
