#pragma once

#include <json.hpp>

#include "fixpt/exactreal/json.hpp"
#include "fixpt/spaces/sets.hpp"

namespace fixpt::spaces {

/// {"lo":[dyadic...],"hi":[dyadic...]}
void to_json(nlohmann::json& j, const Box& b);
void from_json(const nlohmann::json& j, Box& b);

/// {"normal":[dyadic...],"offset":dyadic}
void to_json(nlohmann::json& j, const HalfSpace& h);
void from_json(const nlohmann::json& j, HalfSpace& h);

}  // namespace fixpt::spaces
