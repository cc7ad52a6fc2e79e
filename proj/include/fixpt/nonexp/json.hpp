#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "fixpt/nonexp/map.hpp"
#include "fixpt/spaces/json.hpp"

namespace fixpt::nonexp {

/// Declarative map description, built into a MapName by build_map.
///   {"kind":"halfspace-proj","normal":[..],"offset":c}
///   {"kind":"box-proj","box":{"lo":[..],"hi":[..]}}
///   {"kind":"bruck","maps":[..],"bound":B}      bound optional if the first map has a bounded domain
///   {"kind":"firm","map":{..}}
///   {"kind":"compose","outer":{..},"inner":{..}} box-proj outside projects back
///   {"kind":"chidume"}
struct MapSpec {
  std::string kind;
  std::optional<HalfSpace> halfspace;
  std::optional<Box> box;
  std::optional<std::int64_t> bound;
  std::vector<MapSpec> children;  // bruck: maps; firm: {map}; compose: {outer, inner}

  bool operator==(const MapSpec&) const = default;
};

/// Throws SpecError with the path of the offending field.
MapSpec parse_map_spec(const nlohmann::json& j, const std::string& path);
nlohmann::json to_json(const MapSpec& spec);

/// Throws SpecError (dimension mismatch, empty half-space, ...) at path.
MapName build_map(const MapSpec& spec, const std::string& path = "map");

}  // namespace fixpt::nonexp
