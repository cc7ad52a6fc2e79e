#include "fixpt/synth/json.hpp"

#include "fixpt/errors.hpp"

namespace fixpt::synth {

using nlohmann::json;

void to_json(json& j, const PolytopeSpec& p) { j = json{{"box", p.box}, {"halfspaces", p.halfspaces}}; }

void from_json(const json& j, PolytopeSpec& p) {
  if (!j.is_object() || !j.contains("box")) throw DomainError("polytope needs \"box\"");
  p.box = j.at("box").get<Box>();
  p.halfspaces.clear();
  if (j.contains("halfspaces")) p.halfspaces = j.at("halfspaces").get<std::vector<HalfSpace>>();
  for (const auto& h : p.halfspaces) {
    if (h.dim() != p.box.dim()) throw DimensionMismatch("half-space dimension differs from the box");
  }
}

json emission_json(const Emission& e) {
  json normal = json::array();
  for (const auto& c : e.halfspace.normal) normal.push_back(exactreal::dual(c));
  json j{{"normal", normal}, {"offset", exactreal::dual(e.halfspace.offset)}, {"stage", e.stage}};
  if (e.witness) {
    json w = json::array();
    for (const auto& c : *e.witness) w.push_back(exactreal::dual(c));
    j["witness"] = w;
    j["n"] = e.n;
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

}  // namespace fixpt::synth
