#include "fixpt/spaces/json.hpp"

#include "fixpt/errors.hpp"

namespace fixpt::spaces {

void to_json(nlohmann::json& j, const Box& b) { j = nlohmann::json{{"lo", b.lo()}, {"hi", b.hi()}}; }

void from_json(const nlohmann::json& j, Box& b) {
  if (!j.is_object() || !j.contains("lo") || !j.contains("hi")) {
    throw DomainError("box needs \"lo\" and \"hi\"");
  }
  b = Box(j.at("lo").get<DyVec>(), j.at("hi").get<DyVec>());
}

void to_json(nlohmann::json& j, const HalfSpace& h) {
  j = nlohmann::json{{"normal", h.normal}, {"offset", h.offset}};
}

void from_json(const nlohmann::json& j, HalfSpace& h) {
  if (!j.is_object() || !j.contains("normal") || !j.contains("offset")) {
    throw DomainError("half-space needs \"normal\" and \"offset\"");
  }
  h.normal = j.at("normal").get<DyVec>();
  h.offset = j.at("offset").get<Dyadic>();
}

}  // namespace fixpt::spaces
