#include "fixpt/nonexp/json.hpp"

namespace fixpt::nonexp {

using exactreal::join_path;
using exactreal::spec_field;
using exactreal::spec_get;
using nlohmann::json;

namespace {

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_kind_fields(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") continue;
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw SpecError(join_path(path, key), "unexpected field");
  }
}

}  // namespace

MapSpec parse_map_spec(const json& j, const std::string& path) {
  const auto kind = spec_field<std::string>(j, "kind", path);
  MapSpec s;
  s.kind = kind;
  if (kind == "halfspace-proj") {
    require_kind_fields(j, path, {"normal", "offset"});
    s.halfspace = spec_get<HalfSpace>(j, path);
  } else if (kind == "box-proj") {
    require_kind_fields(j, path, {"box"});
    s.box = spec_field<Box>(j, "box", path);
  } else if (kind == "bruck") {
    require_kind_fields(j, path, {"maps", "bound"});
    const std::string mp = join_path(path, "maps");
    if (!j.contains("maps") || !j.at("maps").is_array()) throw SpecError(mp, "expected an array of maps");
    if (j.at("maps").empty()) throw SpecError(mp, "empty map sequence");
    for (std::size_t i = 0; i < j.at("maps").size(); ++i) {
      s.children.push_back(parse_map_spec(j.at("maps")[i], index_path(mp, i)));
    }
    if (j.contains("bound")) {
      s.bound = spec_field<std::int64_t>(j, "bound", path);
      if (*s.bound < 1) throw SpecError(join_path(path, "bound"), "bound must be at least 1");
    }
  } else if (kind == "firm") {
    require_kind_fields(j, path, {"map"});
    if (!j.contains("map")) throw SpecError(join_path(path, "map"), "missing field");
    s.children.push_back(parse_map_spec(j.at("map"), join_path(path, "map")));
  } else if (kind == "compose") {
    require_kind_fields(j, path, {"outer", "inner"});
    for (const char* key : {"outer", "inner"}) {
      if (!j.contains(key)) throw SpecError(join_path(path, key), "missing field");
      s.children.push_back(parse_map_spec(j.at(key), join_path(path, key)));
    }
  } else if (kind == "chidume") {
    require_kind_fields(j, path, {});
  } else {
    throw SpecError(join_path(path, "kind"), "unknown map kind \"" + kind + "\"");
  }
  return s;
}

json to_json(const MapSpec& s) {
  json j{{"kind", s.kind}};
  if (s.kind == "halfspace-proj") {
    j["normal"] = s.halfspace->normal;
    j["offset"] = s.halfspace->offset;
  } else if (s.kind == "box-proj") {
    j["box"] = *s.box;
  } else if (s.kind == "bruck") {
    json maps = json::array();
    for (const auto& c : s.children) maps.push_back(to_json(c));
    j["maps"] = maps;
    if (s.bound) j["bound"] = *s.bound;
  } else if (s.kind == "firm") {
    j["map"] = to_json(s.children.at(0));
  } else if (s.kind == "compose") {
    j["outer"] = to_json(s.children.at(0));
    j["inner"] = to_json(s.children.at(1));
  }
  return j;
}

MapName build_map(const MapSpec& s, const std::string& path) {
  try {
    if (s.kind == "halfspace-proj") return project_halfspace(*s.halfspace);
    if (s.kind == "box-proj") return project_box(*s.box);
    if (s.kind == "chidume") return chidume_mutangadura_map();
    if (s.kind == "firm") return firmly_wrap(build_map(s.children.at(0), join_path(path, "map")));
    if (s.kind == "compose") {
      const MapName outer = build_map(s.children.at(0), join_path(path, "outer"));
      const MapName inner = build_map(s.children.at(1), join_path(path, "inner"));
      if (outer.dim() != inner.dim()) throw SpecError(path, "outer and inner maps differ in dimension");
      if (s.children[0].kind == "box-proj") return project_back_compose(outer, inner);
      return compose(outer, inner);
    }
    if (s.kind == "bruck") {
      std::vector<MapName> maps;
      for (std::size_t i = 0; i < s.children.size(); ++i) {
        maps.push_back(build_map(s.children[i], index_path(join_path(path, "maps"), i)));
        if (maps.back().dim() != maps.front().dim()) {
          throw SpecError(index_path(join_path(path, "maps"), i), "dimension differs from maps[0]");
        }
      }
      std::int64_t B = 0;
      if (s.bound) {
        B = *s.bound;
      } else {
        const Domain& d = maps.front().image() ? *maps.front().image() : maps.front().domain();
        if (d.kind == Domain::Kind::ambient) throw SpecError(join_path(path, "bound"), "unbounded domain needs a bound");
        B = d.norm_bound();
      }
      return bruck_combine(maps, B);
    }
  } catch (const SpecError&) {
    throw;
  } catch (const Error& e) {
    throw SpecError(path, e.what());
  }
  throw SpecError(join_path(path, "kind"), "unknown map kind \"" + s.kind + "\"");
}

}  // namespace fixpt::nonexp
