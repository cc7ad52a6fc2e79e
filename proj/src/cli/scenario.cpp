#include "fixpt/cli/scenario.hpp"

#include <algorithm>
#include <set>

#include "fixpt/spaces/json.hpp"
#include "fixpt/synth/json.hpp"
#include "fixpt/synth/maps.hpp"

namespace fixpt::cli {

using exactreal::join_path;
using exactreal::spec_field;
using exactreal::spec_get;
using nlohmann::json;

namespace {

const std::set<std::string> kActions{"synth", "iterate", "enumerate-halfspaces", "metastable", "certify-rate", "demo"};
const std::set<std::string> kDemos{"specker", "cube", "pseudo", "tmap"};

void only_fields(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw SpecError(path.empty() ? "(document)" : path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw SpecError(join_path(path, key), "unexpected field");
    }
  }
}

template <class T>
void read_opt(const json& j, const char* key, const std::string& path, T& out) {
  if (j.contains(key)) out = spec_get<T>(j.at(key), join_path(path, key));
}

template <class T>
void read_opt(const json& j, const char* key, const std::string& path, std::optional<T>& out) {
  if (j.contains(key)) out = spec_get<T>(j.at(key), join_path(path, key));
}

std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

DomainSpec parse_domain(const json& j) {
  const std::string path = "domain";
  only_fields(j, path, {"type", "lo", "hi", "dim", "radius"});
  DomainSpec d;
  d.type = spec_field<std::string>(j, "type", path);
  if (d.type == "box") {
    only_fields(j, path, {"type", "lo", "hi"});
    const auto lo = spec_field<DyVec>(j, "lo", path);
    const auto hi = spec_field<DyVec>(j, "hi", path);
    if (lo.empty()) throw SpecError(path + ".lo", "empty box");
    if (lo.size() != hi.size()) throw SpecError(path + ".hi", "dimension mismatch: lo has " + std::to_string(lo.size()));
    try {
      d.box = Box(lo, hi);
    } catch (const Error& e) {
      throw SpecError(path, e.what());
    }
    d.dim = lo.size();
  } else if (d.type == "cube") {
    only_fields(j, path, {"type", "dim"});
    d.dim = spec_field<std::size_t>(j, "dim", path);
    if (d.dim == 0) throw SpecError(path + ".dim", "dimension must be positive");
    d.box = Box::cube_prefix(d.dim);
  } else if (d.type == "ball") {
    only_fields(j, path, {"type", "dim", "radius"});
    d.dim = spec_field<std::size_t>(j, "dim", path);
    d.radius = spec_field<Dyadic>(j, "radius", path);
    if (d.dim == 0) throw SpecError(path + ".dim", "dimension must be positive");
    if (d.radius.sign() <= 0) throw SpecError(path + ".radius", "radius must be positive");
  } else {
    throw SpecError(path + ".type", "unknown domain type '" + d.type + "'");
  }
  return d;
}

ScenarioMap parse_map(const json& j) {
  const std::string path = "map";
  ScenarioMap m;
  m.kind = spec_field<std::string>(j, "kind", path);
  if (m.kind == "interval") {
    only_fields(j, path, {"kind", "a", "b"});
    m.a = spec_field<Dyadic>(j, "a", path);
    m.b = spec_field<Dyadic>(j, "b", path);
    if (m.a.sign() < 0 || Dyadic(1) < m.a) throw SpecError(path + ".a", "endpoint outside [0,1]");
    if (m.b.sign() < 0 || Dyadic(1) < m.b) throw SpecError(path + ".b", "endpoint outside [0,1]");
    if (m.b < m.a) throw SpecError(path + ".b", "interval crossing: b < a");
  } else if (m.kind == "polytope") {
    only_fields(j, path, {"kind", "halfspaces"});
    if (!j.contains("halfspaces")) throw SpecError(path + ".halfspaces", "missing field");
    const json& hs = j.at("halfspaces");
    if (!hs.is_array()) throw SpecError(path + ".halfspaces", "expected an array");
    for (std::size_t i = 0; i < hs.size(); ++i) m.halfspaces.push_back(spec_get<HalfSpace>(hs[i], index_path(path + ".halfspaces", i)));
  } else if (m.kind == "specker" || m.kind == "cube-family") {
    const bool specker = m.kind == "specker";
    const char* k1 = specker ? "e1" : "alpha";
    const char* k2 = specker ? "e2" : "beta";
    only_fields(j, path, {"kind", k1, k2});
    read_opt(j, k1, path, m.e1);
    read_opt(j, k2, path, m.e2);
    if (!specker) {
      for (const auto& [index, stage] : m.e2.entries()) {
        for (const auto& [other, other_stage] : m.e1.entries()) {
          if (other == index) throw SpecError(path + ".beta", "index " + std::to_string(index) + " is also listed by alpha");
        }
      }
    }
  } else if (m.kind == "chidume") {
    only_fields(j, path, {"kind"});
  } else if (m.kind == "composed") {
    only_fields(j, path, {"kind", "map"});
    if (!j.contains("map")) throw SpecError(path + ".map", "missing field");
    m.expr = nonexp::parse_map_spec(j.at("map"), path + ".map");
  } else {
    throw SpecError(path + ".kind", "unknown map kind '" + m.kind + "'");
  }
  return m;
}

IterateParams parse_iterate(const json& j) {
  const std::string path = "iterate";
  only_fields(j, path, {"scheme", "steps", "start", "anchor", "alpha", "precision"});
  IterateParams p;
  read_opt(j, "scheme", path, p.scheme);
  read_opt(j, "steps", path, p.steps);
  read_opt(j, "start", path, p.start);
  read_opt(j, "anchor", path, p.anchor);
  read_opt(j, "alpha", path, p.alpha);
  read_opt(j, "precision", path, p.precision);
  if (p.scheme != "km" && p.scheme != "mann" && p.scheme != "halpern" && p.scheme != "reich") {
    throw SpecError(path + ".scheme", "unknown scheme '" + p.scheme + "'");
  }
  if (p.steps < 0) throw SpecError(path + ".steps", "negative step count");
  if (p.alpha.sign() <= 0 || Dyadic(1) <= p.alpha) throw SpecError(path + ".alpha", "step size outside (0,1)");
  if (p.precision < 0) throw SpecError(path + ".precision", "negative precision");
  return p;
}

MetastableParams parse_metastable(const json& j) {
  const std::string path = "metastable";
  only_fields(j, path, {"n", "g", "k_max"});
  MetastableParams p;
  read_opt(j, "n", path, p.n);
  read_opt(j, "k_max", path, p.k_max);
  if (j.contains("g")) {
    const json& g = j.at("g");
    only_fields(g, path + ".g", {"mul", "add"});
    read_opt(g, "mul", path + ".g", p.mul);
    read_opt(g, "add", path + ".g", p.add);
    if (p.mul < 0 || p.add < 0) throw SpecError(path + ".g", "adversary must be nonnegative");
  }
  if (p.n < 0) throw SpecError(path + ".n", "negative precision");
  return p;
}

RateParams parse_rate(const json& j) {
  const std::string path = "rate";
  only_fields(j, path, {"phi", "contraction", "n_max", "limit"});
  RateParams p;
  read_opt(j, "phi", path, p.table);
  read_opt(j, "limit", path, p.limit);
  if (j.contains("contraction")) {
    const json& c = j.at("contraction");
    only_fields(c, path + ".contraction", {"L", "D"});
    p.L = spec_field<Dyadic>(c, "L", path + ".contraction");
    p.D = spec_field<Dyadic>(c, "D", path + ".contraction");
    if (p.L->sign() < 0 || Dyadic(1) <= *p.L) throw SpecError(path + ".contraction.L", "need 0 <= L < 1");
    if (p.D->sign() < 0) throw SpecError(path + ".contraction.D", "negative distance");
    if (!p.table.empty()) throw SpecError(path, "give either phi or contraction");
  }
  for (std::size_t i = 0; i < p.table.size(); ++i) {
    if (p.table[i] < 0) throw SpecError(index_path(path + ".phi", i), "negative index");
  }
  p.n_max = p.table.empty() ? 10 : static_cast<int>(p.table.size()) - 1;
  read_opt(j, "n_max", path, p.n_max);
  if (p.n_max < 0) throw SpecError(path + ".n_max", "negative precision");
  if (!p.table.empty() && p.n_max >= static_cast<int>(p.table.size())) {
    throw SpecError(path + ".n_max", "phi has no entry for n = " + std::to_string(p.n_max));
  }
  return p;
}

EnumerateParams parse_enumerate(const json& j) {
  const std::string path = "enumerate";
  only_fields(j, path, {"max_level", "stage_budget"});
  EnumerateParams p;
  read_opt(j, "max_level", path, p.max_level);
  read_opt(j, "stage_budget", path, p.stage_budget);
  if (p.max_level < 0) throw SpecError(path + ".max_level", "negative level");
  if (p.stage_budget < 0) throw SpecError(path + ".stage_budget", "negative budget");
  return p;
}

void check_demo(const DemoParams& p) {
  const std::string path = "demo";
  if (!p.name.empty() && !kDemos.contains(p.name)) throw SpecError(path + ".name", "unknown demo '" + p.name + "'");
  if (p.delay < 1) throw SpecError(path + ".delay", "delay must be positive");
  if (p.rate_prefix && (*p.rate_prefix < 1 || *p.rate_prefix > p.delay)) {
    throw SpecError(path + ".rate_prefix", "prefix must lie in [1, delay]");
  }
  if (p.index < 0) throw SpecError(path + ".index", "negative index");
  if (p.n_max < 0) throw SpecError(path + ".n_max", "negative precision");
  if (p.sequence.empty()) throw SpecError(path + ".sequence", "empty sequence");
  for (std::size_t i = 0; i < p.sequence.size(); ++i) {
    const Dyadic& v = p.sequence[i];
    if (v.sign() < 0 || Dyadic(1) < v) throw SpecError(index_path(path + ".sequence", i), "value outside [0,1]");
    if (i > 0 && v < p.sequence[i - 1]) throw SpecError(index_path(path + ".sequence", i), "sequence decreases");
  }
  if (p.coordinates < 1) throw SpecError(path + ".coordinates", "need at least one coordinate");
  if (p.pairs < 0) throw SpecError(path + ".pairs", "negative pair count");
}

DemoParams parse_demo(const json& j) {
  const std::string path = "demo";
  only_fields(j, path, {"name", "delay", "rate_prefix", "index", "n_max", "sequence", "coordinates", "pairs"});
  DemoParams p;
  read_opt(j, "name", path, p.name);
  read_opt(j, "delay", path, p.delay);
  read_opt(j, "rate_prefix", path, p.rate_prefix);
  read_opt(j, "index", path, p.index);
  read_opt(j, "n_max", path, p.n_max);
  read_opt(j, "sequence", path, p.sequence);
  read_opt(j, "coordinates", path, p.coordinates);
  read_opt(j, "pairs", path, p.pairs);
  check_demo(p);
  return p;
}

std::size_t map_dim(const ScenarioSpec& s) {
  const ScenarioMap& m = *s.map;
  if (m.kind == "interval" || m.kind == "specker") return 1;
  if (m.kind == "chidume") return 2;
  if (m.kind == "cube-family" || m.kind == "polytope") return s.domain ? s.domain->dim : 0;
  return nonexp::build_map(*m.expr, "map.map").dim();
}

// Cross-section checks, run once every section parsed.
void check_consistency(const ScenarioSpec& s) {
  const bool needs_map = s.action != "demo";
  if (needs_map && !s.map) throw SpecError("map", "missing field");
  if (!s.map) return;
  const ScenarioMap& m = *s.map;
  const auto& d = s.domain;
  if (m.kind == "interval" || m.kind == "specker") {
    if (d && !(d->type == "box" && d->box == Box::unit(1))) throw SpecError("domain", "interval maps act on the box [0,1]");
  } else if (m.kind == "polytope") {
    if (!d || d->type != "box") throw SpecError("domain", "polytope maps need a box domain");
    for (std::size_t i = 0; i < m.halfspaces.size(); ++i) {
      if (m.halfspaces[i].normal.size() != d->dim) {
        throw SpecError(index_path("map.halfspaces", i) + ".normal",
                        "dimension mismatch: normal has " + std::to_string(m.halfspaces[i].normal.size()) +
                            " coordinates, the domain " + std::to_string(d->dim));
      }
    }
    if (!synth::polytope_probe({d->box, m.halfspaces})) throw SpecError("map.halfspaces", "intersection with the box looks empty");
  } else if (m.kind == "cube-family") {
    if (!d || d->type != "cube") throw SpecError("domain", "cube-family maps need a cube domain");
  } else if (d && d->dim != map_dim(s)) {
    throw SpecError("domain", "dimension mismatch: the map has dimension " + std::to_string(map_dim(s)));
  }
  if (m.kind == "chidume" && d && !(d->type == "ball" && d->radius == Dyadic(1))) {
    throw SpecError("domain", "the pseudocontraction acts on the unit disc");
  }
  const std::size_t dim = map_dim(s);
  if (s.iterate.start && s.iterate.start->size() != dim) throw SpecError("iterate.start", "dimension mismatch");
  if (s.iterate.anchor && s.iterate.anchor->size() != dim) throw SpecError("iterate.anchor", "dimension mismatch");
  if (s.rate.limit && s.rate.limit->size() != dim) throw SpecError("rate.limit", "dimension mismatch");
}

}  // namespace

Domain DomainSpec::domain() const {
  if (type == "cube") return Domain::cube(dim);
  if (type == "ball") return Domain::ball(dim, radius);
  return Domain::of_box(box);
}

ParseResult parse_spec(const json& j) {
  ParseResult r;
  try {
    only_fields(j, "", {"domain", "map", "action", "iterate", "metastable", "rate", "enumerate", "demo", "precision", "seed", "out"});
  } catch (const SpecError& e) {
    r.errors.push_back(e);
    if (!j.is_object()) return r;
  }
  ScenarioSpec s;
  auto section = [&](auto&& parse) {
    try {
      parse();
    } catch (const SpecError& e) {
      r.errors.push_back(e);
    } catch (const Error& e) {
      r.errors.push_back(SpecError("(document)", e.what()));
    }
  };
  section([&] {
    s.action = spec_field<std::string>(j, "action", "");
    if (s.action == "enumerate") s.action = "enumerate-halfspaces";
    if (!kActions.contains(s.action)) throw SpecError("action", "unknown action '" + s.action + "'");
  });
  section([&] { if (j.contains("domain")) s.domain = parse_domain(j.at("domain")); });
  section([&] { if (j.contains("map")) s.map = parse_map(j.at("map")); });
  section([&] { if (j.contains("iterate")) s.iterate = parse_iterate(j.at("iterate")); });
  section([&] { if (j.contains("metastable")) s.metastable = parse_metastable(j.at("metastable")); });
  section([&] { if (j.contains("rate")) s.rate = parse_rate(j.at("rate")); });
  section([&] { if (j.contains("enumerate")) s.enumerate = parse_enumerate(j.at("enumerate")); });
  section([&] { if (j.contains("demo")) s.demo = parse_demo(j.at("demo")); });
  section([&] {
    read_opt(j, "precision", "", s.report_precision);
    read_opt(j, "seed", "", s.seed);
    read_opt(j, "out", "", s.out);
    if (s.report_precision < 1) throw SpecError("precision", "precision must be positive");
  });
  if (r.errors.empty()) section([&] {
    if (s.action == "demo" && s.demo.name.empty()) throw SpecError("demo.name", "missing field");
    check_consistency(s);
  });
  if (r.errors.empty()) r.spec = std::move(s);
  return r;
}

ParseResult parse_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    ParseResult r;
    r.errors.emplace_back("(document)", std::string("malformed JSON: ") + e.what());
    return r;
  }
  return parse_spec(j);
}

ScenarioSpec parse_spec_or_throw(const std::string& text) {
  ParseResult r = parse_spec(text);
  if (!r.ok()) throw r.errors.front();
  return *r.spec;
}

json to_json(const ScenarioSpec& s) {
  json j;
  j["action"] = s.action;
  if (s.domain) {
    const DomainSpec& d = *s.domain;
    json dj{{"type", d.type}};
    if (d.type == "box") {
      dj["lo"] = d.box.lo();
      dj["hi"] = d.box.hi();
    } else {
      dj["dim"] = d.dim;
    }
    if (d.type == "ball") dj["radius"] = d.radius;
    j["domain"] = dj;
  }
  if (s.map) {
    const ScenarioMap& m = *s.map;
    json mj{{"kind", m.kind}};
    if (m.kind == "interval") {
      mj["a"] = m.a;
      mj["b"] = m.b;
    } else if (m.kind == "polytope") {
      mj["halfspaces"] = m.halfspaces;
    } else if (m.kind == "specker") {
      mj["e1"] = m.e1;
      mj["e2"] = m.e2;
    } else if (m.kind == "cube-family") {
      mj["alpha"] = m.e1;
      mj["beta"] = m.e2;
    } else if (m.kind == "composed") {
      mj["map"] = nonexp::to_json(*m.expr);
    }
    j["map"] = mj;
  }
  const IterateParams& it = s.iterate;
  j["iterate"] = {{"scheme", it.scheme}, {"steps", it.steps}, {"alpha", it.alpha}, {"precision", it.precision}};
  if (it.start) j["iterate"]["start"] = *it.start;
  if (it.anchor) j["iterate"]["anchor"] = *it.anchor;
  j["metastable"] = {{"n", s.metastable.n}, {"g", {{"mul", s.metastable.mul}, {"add", s.metastable.add}}}};
  if (s.metastable.k_max) j["metastable"]["k_max"] = *s.metastable.k_max;
  json rj{{"n_max", s.rate.n_max}};
  if (!s.rate.table.empty()) rj["phi"] = s.rate.table;
  if (s.rate.L) rj["contraction"] = {{"L", *s.rate.L}, {"D", *s.rate.D}};
  if (s.rate.limit) rj["limit"] = *s.rate.limit;
  j["rate"] = rj;
  j["enumerate"] = {{"max_level", s.enumerate.max_level}, {"stage_budget", s.enumerate.stage_budget}};
  const DemoParams& dp = s.demo;
  j["demo"] = {{"delay", dp.delay},           {"index", dp.index}, {"n_max", dp.n_max},
               {"sequence", dp.sequence},     {"coordinates", dp.coordinates}, {"pairs", dp.pairs}};
  if (!dp.name.empty()) j["demo"]["name"] = dp.name;
  if (dp.rate_prefix) j["demo"]["rate_prefix"] = *dp.rate_prefix;
  j["precision"] = s.report_precision;
  j["seed"] = s.seed;
  j["out"] = s.out;
  return j;
}

MapName build_scenario_map(const ScenarioSpec& s) {
  if (!s.map) throw SpecError("map", "missing field");
  const ScenarioMap& m = *s.map;
  try {
    if (m.kind == "interval") return synth::interval_map(exactreal::LowerName::constant(m.a), exactreal::UpperName::constant(m.b));
    if (m.kind == "specker") {
      const auto [a, b] = synth::specker_endpoints(m.e1, m.e2);
      return synth::interval_map(a, b);
    }
    if (m.kind == "polytope") return synth::polytope_map({s.domain->box, m.halfspaces});
    if (m.kind == "cube-family") return synth::cube_no_computable_fix(m.e1, m.e2, s.domain->dim);
    if (m.kind == "chidume") return nonexp::chidume_mutangadura_map();
  } catch (const SpecError&) {
    throw;
  } catch (const Error& e) {
    throw SpecError("map", e.what());
  }
  return nonexp::build_map(*m.expr, "map.map");
}

}  // namespace fixpt::cli
