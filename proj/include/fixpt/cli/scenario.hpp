#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "fixpt/errors.hpp"
#include "fixpt/nonexp/json.hpp"
#include "fixpt/synth/enumeration.hpp"

namespace fixpt::cli {

using exactreal::Dyadic;
using exactreal::Precision;
using exactreal::Stage;
using nonexp::Domain;
using nonexp::MapName;
using spaces::Box;
using spaces::DyVec;
using spaces::HalfSpace;
using synth::Enumeration;

// {"type":"box","lo":[..],"hi":[..]} | {"type":"cube","dim":d} | {"type":"ball","dim":d,"radius":r}
struct DomainSpec {
  std::string type;
  Box box;             // box
  std::size_t dim = 0;
  Dyadic radius;       // ball
  bool operator==(const DomainSpec&) const = default;
  Domain domain() const;
};

// interval {a, b}; polytope {halfspaces}; specker {e1, e2}; cube-family {alpha, beta};
// chidume {}; composed {map: nonexp map spec}.
struct ScenarioMap {
  std::string kind;
  Dyadic a, b;
  std::vector<HalfSpace> halfspaces;
  Enumeration e1, e2;  // specker e1/e2, cube-family alpha/beta
  std::optional<nonexp::MapSpec> expr;
  bool operator==(const ScenarioMap&) const = default;
};

struct IterateParams {
  std::string scheme = "km";  // km | mann | halpern | reich
  std::int64_t steps = 1000;
  std::optional<DyVec> start;
  std::optional<DyVec> anchor;
  Dyadic alpha = Dyadic::pow2(-1);  // mann
  Precision precision = 0;          // 0: scheduled from steps and dimension
  bool operator==(const IterateParams&) const = default;
};

// g(k) = mul k + add
struct MetastableParams {
  int n = 10;
  std::int64_t mul = 1;
  std::int64_t add = 1;
  std::optional<std::int64_t> k_max;  // defaults to the step count
  bool operator==(const MetastableParams&) const = default;
};

// Either phi(0..len-1) from a table, or the contraction rate of {L, D}.
struct RateParams {
  std::vector<std::int64_t> table;
  std::optional<Dyadic> L, D;
  int n_max = 10;
  std::optional<DyVec> limit;
  bool operator==(const RateParams&) const = default;
};

struct EnumerateParams {
  int max_level = 1;
  Stage stage_budget = 1'000'000;
  bool operator==(const EnumerateParams&) const = default;
};

struct DemoParams {
  std::string name;  // specker | cube | pseudo | tmap
  Stage delay = 100;
  std::optional<Stage> rate_prefix;  // defaults to the delay
  std::int64_t index = 0;            // specker: index fired at the delay
  int n_max = 20;                    // specker: rate checked for n <= n_max
  std::vector<Dyadic> sequence{Dyadic::pow2(-1)};  // tmap; the last value repeats
  std::int64_t coordinates = 8;      // tmap
  std::int64_t pairs = 1000;         // pseudo: random pairs for the inequality checks
  bool operator==(const DemoParams&) const = default;
};

struct ScenarioSpec {
  std::optional<DomainSpec> domain;
  std::optional<ScenarioMap> map;
  std::string action;  // synth | iterate | enumerate-halfspaces | metastable | certify-rate | demo
  IterateParams iterate;
  MetastableParams metastable;
  RateParams rate;
  EnumerateParams enumerate;
  DemoParams demo;
  Precision report_precision = 40;  // bits for queried reals in reports
  std::uint64_t seed = 0;
  std::string out = "out";
  bool operator==(const ScenarioSpec&) const = default;
};

struct ParseResult {
  std::optional<ScenarioSpec> spec;
  std::vector<SpecError> errors;
  bool ok() const { return spec.has_value(); }
};

/// Validates a scenario document. Sections are checked independently, so
/// one call reports every broken section with its path.
ParseResult parse_spec(const std::string& text);
ParseResult parse_spec(const nlohmann::json& j);
/// Throws the first error.
ScenarioSpec parse_spec_or_throw(const std::string& text);

nlohmann::json to_json(const ScenarioSpec& spec);

/// The scenario's map; cube-family, chidume and composed maps bring their own domain.
MapName build_scenario_map(const ScenarioSpec& spec);

}  // namespace fixpt::cli
