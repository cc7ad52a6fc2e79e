#pragma once

#include <json.hpp>

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "fixpt/exactreal/names.hpp"

namespace fixpt::synth {

using exactreal::Dyadic;
using exactreal::LowerName;
using exactreal::Stage;
using exactreal::UpperName;

/// Model of an r.e. set of indices: fired(k, s) says index k has been
/// listed by stage s. Monotone in s.
class Enumeration {
 public:
  using Entry = std::pair<std::int64_t, Stage>;  // (index, stage)

  /// Lists nothing.
  Enumeration() = default;
  /// Finite fire table; an index listed twice keeps its earliest stage.
  static Enumeration table(std::vector<Entry> entries);
  /// halts(k, s): "the machine halts on k within s steps", monotone in s.
  /// Only indices k <= s are consulted at stage s.
  static Enumeration predicate(std::function<bool(std::int64_t, Stage)> halts);

  bool fired(std::int64_t index, Stage s) const;
  /// Earliest stage <= budget at which index is listed.
  std::optional<Stage> first_stage(std::int64_t index, Stage budget) const;
  /// Indices fired by stage s, ascending.
  std::vector<std::int64_t> fired_by(Stage s) const;
  /// Table entries sorted by index; empty for predicate enumerations.
  const std::vector<Entry>& entries() const { return entries_; }
  bool is_table() const { return !halts_; }

  bool operator==(const Enumeration& other) const { return is_table() && other.is_table() && entries_ == other.entries_; }

 private:
  std::vector<Entry> entries_;
  std::function<bool(std::int64_t, Stage)> halts_;
};

/// [[index, stage], ...]
void to_json(nlohmann::json& j, const Enumeration& e);
void from_json(const nlohmann::json& j, Enumeration& e);

/// a = 1/4 + sum of 2^-(k+3) over k fired in e1, b = 3/4 - the same over e2.
std::pair<LowerName, UpperName> specker_endpoints(const Enumeration& e1, const Enumeration& e2);

}  // namespace fixpt::synth
