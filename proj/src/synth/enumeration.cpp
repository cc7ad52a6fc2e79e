#include "fixpt/synth/enumeration.hpp"

#include <algorithm>
#include <map>

#include "fixpt/errors.hpp"

namespace fixpt::synth {

Enumeration Enumeration::table(std::vector<Entry> entries) {
  std::map<std::int64_t, Stage> first;
  for (const auto& [k, s] : entries) {
    if (k < 0 || s < 0) throw DomainError("fire table entries must be nonnegative");
    auto [it, fresh] = first.emplace(k, s);
    if (!fresh) it->second = std::min(it->second, s);
  }
  Enumeration e;
  e.entries_.assign(first.begin(), first.end());
  return e;
}

Enumeration Enumeration::predicate(std::function<bool(std::int64_t, Stage)> halts) {
  if (!halts) throw DomainError("empty halting predicate");
  Enumeration e;
  e.halts_ = std::move(halts);
  return e;
}

bool Enumeration::fired(std::int64_t index, Stage s) const {
  if (halts_) return index <= s && halts_(index, s);
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{index, Stage{}},
                                   [](const Entry& a, const Entry& b) { return a.first < b.first; });
  return it != entries_.end() && it->first == index && it->second <= s;
}

std::optional<Stage> Enumeration::first_stage(std::int64_t index, Stage budget) const {
  if (halts_) {
    for (Stage s = std::max<Stage>(index, 0); s <= budget; ++s) {
      if (halts_(index, s)) return s;
    }
    return std::nullopt;
  }
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{index, Stage{}},
                                   [](const Entry& a, const Entry& b) { return a.first < b.first; });
  if (it == entries_.end() || it->first != index || it->second > budget) return std::nullopt;
  return it->second;
}

std::vector<std::int64_t> Enumeration::fired_by(Stage s) const {
  std::vector<std::int64_t> out;
  if (halts_) {
    for (std::int64_t k = 0; k <= s; ++k) {
      if (halts_(k, s)) out.push_back(k);
    }
    return out;
  }
  for (const auto& [k, st] : entries_) {
    if (st <= s) out.push_back(k);
  }
  return out;
}

void to_json(nlohmann::json& j, const Enumeration& e) {
  if (!e.is_table()) throw DomainError("only fire tables serialise");
  j = nlohmann::json::array();
  for (const auto& [k, s] : e.entries()) j.push_back({k, s});
}

void from_json(const nlohmann::json& j, Enumeration& e) {
  if (!j.is_array()) throw DomainError("fire table must be an array of [index, stage] pairs");
  std::vector<Enumeration::Entry> entries;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != 2 || !row[0].is_number_integer() || !row[1].is_number_integer()) {
      throw DomainError("fire table rows are [index, stage] integer pairs");
    }
    entries.emplace_back(row[0].get<std::int64_t>(), row[1].get<Stage>());
  }
  e = Enumeration::table(std::move(entries));
}

std::pair<LowerName, UpperName> specker_endpoints(const Enumeration& e1, const Enumeration& e2) {
  auto mass = [](const Enumeration& e, Stage s) {
    Dyadic sum;
    for (std::int64_t k : e.fired_by(s)) sum += Dyadic::pow2(-(k + 3));
    return sum;
  };
  const Dyadic quarter = Dyadic::pow2(-2);
  const Dyadic three_quarters = Dyadic(3).shifted(-2);
  return {LowerName::from_stages([e1, mass, quarter](Stage s) { return quarter + mass(e1, s); }),
          UpperName::from_stages([e2, mass, three_quarters](Stage s) { return three_quarters - mass(e2, s); })};
}

}  // namespace fixpt::synth
