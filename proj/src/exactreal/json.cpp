#include "fixpt/exactreal/json.hpp"

#include "fixpt/errors.hpp"

namespace fixpt::exactreal {

void to_json(nlohmann::json& j, const Dyadic& d) {
  j = nlohmann::json{{"m", d.mantissa().get_str()}, {"e", d.exponent()}};
}

void from_json(const nlohmann::json& j, Dyadic& d) {
  if (j.is_object()) {
    if (!j.contains("m") || !j.contains("e")) throw DomainError("dyadic object needs \"m\" and \"e\"");
    const auto& m = j.at("m");
    const auto& e = j.at("e");
    if (!e.is_number_integer()) throw DomainError("dyadic exponent must be an integer");
    mpz_class mant;
    if (m.is_string()) {
      if (mant.set_str(m.get<std::string>(), 10) != 0) throw DomainError("bad dyadic mantissa");
    } else if (m.is_number_integer()) {
      mant = m.get<long>();
    } else {
      throw DomainError("dyadic mantissa must be a decimal string");
    }
    d = Dyadic(mant, e.get<std::int64_t>());
  } else if (j.is_string()) {
    d = Dyadic::parse(j.get<std::string>());
  } else if (j.is_number_integer()) {
    d = Dyadic(j.get<long>());
  } else if (j.is_number()) {
    d = Dyadic::from_double(j.get<double>());
  } else {
    throw DomainError("expected a dyadic");
  }
}

nlohmann::json dual(const Dyadic& d) {
  return nlohmann::json{{"exact", d.str()}, {"decimal", d.decimal()}};
}

}  // namespace fixpt::exactreal
