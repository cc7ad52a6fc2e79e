#pragma once

#include <json.hpp>

#include <string>

#include "fixpt/errors.hpp"
#include "fixpt/exactreal/dyadic.hpp"

namespace fixpt::exactreal {

/// {"m":"3","e":-2} for 3/4.
void to_json(nlohmann::json& j, const Dyadic& d);
/// Accepts the object form, an exact string ("-3/8", "7*2^-90") or a JSON
/// number (taken at its exact binary value).
void from_json(const nlohmann::json& j, Dyadic& d);

/// Exact form plus a 12-digit decimal, used in reports.
nlohmann::json dual(const Dyadic& d);

/// "a.b" or "b" when a is empty.
inline std::string join_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

/// Converts a JSON value, turning every failure into a SpecError at path.
template <class T>
T spec_get(const nlohmann::json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const SpecError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(path, e.what());
  } catch (const Error& e) {
    throw SpecError(path, e.what());
  }
}

/// Required field of an object.
template <class T>
T spec_field(const nlohmann::json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SpecError(path, "expected an object");
  if (!j.contains(key)) throw SpecError(join_path(path, key), "missing field");
  return spec_get<T>(j.at(key), join_path(path, key));
}

}  // namespace fixpt::exactreal
