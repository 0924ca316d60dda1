#include "qes/family_io.hpp"

#include <set>

namespace qes {

namespace {

MultiPoly poly_from_json(const nlohmann::json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError("'" + key + "' must be a polynomial string");
  try {
    return parse_poly(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("'" + key + "': " + e.what());
  }
}

unsigned unsigned_from_json(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ConfigError("'" + key + "' must be a non-negative integer");
  return j.get<unsigned>();
}

}  // namespace

Rational rational_from_json(const nlohmann::json& j, const std::string& key) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (!j.is_string()) throw ConfigError("'" + key + "' must be an exact rational string \"p/q\" or an integer");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("'" + key + "': " + e.what());
  }
}

nlohmann::ordered_json to_json(const FamilyInstance& inst) {
  nlohmann::ordered_json j;
  j["variant"] = to_string(inst.variant);
  if (inst.variant == Variant::HexExample) {
    j["c"] = to_string(inst.c);
    j["j"] = to_string(inst.j);
    j["jt"] = to_string(inst.jt);
    return j;
  }
  const Variant v = inst.variant;
  j["m"] = inst.m;
  j["p0"] = to_string(inst.p0);
  j["q0"] = to_string(inst.q0);
  j["P2"] = to_string(inst.P2);
  j["Q1"] = to_string(inst.Q1);
  if (v == Variant::P1const_Sol1 || v == Variant::P1const_SolF) j["P1"] = to_string(inst.P1);
  j["xi1"] = to_string(inst.xi1);
  if (v == Variant::P1y_Sol2 || v == Variant::P1y_Sol3) {
    if (inst.k != 0) j["k"] = inst.k;
    j["xi2_scalar"] = to_string(inst.xi2_scalar);
    j["qm_scalar"] = to_string(inst.qm_scalar);
  } else {
    j["xi2"] = to_string(inst.xi2);
  }
  if (v == Variant::P1y_Sol1 || v == Variant::P1const_Sol1) j["xi_index"] = inst.xi_index;
  if (v == Variant::P1y_SolC || v == Variant::P1const_SolF) j["qm"] = to_string(inst.qm);
  if (inst.qm_coefficient_override) j["qm_coefficient_override"] = to_string(*inst.qm_coefficient_override);
  return j;
}

FamilyInstance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("instance must be a JSON object");
  static const std::set<std::string> known{"variant", "m",  "p0",         "q0",        "P2",  "Q1",
                                           "P1",      "xi2_scalar",      "qm_scalar", "k",   "xi_index",
                                           "c",       "j",  "jt",         "xi1",       "xi2", "qm",
                                           "qm_coefficient_override"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in instance");
  if (!j.contains("variant") || !j["variant"].is_string()) throw ConfigError("instance needs a string 'variant'");
  FamilyInstance inst;
  try {
    inst.variant = variant_from_string(j["variant"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (const auto& [key, value] : j.items()) {
    if (key == "variant") continue;
    if (key == "m") inst.m = unsigned_from_json(value, key);
    else if (key == "k") inst.k = unsigned_from_json(value, key);
    else if (key == "xi_index") inst.xi_index = unsigned_from_json(value, key);
    else if (key == "p0") inst.p0 = rational_from_json(value, key);
    else if (key == "q0") inst.q0 = rational_from_json(value, key);
    else if (key == "P2") inst.P2 = rational_from_json(value, key);
    else if (key == "Q1") inst.Q1 = rational_from_json(value, key);
    else if (key == "P1") inst.P1 = rational_from_json(value, key);
    else if (key == "xi2_scalar") inst.xi2_scalar = rational_from_json(value, key);
    else if (key == "qm_scalar") inst.qm_scalar = rational_from_json(value, key);
    else if (key == "c") inst.c = rational_from_json(value, key);
    else if (key == "j") inst.j = rational_from_json(value, key);
    else if (key == "jt") inst.jt = rational_from_json(value, key);
    else if (key == "xi1") inst.xi1 = poly_from_json(value, key);
    else if (key == "xi2") inst.xi2 = poly_from_json(value, key);
    else if (key == "qm") inst.qm = poly_from_json(value, key);
    else if (key == "qm_coefficient_override") inst.qm_coefficient_override = poly_from_json(value, key);
  }
  return inst;
}

}  // namespace qes
