#pragma once

#include "qes/families.hpp"

#include "json.hpp"

namespace qes {

/// Raised for malformed or unknown configuration content.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Variant tag, scalars as "p/q" strings, polynomials in the text format.
/// Only the fields the variant reads are written.
nlohmann::ordered_json to_json(const FamilyInstance& inst);

/// Inverse of to_json. Scalars may also be JSON integers. Unknown keys, wrong
/// types and unparsable values throw ConfigError; constraint violations are
/// left to validate().
FamilyInstance instance_from_json(const nlohmann::json& j);

Rational rational_from_json(const nlohmann::json& j, const std::string& key);

}  // namespace qes
