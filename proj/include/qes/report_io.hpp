#pragma once

#include "qes/classify.hpp"
#include "qes/family_io.hpp"

namespace qes {

/// {"kind", "label", "curves": [{"xi", "side": ">=" | "<="}], "y_min", "y_max",
/// "x_split"}; bounds are "p/q" strings or integers, absent or null when
/// infinite. Unknown keys throw ConfigError.
DomainSpec domain_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const DomainSpec& d);

nlohmann::ordered_json to_json(const ExponentSet& e);
nlohmann::ordered_json to_json(const BoundaryCheck& b);
nlohmann::ordered_json to_json(const ExponentCondition& c);
nlohmann::ordered_json to_json(const NormReport& r);
nlohmann::ordered_json to_json(const QuadratureReport& r);
nlohmann::ordered_json to_json(const SpectralPattern& s);
nlohmann::ordered_json to_json(const IdentityReport& r);
nlohmann::ordered_json to_json(const Verdict& v);

/// Exponent triple as "x^a*y^b*z^c" text.
std::string monomial_text(const Exponents& e);

}  // namespace qes
