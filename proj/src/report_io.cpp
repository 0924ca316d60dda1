#include "qes/report_io.hpp"

#include <set>

namespace qes {

namespace {

using ojson = nlohmann::ordered_json;

std::optional<Rational> optional_bound(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return rational_from_json(j[key], key);
}

MultiPoly poly_field(const nlohmann::json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError("'" + key + "' must be a polynomial string");
  try {
    return parse_poly(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError("'" + key + "': " + e.what());
  }
}

ojson optional_rational(const std::optional<Rational>& r) { return r ? ojson(to_string(*r)) : ojson(nullptr); }

ojson complex_json(const std::complex<double>& z) { return ojson{{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

std::string monomial_text(const Exponents& e) { return to_string(MultiPoly::monomial(e)); }

DomainSpec domain_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("domain must be a JSON object");
  static const std::set<std::string> known{"kind", "label", "curves", "y_min", "y_max", "x_split"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown key '" + key + "' in domain");
  DomainSpec d;
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError("domain needs a string 'kind'");
  try {
    d.kind = domain_kind_from_string(j["kind"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw ConfigError("'label' must be a string");
    d.label = j["label"].get<std::string>();
  }
  if (j.contains("curves")) {
    if (!j["curves"].is_array()) throw ConfigError("'curves' must be an array");
    for (const auto& c : j["curves"]) {
      if (!c.is_object()) throw ConfigError("curve must be an object");
      for (const auto& [key, value] : c.items())
        if (key != "xi" && key != "side") throw ConfigError("unknown key '" + key + "' in curve");
      if (!c.contains("xi") || !c.contains("side") || !c["side"].is_string())
        throw ConfigError("curve needs 'xi' and 'side'");
      const std::string side = c["side"].get<std::string>();
      if (side != ">=" && side != "<=") throw ConfigError("curve side must be \">=\" or \"<=\"");
      d.curves.push_back({poly_field(c["xi"], "xi"), side == ">=" ? Side::Above : Side::Below});
    }
  }
  d.y_min = optional_bound(j, "y_min");
  d.y_max = optional_bound(j, "y_max");
  if (j.contains("x_split") && !j["x_split"].is_null()) d.x_split = poly_field(j["x_split"], "x_split");
  return d;
}

ojson to_json(const DomainSpec& d) {
  ojson j;
  j["kind"] = to_string(d.kind);
  j["label"] = d.label;
  ojson curves = ojson::array();
  for (const auto& c : d.curves) curves.push_back({{"xi", to_string(c.xi)}, {"side", c.side == Side::Above ? ">=" : "<="}});
  j["curves"] = curves;
  j["y_min"] = optional_rational(d.y_min);
  j["y_max"] = optional_rational(d.y_max);
  if (d.x_split) j["x_split"] = to_string(*d.x_split);
  return j;
}

ojson to_json(const ExponentSet& e) {
  ojson j = ojson::object();
  if (e.alpha) j["alpha"] = to_string(*e.alpha);
  if (e.beta) j["beta"] = to_string(*e.beta);
  if (e.gamma) j["gamma"] = to_string(*e.gamma);
  return j;
}

ojson to_json(const BoundaryCheck& b) {
  return {{"boundary", b.boundary},
          {"explicit_exponent", to_string(b.explicit_exponent)},
          {"effective_exponent", to_string(b.effective_exponent)},
          {"matched", b.matched},
          {"pass", b.pass}};
}

ojson to_json(const ExponentCondition& c) {
  ojson coeffs = ojson::object();
  for (const auto& [sym, v] : c.coeffs) coeffs[sym] = to_string(v);
  return {{"where", c.where},
          {"chart", c.chart},
          {"weight", {to_string(c.weight_s), to_string(c.weight_t)}},
          {"requirement", c.requirement()},
          {"coefficients", coeffs},
          {"constant", to_string(c.constant)},
          {"pol_slope", to_string(c.pol_slope)},
          {"value", to_string(c.value)},
          {"status", to_string(c.status)}};
}

ojson to_json(const NormReport& r) {
  ojson j;
  j["verdict"] = to_string(r.verdict);
  j["pol_degree"] = r.pol_degree;
  j["max_pol_degree"] = r.max_pol_degree ? ojson(*r.max_pol_degree) : ojson(nullptr);
  j["pol_degree_unbounded"] = r.pol_degree_unbounded;
  ojson b = ojson::array(), a = ojson::array();
  for (const auto& c : r.boundary_conditions) b.push_back(to_json(c));
  for (const auto& c : r.asymptotic_conditions) a.push_back(to_json(c));
  j["boundary_conditions"] = b;
  j["asymptotic_conditions"] = a;
  if (r.witness)
    j["witness"] = {{"text", r.witness->text}, {"first", to_json(r.witness->first)}, {"second", to_json(r.witness->second)}};
  else
    j["witness"] = nullptr;
  return j;
}

ojson to_json(const QuadratureReport& r) {
  return {{"trend", to_string(r.trend)},   {"sizes", r.sizes},
          {"offsets", r.offsets},          {"values", r.values},
          {"ratios", r.ratios},            {"increment_ratios", r.increment_ratios},
          {"failure", r.failure}};
}

ojson to_json(const SpectralPattern& s) {
  ojson pairs = ojson::array(), unpaired = ojson::array(), rational = ojson::array();
  for (const auto& p : s.pair_eigs) pairs.push_back({{"upper", complex_json(p.upper)}, {"lower", complex_json(p.lower)}});
  for (const auto& z : s.unpaired) unpaired.push_back(complex_json(z));
  for (const auto& r : s.rational_eigs) rational.push_back(to_string(r));
  return {{"count", s.count()},       {"real", s.real_eigs},         {"pairs", pairs},
          {"unpaired", unpaired},     {"rational", rational},        {"residuals", s.residuals},
          {"tol", s.tol},             {"real_or_paired", s.is_real_or_paired()}};
}

ojson to_json(const IdentityReport& r) {
  ojson j;
  j["invariant"] = r.invariant;
  j["n_max"] = r.n_max;
  if (r.witness)
    j["invariance_witness"] = {{"source", monomial_text(r.witness->source)},
                               {"image_term", monomial_text(r.witness->image_term)},
                               {"coeff", to_string(r.witness->coeff)},
                               {"text", describe(*r.witness)}};
  else
    j["invariance_witness"] = nullptr;
  j["closure"] = r.closure;
  j["det_proportional"] = r.det_proportional;
  j["det_constant"] = optional_rational(r.det_constant);
  j["gauge_factor"] = r.gauge_factor;
  j["all_pass"] = r.all_pass();
  return j;
}

ojson to_json(const Verdict& v) {
  ojson j;
  j["outcome"] = to_string(v.outcome);
  j["reason"] = v.reason;
  j["closure"] = v.closure;
  j["hermitian"] = v.hermitian;
  j["exponents"] = to_json(v.exponents);
  ojson h = ojson::array();
  for (const auto& b : v.hermiticity) h.push_back(to_json(b));
  j["hermiticity"] = h;
  j["normalizability"] = to_json(v.norm);
  j["quadrature"] = v.quadrature ? to_json(*v.quadrature) : ojson(nullptr);
  j["spectrum"] = v.spectrum ? to_json(*v.spectrum) : ojson(nullptr);
  return j;
}

}  // namespace qes
