#include "qes/multipoly.hpp"

#include "expr_parser.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qes {

char var_name(Var v) {
  switch (v) {
    case Var::x: return 'x';
    case Var::y: return 'y';
    case Var::z: return 'z';
  }
  return '?';
}

std::optional<Var> var_from_name(char c) {
  switch (c) {
    case 'x': return Var::x;
    case 'y': return Var::y;
    case 'z': return Var::z;
    default: return std::nullopt;
  }
}

std::uint32_t total_degree(const Exponents& e) {
  std::uint32_t d = 0;
  for (auto k : e) d += k;
  return d;
}

bool GradedLexDescending::operator()(const Exponents& a, const Exponents& b) const {
  const auto da = total_degree(a);
  const auto db = total_degree(b);
  if (da != db) return da > db;
  return a > b;
}

bool graded_lex_less(const Exponents& a, const Exponents& b) {
  const auto da = total_degree(a);
  const auto db = total_degree(b);
  if (da != db) return da < db;
  return a < b;
}

MultiPoly::MultiPoly(const Rational& c) {
  if (c != 0) terms_.emplace(Exponents{}, c);
}

MultiPoly MultiPoly::var(Var v) {
  Exponents e{};
  e[static_cast<std::size_t>(v)] = 1;
  return monomial(e);
}

MultiPoly MultiPoly::monomial(const Exponents& e, const Rational& c) {
  MultiPoly p;
  p.add_term(e, c);
  return p;
}

bool MultiPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Exponents{});
}

Rational MultiPoly::coeff(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational MultiPoly::constant_term() const { return coeff(Exponents{}); }

Rational MultiPoly::leading_coeff() const {
  return terms_.empty() ? Rational(0) : terms_.begin()->second;
}

std::uint32_t MultiPoly::total_degree() const {
  return terms_.empty() ? 0 : qes::total_degree(terms_.begin()->first);
}

std::uint32_t MultiPoly::degree(Var v) const {
  std::uint32_t d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[static_cast<std::size_t>(v)]);
  return d;
}

std::vector<Var> MultiPoly::variables() const {
  std::vector<Var> out;
  for (std::size_t i = 0; i < kNumVars; ++i) {
    const auto v = static_cast<Var>(i);
    if (degree(v) > 0) out.push_back(v);
  }
  return out;
}

void MultiPoly::add_term(const Exponents& e, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  MultiPoly out;
  if (a.is_zero() || b.is_zero()) return out;
  Rational prod;
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Exponents e;
      for (std::size_t i = 0; i < kNumVars; ++i) e[i] = ea[i] + eb[i];
      prod = ca * cb;
      out.add_term(e, prod);
    }
  }
  return out;
}

MultiPoly& MultiPoly::operator*=(const MultiPoly& o) {
  *this = *this * o;
  return *this;
}

MultiPoly& MultiPoly::scale(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, v] : terms_) v *= c;
  return *this;
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly out = *this;
  for (auto& [e, v] : out.terms_) v = -v;
  return out;
}

MultiPoly MultiPoly::pow(unsigned k) const {
  MultiPoly result(1);
  MultiPoly base = *this;
  while (k > 0) {
    if (k & 1U) result *= base;
    k >>= 1U;
    if (k > 0) base = base * base;
  }
  return result;
}

MultiPoly diff(const MultiPoly& p, Var v, unsigned order) {
  const auto i = static_cast<std::size_t>(v);
  MultiPoly out;
  for (const auto& [e, c] : p.terms()) {
    if (e[i] < order) continue;
    Rational factor = 1;
    for (unsigned k = 0; k < order; ++k) factor *= e[i] - k;
    Exponents ne = e;
    ne[i] -= order;
    out.add_term(ne, c * factor);
  }
  return out;
}

MultiPoly subst(const MultiPoly& p, Var v, const MultiPoly& s) {
  const auto i = static_cast<std::size_t>(v);
  std::map<std::uint32_t, MultiPoly> powers;
  powers.emplace(0, MultiPoly(1));
  auto power_of = [&](std::uint32_t k) -> const MultiPoly& {
    auto it = powers.find(k);
    if (it != powers.end()) return it->second;
    auto prev = std::prev(powers.end());
    MultiPoly acc = prev->second;
    for (auto j = prev->first; j < k; ++j) {
      acc = acc * s;
      powers.emplace(j + 1, acc);
    }
    return powers.at(k);
  };
  MultiPoly out;
  for (const auto& [e, c] : p.terms()) {
    Exponents rest = e;
    rest[i] = 0;
    out += MultiPoly::monomial(rest, c) * power_of(e[i]);
  }
  return out;
}

Rational eval(const MultiPoly& p, const Point& point) {
  Rational acc = 0;
  for (const auto& [e, c] : p.terms()) {
    Rational term = c;
    for (std::size_t i = 0; i < kNumVars; ++i) {
      if (e[i] == 0) continue;
      auto it = point.find(static_cast<Var>(i));
      if (it == point.end())
        throw std::invalid_argument(std::string("eval: no value for variable ") +
                                    var_name(static_cast<Var>(i)));
      Rational pw;
      mpz_pow_ui(pw.get_num_mpz_t(), it->second.get_num_mpz_t(), e[i]);
      mpz_pow_ui(pw.get_den_mpz_t(), it->second.get_den_mpz_t(), e[i]);
      pw.canonicalize();
      term *= pw;
    }
    acc += term;
  }
  return acc;
}

MultiPoly partial_eval(const MultiPoly& p, const Point& point) {
  MultiPoly out;
  for (const auto& [e, c] : p.terms()) {
    Rational coef = c;
    Exponents rest = e;
    for (const auto& [v, val] : point) {
      const auto i = static_cast<std::size_t>(v);
      for (std::uint32_t k = 0; k < e[i]; ++k) coef *= val;
      rest[i] = 0;
    }
    out.add_term(rest, coef);
  }
  return out;
}

std::optional<Rational> proportionality_constant(const MultiPoly& a, const MultiPoly& b) {
  if (a.is_zero() && b.is_zero()) return Rational(1);
  if (a.is_zero() || b.is_zero()) return std::nullopt;
  if (a.size() != b.size()) return std::nullopt;
  const Rational c = a.leading_coeff() / b.leading_coeff();
  auto ia = a.terms().begin();
  for (auto ib = b.terms().begin(); ib != b.terms().end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second != c * ib->second) return std::nullopt;
  }
  return c;
}

std::string to_string(const MultiPoly& p) {
  if (p.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [e, c] : p.terms()) {
    const bool negative = c < 0;
    const Rational mag = abs(c);
    if (first) {
      if (negative) out << '-';
    } else {
      out << (negative ? " - " : " + ");
    }
    first = false;
    const bool is_const = total_degree(e) == 0;
    bool need_star = false;
    if (mag != 1 || is_const) {
      out << to_string(mag);
      need_star = true;
    }
    for (std::size_t i = 0; i < kNumVars; ++i) {
      if (e[i] == 0) continue;
      if (need_star) out << '*';
      out << var_name(static_cast<Var>(i));
      if (e[i] > 1) out << '^' << e[i];
      need_star = true;
    }
  }
  return out.str();
}

MultiPoly parse_poly(std::string_view text, const std::map<std::string, Rational>& constants) {
  const auto formal = detail::parse_formal(text, constants);
  MultiPoly out;
  for (const auto& [d, c] : formal) {
    if (d != Exponents{})
      throw std::invalid_argument("derivative symbol in polynomial text '" + std::string(text) + "'");
    out += c;
  }
  return out;
}

CompiledPoly::CompiledPoly(const MultiPoly& p) {
  terms_.reserve(p.size());
  for (const auto& [e, c] : p.terms()) terms_.push_back({c.get_d(), e});
}

double CompiledPoly::operator()(double x, double y, double z) const {
  const double vals[kNumVars] = {x, y, z};
  double acc = 0.0;
  for (const auto& t : terms_) {
    double v = t.c;
    for (std::size_t i = 0; i < kNumVars; ++i) {
      for (std::uint32_t k = 0; k < t.e[i]; ++k) v *= vals[i];
    }
    acc += v;
  }
  return acc;
}

}  // namespace qes
