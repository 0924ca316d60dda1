#include "qes/unipoly.hpp"

#include <sstream>
#include <stdexcept>

namespace qes {

UniPoly::UniPoly(std::vector<Rational> ascending) : c_(std::move(ascending)) { trim(); }

UniPoly UniPoly::monomial(unsigned k, const Rational& c) {
  std::vector<Rational> v(k + 1);
  v[k] = c;
  return UniPoly(std::move(v));
}

void UniPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational UniPoly::operator()(const Rational& t) const {
  Rational acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

UniPoly& UniPoly::operator+=(const UniPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  trim();
  return *this;
}

UniPoly& UniPoly::operator-=(const UniPoly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  trim();
  return *this;
}

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> out(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] == 0) continue;
    for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
  }
  return UniPoly(std::move(out));
}

UniPoly UniPoly::scaled(const Rational& s) const {
  std::vector<Rational> v = c_;
  for (auto& x : v) x *= s;
  return UniPoly(std::move(v));
}

UniPoly UniPoly::monic() const { return is_zero() ? *this : scaled(1 / lead()); }

UniPoly UniPoly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Rational> v(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) v[i - 1] = c_[i] * static_cast<long>(i);
  return UniPoly(std::move(v));
}

DivMod divmod(const UniPoly& a, const UniPoly& b) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  std::vector<Rational> rem = a.coeffs();
  const int db = b.degree();
  if (a.degree() < db) return {UniPoly(), a};
  std::vector<Rational> quot(a.degree() - db + 1);
  const Rational inv = 1 / b.lead();
  for (int k = a.degree() - db; k >= 0; --k) {
    const Rational q = rem[k + db] * inv;
    quot[k] = q;
    if (q == 0) continue;
    for (int j = 0; j <= db; ++j) rem[k + j] -= q * b.coeffs()[j];
  }
  return {UniPoly(std::move(quot)), UniPoly(std::move(rem))};
}

UniPoly gcd(UniPoly a, UniPoly b) {
  while (!b.is_zero()) {
    UniPoly r = divmod(a, b).rem;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

std::vector<UniPoly> squarefree_decomposition(const UniPoly& p) {
  if (p.degree() < 1) return {};
  const UniPoly f = p.monic();
  const UniPoly df = f.derivative();
  UniPoly a = gcd(f, df);
  UniPoly b = divmod(f, a).quot;
  UniPoly c = divmod(df, a).quot;
  UniPoly d = c - b.derivative();
  std::vector<UniPoly> out;
  while (b.degree() >= 1) {
    UniPoly g = gcd(b, d);
    out.push_back(g);
    b = divmod(b, g).quot;
    c = divmod(d, g).quot;
    d = c - b.derivative();
  }
  return out;
}

std::string to_string(const UniPoly& p, const std::string& var) {
  if (p.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (int k = p.degree(); k >= 0; --k) {
    const Rational& c = p.coeffs()[k];
    if (c == 0) continue;
    const Rational mag = abs(c);
    if (first) {
      if (c < 0) out << '-';
    } else {
      out << (c < 0 ? " - " : " + ");
    }
    first = false;
    if (k == 0 || mag != 1) {
      out << to_string(mag);
      if (k > 0) out << '*';
    }
    if (k > 0) out << var;
    if (k > 1) out << '^' << k;
  }
  return out.str();
}

}  // namespace qes

namespace qes {

namespace {

int sign_at(const UniPoly& p, const std::optional<Rational>& t) {
  const Rational v = t ? p(*t) : p.lead();
  return sgn(v);
}

std::size_t sign_changes(const std::vector<UniPoly>& chain, const std::optional<Rational>& t) {
  std::size_t changes = 0;
  int last = 0;
  for (const auto& p : chain) {
    const int s = sign_at(p, t);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace

std::size_t count_real_roots(const UniPoly& p, const Rational& lo, const std::optional<Rational>& hi) {
  if (p.is_zero()) throw std::invalid_argument("count_real_roots: zero polynomial");
  if (p.degree() == 0) return 0;
  const UniPoly sqfree = divmod(p, gcd(p, p.derivative())).quot;
  std::vector<UniPoly> chain{sqfree, sqfree.derivative()};
  while (chain.back().degree() > 0) {
    const UniPoly r = divmod(chain[chain.size() - 2], chain.back()).rem;
    if (r.is_zero()) break;
    chain.push_back(r.scaled(-1));
  }
  const std::size_t at_lo = sign_changes(chain, lo);
  const std::size_t at_hi = sign_changes(chain, hi);
  return at_lo >= at_hi ? at_lo - at_hi : 0;
}

}  // namespace qes
