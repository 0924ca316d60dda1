#pragma once

#include "qes/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qes {

/// Dense univariate polynomial over the rationals, coefficients stored in
/// ascending order with no trailing zeros (the zero polynomial is empty).
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<Rational> ascending);

  static UniPoly monomial(unsigned k, const Rational& c = 1);

  const std::vector<Rational>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  /// Degree; -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  Rational coeff(unsigned k) const { return k < c_.size() ? c_[k] : Rational(0); }
  Rational lead() const { return c_.empty() ? Rational(0) : c_.back(); }

  Rational operator()(const Rational& t) const;

  UniPoly& operator+=(const UniPoly& o);
  UniPoly& operator-=(const UniPoly& o);
  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  friend UniPoly operator-(UniPoly a, const UniPoly& b) { return a -= b; }
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b);
  friend bool operator==(const UniPoly& a, const UniPoly& b) = default;

  UniPoly scaled(const Rational& s) const;
  UniPoly monic() const;
  UniPoly derivative() const;

 private:
  void trim();
  std::vector<Rational> c_;
};

struct DivMod {
  UniPoly quot;
  UniPoly rem;
};

/// Throws std::domain_error on division by zero.
DivMod divmod(const UniPoly& a, const UniPoly& b);

/// Monic gcd (zero if both are zero).
UniPoly gcd(UniPoly a, UniPoly b);

/// Yun's algorithm: returns f_1, f_2, ... with p = lead * prod f_i^i, each
/// f_i monic and square-free (entries may be the constant 1).
std::vector<UniPoly> squarefree_decomposition(const UniPoly& p);

/// Number of distinct real roots in (lo, hi], hi = nullopt meaning +infinity.
/// Sturm sequence of the square-free part. Throws std::invalid_argument for
/// the zero polynomial.
std::size_t count_real_roots(const UniPoly& p, const Rational& lo, const std::optional<Rational>& hi);

/// e.g. "t^3 - 3/2*t + 1".
std::string to_string(const UniPoly& p, const std::string& var = "t");

}  // namespace qes
