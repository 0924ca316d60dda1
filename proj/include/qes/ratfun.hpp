#pragma once

#include "qes/multipoly.hpp"

#include <string>

namespace qes {

/// Quotient of two polynomials, kept unreduced. Equality is decided by
/// cross-multiplication, so no multivariate gcd is ever needed.
class RatFun {
 public:
  RatFun() : den_(1) {}
  RatFun(MultiPoly num);  // NOLINT(google-explicit-constructor)
  /// Throws std::domain_error if `den` is the zero polynomial.
  RatFun(MultiPoly num, MultiPoly den);

  const MultiPoly& num() const { return num_; }
  const MultiPoly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  RatFun& operator+=(const RatFun& o);
  RatFun& operator-=(const RatFun& o);
  RatFun& operator*=(const RatFun& o);

  friend RatFun operator+(RatFun a, const RatFun& b) { return a += b; }
  friend RatFun operator-(RatFun a, const RatFun& b) { return a -= b; }
  friend RatFun operator*(RatFun a, const RatFun& b) { return a *= b; }
  friend RatFun operator/(const RatFun& a, const RatFun& b);
  RatFun operator-() const { return RatFun(-num_, den_); }

 private:
  void normalize();

  MultiPoly num_;
  MultiPoly den_;
};

/// a.num·b.den − b.num·a.den == 0.
bool ratfun_equal(const RatFun& a, const RatFun& b);

/// Quotient rule.
RatFun diff(const RatFun& f, Var v);

Rational eval(const RatFun& f, const Point& point);

std::string to_string(const RatFun& f);

}  // namespace qes
