#pragma once

#include "qes/rational.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qes {

/// Polynomial variables in their fixed global order x < y < z.
enum class Var : std::uint8_t { x = 0, y = 1, z = 2 };

inline constexpr std::size_t kNumVars = 3;

using Exponents = std::array<std::uint32_t, kNumVars>;

char var_name(Var v);
std::optional<Var> var_from_name(char c);

std::uint32_t total_degree(const Exponents& e);

/// Graded lexicographic order, largest term first: higher total degree wins,
/// ties broken lexicographically with x most significant.
struct GradedLexDescending {
  bool operator()(const Exponents& a, const Exponents& b) const;
};

/// Ascending counterpart, used to order monomial bases (1, y, x, y^2, ...).
bool graded_lex_less(const Exponents& a, const Exponents& b);

/// Sparse multivariate polynomial over the rationals.
///
/// Terms with zero coefficient are never stored, so the zero polynomial is
/// the empty map and structural equality is polynomial equality.
class MultiPoly {
 public:
  using Terms = std::map<Exponents, Rational, GradedLexDescending>;

  MultiPoly() = default;
  MultiPoly(const Rational& c);  // NOLINT(google-explicit-constructor)
  MultiPoly(long c) : MultiPoly(Rational(c)) {}  // NOLINT
  MultiPoly(int c) : MultiPoly(Rational(c)) {}   // NOLINT

  static MultiPoly var(Var v);
  static MultiPoly monomial(const Exponents& e, const Rational& c = 1);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  std::size_t size() const { return terms_.size(); }

  Rational coeff(const Exponents& e) const;
  /// Constant term (coefficient of the zero exponent).
  Rational constant_term() const;
  /// Leading coefficient in graded-lex order; zero for the zero polynomial.
  Rational leading_coeff() const;

  std::uint32_t total_degree() const;
  std::uint32_t degree(Var v) const;
  /// Variables that occur with positive exponent, in global order.
  std::vector<Var> variables() const;

  void add_term(const Exponents& e, const Rational& c);

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const MultiPoly& o);
  /// In-place multiplication by a scalar.
  MultiPoly& scale(const Rational& c);

  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  MultiPoly operator-() const;

  friend bool operator==(const MultiPoly& a, const MultiPoly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }

  MultiPoly pow(unsigned k) const;

 private:
  Terms terms_;
};

/// Formal partial derivative of the given order.
MultiPoly diff(const MultiPoly& p, Var v, unsigned order = 1);

/// Replaces every occurrence of `v` by `s`, fully expanded.
MultiPoly subst(const MultiPoly& p, Var v, const MultiPoly& s);

using Point = std::map<Var, Rational>;

/// Exact evaluation. Throws std::invalid_argument if a variable of `p` is
/// missing from `point`.
Rational eval(const MultiPoly& p, const Point& point);

/// Evaluates with every variable outside `point` left symbolic.
MultiPoly partial_eval(const MultiPoly& p, const Point& point);

/// If a == c·b for a nonzero rational c, returns c. Zero polynomials are
/// proportional only to each other (returns 1).
std::optional<Rational> proportionality_constant(const MultiPoly& a, const MultiPoly& b);

/// Human-readable form, e.g. "3/2*x^2*y - 1", terms in descending graded-lex order.
std::string to_string(const MultiPoly& p);

/// Parses the text format written by to_string (and general expressions with
/// +, -, *, ^, parentheses and constant division). Names in `constants` are
/// substituted by their values. Throws std::invalid_argument.
MultiPoly parse_poly(std::string_view text, const std::map<std::string, Rational>& constants = {});

/// Floating-point evaluator for hot loops (quadrature). Built once from the
/// exact polynomial.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const MultiPoly& p);
  double operator()(double x, double y, double z = 0.0) const;

 private:
  struct Term {
    double c;
    Exponents e;
  };
  std::vector<Term> terms_;
};

}  // namespace qes
