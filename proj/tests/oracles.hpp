#pragma once

// Independent reference computations used by the tests. None of these call
// the library routine they are meant to check.

#include "qes/diffop.hpp"
#include "qes/linalg.hpp"
#include "qes/unipoly.hpp"

#include <random>
#include <set>

namespace oracle {

using qes::Exponents;
using qes::MultiPoly;
using qes::Rational;

/// Small random rational: numerator in [-9, 9], denominator in [1, 4].
inline Rational small_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 4);
  return qes::ratio(num(rng), den(rng));
}

inline Rational nonzero_rational(std::mt19937_64& rng) {
  Rational r;
  do r = small_rational(rng);
  while (r == 0);
  return r;
}

/// Random polynomial in x, y with up to `terms` terms of total degree <= deg.
inline MultiPoly random_poly(std::mt19937_64& rng, int terms = 4, unsigned deg = 3, bool with_z = false) {
  std::uniform_int_distribution<unsigned> e(0, deg);
  MultiPoly p;
  for (int i = 0; i < terms; ++i) {
    Exponents ex{e(rng), e(rng), with_z ? e(rng) : 0U};
    if (qes::total_degree(ex) > deg) continue;
    p.add_term(ex, small_rational(rng));
  }
  return p;
}

inline qes::DiffOp random_op(std::mt19937_64& rng, unsigned max_order = 2) {
  std::uniform_int_distribution<unsigned> o(0, max_order);
  qes::DiffOp op;
  for (int i = 0; i < 3; ++i) {
    qes::DerivIndex d{o(rng), o(rng), 0};
    if (qes::total_degree(d) > max_order) continue;
    op.add_term(d, random_poly(rng, 2, 2));
  }
  return op;
}

/// Monomial count of {x^a y^b : m a + b <= m n} by direct enumeration.
inline std::size_t enumerate_dim(unsigned m, unsigned n) {
  std::set<std::pair<unsigned, unsigned>> seen;
  for (unsigned a = 0; a <= m * n; ++a)
    for (unsigned b = 0; b <= m * n; ++b)
      if (m * a + b <= m * n) seen.emplace(a, b);
  return seen.size();
}

/// Faddeev-LeVerrier recursion for det(t I - A).
inline qes::UniPoly faddeev_leverrier(const qes::RatMatrix& a) {
  const std::size_t n = a.rows();
  std::vector<Rational> c(n + 1);
  c[n] = 1;
  qes::RatMatrix mk(n, n);
  const qes::RatMatrix id = qes::RatMatrix::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    mk = a * mk + qes::scaled(id, c[n - k + 1]);
    c[n - k] = -(a * mk).trace() / static_cast<long>(k);
  }
  return qes::UniPoly(std::move(c));
}

/// Evaluates a polynomial by expanding powers with repeated multiplication,
/// independent of the library's eval.
inline Rational naive_eval(const MultiPoly& p, const Rational& x, const Rational& y, const Rational& z = 0) {
  Rational acc = 0;
  for (const auto& [e, c] : p.terms()) {
    Rational t = c;
    for (unsigned i = 0; i < e[0]; ++i) t *= x;
    for (unsigned i = 0; i < e[1]; ++i) t *= y;
    for (unsigned i = 0; i < e[2]; ++i) t *= z;
    acc += t;
  }
  return acc;
}

}  // namespace oracle

namespace oracle {

/// Value and first partials of a quotient num/den at a point, by the quotient
/// rule applied to values of the polynomial parts.
struct Jet {
  Rational v, dx, dy;
};

inline Jet quotient_jet(const MultiPoly& num, const MultiPoly& den, const qes::Point& pt) {
  const Rational n = qes::eval(num, pt), d = qes::eval(den, pt);
  const Rational nx = qes::eval(qes::diff(num, qes::Var::x), pt), ny = qes::eval(qes::diff(num, qes::Var::y), pt);
  const Rational dx = qes::eval(qes::diff(den, qes::Var::x), pt), dy = qes::eval(qes::diff(den, qes::Var::y), pt);
  return {n / d, (nx * d - n * dx) / (d * d), (ny * d - n * dy) / (d * d)};
}

/// Evaluates [-g^{μν}(∇_μ - A_μ)(∇_ν - A_ν) + V] f at a point, expanding the
/// covariant operator by hand:
///   -Δf + 2A^μ∂_μf + (∇_μA^μ)f - A^μA_μ f + V f,
///   Δf = g^{μν}∂_μ∂_νf + (∂_μg^{μν})∂_νf - g^{μν}∂_μD ∂_νf / (2D),
///   ∇_μA^μ = ∂_μA^μ - A^μ∂_μD / (2D),  D = det g^{..}.
/// The A components are given as (num, den) pairs; lower ones at the point only.
inline Rational covariant_apply(const MultiPoly& gxx, const MultiPoly& gxy, const MultiPoly& gyy,
                                const std::pair<MultiPoly, MultiPoly>& aup_x,
                                const std::pair<MultiPoly, MultiPoly>& aup_y, const Rational& alow_x,
                                const Rational& alow_y, const Rational& v, const MultiPoly& f,
                                const qes::Point& pt) {
  using qes::Var;
  using qes::diff;
  using qes::eval;
  const auto e = [&](const MultiPoly& p) { return eval(p, pt); };
  const MultiPoly det = gxx * gyy - gxy * gxy;
  const Rational d = e(det), ddx = e(diff(det, Var::x)), ddy = e(diff(det, Var::y));
  const Rational fx = e(diff(f, Var::x)), fy = e(diff(f, Var::y));
  const Rational fxx = e(diff(f, Var::x, 2)), fyy = e(diff(f, Var::y, 2)), fxy = e(diff(diff(f, Var::x), Var::y));
  const Rational Gxx = e(gxx), Gxy = e(gxy), Gyy = e(gyy);
  const Rational div_gx = e(diff(gxx, Var::x)) + e(diff(gxy, Var::y));
  const Rational div_gy = e(diff(gxy, Var::x)) + e(diff(gyy, Var::y));
  const Rational lap = Gxx * fxx + 2 * Gxy * fxy + Gyy * fyy + div_gx * fx + div_gy * fy -
                       ((Gxx * ddx + Gxy * ddy) * fx + (Gxy * ddx + Gyy * ddy) * fy) / (2 * d);
  const Jet ax = quotient_jet(aup_x.first, aup_x.second, pt);
  const Jet ay = quotient_jet(aup_y.first, aup_y.second, pt);
  const Rational cov_div = ax.dx + ay.dy - (ax.v * ddx + ay.v * ddy) / (2 * d);
  const Rational sq = ax.v * alow_x + ay.v * alow_y;
  const Rational fv = e(f);
  return -lap + 2 * (ax.v * fx + ay.v * fy) + cov_div * fv - sq * fv + v * fv;
}

}  // namespace oracle
