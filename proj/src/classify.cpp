#include "qes/classify.hpp"

#include "qes/unipoly.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <set>

namespace qes {

namespace {

const MultiPoly X = MultiPoly::var(Var::x);
const MultiPoly Y = MultiPoly::var(Var::y);
const MultiPoly Z = MultiPoly::var(Var::z);

std::size_t idx(Var v) { return static_cast<std::size_t>(v); }

bool depends_only_on_y(const MultiPoly& p) { return p.degree(Var::x) == 0 && p.degree(Var::z) == 0; }

/// p must only involve v.
UniPoly to_uni(const MultiPoly& p, Var v) {
  std::vector<Rational> c(p.degree(v) + 1);
  for (const auto& [e, a] : p.terms()) c[e[idx(v)]] += a;
  return UniPoly(std::move(c));
}

/// Distinct real roots in the open interval (lo, hi); missing ends are infinite.
std::size_t roots_in_open(const UniPoly& p, const std::optional<Rational>& lo, const std::optional<Rational>& hi) {
  if (p.degree() <= 0) return 0;
  Rational from;
  if (lo) {
    from = *lo;
  } else {
    Rational bound = 0;
    for (const auto& c : p.coeffs()) bound = std::max(bound, Rational(abs(c / p.lead())));
    from = -(bound + 1);
  }
  std::size_t n = count_real_roots(p, from, hi);
  if (hi && p(*hi) == 0) --n;
  return n;
}

int sign(const Rational& r) { return sgn(r); }

constexpr unsigned kInfiniteOrder = std::numeric_limits<unsigned>::max();

unsigned order_on_curve(const MultiPoly& p, const MultiPoly& xi) {
  if (p.is_zero()) return kInfiniteOrder;
  MultiPoly q = p;
  unsigned r = 0;
  while (!q.is_zero() && subst(q, Var::x, xi).is_zero()) {
    q = diff(q, Var::x);
    ++r;
  }
  return r;
}

unsigned order_on_line(const MultiPoly& p, const Rational& y0) {
  if (p.is_zero()) return kInfiniteOrder;
  MultiPoly q = p;
  unsigned r = 0;
  while (!q.is_zero() && partial_eval(q, {{Var::y, y0}}).is_zero()) {
    q = diff(q, Var::y);
    ++r;
  }
  return r;
}

struct Boundary {
  std::string name;
  std::optional<MultiPoly> curve;
  Rational y0;

  unsigned order(const MultiPoly& p) const { return curve ? order_on_curve(p, *curve) : order_on_line(p, y0); }
};

std::string curve_name(const MultiPoly& xi) { return "x = " + to_string(xi); }
std::string line_name(const Rational& y0) { return "y = " + to_string(y0); }

/// A y-line bounds the domain only where the x-interval has positive width.
bool has_width(const DomainSpec& d, const Rational& y0) {
  const auto* lo = d.lower();
  const auto* hi = d.upper();
  if (!lo || !hi) return true;
  return eval(hi->xi - lo->xi, {{Var::y, y0}}) != 0;
}

std::vector<Boundary> boundaries_of(const DomainSpec& d) {
  std::vector<Boundary> out;
  for (const auto* c : {d.lower(), d.upper()})
    if (c) out.push_back({curve_name(c->xi), c->xi, Rational(0)});
  for (const auto& y0 : {d.y_min, d.y_max})
    if (y0 && has_width(d, *y0)) out.push_back({line_name(*y0), std::nullopt, *y0});
  return out;
}

MultiPoly split_curve(const DomainSpec& d, const Prefactor* pre) {
  if (d.x_split) return *d.x_split;
  if (pre && pre->arctan) {
    const MultiPoly centre = X - pre->arctan->den;
    if (depends_only_on_y(centre)) return centre;
  }
  return MultiPoly();
}

// ---------------------------------------------------------------------------
// Charts: (s, t) >= 0, stored as polynomials in Var::x (= s) and Var::y (= t).

struct Chart {
  std::string name;
  MultiPoly X, Y;
  std::optional<Rational> s_max, t_max;
  std::string s_desc, t_desc;
  std::optional<std::string> s_boundary, t_boundary;
  std::optional<MultiPoly> jacobian;
};

MultiPoly compose(const MultiPoly& p, const Chart& c) {
  const MultiPoly yz = subst(c.Y, Var::y, Z);
  const MultiPoly xz = subst(c.X, Var::y, Z);
  MultiPoly q = subst(p, Var::y, yz);
  q = subst(q, Var::x, xz);
  return subst(q, Var::z, Y);
}

std::string paren(const MultiPoly& p) { return "(" + to_string(p) + ")"; }

std::vector<Chart> charts_of(const DomainSpec& d, const MultiPoly& centre) {
  struct YPiece {
    MultiPoly Y;
    std::optional<Rational> t_max;
    std::optional<std::string> boundary;
    std::string desc;
  };
  std::vector<YPiece> ys;
  auto line = [&](const Rational& y0) -> std::optional<std::string> {
    if (has_width(d, y0)) return line_name(y0);
    return std::nullopt;
  };
  if (d.y_min && d.y_max) {
    const Rational half = (*d.y_max - *d.y_min) / 2;
    ys.push_back({MultiPoly(*d.y_min) + Y, half, line(*d.y_min), "y - " + paren(MultiPoly(*d.y_min))});
    ys.push_back({MultiPoly(*d.y_max) - Y, half, line(*d.y_max), paren(MultiPoly(*d.y_max)) + " - y"});
  } else if (d.y_min) {
    ys.push_back({MultiPoly(*d.y_min) + Y, std::nullopt, line(*d.y_min), "y - " + paren(MultiPoly(*d.y_min))});
  } else if (d.y_max) {
    ys.push_back({MultiPoly(*d.y_max) - Y, std::nullopt, line(*d.y_max), paren(MultiPoly(*d.y_max)) + " - y"});
  } else {
    ys.push_back({Y, std::nullopt, std::nullopt, "y"});
    ys.push_back({-Y, std::nullopt, std::nullopt, "-y"});
  }

  const auto* lo = d.lower();
  const auto* hi = d.upper();
  std::vector<Chart> out;
  for (const auto& yp : ys) {
    auto make = [&](MultiPoly x, std::string s_desc, std::optional<Rational> s_max,
                    std::optional<std::string> s_boundary, std::optional<MultiPoly> jac) {
      Chart c;
      c.X = std::move(x);
      c.Y = yp.Y;
      c.s_max = std::move(s_max);
      c.t_max = yp.t_max;
      c.s_desc = std::move(s_desc);
      c.t_desc = yp.desc;
      c.s_boundary = std::move(s_boundary);
      c.t_boundary = yp.boundary;
      c.jacobian = std::move(jac);
      c.name = "s = " + c.s_desc + ", t = " + c.t_desc;
      out.push_back(std::move(c));
    };
    if (lo && hi) {
      const MultiPoly lo_y = subst(lo->xi, Var::y, yp.Y);
      const MultiPoly hi_y = subst(hi->xi, Var::y, yp.Y);
      const MultiPoly width = hi_y - lo_y;
      const std::string w = "(" + paren(hi->xi) + " - " + paren(lo->xi) + ")";
      make(lo_y + width * X, "(x - " + paren(lo->xi) + ")/" + w, ratio(1, 2), curve_name(lo->xi), width);
      make(hi_y - width * X, "(" + paren(hi->xi) + " - x)/" + w, ratio(1, 2), curve_name(hi->xi), width);
    } else if (lo) {
      make(subst(lo->xi, Var::y, yp.Y) + X, "x - " + paren(lo->xi), std::nullopt, curve_name(lo->xi), std::nullopt);
    } else if (hi) {
      make(subst(hi->xi, Var::y, yp.Y) - X, paren(hi->xi) + " - x", std::nullopt, curve_name(hi->xi), std::nullopt);
    } else {
      const MultiPoly c_y = subst(centre, Var::y, yp.Y);
      make(c_y + X, "x - " + paren(centre), std::nullopt, std::nullopt, std::nullopt);
      make(c_y - X, paren(centre) + " - x", std::nullopt, std::nullopt, std::nullopt);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weighted directions.

struct Dir {
  long a = 0, b = 0;
  friend bool operator<(const Dir& l, const Dir& r) { return std::pair(l.a, l.b) < std::pair(r.a, r.b); }
  friend bool operator==(const Dir& l, const Dir& r) = default;
};

Dir primitive(long a, long b) {
  const long g = std::gcd(std::labs(a), std::labs(b));
  return g == 0 ? Dir{} : Dir{a / g, b / g};
}

long weight(const Exponents& e, const Dir& w) {
  return w.a * static_cast<long>(e[0]) + w.b * static_cast<long>(e[1]);
}

long ord(const MultiPoly& p, const Dir& w) {
  long best = std::numeric_limits<long>::min();
  for (const auto& [e, c] : p.terms()) best = std::max(best, weight(e, w));
  return best;
}

MultiPoly face(const MultiPoly& p, const Dir& w) {
  const long o = ord(p, w);
  MultiPoly f;
  for (const auto& [e, c] : p.terms())
    if (weight(e, w) == o) f.add_term(e, c);
  return f;
}

/// Sign of a weighted-homogeneous face on the open chart quadrant (restricted
/// to the free variable's range on the axes); nullopt if it can vanish there.
std::optional<int> face_sign(const MultiPoly& f, const Dir& w, const Chart& chart) {
  if (f.size() == 1) return sign(f.terms().begin()->second);
  // Along the face the polynomial is a monomial times a univariate polynomial
  // in s (t set to 1) or, on the s-axis direction, in t.
  const Var free = (w.b == 0) ? Var::y : Var::x;
  std::optional<Rational> hi;
  if (w.a == 0) hi = chart.s_max;
  if (w.b == 0) hi = chart.t_max;
  std::uint32_t low = std::numeric_limits<std::uint32_t>::max();
  for (const auto& [e, c] : f.terms()) low = std::min(low, e[idx(free)]);
  std::vector<Rational> coeffs;
  for (const auto& [e, c] : f.terms()) {
    const auto k = e[idx(free)] - low;
    if (coeffs.size() <= k) coeffs.resize(k + 1);
    coeffs[k] += c;
  }
  const UniPoly g(std::move(coeffs));
  if (roots_in_open(g, Rational(0), hi) > 0) return std::nullopt;
  const Rational sample = hi ? Rational(*hi / 2) : Rational(1);
  return sign(g(sample));
}

struct ChartFactor {
  MultiPoly poly;
  Rational sigma;
  std::string symbol;
};

std::vector<ChartFactor> chart_factors(const Prefactor& pre, const Chart& chart) {
  std::vector<ChartFactor> out;
  for (const auto& t : pre.powers) out.push_back({compose(t.base, chart), 2 * t.exponent, t.symbol});
  if (chart.jacobian) out.push_back({*chart.jacobian, Rational(1), ""});
  return out;
}

MultiPoly chart_exponent(const Prefactor& pre, const Chart& chart) {
  MultiPoly e;
  for (const auto& t : pre.exps) e += MultiPoly(2 * t.coeff) * compose(t.poly, chart);
  return e;
}

bool allowed(const Dir& w, const Chart& c) {
  if (w.a == 0 && w.b == 0) return false;
  if (c.s_max && w.a > 0) return false;
  if (c.t_max && w.b > 0) return false;
  return true;
}

double start_angle(const Chart& c) {
  constexpr double pi = std::numbers::pi;
  if (c.s_max && c.t_max) return pi;
  if (c.s_max) return pi / 2;
  if (c.t_max) return pi;
  return 0.0;
}

std::vector<Dir> directions(const Chart& c, const std::vector<ChartFactor>& factors, const MultiPoly& exponent) {
  std::set<Dir> cand{{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  auto add_perpendiculars = [&](const MultiPoly& p) {
    std::vector<Exponents> es;
    for (const auto& [e, co] : p.terms()) es.push_back(e);
    for (std::size_t i = 0; i < es.size(); ++i)
      for (std::size_t j = i + 1; j < es.size(); ++j) {
        const long da = static_cast<long>(es[i][0]) - static_cast<long>(es[j][0]);
        const long db = static_cast<long>(es[i][1]) - static_cast<long>(es[j][1]);
        const Dir d = primitive(db, -da);
        cand.insert(d);
        cand.insert(Dir{-d.a, -d.b});
      }
  };
  for (const auto& f : factors) add_perpendiculars(f.poly);
  add_perpendiculars(c.X);
  add_perpendiculars(c.Y);
  add_perpendiculars(exponent);
  // Where a monomial of the exponent changes between growing and bounded.
  for (const auto& [e, co] : exponent.terms()) {
    const Dir d = primitive(static_cast<long>(e[1]), -static_cast<long>(e[0]));
    cand.insert(d);
    cand.insert(Dir{-d.a, -d.b});
  }

  const double start = start_angle(c);
  auto rel = [&](const Dir& d) {
    double a = std::atan2(static_cast<double>(d.b), static_cast<double>(d.a)) - start;
    while (a < 0) a += 2 * std::numbers::pi;
    while (a >= 2 * std::numbers::pi) a -= 2 * std::numbers::pi;
    return a;
  };
  std::vector<Dir> sorted;
  for (const auto& d : cand)
    if (allowed(d, c)) sorted.push_back(d);
  std::sort(sorted.begin(), sorted.end(), [&](const Dir& l, const Dir& r) { return rel(l) < rel(r); });

  std::vector<Dir> out;
  const bool cyclic = !c.s_max && !c.t_max;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    out.push_back(sorted[i]);
    if (i + 1 == sorted.size() && !cyclic) break;
    const Dir& p = sorted[i];
    const Dir& q = sorted[(i + 1) % sorted.size()];
    const long lp = std::labs(p.a) + std::labs(p.b);
    const long lq = std::labs(q.a) + std::labs(q.b);
    const Dir mid = primitive(p.a * lq + q.a * lp, p.b * lq + q.b * lp);
    if (!(mid == Dir{}) && allowed(mid, c)) out.push_back(mid);
  }
  return out;
}

std::string describe(const Dir& w, const Chart& c) {
  const bool corner = w.a <= 0 && w.b <= 0;
  std::string out = corner ? "corner: " : "infinity: ";
  out += "(" + c.s_desc + ") ~ r^" + std::to_string(w.a) + ", (" + c.t_desc + ") ~ r^" + std::to_string(w.b) +
         ", r -> inf";
  return out;
}

ExponentCondition evaluate(const Dir& w, const Chart& chart, const std::vector<ChartFactor>& factors,
                           const MultiPoly& exponent, const std::map<std::string, Rational>& values,
                           unsigned pol_degree) {
  ExponentCondition cond;
  cond.chart = chart.name;
  cond.weight_s = w.a;
  cond.weight_t = w.b;
  const bool on_boundary = (w == Dir{-1, 0} && chart.s_boundary) || (w == Dir{0, -1} && chart.t_boundary);
  cond.where = on_boundary ? "boundary " + (w.a != 0 ? *chart.s_boundary : *chart.t_boundary) : describe(w, chart);

  if (!exponent.is_zero() && ord(exponent, w) > 0) {
    const auto s = face_sign(face(exponent, w), w, chart);
    if (!s) cond.status = ExponentCondition::Status::Degenerate;
    else if (*s < 0) cond.status = ExponentCondition::Status::ExpDecay;
    else cond.status = ExponentCondition::Status::ExpGrowth;
    return cond;
  }

  bool degenerate = false;
  std::map<std::string, Rational> coeffs;
  cond.constant = -(w.a + w.b);
  for (const auto& f : factors) {
    const long o = ord(f.poly, w);
    if (f.symbol.empty()) cond.constant -= f.sigma * o;
    else coeffs[f.symbol] -= 2 * Rational(o);
    if (f.sigma != 0 && f.poly.size() > 1 && !face_sign(face(f.poly, w), w, chart)) degenerate = true;
  }
  for (const auto& [sym, c] : coeffs)
    if (c != 0) cond.coeffs.emplace_back(sym, c);
  const long pol_ord = std::max({0L, ord(chart.X, w), ord(chart.Y, w)});
  cond.pol_slope = 2 * pol_ord;
  Rational v = cond.constant - cond.pol_slope * pol_degree;
  for (const auto& [sym, c] : cond.coeffs) v += c * values.at(sym);
  cond.value = v;
  if (degenerate) cond.status = ExponentCondition::Status::Degenerate;
  else cond.status = v > 0 ? ExponentCondition::Status::Pass : ExponentCondition::Status::Fail;
  return cond;
}

bool power_counted(const ExponentCondition& c) {
  return c.status == ExponentCondition::Status::Pass || c.status == ExponentCondition::Status::Fail;
}

std::optional<Rational> negative_ratio(const ExponentCondition& k, const ExponentCondition& l) {
  if (k.coeffs.empty() || k.coeffs.size() != l.coeffs.size()) return std::nullopt;
  std::optional<Rational> mu;
  for (std::size_t i = 0; i < k.coeffs.size(); ++i) {
    if (k.coeffs[i].first != l.coeffs[i].first) return std::nullopt;
    const Rational r = -k.coeffs[i].second / l.coeffs[i].second;
    if (r <= 0 || (mu && *mu != r)) return std::nullopt;
    mu = r;
  }
  return mu;
}

std::string format_linear(const ExponentCondition& c) {
  std::string out;
  auto append = [&](const Rational& coeff, const std::string& name) {
    if (coeff == 0) return;
    const Rational mag = abs(coeff);
    if (out.empty()) out += coeff < 0 ? "-" : "";
    else out += coeff < 0 ? " - " : " + ";
    if (name.empty()) out += to_string(mag);
    else out += (mag == 1 ? "" : to_string(mag) + "*") + name;
  };
  for (const auto& [sym, co] : c.coeffs) append(co, sym);
  append(c.constant, "");
  append(-c.pol_slope, "d");
  return out.empty() ? "0" : out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::Quadrant: return "Quadrant";
    case DomainKind::BetweenCurves: return "BetweenCurves";
    case DomainKind::HalfPlane: return "HalfPlane";
    case DomainKind::BoundedRegion: return "BoundedRegion";
  }
  return "?";
}

DomainKind domain_kind_from_string(const std::string& tag) {
  for (auto k : {DomainKind::Quadrant, DomainKind::BetweenCurves, DomainKind::HalfPlane, DomainKind::BoundedRegion})
    if (to_string(k) == tag) return k;
  throw std::invalid_argument("unknown domain kind '" + tag + "'");
}

std::string to_string(NormVerdict v) {
  switch (v) {
    case NormVerdict::Normalizable: return "Normalizable";
    case NormVerdict::Divergent: return "Divergent";
    case NormVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string to_string(ExponentCondition::Status s) {
  using S = ExponentCondition::Status;
  switch (s) {
    case S::Pass: return "pass";
    case S::Fail: return "fail";
    case S::ExpDecay: return "exp-decay";
    case S::ExpGrowth: return "exp-growth";
    case S::Degenerate: return "degenerate";
  }
  return "?";
}

std::string to_string(Trend t) {
  switch (t) {
    case Trend::Converging: return "converging";
    case Trend::Diverging: return "diverging";
    case Trend::Inconclusive: return "inconclusive";
    case Trend::NumericFailure: return "numeric-failure";
  }
  return "?";
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::HermitianQES: return "HermitianQES";
    case Outcome::PseudoHermitianCandidate: return "PseudoHermitianCandidate";
    case Outcome::NotQES: return "NotQES";
    case Outcome::ExactlySolvableBoundedRegion: return "ExactlySolvableBoundedRegion";
    case Outcome::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string ExponentCondition::requirement() const {
  using S = Status;
  if (status == S::ExpDecay) return "exponential decay";
  if (status == S::ExpGrowth) return "exponential growth";
  if (status == S::Degenerate) return "leading part vanishes inside the chart";
  if (coeffs.size() == 1) {
    const auto& [sym, c] = coeffs.front();
    std::string out = "needs " + sym + (c > 0 ? " > " : " < ") + to_string(Rational(-constant / c));
    const Rational slope = pol_slope / c;
    if (slope != 0) {
      out += slope > 0 ? " + " : " - ";
      out += (abs(slope) == 1 ? "" : to_string(Rational(abs(slope))) + "*") + "d";
    }
    return out;
  }
  return "needs " + format_linear(*this) + " > 0";
}

const BoundaryCurve* DomainSpec::lower() const {
  for (const auto& c : curves)
    if (c.side == Side::Above) return &c;
  return nullptr;
}

const BoundaryCurve* DomainSpec::upper() const {
  for (const auto& c : curves)
    if (c.side == Side::Below) return &c;
  return nullptr;
}

bool DomainSpec::bounded() const { return y_min && y_max && lower() && upper(); }

Point interior_point(const DomainSpec& d) {
  Rational y0;
  if (d.y_min && d.y_max) y0 = (*d.y_min + *d.y_max) / 2;
  else if (d.y_min) y0 = *d.y_min + 1;
  else if (d.y_max) y0 = *d.y_max - 1;
  else y0 = ratio(1, 3);
  const Point at{{Var::y, y0}};
  Rational x0;
  const auto* lo = d.lower();
  const auto* hi = d.upper();
  if (lo && hi) x0 = (eval(lo->xi, at) + eval(hi->xi, at)) / 2;
  else if (lo) x0 = eval(lo->xi, at) + 1;
  else if (hi) x0 = eval(hi->xi, at) - 1;
  else x0 = eval(split_curve(d, nullptr), at) + ratio(1, 3);
  return {{Var::x, x0}, {Var::y, y0}};
}

void validate_domain(const DomainSpec& d, const MultiPoly& det) {
  auto fail = [&](const std::string& why) { throw InvalidDomain("domain " + d.label + ": " + why); };
  if (d.curves.size() > 2) fail("at most two boundary curves");
  if (d.curves.size() == 2 && (!d.lower() || !d.upper())) fail("two curves must bound x from opposite sides");
  for (const auto& c : d.curves)
    if (!depends_only_on_y(c.xi)) fail("boundary curve " + to_string(c.xi) + " must depend on y only");
  if (d.y_min && d.y_max && *d.y_min >= *d.y_max) fail("empty y-range");
  if (d.x_split && !depends_only_on_y(*d.x_split)) fail("x_split must depend on y only");

  const std::size_t y_bounds = (d.y_min ? 1 : 0) + (d.y_max ? 1 : 0);
  const std::size_t sides = d.curves.size() + y_bounds;
  switch (d.kind) {
    case DomainKind::BoundedRegion:
      if (!d.bounded()) fail("BoundedRegion needs two curves and a finite y-range");
      break;
    case DomainKind::BetweenCurves:
      if (d.curves.size() != 2 || y_bounds == 2) fail("BetweenCurves needs two curves and an unbounded y-range");
      break;
    case DomainKind::HalfPlane:
      if (sides != 1) fail("HalfPlane needs exactly one bounding curve or line");
      break;
    case DomainKind::Quadrant:
      if (sides != 2 || d.bounded()) fail("Quadrant needs exactly two bounding curves or lines");
      break;
  }

  if (d.lower() && d.upper()) {
    const MultiPoly width = d.upper()->xi - d.lower()->xi;
    if (roots_in_open(to_uni(width, Var::y), d.y_min, d.y_max) > 0) fail("boundary curves cross inside the y-range");
  }
  const Point inside = interior_point(d);
  if (d.lower() && d.upper() && eval(d.upper()->xi - d.lower()->xi, inside) <= 0) fail("upper curve lies below lower curve");
  if (eval(det, inside) <= 0) fail("metric determinant is not positive at the interior point");
  for (const auto& b : boundaries_of(d))
    if (b.order(det) == 0) fail("boundary " + b.name + " is not a zero set of the metric determinant");
}

std::vector<BoundaryCheck> hermiticity_check(const Prefactor& pre, const DomainSpec& domain) {
  std::vector<BoundaryCheck> out;
  for (const auto& b : boundaries_of(domain)) {
    const unsigned det_order = b.order(pre.det);
    if (det_order == 0 || det_order == kInfiniteOrder)
      throw UnmatchedBoundary("boundary " + b.name + " is not a zero set of the metric determinant");
    BoundaryCheck check;
    check.boundary = b.name;
    for (const auto& t : pre.powers) {
      const unsigned k = b.order(t.base);
      if (k == 0) continue;
      check.matched = true;
      check.explicit_exponent += t.exponent * k;
    }
    check.effective_exponent = check.explicit_exponent + pre.det_power * det_order;
    check.pass = check.explicit_exponent > ratio(1, 2);
    out.push_back(std::move(check));
  }
  return out;
}

NormReport normalizability(const Prefactor& pre, const DomainSpec& domain, unsigned pol_degree) {
  NormReport report;
  report.pol_degree = pol_degree;
  std::map<std::string, Rational> values;
  for (const auto& t : pre.powers) values[t.symbol] = t.exponent;

  std::vector<ExponentCondition> all;
  std::set<std::string> seen_boundary;
  for (const Chart& chart : charts_of(domain, split_curve(domain, &pre))) {
    const auto factors = chart_factors(pre, chart);
    const MultiPoly exponent = chart_exponent(pre, chart);
    for (const Dir& w : directions(chart, factors, exponent)) {
      ExponentCondition c = evaluate(w, chart, factors, exponent, values, pol_degree);
      all.push_back(c);
      if (c.where.rfind("boundary ", 0) == 0) {
        if (seen_boundary.insert(c.where + "|" + c.requirement() + "|" + to_string(c.status)).second)
          report.boundary_conditions.push_back(std::move(c));
      } else {
        report.asymptotic_conditions.push_back(std::move(c));
      }
    }
  }

  using S = ExponentCondition::Status;
  auto any = [&](auto pred) { return std::any_of(all.begin(), all.end(), pred); };
  if (any([](const auto& c) { return c.status == S::Fail || c.status == S::ExpGrowth; }))
    report.verdict = NormVerdict::Divergent;
  else if (any([](const auto& c) { return c.status == S::Degenerate; }))
    report.verdict = NormVerdict::Inconclusive;
  else
    report.verdict = NormVerdict::Normalizable;

  // Degree bound, from the requirements at Pol degree 0.
  auto value0 = [&](const ExponentCondition& c) -> Rational { return c.value + c.pol_slope * pol_degree; };
  const bool ok0 = !any([&](const auto& c) {
    return c.status == S::ExpGrowth || c.status == S::Degenerate || (power_counted(c) && value0(c) <= 0);
  });
  if (ok0) {
    std::optional<Rational> best;
    for (const auto& c : all) {
      if (!power_counted(c) || c.pol_slope == 0) continue;
      // largest integer d with value0 - slope * d > 0
      const Rational q = value0(c) / c.pol_slope;
      BigInt fl;
      mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
      const Rational dmax = (Rational(fl) == q) ? Rational(fl - 1) : Rational(fl);
      if (!best || dmax < *best) best = dmax;
    }
    if (best) report.max_pol_degree = static_cast<unsigned>(best->get_num().get_ui());
    else report.pol_degree_unbounded = true;
  }

  // Two power-counted requirements whose coefficients are negatively
  // proportional and whose constants cannot be beaten.
  std::vector<const ExponentCondition*> pool;
  for (const auto& c : report.boundary_conditions)
    if (power_counted(c)) pool.push_back(&c);
  for (const auto& c : report.asymptotic_conditions)
    if (power_counted(c)) pool.push_back(&c);
  for (std::size_t i = 0; i < pool.size() && !report.witness; ++i)
    for (std::size_t j = i + 1; j < pool.size() && !report.witness; ++j) {
      const auto& k = *pool[i];
      const auto& l = *pool[j];
      const auto mu = negative_ratio(k, l);
      if (!mu || k.constant + *mu * l.constant > 0) continue;
      InfeasibilityWitness wit{k, l, ""};
      wit.text = k.where + " " + k.requirement() + "; " + l.where + " " + l.requirement() +
                 "; no exponent values satisfy both";
      report.witness = std::move(wit);
    }
  return report;
}

// ---------------------------------------------------------------------------
// Quadrature

namespace {

constexpr double kLogOverflow = 700.0;

struct CompiledFactor {
  CompiledPoly poly;
  double sigma;
};

struct QuadChart {
  std::vector<CompiledFactor> factors;
  CompiledPoly exponent;
  bool has_exponent = false;
  CompiledPoly X, Y;
  bool has_arctan = false;
  double arctan_coeff = 0.0;
  CompiledPoly arctan_num, arctan_den;
  CompiledPoly pol;
  double s_max = std::numeric_limits<double>::infinity();
  double t_max = std::numeric_limits<double>::infinity();

  /// log of |psi|^2 sqrt(g) times the chart Jacobian.
  double log_weight(double s, double t) const {
    double acc = 0.0;
    for (const auto& f : factors) {
      const double v = f.poly(s, t);
      if (v == 0.0) return -std::numeric_limits<double>::infinity();
      acc += f.sigma * std::log(std::fabs(v));
    }
    if (has_exponent) acc += exponent(s, t);
    const double x = X(s, t);
    const double y = Y(s, t);
    if (has_arctan) acc += arctan_coeff * std::atan2(arctan_num(x, y), arctan_den(x, y));
    const double p = pol(x, y);
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    return acc + 2.0 * std::log(std::fabs(p));
  }
};

std::vector<QuadChart> quad_charts(const Prefactor& pre, const DomainSpec& domain, const MultiPoly& pol) {
  std::vector<QuadChart> out;
  for (const Chart& chart : charts_of(domain, split_curve(domain, &pre))) {
    QuadChart q;
    for (const auto& f : chart_factors(pre, chart))
      if (f.sigma != 0) q.factors.push_back({CompiledPoly(f.poly), to_double(f.sigma)});
    const MultiPoly e = chart_exponent(pre, chart);
    q.has_exponent = !e.is_zero();
    q.exponent = CompiledPoly(e);
    q.X = CompiledPoly(chart.X);
    q.Y = CompiledPoly(chart.Y);
    if (pre.arctan && pre.arctan->gamma != 0) {
      q.has_arctan = true;
      q.arctan_coeff = 2.0 * to_double(pre.arctan->gamma);
      q.arctan_num = CompiledPoly(pre.arctan->num);
      q.arctan_den = CompiledPoly(pre.arctan->den);
    }
    q.pol = CompiledPoly(pol);
    if (chart.s_max) q.s_max = to_double(*chart.s_max);
    if (chart.t_max) q.t_max = to_double(*chart.t_max);
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<double> geometric_edges(double lo, double hi) {
  std::vector<double> e{lo};
  while (e.back() < hi) e.push_back(std::min(2.0 * e.back(), hi));
  return e;
}

struct Task {
  std::size_t chart;
  double t0, t1;
  double s_lo, s_hi;
};

struct TaskResult {
  double value = 0.0;
  bool overflow = false;
};

struct Overflow {};

constexpr unsigned kMaxDepth = 12;

TaskResult run_task(const QuadChart& c, const Task& task, const QuadratureOptions& opts) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  TaskResult res;
  const auto s_edges = geometric_edges(task.s_lo, task.s_hi);
  auto inner = [&](double t) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < s_edges.size(); ++i) {
      sum += GK::integrate(
          [&](double s) {
            const double lw = c.log_weight(s, t);
            if (lw > kLogOverflow) throw Overflow{};
            return std::exp(lw);
          },
          s_edges[i], s_edges[i + 1], opts.refine_depth, opts.rel_tol);
    }
    return sum;
  };
  try {
    res.value = GK::integrate(inner, task.t0, task.t1, opts.refine_depth, opts.rel_tol);
  } catch (const Overflow&) {
    res.overflow = true;
  }
  return res;
}

std::vector<Task> tasks_for(const std::vector<QuadChart>& charts, double size, double offset) {
  std::vector<Task> tasks;
  for (std::size_t k = 0; k < charts.size(); ++k) {
    const double s_hi = std::min(charts[k].s_max, size);
    const double t_hi = std::min(charts[k].t_max, size);
    if (s_hi <= offset || t_hi <= offset) continue;
    const auto t_edges = geometric_edges(offset, t_hi);
    for (std::size_t i = 0; i + 1 < t_edges.size(); ++i) tasks.push_back({k, t_edges[i], t_edges[i + 1], offset, s_hi});
  }
  return tasks;
}

Trend judge(QuadratureReport& r) {
  const auto& v = r.values;
  for (std::size_t k = 1; k < v.size(); ++k) r.ratios.push_back(v[k] / v[k - 1]);
  for (std::size_t k = 2; k < v.size(); ++k) {
    const double prev = v[k - 1] - v[k - 2];
    const double cur = v[k] - v[k - 1];
    r.increment_ratios.push_back(prev == 0.0 ? (cur == 0.0 ? 0.0 : std::numeric_limits<double>::infinity())
                                             : cur / prev);
  }
  if (v.size() < 2 || v.back() <= 0.0) return Trend::Inconclusive;

  const auto& q = r.increment_ratios;
  const bool grow2 = std::all_of(r.ratios.begin(), r.ratios.end(), [](double x) { return x >= 2.0; });
  const bool flat_increments = q.size() >= 2 && q[q.size() - 1] >= 0.99 && q[q.size() - 2] >= 0.99;
  if (grow2 || flat_increments) return Trend::Diverging;

  if (r.ratios.back() <= 1.0 + 1e-3) return Trend::Converging;
  if (q.size() >= 2 && q[q.size() - 1] >= 0.0 && q[q.size() - 1] < 0.9 && q[q.size() - 2] >= 0.0 &&
      q[q.size() - 2] < 0.9)
    return Trend::Converging;
  return Trend::Inconclusive;
}

template <class Runner>
QuadratureReport quadrature_impl(const Prefactor& pre, const DomainSpec& domain, const MultiPoly& pol,
                                 const QuadratureOptions& opts, Runner run_all) {
  QuadratureReport report;
  const auto charts = quad_charts(pre, domain, pol);
  for (unsigned level = 0; level < opts.levels; ++level) {
    const double size = opts.size * std::ldexp(1.0, static_cast<int>(level));
    const double offset = opts.offset * std::ldexp(1.0, -static_cast<int>(level));
    const auto tasks = tasks_for(charts, size, offset);
    std::vector<TaskResult> results(tasks.size());
    run_all(charts, tasks, results, opts);
    double total = 0.0;
    bool overflow = false;
    for (const auto& r : results) {
      total += r.value;
      overflow = overflow || r.overflow;
    }
    if (overflow || !std::isfinite(total)) {
      report.failure = (overflow ? "integrand overflows (log weight > 700) at level " : "non-finite integral at level ") +
                       std::to_string(level);
      // Finite levels that already doubled each time and then left the double
      // range are read as divergence; anything less is a numeric failure.
      report.trend = judge(report) == Trend::Diverging && report.values.size() >= 2 &&
                             std::all_of(report.ratios.begin(), report.ratios.end(), [](double x) { return x >= 2.0; })
                         ? Trend::Diverging
                         : Trend::NumericFailure;
      return report;
    }
    report.sizes.push_back(size);
    report.offsets.push_back(offset);
    report.values.push_back(total);
  }
  report.trend = judge(report);
  return report;
}

}  // namespace

QuadratureReport quadrature_crosscheck(const Prefactor& pre, const DomainSpec& domain, const MultiPoly& pol,
                                       const QuadratureOptions& opts) {
  return quadrature_impl(pre, domain, pol, opts,
                         [](const auto& charts, const auto& tasks, auto& results, const QuadratureOptions& o) {
                           const auto n = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic)
                           for (std::ptrdiff_t i = 0; i < n; ++i) {
                             const auto& t = tasks[static_cast<std::size_t>(i)];
                             results[static_cast<std::size_t>(i)] = run_task(charts[t.chart], t, o);
                           }
                         });
}

QuadratureReport quadrature_crosscheck_serial(const Prefactor& pre, const DomainSpec& domain, const MultiPoly& pol,
                                              const QuadratureOptions& opts) {
  return quadrature_impl(pre, domain, pol, opts,
                         [](const auto& charts, const auto& tasks, auto& results, const QuadratureOptions& o) {
                           for (std::size_t i = 0; i < tasks.size(); ++i)
                             results[i] = run_task(charts[tasks[i].chart], tasks[i], o);
                         });
}

MultiPoly generic_pol(unsigned degree) {
  if (degree == 0) return MultiPoly(1);
  return MultiPoly(1) + X.pow(degree) + Y.pow(degree);
}

Verdict classify(const FamilyInstance& inst, const DomainSpec& domain, unsigned n, const ClassifyOptions& opts) {
  validate(inst);
  const DiffOp h = hamiltonian(inst);
  const InverseMetric g = extract_metric(h);
  validate_domain(domain, det_metric(g));

  Verdict v;
  v.closure = closure_check(gauge_field(h, g));
  v.exponents = exponents_of(inst);
  const Prefactor pre = prefactor_of(inst);
  v.hermiticity = hermiticity_check(pre, domain);
  v.hermitian = std::all_of(v.hermiticity.begin(), v.hermiticity.end(), [](const auto& b) { return b.pass; });

  const MonomialSpace space = space_of(inst, n);
  unsigned degree = 0;
  for (const auto& e : space.basis()) degree = std::max(degree, total_degree(e));
  v.norm = normalizability(pre, domain, degree);
  if (opts.quadrature && v.norm.verdict != NormVerdict::Inconclusive)
    v.quadrature = quadrature_crosscheck(pre, domain, generic_pol(degree), opts.quad);

  const bool normalizable = v.norm.verdict == NormVerdict::Normalizable;
  if (!v.closure) {
    v.outcome = Outcome::NotQES;
    v.reason = "gauge field is not closed";
  } else if (v.norm.verdict == NormVerdict::Inconclusive) {
    v.outcome = Outcome::Inconclusive;
    v.reason = "normalizability undecided";
    for (const auto* list : {&v.norm.boundary_conditions, &v.norm.asymptotic_conditions})
      for (const auto& c : *list)
        if (c.status == ExponentCondition::Status::Degenerate && v.reason == "normalizability undecided")
          v.reason += ": " + c.where + ", " + c.requirement();
  } else if (normalizable && v.hermitian) {
    v.outcome = Outcome::HermitianQES;
    v.reason = "boundary exponents > 1/2, normalizable, closed gauge field";
  } else if (normalizable && domain.bounded()) {
    v.outcome = Outcome::ExactlySolvableBoundedRegion;
    v.reason = "bounded domain, normalizable; hermiticity waived";
  } else if (normalizable) {
    v.outcome = Outcome::PseudoHermitianCandidate;
    v.reason = "normalizable but a boundary exponent is <= 1/2";
    v.spectrum = eigenvalues(matrix_of(h, space), opts.tol);
  } else {
    v.outcome = Outcome::NotQES;
    v.reason = v.norm.witness ? v.norm.witness->text : "a normalizability condition fails";
  }
  return v;
}

}  // namespace qes
