#include "qes/families.hpp"

#include <array>

namespace qes {

namespace {

const MultiPoly X = MultiPoly::var(Var::x);
const MultiPoly Y = MultiPoly::var(Var::y);

MultiPoly c(const Rational& r) { return MultiPoly(r); }

struct VariantName {
  Variant v;
  const char* name;
};

constexpr std::array<VariantName, 7> kNames{{
    {Variant::HexExample, "HexExample"},
    {Variant::P1y_Sol1, "P1y_Sol1"},
    {Variant::P1y_Sol2, "P1y_Sol2"},
    {Variant::P1y_Sol3, "P1y_Sol3"},
    {Variant::P1y_SolC, "P1y_SolC"},
    {Variant::P1const_Sol1, "P1const_Sol1"},
    {Variant::P1const_SolF, "P1const_SolF"},
}};

bool p1_is_y(Variant v) {
  return v == Variant::P1y_Sol1 || v == Variant::P1y_Sol2 || v == Variant::P1y_Sol3 || v == Variant::P1y_SolC;
}

bool uses_xi2_poly(Variant v) {
  return v == Variant::P1y_Sol1 || v == Variant::P1y_SolC || v == Variant::P1const_Sol1 ||
         v == Variant::P1const_SolF;
}

bool has_free_qm(Variant v) { return v == Variant::P1y_SolC || v == Variant::P1const_SolF; }

unsigned k_of(const FamilyInstance& inst) {
  const Rational k = 1 / inst.P2;
  return static_cast<unsigned>(k.get_num().get_ui());
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParams(what + " violated");
}

void require_y_poly(const MultiPoly& p, unsigned m, const std::string& name) {
  require(p.degree(Var::x) == 0 && p.degree(Var::z) == 0, name + " must be a polynomial in y only:");
  require(p.degree(Var::y) <= m, "deg " + name + " <= m (" + std::to_string(m) + ")");
}

// Denominators of the two solution-coefficient recipes.
Rational den_p1y(const FamilyInstance& i) { return 1 - (2 * i.p0 - i.q0 - 1) * i.P2 - i.Q1; }
Rational den_p1const(const FamilyInstance& i) { return 1 - (2 * i.p0 - i.q0 + i.Q1) * i.P2; }

const MultiPoly& selected_root(const FamilyInstance& inst) { return inst.xi_index == 1 ? inst.xi1 : inst.xi2; }

/// Second root as a polynomial (real-root variants only).
MultiPoly second_root(const FamilyInstance& inst) {
  if (inst.variant == Variant::P1y_Sol2) return inst.xi1 + c(inst.xi2_scalar) * Y.pow(k_of(inst));
  return inst.xi2;
}

struct RootData {
  MultiPoly sum;
  MultiPoly prod;
};

RootData roots_of(const FamilyInstance& inst) {
  if (inst.variant == Variant::P1y_Sol3) {
    const MultiPoly im = c(inst.xi2_scalar) * Y.pow(k_of(inst));
    return {c(2) * inst.xi1, inst.xi1 * inst.xi1 + im * im};
  }
  const MultiPoly xi2 = second_root(inst);
  return {inst.xi1 + xi2, inst.xi1 * xi2};
}

/// The solution polynomial q_m(y) divided by the recipe denominator. For the
/// variants whose denominator vanishes identically the free polynomial is
/// this quotient itself.
MultiPoly reduced_qm(const FamilyInstance& inst) {
  const Rational inv_p2 = 1 / inst.P2;
  switch (inst.variant) {
    case Variant::P1y_Sol1: {
      const MultiPoly qm = c((1 - inst.Q1) * inv_p2 - 2 * inst.p0 + inst.q0 + 1) * selected_root(inst);
      return qm * c(1 / den_p1y(inst));
    }
    case Variant::P1y_Sol2: {
      const MultiPoly qm = c((1 - inst.Q1) * inv_p2 - 2 * inst.p0 + inst.q0 + 1) * inst.xi1 +
                           c(inst.qm_scalar) * Y.pow(k_of(inst));
      return qm * c(1 / den_p1y(inst));
    }
    case Variant::P1y_Sol3: {
      const Rational k = k_of(inst);
      const MultiPoly qm = c(inst.qm_scalar * inst.xi2_scalar) * Y.pow(k_of(inst)) -
                           c(inst.Q1 * k - k + 2 * inst.p0 - inst.q0 - 1) * inst.xi1;
      return qm * c(1 / den_p1y(inst));
    }
    case Variant::P1const_Sol1: {
      const MultiPoly qm = c(inv_p2 - 2 * inst.p0 + inst.q0 - inst.Q1) * selected_root(inst);
      return qm * c(1 / den_p1const(inst));
    }
    case Variant::P1y_SolC:
    case Variant::P1const_SolF: return inst.qm;
    case Variant::HexExample: break;
  }
  throw std::logic_error("reduced_qm: not a two-variable family");
}

}  // namespace

std::string to_string(Variant v) {
  for (const auto& n : kNames)
    if (n.v == v) return n.name;
  return "?";
}

Variant variant_from_string(const std::string& tag) {
  for (const auto& n : kNames)
    if (tag == n.name) return n.v;
  throw std::invalid_argument("unknown variant '" + tag + "'");
}

const std::vector<Variant>& h2_variants() {
  static const std::vector<Variant> all{Variant::P1y_Sol1,     Variant::P1y_Sol2,    Variant::P1y_Sol3,
                                        Variant::P1y_SolC,     Variant::P1const_Sol1, Variant::P1const_SolF};
  return all;
}

void validate(const FamilyInstance& inst) {
  if (inst.variant == Variant::HexExample) {
    require(inst.j >= 0 && is_integer(2 * inst.j), "2j a non-negative integer");
    require(inst.jt >= 0 && is_integer(2 * inst.jt), "2jt a non-negative integer");
    return;
  }
  const Variant v = inst.variant;
  require(inst.m >= 1, "m >= 1");
  require(inst.P2 != 0, "P2 != 0");
  require(inst.p0 * inst.P2 != 1, "p0*P2 != 1");
  require_y_poly(inst.xi1, inst.m, "xi1");
  if (uses_xi2_poly(v)) require_y_poly(inst.xi2, inst.m, "xi2");
  if (has_free_qm(v)) require_y_poly(inst.qm, inst.m, "qm");
  if (inst.qm_coefficient_override) {
    const auto& o = *inst.qm_coefficient_override;
    require(o.degree(Var::x) == 0 && o.degree(Var::z) == 0, "Q_m override must be a polynomial in y only:");
  }
  if (v == Variant::P1y_Sol1 || v == Variant::P1const_Sol1)
    require(inst.xi_index == 1 || inst.xi_index == 2, "xi_index in {1, 2}");
  if (v == Variant::P1y_Sol2 || v == Variant::P1y_Sol3) {
    const Rational k = 1 / inst.P2;
    require(is_integer(k) && k > 0, "k = 1/P2 a positive integer");
    require(k <= inst.m, "k = 1/P2 <= m");
    if (inst.k != 0) require(Rational(inst.k) == k, "k == 1/P2");
    require(inst.xi2_scalar != 0, "xi2_scalar != 0");
  }
  if (v == Variant::P1y_Sol1 || v == Variant::P1y_Sol2 || v == Variant::P1y_Sol3)
    require(den_p1y(inst) != 0, "1 - (2p0 - q0 - 1)P2 - Q1 != 0");
  if (v == Variant::P1y_SolC) require(inst.Q1 == 1 - inst.P2 * (2 * inst.p0 - inst.q0 - 1), "Q1 == 1 - P2(2p0 - q0 - 1)");
  if (v == Variant::P1const_Sol1 || v == Variant::P1const_SolF) require(inst.P1 != 0, "P1 != 0");
  if (v == Variant::P1const_Sol1) require(den_p1const(inst) != 0, "1 - (2p0 - q0 + Q1)P2 != 0");
  if (v == Variant::P1const_SolF) require(inst.Q1 == 1 / inst.P2 - 2 * inst.p0 + inst.q0, "Q1 == 1/P2 - 2p0 + q0");
}

DiffOp build_hex(const Rational& cc, const Rational& j, const Rational& jt) {
  const MultiPoly one(1);
  DiffOp op;
  op.add_term({2, 0, 0}, X * (one + X));
  op.add_term({0, 2, 0}, Y * (one + Y));
  op.add_term({1, 1, 0}, c(-2) * X * Y);
  op.add_term({1, 0, 0}, (one + X) * (one - c(cc) * X));
  op.add_term({0, 1, 0}, (one + Y) * (one - c(cc) * Y));
  op.add_term({0, 0, 0}, c(2 * cc) * (c(j) * X + c(jt) * Y));
  return op;
}

DiffOp build_H2_unchecked(const FamilyInstance& inst) {
  const Variant v = inst.variant;
  const auto [s, prod] = roots_of(inst);
  const MultiPoly r = reduced_qm(inst);
  const MultiPoly r1 = diff(r, Var::y);
  const MultiPoly r2 = diff(r, Var::y, 2);
  const Rational& p0 = inst.p0;
  const Rational& q0 = inst.q0;
  const Rational& P2 = inst.P2;
  const Rational& Q1 = inst.Q1;

  MultiPoly p1y, q1y, pm, qm_coef;
  if (p1_is_y(v)) {
    p1y = Y;
    q1y = c(Q1) * Y;
    pm = c(2) * (c(P2) * Y * r1 - r) + c((1 - p0 * P2) / P2) * s;
    qm_coef = c(P2 * P2) * Y * Y * r2 + c(Q1 * P2) * Y * r1 - c((2 * p0 - q0 - 2) * P2 + 2 * Q1) * r +
              c(p0 - q0 + Q1 / P2 - 1) * s;
  } else {
    const Rational& P1 = inst.P1;
    p1y = c(P1);
    q1y = c(P1 * P2 * Q1);
    pm = c(2) * (c(P1 * P2) * r1 - r) + c((1 - p0 * P2) / P2) * s;
    qm_coef = c(P1 * P1 * P2 * P2) * r2 + c(P1 * P2 * P2 * Q1) * r1 - c(P2 * (2 * p0 - q0 + 2 * Q1)) * r +
              c(p0 - q0 + Q1) * s;
  }
  if (inst.qm_coefficient_override) qm_coef = *inst.qm_coefficient_override;

  const Rational t = (p0 * P2 - 1) / P2;
  const MultiPoly p2y = c(P2) * p1y * p1y;
  const MultiPoly pm1 = c(ratio(1, 2)) * p1y * (c(P2) * pm + c(p0 * P2 - 1) * s);
  const MultiPoly shifted = pm + c(t) * s;
  const MultiPoly p2m = c(P2 / 4) * shifted * shifted + c(t) * prod;

  DiffOp op;
  op.add_term({2, 0, 0}, c(p0) * X * X + pm * X + p2m);
  op.add_term({1, 1, 0}, c(2) * (p1y * X + pm1));
  op.add_term({0, 2, 0}, p2y);
  op.add_term({1, 0, 0}, c(q0) * X + qm_coef);
  op.add_term({0, 1, 0}, q1y);
  return op;
}

DiffOp build_H2(const FamilyInstance& inst) {
  if (inst.variant == Variant::HexExample) throw InvalidParams("build_H2: HexExample is not a two-variable family");
  validate(inst);
  return build_H2_unchecked(inst);
}

DiffOp build_display(const FamilyInstance& inst) {
  if (inst.variant == Variant::HexExample) {
    validate(inst);
    return build_hex(inst.c, inst.j, inst.jt);
  }
  return build_H2(inst);
}

DiffOp hamiltonian(const FamilyInstance& inst) { return -build_display(inst); }

MultiPoly zero_order_term(const FamilyInstance& inst) { return hamiltonian(inst).coeff({0, 0, 0}); }

MonomialSpace space_of(const FamilyInstance& inst, unsigned n) {
  if (inst.variant == Variant::HexExample) {
    const Rational a = 2 * inst.j, b = 2 * inst.jt;
    return MonomialSpace::box(static_cast<unsigned>(a.get_num().get_ui()), static_cast<unsigned>(b.get_num().get_ui()));
  }
  return MonomialSpace::two_d(inst.m, n);
}

namespace {

Rational divide(const Rational& num, const Rational& den, const std::string& what) {
  if (den == 0) throw DegenerateParams("vanishing denominator: " + what);
  return num / den;
}

}  // namespace

ExponentSet exponents_of(const FamilyInstance& inst) {
  if (inst.variant != Variant::HexExample && inst.p0 * inst.P2 == 1)
    throw DegenerateParams("vanishing denominator: p0*P2 - 1");
  validate(inst);
  const Rational& p0 = inst.p0;
  const Rational& q0 = inst.q0;
  const Rational& P2 = inst.P2;
  const Rational& Q1 = inst.Q1;
  ExponentSet e;
  switch (inst.variant) {
    case Variant::HexExample: e.alpha = -inst.c / 2; break;
    case Variant::P1y_Sol1:
    case Variant::P1y_Sol2: {
      const Rational d = 2 * (p0 * P2 - 1);
      e.alpha = divide(Q1 * p0 + p0 - q0 - 1, d, "2(p0*P2 - 1)") - 1;
      if (inst.variant == Variant::P1y_Sol1) {
        e.beta = divide(q0 * P2 + P2 - Q1 - 1, d, "2(p0*P2 - 1)") - 1;
      } else {
        const Rational& xs = inst.xi2_scalar;
        e.beta = divide((q0 * P2 + P2 - Q1 - 1) * xs - P2 * inst.qm_scalar, d * xs, "2(p0*P2 - 1)*xi2") - 1;
        e.gamma = divide(P2 * inst.qm_scalar, d * xs, "2(p0*P2 - 1)*xi2");
      }
      break;
    }
    case Variant::P1y_Sol3: {
      const Rational k = k_of(inst);
      e.alpha = divide(k * (Q1 * p0 + p0 - q0 - 1), 2 * (p0 - k), "2(p0 - k)") - 1;
      e.beta = divide(Q1 * k + k - q0 - 1, 4 * (k - p0), "4(k - p0)") - ratio(1, 2);
      e.gamma = divide(inst.qm_scalar, 2 * (k - p0), "2(k - p0)");
      break;
    }
    case Variant::P1y_SolC: e.alpha = (q0 - 1) / 2 - p0; break;
    case Variant::P1const_Sol1: {
      const Rational d = 2 * (p0 * P2 - 1);
      e.alpha = divide(P2 * (q0 - Q1) - 1, d, "2(p0*P2 - 1)") - 1;
      e.beta = divide(q0 - p0 * (P2 * Q1 + 1), d * inst.P1, "2*P1*(p0*P2 - 1)");
      break;
    }
    case Variant::P1const_SolF: {
      // prefactor det^{1/4} e^{-beta y}: beta = A_y + (1/4) ∂_y det / det must be constant.
      const DiffOp h = hamiltonian(inst);
      const InverseMetric g = extract_metric(h);
      const MultiPoly det = det_metric(g);
      const GaugeField a = gauge_field(h, g);
      const RatFun b = a.ay + RatFun(diff(det, Var::y), c(4) * det);
      const auto beta = proportionality_constant(b.num(), b.den());
      if (!beta && !b.num().is_zero()) throw DegenerateParams("gauge field does not give a constant exponent");
      e.beta = beta ? *beta : Rational(0);
      break;
    }
  }
  return e;
}

Prefactor prefactor_of(const FamilyInstance& inst) {
  const ExponentSet e = exponents_of(inst);
  Prefactor pre;
  pre.det = det_metric(extract_metric(hamiltonian(inst)));
  switch (inst.variant) {
    case Variant::HexExample: pre.exps.push_back({*e.alpha, X * Y + X + Y}); break;
    case Variant::P1y_Sol1:
      pre.powers.push_back({"|y|", Y, *e.alpha, "alpha"});
      pre.powers.push_back({inst.xi_index == 1 ? "|x - xi1(y)|" : "|x - xi2(y)|", X - selected_root(inst), *e.beta, "beta"});
      break;
    case Variant::P1y_Sol2:
      pre.powers.push_back({"|y|", Y, *e.alpha, "alpha"});
      pre.powers.push_back({"|x - xi1(y)|", X - inst.xi1, *e.beta, "beta"});
      pre.powers.push_back({"|x - xi2(y)|", X - second_root(inst), *e.gamma, "gamma"});
      break;
    case Variant::P1y_Sol3: {
      const MultiPoly im = c(inst.xi2_scalar) * Y.pow(k_of(inst));
      const MultiPoly u = X - inst.xi1;
      pre.powers.push_back({"|y|", Y, *e.alpha, "alpha"});
      pre.powers.push_back({"(x - xi1(y))^2 + xi2^2 y^(2k)", u * u + im * im, *e.beta, "beta"});
      pre.arctan = ArctanTerm{*e.gamma, im, u};
      break;
    }
    case Variant::P1y_SolC: pre.powers.push_back({"|y|", Y, *e.alpha, "alpha"}); break;
    case Variant::P1const_Sol1:
      pre.powers.push_back({inst.xi_index == 1 ? "|x - xi1(y)|" : "|x - xi2(y)|", X - selected_root(inst), *e.alpha, "alpha"});
      pre.exps.push_back({-*e.beta, Y});
      break;
    case Variant::P1const_SolF: pre.exps.push_back({-*e.beta, Y}); break;
  }
  return pre;
}

LogGradient log_grad(const Prefactor& pre) {
  LogGradient g{RatFun(), RatFun()};
  auto add = [&](const RatFun& dx, const RatFun& dy) {
    g.dx += dx;
    g.dy += dy;
  };
  for (const auto& t : pre.powers) {
    if (t.exponent == 0) continue;
    add(RatFun(c(t.exponent) * diff(t.base, Var::x), t.base), RatFun(c(t.exponent) * diff(t.base, Var::y), t.base));
  }
  if (pre.arctan && pre.arctan->gamma != 0) {
    // d atan(u/v) = (v du - u dv) / (u^2 + v^2)
    const auto& a = *pre.arctan;
    const MultiPoly norm = a.num * a.num + a.den * a.den;
    auto part = [&](Var v) {
      return RatFun(c(a.gamma) * (a.den * diff(a.num, v) - a.num * diff(a.den, v)), norm);
    };
    add(part(Var::x), part(Var::y));
  }
  for (const auto& t : pre.exps) add(RatFun(c(t.coeff) * diff(t.poly, Var::x)), RatFun(c(t.coeff) * diff(t.poly, Var::y)));
  if (pre.det_power != 0 && !pre.det.is_zero())
    add(RatFun(c(pre.det_power) * diff(pre.det, Var::x), pre.det),
        RatFun(c(pre.det_power) * diff(pre.det, Var::y), pre.det));
  return g;
}

MultiPoly expected_det(const FamilyInstance& inst) {
  switch (inst.variant) {
    case Variant::HexExample: return X * Y * (MultiPoly(1) + X + Y);
    case Variant::P1y_Sol3: {
      const MultiPoly u = X - inst.xi1;
      const MultiPoly im = c(inst.xi2_scalar) * Y.pow(k_of(inst));
      return Y * Y * (u * u + im * im);
    }
    case Variant::P1y_Sol1:
    case Variant::P1y_Sol2:
    case Variant::P1y_SolC: return Y * Y * (X - inst.xi1) * (X - second_root(inst));
    case Variant::P1const_Sol1:
    case Variant::P1const_SolF: return (X - inst.xi1) * (X - inst.xi2);
  }
  return {};
}

IdentityReport check_identities(const FamilyInstance& inst, unsigned n_max) {
  IdentityReport rep;
  const DiffOp h = hamiltonian(inst);
  rep.invariant = true;
  const unsigned top = inst.variant == Variant::HexExample ? 1 : n_max;
  for (unsigned n = 1; n <= top && rep.invariant; ++n) {
    const auto r = is_invariant(h, space_of(inst, n));
    rep.n_max = r.invariant ? n : n - 1;
    if (!r.invariant) {
      rep.invariant = false;
      rep.witness = r.witness;
    }
  }
  const InverseMetric g = extract_metric(h);
  const GaugeField a = gauge_field(h, g);
  rep.closure = closure_check(a);
  rep.det_constant = proportionality_constant(det_metric(g), expected_det(inst));
  rep.det_proportional = rep.det_constant.has_value() && *rep.det_constant != 0;
  try {
    rep.gauge_factor = gauge_factor_check(a, log_grad(prefactor_of(inst)));
  } catch (const DegenerateParams&) {
    rep.gauge_factor = false;
  }
  return rep;
}

std::vector<IdentityReport> sweep_identities_serial(const std::vector<FamilyInstance>& insts, unsigned n_max) {
  std::vector<IdentityReport> out;
  out.reserve(insts.size());
  for (const auto& inst : insts) out.push_back(check_identities(inst, n_max));
  return out;
}

std::vector<IdentityReport> sweep_identities(const std::vector<FamilyInstance>& insts, unsigned n_max) {
  std::vector<IdentityReport> out(insts.size());
  const auto n = static_cast<long>(insts.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = check_identities(insts[static_cast<std::size_t>(i)], n_max);
  return out;
}

namespace {

Rational draw(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 4);
  return ratio(num(rng), den(rng));
}

Rational draw_nonzero(std::mt19937_64& rng) {
  Rational r;
  do r = draw(rng);
  while (r == 0);
  return r;
}

MultiPoly draw_y_poly(std::mt19937_64& rng, unsigned m) {
  MultiPoly p;
  for (std::uint32_t d = 0; d <= m; ++d) p.add_term({0, d, 0}, draw(rng));
  return p;
}

}  // namespace

FamilyInstance sample_instance(Variant v, unsigned m, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    FamilyInstance inst;
    inst.variant = v;
    inst.m = m;
    if (v == Variant::HexExample) {
      std::uniform_int_distribution<int> half(0, 3);
      inst.c = draw_nonzero(rng);
      inst.j = ratio(half(rng), 2);
      inst.jt = ratio(half(rng), 2);
      return inst;
    }
    inst.p0 = draw(rng);
    inst.q0 = draw(rng);
    inst.P2 = draw_nonzero(rng);
    inst.Q1 = draw(rng);
    inst.xi1 = draw_y_poly(rng, m);
    inst.xi2 = draw_y_poly(rng, m);
    inst.xi_index = std::uniform_int_distribution<unsigned>(1, 2)(rng);
    if (v == Variant::P1y_Sol2 || v == Variant::P1y_Sol3) {
      inst.k = std::uniform_int_distribution<unsigned>(1, m)(rng);
      inst.P2 = ratio(1, inst.k);
      inst.xi2_scalar = draw_nonzero(rng);
      inst.qm_scalar = draw(rng);
      inst.xi2 = MultiPoly();
    }
    if (v == Variant::P1const_Sol1 || v == Variant::P1const_SolF) inst.P1 = draw_nonzero(rng);
    if (has_free_qm(v)) inst.qm = draw_y_poly(rng, m);
    if (v == Variant::P1y_SolC) inst.Q1 = 1 - inst.P2 * (2 * inst.p0 - inst.q0 - 1);
    if (v == Variant::P1const_SolF) inst.Q1 = 1 / inst.P2 - 2 * inst.p0 + inst.q0;
    try {
      validate(inst);
      return inst;
    } catch (const InvalidParams&) {
    }
  }
  throw std::runtime_error("sample_instance: no valid draw");
}

}  // namespace qes
