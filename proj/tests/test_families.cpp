#include "doctest.h"
#include "oracles.hpp"

#include "qes/families.hpp"
#include "qes/family_io.hpp"

#include <string>

using namespace qes;

namespace {
const MultiPoly X = MultiPoly::var(Var::x);
const MultiPoly Y = MultiPoly::var(Var::y);
const MultiPoly One(1);

FamilyInstance sol1(const Rational& p0, const Rational& q0, const Rational& P2, const Rational& Q1,
                    const MultiPoly& xi1, const MultiPoly& xi2, unsigned m = 1) {
  FamilyInstance inst;
  inst.variant = Variant::P1y_Sol1;
  inst.m = m;
  inst.p0 = p0;
  inst.q0 = q0;
  inst.P2 = P2;
  inst.Q1 = Q1;
  inst.xi1 = xi1;
  inst.xi2 = xi2;
  return inst;
}

std::string violation(const FamilyInstance& inst) {
  try {
    validate(inst);
  } catch (const InvalidParams& e) {
    return e.what();
  }
  return {};
}

bool gauge_matches(const FamilyInstance& inst, const Prefactor& pre) {
  const DiffOp h = hamiltonian(inst);
  return gauge_factor_check(gauge_field(h, extract_metric(h)), log_grad(pre));
}

/// Every prefactor exponent moved by `delta`, one at a time.
std::vector<Prefactor> perturbations(const Prefactor& pre, const Rational& delta) {
  std::vector<Prefactor> out;
  for (std::size_t i = 0; i < pre.powers.size(); ++i) {
    Prefactor p = pre;
    p.powers[i].exponent += delta;
    out.push_back(p);
  }
  if (pre.arctan) {
    Prefactor p = pre;
    p.arctan->gamma += delta;
    out.push_back(p);
  }
  for (std::size_t i = 0; i < pre.exps.size(); ++i) {
    Prefactor p = pre;
    p.exps[i].coeff += delta;
    out.push_back(p);
  }
  Prefactor p = pre;
  p.det_power += delta;
  out.push_back(p);
  return out;
}
}  // namespace

TEST_SUITE("families") {

TEST_CASE("variant tags round-trip") {
  for (Variant v : h2_variants()) CHECK(variant_from_string(to_string(v)) == v);
  CHECK(variant_from_string("HexExample") == Variant::HexExample);
  CHECK(h2_variants().size() == 6);
  CHECK_THROWS_AS(variant_from_string("Sol9"), std::invalid_argument);
}

TEST_CASE("hexagon operator: determinant, module, c = 0 shape") {
  const DiffOp d = build_hex(ratio(-1, 3), 1, 1);
  CHECK(det_metric(extract_metric(-d)) == X * Y * (One + X + Y));
  FamilyInstance inst;
  inst.variant = Variant::HexExample;
  inst.c = ratio(-1, 3);
  inst.j = inst.jt = 1;
  const MonomialSpace box = space_of(inst, 1);
  CHECK(box.dim() == 9);
  CHECK(is_invariant(d, box).invariant);
  CHECK_FALSE(is_invariant(d, MonomialSpace::box(3, 2)).invariant);
  CHECK_FALSE(is_invariant(d, MonomialSpace::box(1, 2)).invariant);
  const DiffOp free = build_hex(0, 1, 1);
  CHECK(free.coeff({1, 0, 0}) == One + X);
  CHECK(free.coeff({0, 1, 0}) == One + Y);
  CHECK(free.coeff({0, 0, 0}).is_zero());
  CHECK(zero_order_term(inst) == MultiPoly(ratio(2, 3)) * (X + Y));
  inst.j = ratio(-1, 2);
  CHECK(violation(inst).find("2j") != std::string::npos);
  inst.j = ratio(1, 3);
  CHECK(violation(inst).find("2j") != std::string::npos);
}

TEST_CASE("validate names the violated constraint") {
  const FamilyInstance base = sol1(0, -1, 2, 0, Y, One - Y);
  CHECK(violation(base).empty());
  auto with = [&](auto edit) {
    FamilyInstance i = base;
    edit(i);
    return violation(i);
  };
  CHECK(with([](auto& i) { i.P2 = 0; }).find("P2 != 0") != std::string::npos);
  CHECK(with([](auto& i) { i.p0 = ratio(1, 2); }).find("p0*P2 != 1") != std::string::npos);
  CHECK(with([](auto& i) { i.xi1 = Y * Y; }).find("deg xi1 <= m") != std::string::npos);
  CHECK(with([](auto& i) { i.xi2 = X; }).find("xi2") != std::string::npos);
  CHECK(with([](auto& i) { i.m = 0; }).find("m >= 1") != std::string::npos);
  CHECK(with([](auto& i) { i.xi_index = 3; }).find("xi_index") != std::string::npos);
  CHECK(with([](auto& i) { i.Q1 = 1 - (2 * i.p0 - i.q0 - 1) * i.P2; }).find("1 - (2p0 - q0 - 1)P2 - Q1") !=
        std::string::npos);
  CHECK_THROWS_AS(build_H2(sol1(2, 1, ratio(1, 2), 1, MultiPoly(), Y)), InvalidParams);

  FamilyInstance s2;
  s2.variant = Variant::P1y_Sol2;
  s2.m = 2;
  s2.p0 = 5;
  s2.q0 = 1;
  s2.P2 = ratio(1, 2);
  s2.Q1 = 2;
  s2.xi2_scalar = 1;
  CHECK(violation(s2).empty());
  s2.P2 = ratio(2, 3);
  CHECK(violation(s2).find("positive integer") != std::string::npos);
  s2.P2 = ratio(1, 3);
  CHECK(violation(s2).find("k = 1/P2 <= m") != std::string::npos);
  s2.P2 = ratio(1, 2);
  s2.xi2_scalar = 0;
  CHECK(violation(s2).find("xi2_scalar != 0") != std::string::npos);
  s2.xi2_scalar = 1;
  s2.k = 1;
  CHECK(violation(s2).find("k == 1/P2") != std::string::npos);

  FamilyInstance sc = s2;
  sc.variant = Variant::P1y_SolC;
  sc.k = 0;
  CHECK(violation(sc).find("Q1 == 1 - P2(2p0 - q0 - 1)") != std::string::npos);
  FamilyInstance sf = sc;
  sf.variant = Variant::P1const_SolF;
  sf.P1 = 1;
  CHECK(violation(sf).find("Q1 == 1/P2 - 2p0 + q0") != std::string::npos);
  sf.Q1 = 1 / sf.P2 - 2 * sf.p0 + sf.q0;
  sf.P1 = 0;
  CHECK(violation(sf).find("P1 != 0") != std::string::npos);
}

TEST_CASE("the degenerate sample point p0*P2 = 1 has an identically vanishing determinant") {
  // m = 1, xi1 = 0, xi2 = y, p0 = 2, P2 = 1/2: p0*P2 = 1 makes the metric rank one.
  const FamilyInstance bad = sol1(2, 1, ratio(1, 2), 1, MultiPoly(), Y);
  CHECK(det_metric(extract_metric(-build_H2_unchecked(bad))).is_zero());
  CHECK_THROWS_AS(exponents_of(bad), DegenerateParams);
  // Moving p0 off the degenerate value gives the displayed factorization.
  const FamilyInstance good = sol1(3, 1, ratio(1, 2), 1, MultiPoly(), Y);
  const auto k = proportionality_constant(det_metric(extract_metric(hamiltonian(good))), Y * Y * X * (X - Y));
  REQUIRE(k.has_value());
  CHECK(*k == ratio(1, 2));
}

TEST_CASE("exponent formulas at a hand-evaluated point") {
  const FamilyInstance inst = sol1(0, -1, 2, 0, Y, One - Y);
  const ExponentSet e = exponents_of(inst);
  CHECK(*e.alpha == -1);
  CHECK(*e.beta == ratio(-1, 2));
  CHECK_FALSE(e.gamma.has_value());
  CHECK(gauge_matches(inst, prefactor_of(inst)));
}

TEST_CASE("every scalar perturbation moves some exponent") {
  std::mt19937_64 rng(5);
  const Rational d = ratio(1, 1000);
  for (Variant v : {Variant::P1y_Sol1, Variant::P1y_Sol2, Variant::P1y_Sol3, Variant::P1const_Sol1}) {
    const FamilyInstance inst = sample_instance(v, 2, rng);
    const ExponentSet e = exponents_of(inst);
    std::vector<Rational FamilyInstance::*> fields{&FamilyInstance::p0, &FamilyInstance::q0, &FamilyInstance::Q1};
    if (v == Variant::P1y_Sol2 || v == Variant::P1y_Sol3) fields.push_back(&FamilyInstance::qm_scalar);
    if (v == Variant::P1const_Sol1) fields.push_back(&FamilyInstance::P1);
    for (auto field : fields) {
      FamilyInstance moved = inst;
      moved.*field += d;
      ExponentSet f;
      try {
        f = exponents_of(moved);
      } catch (const std::invalid_argument&) {
        continue;
      }
      const bool changed = f.alpha != e.alpha || f.beta != e.beta || f.gamma != e.gamma;
      CHECK_MESSAGE(changed, to_string(v));
    }
  }
  FamilyInstance c = sample_instance(Variant::P1y_SolC, 1, rng);
  const Rational before = *exponents_of(c).alpha;
  c.q0 += d;
  c.Q1 = 1 - c.P2 * (2 * c.p0 - c.q0 - 1);
  CHECK(*exponents_of(c).alpha != before);
}

TEST_CASE("degenerate exponent denominators") {
  FamilyInstance s3;
  s3.variant = Variant::P1y_Sol3;
  s3.m = 1;
  s3.P2 = 1;
  s3.p0 = 1;
  s3.q0 = 0;
  s3.Q1 = 3;
  s3.xi2_scalar = 1;
  CHECK_THROWS_AS(exponents_of(s3), DegenerateParams);
  s3.p0 = 2;
  s3.qm_scalar = 0;
  CHECK(*exponents_of(s3).gamma == 0);
  s3.qm_scalar = 3;
  CHECK(*exponents_of(s3).gamma == ratio(3, -2));
}

TEST_CASE("Sol2 with vanishing gamma is the Sol1 operator with the shifted second root") {
  std::mt19937_64 rng(77);
  for (int draw = 0; draw < 10; ++draw) {
    FamilyInstance s2 = sample_instance(Variant::P1y_Sol2, 1 + draw % 3, rng);
    s2.qm_scalar = 0;
    const ExponentSet e2 = exponents_of(s2);
    CHECK(*e2.gamma == 0);
    FamilyInstance s1 = s2;
    s1.variant = Variant::P1y_Sol1;
    s1.xi_index = 1;
    s1.xi2 = s2.xi1 + MultiPoly(s2.xi2_scalar) * Y.pow(static_cast<unsigned>(Rational(1 / s2.P2).get_num().get_ui()));
    const ExponentSet e1 = exponents_of(s1);
    CHECK(*e2.beta == *e1.beta);
    CHECK(*e2.alpha == *e1.alpha);
    CHECK(build_H2(s1) == build_H2(s2));
  }
}

TEST_CASE("prefactor term structure") {
  std::mt19937_64 rng(8);
  const Prefactor p1 = prefactor_of(sample_instance(Variant::P1y_Sol1, 1, rng));
  CHECK(p1.powers.size() == 2);
  CHECK(p1.powers[0].label == "|y|");
  CHECK(p1.det_power == ratio(1, 4));
  CHECK(p1.exps.empty());
  CHECK_FALSE(p1.arctan.has_value());
  const Prefactor p21 = prefactor_of(sample_instance(Variant::P1const_Sol1, 1, rng));
  REQUIRE(p21.exps.size() == 1);
  CHECK(p21.exps[0].poly == Y);
  const Prefactor p3 = prefactor_of(sample_instance(Variant::P1y_Sol3, 2, rng));
  CHECK(p3.arctan.has_value());
  CHECK(p3.powers.size() == 2);
  const Prefactor p2 = prefactor_of(sample_instance(Variant::P1y_Sol2, 2, rng));
  CHECK(p2.powers.size() == 3);
}

TEST_CASE("identity suite: 24 random instances per variant") {
  std::mt19937_64 rng(20240611);
  for (Variant v : h2_variants()) {
    std::vector<FamilyInstance> insts;
    for (unsigned i = 0; i < 24; ++i) insts.push_back(sample_instance(v, 1 + i % 3, rng));
    const auto reports = sweep_identities(insts, 4);
    for (std::size_t i = 0; i < insts.size(); ++i) {
      INFO(to_string(v) << " draw " << i << ": " << to_json(insts[i]).dump());
      CHECK(reports[i].invariant);
      CHECK(reports[i].n_max == 4);
      CHECK(reports[i].closure);
      CHECK(reports[i].det_proportional);
      CHECK(reports[i].gauge_factor);
    }
  }
}

TEST_CASE("hexagon instances pass the identity checks") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10; ++i) {
    const auto rep = check_identities(sample_instance(Variant::HexExample, 1, rng), 4);
    CHECK(rep.all_pass());
  }
}

TEST_CASE("perturbing any prefactor exponent by 1/1000 breaks the gauge factor") {
  std::mt19937_64 rng(31);
  for (Variant v : h2_variants()) {
    for (int draw = 0; draw < 4; ++draw) {
      const FamilyInstance inst = sample_instance(v, 1 + draw % 2, rng);
      const Prefactor pre = prefactor_of(inst);
      REQUIRE(gauge_matches(inst, pre));
      for (const Prefactor& p : perturbations(pre, ratio(1, 1000))) CHECK_FALSE(gauge_matches(inst, p));
    }
  }
}

TEST_CASE("SolC constraint violations break closure") {
  std::mt19937_64 rng(12);
  int broken = 0;
  for (int draw = 0; draw < 8; ++draw) {
    FamilyInstance inst = sample_instance(Variant::P1y_SolC, 1 + draw % 3, rng);
    inst.qm = inst.qm + MultiPoly(1) + Y;  // keep the free polynomial away from zero
    const DiffOp ok = -build_H2(inst);
    CHECK(closure_check(gauge_field(ok, extract_metric(ok))));
    inst.Q1 += oracle::nonzero_rational(rng);
    CHECK_THROWS_AS(validate(inst), InvalidParams);
    const DiffOp h = -build_H2_unchecked(inst);
    const bool closes = closure_check(gauge_field(h, extract_metric(h)));
    CHECK_FALSE(closes);
    broken += closes ? 0 : 1;
  }
  CHECK(broken >= 5);
}

TEST_CASE("corrupted first-order coefficient breaks closure") {
  std::mt19937_64 rng(13);
  for (Variant v : h2_variants()) {
    FamilyInstance inst = sample_instance(v, 2, rng);
    inst.qm_coefficient_override = build_display(inst).coeff({1, 0, 0}) - MultiPoly(inst.q0) * X + Y * Y + One;
    const auto rep = check_identities(inst, 2);
    CHECK_FALSE(rep.closure);
    CHECK_FALSE(rep.gauge_factor);
  }
}

TEST_CASE("SolF exponent is derived, and agrees with the P1const_Sol1 formula") {
  std::mt19937_64 rng(21);
  for (int draw = 0; draw < 10; ++draw) {
    const FamilyInstance inst = sample_instance(Variant::P1const_SolF, 1 + draw % 3, rng);
    const Rational beta = *exponents_of(inst).beta;
    const Rational printed =
        (inst.q0 - inst.p0 * (inst.P2 * inst.Q1 + 1)) / (2 * inst.P1 * (inst.p0 * inst.P2 - 1));
    CHECK(beta == printed);
  }
}

TEST_CASE("one operator preserves the whole flag") {
  std::mt19937_64 rng(17);
  for (Variant v : h2_variants()) {
    const FamilyInstance inst = sample_instance(v, 2, rng);
    const DiffOp h = hamiltonian(inst);
    CHECK(h == hamiltonian(inst));
    for (unsigned n = 1; n <= 6; ++n) CHECK(is_invariant(h, space_of(inst, n)).invariant);
  }
}

TEST_CASE("expected determinant forms") {
  FamilyInstance s3;
  s3.variant = Variant::P1y_Sol3;
  s3.m = 2;
  s3.P2 = ratio(1, 2);
  s3.p0 = 3;
  s3.q0 = -1;
  s3.Q1 = 1;
  s3.xi1 = Y - One;
  s3.xi2_scalar = 2;
  s3.qm_scalar = ratio(1, 3);
  const MultiPoly u = X - Y + One;
  CHECK(expected_det(s3) == Y * Y * (u * u + MultiPoly(4) * Y.pow(4)));
  CHECK(proportionality_constant(det_metric(extract_metric(hamiltonian(s3))), expected_det(s3)).has_value());
  FamilyInstance c = s3;
  c.variant = Variant::P1const_Sol1;
  c.xi2 = Y;
  CHECK(expected_det(c) == (X - Y + One) * (X - Y));
}

TEST_CASE("parallel and serial sweeps agree") {
  std::mt19937_64 rng(3);
  std::vector<FamilyInstance> insts;
  for (Variant v : h2_variants()) insts.push_back(sample_instance(v, 2, rng));
  const auto a = sweep_identities(insts, 3), b = sweep_identities_serial(insts, 3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].all_pass() == b[i].all_pass());
    CHECK(a[i].det_constant == b[i].det_constant);
  }
}

TEST_CASE("instance JSON round-trip and rejection") {
  std::mt19937_64 rng(2);
  for (Variant v : h2_variants()) {
    const FamilyInstance inst = sample_instance(v, 2, rng);
    const FamilyInstance back = instance_from_json(nlohmann::json::parse(to_json(inst).dump()));
    CHECK(build_H2(back) == build_H2(inst));
    CHECK(to_json(back) == to_json(inst));
  }
  const auto j = nlohmann::json::parse(R"({"variant":"P1y_Sol1","m":1,"p0":"0","q0":-1,"P2":"2","Q1":"0",
                                           "xi1":"y","xi2":"1 - y"})");
  const FamilyInstance inst = instance_from_json(j);
  CHECK(inst.q0 == -1);
  CHECK(inst.xi2 == One - Y);
  auto bad = j;
  bad["colour"] = "red";
  CHECK_THROWS_AS(instance_from_json(bad), ConfigError);
  bad = j;
  bad["p0"] = 0.5;
  CHECK_THROWS_AS(instance_from_json(bad), ConfigError);
  bad = j;
  bad["P2"] = "1/0";
  CHECK_THROWS_AS(instance_from_json(bad), ConfigError);
  bad = j;
  bad["variant"] = "Sol7";
  CHECK_THROWS_AS(instance_from_json(bad), ConfigError);
  bad = j;
  bad["xi1"] = "y +* 2";
  CHECK_THROWS_AS(instance_from_json(bad), ConfigError);
}

TEST_CASE("zero eigenvalue inside a square-free factor of degree 6") {
  // The char poly t^6 + 52/3 t^5 - ... + 475/27 t has no constant term; its
  // root 0 used to fail the relative residual check.
  const FamilyInstance inst = instance_from_json(nlohmann::json::parse(
      R"({"variant":"P1y_Sol3","m":1,"p0":"9","q0":"1/2","P2":"1","Q1":"-5/3","xi1":"y + 4","k":1,)"
      R"("xi2_scalar":"-3","qm_scalar":"0"})"));
  const RatMatrix mat = matrix_of(hamiltonian(inst), space_of(inst, 2));
  REQUIRE(char_poly(mat).coeff(0) == 0);
  const SpectralPattern s = eigenvalues(mat, 1e-9);
  CHECK(s.count() == 6);
  CHECK(s.is_real_or_paired());
  CHECK(std::find(s.rational_eigs.begin(), s.rational_eigs.end(), Rational(0)) != s.rational_eigs.end());
}

}
