#pragma once

#include "qes/geometry.hpp"
#include "qes/subspace.hpp"

#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qes {

enum class Variant {
  HexExample,
  P1y_Sol1,
  P1y_Sol2,
  P1y_Sol3,
  P1y_SolC,
  P1const_Sol1,
  P1const_SolF,
};

std::string to_string(Variant v);
/// Throws std::invalid_argument for an unknown tag.
Variant variant_from_string(const std::string& tag);

/// The six two-variable solution variants (everything except HexExample).
const std::vector<Variant>& h2_variants();

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameters of one Hamiltonian. Which fields matter depends on the variant:
///
///   all H2 variants   m, p0, q0, P2, Q1, xi1(y)
///   P1y_Sol1          xi2(y), xi_index (which root carries the exponent)
///   P1y_Sol2          xi2_scalar, qm_scalar; xi2(y) = xi1 + xi2_scalar y^k
///   P1y_Sol3          xi2_scalar, qm_scalar; roots xi1 ± i xi2_scalar y^k
///   P1y_SolC          xi2(y), qm(y) free; Q1 fixed by 1 - P2(2p0 - q0 - 1)
///   P1const_Sol1      P1, xi2(y), xi_index
///   P1const_SolF      P1, xi2(y), qm(y) free; Q1 fixed by 1/P2 - 2p0 + q0
///   HexExample        c, j, jt
///
/// k is 1/P2 for Sol2/Sol3 (0 means "derive it").
struct FamilyInstance {
  Variant variant = Variant::P1y_Sol1;
  unsigned m = 1;
  Rational p0, q0, P2, Q1;
  Rational P1;
  Rational xi2_scalar;
  Rational qm_scalar;
  unsigned k = 0;
  unsigned xi_index = 1;
  Rational c, j, jt;
  MultiPoly xi1, xi2, qm;
  /// Replaces the computed Q_m(y); only for deliberately broken instances.
  std::optional<MultiPoly> qm_coefficient_override;
};

/// Checks the instance invariants, naming the violated constraint.
/// Throws InvalidParams.
void validate(const FamilyInstance& inst);

/// The operator of the variant exactly as displayed, i.e. -H'.
/// Throws InvalidParams (see validate).
DiffOp build_hex(const Rational& c, const Rational& j, const Rational& jt);
DiffOp build_H2(const FamilyInstance& inst);

/// Skips validate(); used to build instances that violate a constraint on purpose.
DiffOp build_H2_unchecked(const FamilyInstance& inst);

/// build_hex or build_H2 depending on the variant.
DiffOp build_display(const FamilyInstance& inst);

/// H' = -(displayed operator); the operator whose matrices and metric are studied.
DiffOp hamiltonian(const FamilyInstance& inst);

/// Zero-order coefficient c⁰ of H'.
MultiPoly zero_order_term(const FamilyInstance& inst);

/// The instance's invariant module: F_{m,n}, or for Hex the box a <= 2j, b <= 2jt.
MonomialSpace space_of(const FamilyInstance& inst, unsigned n);

/// Exponents in the printed closed forms. Meaning per variant:
///   Sol1, Sol2, Sol3: alpha on |y|, beta on |x - xi| (Sol3: on the quadratic
///     (x - xi1)^2 + xi2^2 y^{2k}), gamma on |x - xi2(y)| (Sol2) or the arctan
///     phase (Sol3)
///   SolC: alpha on |y|
///   P1const_Sol1: alpha on |x - xi|, beta in e^{-beta y}
///   P1const_SolF: beta in e^{-beta y}, derived from the gauge field
///   Hex: alpha in e^{alpha (xy + x + y)}
struct ExponentSet {
  std::optional<Rational> alpha;
  std::optional<Rational> beta;
  std::optional<Rational> gamma;
};

/// Throws DegenerateParams naming a vanishing denominator.
ExponentSet exponents_of(const FamilyInstance& inst);

/// |base|^exponent; `symbol` names the exponent (alpha, beta, gamma).
struct PowerTerm {
  std::string label;
  MultiPoly base;
  Rational exponent;
  std::string symbol;
};

/// e^{gamma * atan(num / den)}
struct ArctanTerm {
  Rational gamma;
  MultiPoly num;
  MultiPoly den;
};

/// e^{coeff * poly}
struct ExpTerm {
  Rational coeff;
  MultiPoly poly;
};

/// Non-polynomial factor of the wave functions, psi = prefactor * Pol.
/// det_power multiplies det g^{μν} (the metric factor g^{-1/4} written with
/// the lower-index determinant).
struct Prefactor {
  std::vector<PowerTerm> powers;
  std::optional<ArctanTerm> arctan;
  std::vector<ExpTerm> exps;
  MultiPoly det;
  Rational det_power = ratio(1, 4);
};

Prefactor prefactor_of(const FamilyInstance& inst);

/// Exact gradient of log(prefactor) on the region where every base is positive.
LogGradient log_grad(const Prefactor& pre);

/// The displayed determinant form, expanded.
MultiPoly expected_det(const FamilyInstance& inst);

/// Outcome of every exact identity check for one instance.
struct IdentityReport {
  bool invariant = false;
  unsigned n_max = 0;
  std::optional<InvarianceWitness> witness;
  bool closure = false;
  bool det_proportional = false;
  std::optional<Rational> det_constant;
  bool gauge_factor = false;

  bool all_pass() const { return invariant && closure && det_proportional && gauge_factor; }
};

/// Runs invariance for n = 1..n_max, closure, determinant proportionality and
/// the gauge-factor check.
IdentityReport check_identities(const FamilyInstance& inst, unsigned n_max);

/// check_identities over many instances, parallel over instances.
std::vector<IdentityReport> sweep_identities(const std::vector<FamilyInstance>& insts, unsigned n_max);
std::vector<IdentityReport> sweep_identities_serial(const std::vector<FamilyInstance>& insts, unsigned n_max);

/// Random valid instance: scalars p/q with p in [-9, 9], q in [1, 4],
/// polynomials in y of degree <= m with such coefficients, rejection-resampled
/// until validate() passes.
FamilyInstance sample_instance(Variant v, unsigned m, std::mt19937_64& rng);

}  // namespace qes
