#pragma once

#include "qes/families.hpp"
#include "qes/subspace.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qes {

enum class DomainKind { Quadrant, BetweenCurves, HalfPlane, BoundedRegion };

std::string to_string(DomainKind k);
DomainKind domain_kind_from_string(const std::string& tag);

/// x >= xi(y) (Above) or x <= xi(y) (Below).
enum class Side { Above, Below };

struct BoundaryCurve {
  MultiPoly xi;
  Side side = Side::Above;
};

/// {(x, y) : y in [y_min, y_max], lower(y) <= x <= upper(y)}; a missing
/// bound is infinite. At most one curve per side.
struct DomainSpec {
  DomainKind kind = DomainKind::Quadrant;
  std::vector<BoundaryCurve> curves;
  std::optional<Rational> y_min;
  std::optional<Rational> y_max;
  /// Where a domain without x-curves is cut in two for the analysis. Defaults
  /// to the centre of the arctan factor if there is one, else x = 0.
  std::optional<MultiPoly> x_split;
  std::string label;

  const BoundaryCurve* lower() const;
  const BoundaryCurve* upper() const;
  bool bounded() const;
};

class InvalidDomain : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnmatchedBoundary : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point strictly inside the domain, built from the bounds.
Point interior_point(const DomainSpec& domain);

/// Checks the shape (one curve per side, y_min < y_max, curves not crossing
/// inside the y-range, kind consistent with boundedness), that det > 0 at the
/// interior point, and that every boundary is a zero set of det.
/// Throws InvalidDomain.
void validate_domain(const DomainSpec& domain, const MultiPoly& det);

struct BoundaryCheck {
  std::string boundary;
  /// Sum of prefactor exponents times the vanishing order of their bases.
  Rational explicit_exponent;
  /// explicit_exponent + (vanishing order of det)/4, i.e. the power of the
  /// distance in psi itself.
  Rational effective_exponent;
  /// False if no prefactor base vanishes there (explicit exponent 0).
  bool matched = false;
  bool pass = false;
};

/// One entry per boundary segment of the domain; pass iff explicit exponent > 1/2.
/// Throws UnmatchedBoundary if a boundary is not a zero set of pre.det.
std::vector<BoundaryCheck> hermiticity_check(const Prefactor& pre, const DomainSpec& domain);

enum class NormVerdict { Normalizable, Divergent, Inconclusive };
std::string to_string(NormVerdict v);

/// Local integrability of |psi|^2 sqrt(g) in one weighted direction of one
/// chart. Requirement: constant + sum coeffs[sym] * sym - pol_slope * d > 0,
/// d the Pol degree, unless the exponential factor decides the direction.
struct ExponentCondition {
  enum class Status { Pass, Fail, ExpDecay, ExpGrowth, Degenerate };

  std::string where;
  std::string chart;
  Rational weight_s, weight_t;
  std::vector<std::pair<std::string, Rational>> coeffs;
  Rational constant;
  Rational pol_slope;
  /// Requirement evaluated at the instance exponents and the report's Pol degree.
  Rational value;
  Status status = Status::Pass;

  /// e.g. "needs 2*beta + 1 > 0".
  std::string requirement() const;
};

std::string to_string(ExponentCondition::Status s);

/// Two requirements that no exponent values satisfy together.
struct InfeasibilityWitness {
  ExponentCondition first;
  ExponentCondition second;
  std::string text;
};

struct NormReport {
  NormVerdict verdict = NormVerdict::Inconclusive;
  unsigned pol_degree = 0;
  std::vector<ExponentCondition> boundary_conditions;
  std::vector<ExponentCondition> asymptotic_conditions;
  /// Largest Pol total degree that stays normalizable; empty when Pol degree
  /// 0 already fails or when every degree works (see pol_degree_unbounded).
  std::optional<unsigned> max_pol_degree;
  bool pol_degree_unbounded = false;
  std::optional<InfeasibilityWitness> witness;
};

/// Exact power counting for |psi|^2 sqrt(g) = (prefactor without det)^2 Pol^2
/// with Pol a generic polynomial of the given total degree. The domain is cut
/// into charts (s, t) >= 0 anchored at its boundary curves and lines; in each
/// chart every weighted direction (w_s, w_t) is checked, which covers
/// boundary curves (w = (-1, 0)), corners and infinity alike. Directions where
/// a base's leading part can vanish inside the chart, or where the
/// exponential's leading part changes sign, are Degenerate and make the
/// verdict Inconclusive unless another direction already fails.
NormReport normalizability(const Prefactor& pre, const DomainSpec& domain, unsigned pol_degree);

enum class Trend { Converging, Diverging, Inconclusive, NumericFailure };
std::string to_string(Trend t);

struct QuadratureOptions {
  double size = 8.0;
  double offset = 1.0 / 4096;
  unsigned levels = 5;
  /// Adaptive bisection depth of the Gauss-Kronrod rule on each geometric
  /// panel; 0 applies the 15-point rule once per panel.
  unsigned refine_depth = 0;
  double rel_tol = 1e-9;
};

struct QuadratureReport {
  Trend trend = Trend::Inconclusive;
  std::vector<double> sizes;
  std::vector<double> offsets;
  std::vector<double> values;
  /// I_k / I_{k-1}.
  std::vector<double> ratios;
  /// (I_k - I_{k-1}) / (I_{k-1} - I_{k-2}).
  std::vector<double> increment_ratios;
  std::string failure;
};

/// Integral of |psi|^2 sqrt(g) over the domain truncated at chart size
/// R 2^k and boundary offset eps / 2^k, k = 0..levels-1.
/// Converging: last ratio <= 1 + 1e-3, or the increments shrink geometrically
/// (last two increment ratios in [0, 0.9)). Diverging: every ratio >= 2, or the last two increment ratios
/// are >= 0.99 (increments not shrinking, e.g. a logarithmic divergence). If the integrand overflows, the
/// levels computed so far decide: at least two, all ratios >= 2 gives Diverging, else NumericFailure.
/// Parallel over (chart, panel); the sum order is fixed.
QuadratureReport quadrature_crosscheck(const Prefactor& pre, const DomainSpec& domain, const MultiPoly& pol,
                                       const QuadratureOptions& opts = {});
QuadratureReport quadrature_crosscheck_serial(const Prefactor& pre, const DomainSpec& domain, const MultiPoly& pol,
                                              const QuadratureOptions& opts = {});

/// 1 + x^d + y^d: same Newton polygon as a generic polynomial of degree d.
MultiPoly generic_pol(unsigned degree);

enum class Outcome { HermitianQES, PseudoHermitianCandidate, NotQES, ExactlySolvableBoundedRegion, Inconclusive };
std::string to_string(Outcome o);

struct ClassifyOptions {
  double tol = 1e-9;
  bool quadrature = true;
  QuadratureOptions quad;
};

struct Verdict {
  Outcome outcome = Outcome::Inconclusive;
  std::string reason;
  ExponentSet exponents;
  std::vector<BoundaryCheck> hermiticity;
  bool hermitian = false;
  NormReport norm;
  bool closure = false;
  std::optional<QuadratureReport> quadrature;
  std::optional<SpectralPattern> spectrum;
};

/// HermitianQES: hermiticity, closure and normalizability all hold.
/// ExactlySolvableBoundedRegion: bounded domain, normalizable.
/// PseudoHermitianCandidate: normalizable but hermiticity fails (the spectral
/// pattern of the F_{m,n} matrix is attached).
/// NotQES: not normalizable, or closure fails.
/// Inconclusive: normalizability undecided.
/// Pol degree used is the largest total degree in the instance's module.
Verdict classify(const FamilyInstance& inst, const DomainSpec& domain, unsigned n, const ClassifyOptions& opts = {});

}  // namespace qes
