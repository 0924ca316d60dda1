#pragma once

#include "qes/diffop.hpp"
#include "qes/linalg.hpp"
#include "qes/unipoly.hpp"

#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qes {

enum class SpaceKind {
  OneD,  // span{1, z, ..., z^n}
  TwoD,  // span{x^a y^b : m a + b <= m n}
  Box,   // span{x^a y^b : a <= m, b <= n}
};

/// Finite module spanned by monomials. Bases are ascending: graded lex for
/// OneD and Box, and for TwoD the weighted degree m*a + b first, then lex.
class MonomialSpace {
 public:
  static MonomialSpace one_d(unsigned n);
  /// Throws std::invalid_argument unless m, n >= 1.
  static MonomialSpace two_d(unsigned m, unsigned n);
  static MonomialSpace box(unsigned max_x, unsigned max_y);

  SpaceKind kind() const { return kind_; }
  unsigned m() const { return m_; }
  unsigned n() const { return n_; }
  const std::vector<Exponents>& basis() const { return basis_; }
  std::size_t dim() const { return basis_.size(); }

  bool contains(const Exponents& e) const;
  /// Position of e in the basis, or nullopt.
  std::optional<std::size_t> index_of(const Exponents& e) const;

  std::string describe() const;

 private:
  MonomialSpace(SpaceKind kind, unsigned m, unsigned n, std::vector<Exponents> basis);

  SpaceKind kind_;
  unsigned m_;
  unsigned n_;
  std::vector<Exponents> basis_;
  std::map<Exponents, std::size_t> index_;
};

/// Same as MonomialSpace::two_d.
MonomialSpace basis(unsigned m, unsigned n);

/// Closed form (n+1) + m n (n+1) / 2.
std::size_t dim_formula(unsigned m, unsigned n);

struct InvarianceWitness {
  Exponents source;      // basis monomial whose image leaves the space
  Exponents image_term;  // offending monomial in the image
  Rational coeff;        // its coefficient
};

struct InvarianceResult {
  bool invariant = true;
  std::optional<InvarianceWitness> witness;
};

/// Checks every basis monomial; the witness is the first failure in basis order.
InvarianceResult is_invariant(const DiffOp& op, const MonomialSpace& space);

std::string describe(const InvarianceWitness& w);

class NotInvariant : public std::runtime_error {
 public:
  explicit NotInvariant(InvarianceWitness w);
  const InvarianceWitness& witness() const { return w_; }

 private:
  InvarianceWitness w_;
};

/// Entry (i, j) is the coefficient of basis monomial i in op(basis monomial j).
/// Columns are computed in parallel. Throws NotInvariant.
RatMatrix matrix_of(const DiffOp& op, const MonomialSpace& space);

/// Single-threaded reference for matrix_of.
RatMatrix matrix_of_serial(const DiffOp& op, const MonomialSpace& space);

/// det(t I - M), exact, via similarity reduction to Hessenberg form.
UniPoly char_poly(const RatMatrix& m);

class RootFindingFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotAnEigenvalue : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConjugatePair {
  std::complex<double> upper;  // positive imaginary part
  std::complex<double> lower;
};

struct SpectralPattern {
  std::vector<double> real_eigs;
  std::vector<ConjugatePair> pair_eigs;
  /// Roots with non-negligible imaginary part that found no partner. Always
  /// empty for real matrices; kept so a broken invariant is visible.
  std::vector<std::complex<double>> unpaired;
  /// Eigenvalues found exactly, with multiplicity.
  std::vector<Rational> rational_eigs;
  /// |char_poly(lambda)| / (1 + |lambda|)^dim for each root, in report order.
  std::vector<double> residuals;
  double tol = 0.0;

  std::size_t count() const { return real_eigs.size() + 2 * pair_eigs.size() + unpaired.size(); }
  bool is_real_or_paired() const { return unpaired.empty(); }
};

/// All roots of the characteristic polynomial. Each square-free factor is
/// solved in double precision (companion matrix), polished by simultaneous
/// (Aberth) iteration in multiprecision, and every nearly real root is then
/// tested exactly against the rational candidates p/q with q dividing the
/// leading coefficient of the factor's integer form.
/// Reals are sorted ascending, pairs by real part then imaginary part.
/// Throws RootFindingFailure if a polished root fails its residual check.
SpectralPattern eigenvalues(const RatMatrix& m, double tol);

/// Exact rational roots of p (each listed once).
std::vector<Rational> rational_roots(const UniPoly& p);

/// Exact kernel basis of (M - eig I), each vector turned into a polynomial
/// over the space basis. Throws NotAnEigenvalue.
std::vector<MultiPoly> eigenpolynomials(const RatMatrix& m, const MonomialSpace& space, const Rational& eig);

}  // namespace qes
