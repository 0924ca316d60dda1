#pragma once

#include "qes/multipoly.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qes {

/// Derivative orders per variable; all zeros is the multiplication operator.
using DerivIndex = Exponents;

std::uint32_t order(const DerivIndex& d);

/// Linear differential operator with polynomial coefficients, kept in the
/// normal form sum_d c_d(x) * D^d (coefficients to the left of derivatives).
/// The normal form is unique, so structural equality is operator equality.
class DiffOp {
 public:
  using Terms = std::map<DerivIndex, MultiPoly, GradedLexDescending>;

  DiffOp() = default;

  static DiffOp identity();
  static DiffOp multiplication(MultiPoly c);
  static DiffOp partial(Var v, unsigned order = 1);
  static DiffOp term(MultiPoly c, const DerivIndex& d);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Coefficient of D^d (zero if absent).
  MultiPoly coeff(const DerivIndex& d) const;
  /// Highest total derivative order present; 0 for the zero operator.
  std::uint32_t order() const;

  void add_term(const DerivIndex& d, const MultiPoly& c);

  DiffOp& operator+=(const DiffOp& o);
  DiffOp& operator-=(const DiffOp& o);
  DiffOp& scale(const Rational& c);

  friend DiffOp operator+(DiffOp a, const DiffOp& b) { return a += b; }
  friend DiffOp operator-(DiffOp a, const DiffOp& b) { return a -= b; }
  DiffOp operator-() const;
  /// Left multiplication by a polynomial: (c * op) f = c * (op f).
  friend DiffOp operator*(const MultiPoly& c, const DiffOp& op);

  friend bool operator==(const DiffOp& a, const DiffOp& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const DiffOp& a, const DiffOp& b) { return !(a == b); }

 private:
  Terms terms_;
};

DiffOp scaled(DiffOp op, const Rational& c);

MultiPoly apply(const DiffOp& op, const MultiPoly& p);

/// a∘b, normalized by the Leibniz rule.
DiffOp compose(const DiffOp& a, const DiffOp& b);

DiffOp commutator(const DiffOp& a, const DiffOp& b);

/// First-order sl(2,R) generators acting on span{1, z, ..., z^n}:
/// J- = d/dz, J0 = N_z - (n-1)/2, J+ = z (N_z - n), with N_z = z d/dz.
struct Sl2Triple {
  DiffOp minus;
  DiffOp zero;
  DiffOp plus;
};

/// Throws std::invalid_argument for n == 0.
Sl2Triple make_sl2(unsigned n);

/// Generators preserving the monomial modules span{x^a y^b : m a + b <= m n}.
struct Gen2D {
  unsigned m = 0;
  unsigned n = 0;
  DiffOp Nx;              // x d/dx
  DiffOp Ny;              // y d/dy
  DiffOp L0;              // d/dy
  std::vector<DiffOp> Lp;  // y^p d/dx, p = 0..m
  DiffOp Lmn;             // y (m N_x + N_y - m n)

  /// N_x, N_y, L0, L_0..L_m, L_{m,n} in that order.
  std::vector<DiffOp> all() const;
};

Gen2D make_gen2d(unsigned m, unsigned n);

/// sum_ab C2[a][b] gens[a]∘gens[b] + sum_a C1[a] gens[a]. C2 is symmetrized
/// first, so only its symmetric part contributes; any antisymmetric part has
/// to be passed through C1 as the corresponding commutators.
DiffOp quadratic_combination(const std::vector<std::vector<Rational>>& C2,
                             const std::vector<Rational>& C1, std::span<const DiffOp> gens);

/// Exact coordinates of `target` in span(basis), if it lies there.
std::optional<std::vector<Rational>> decompose(const DiffOp& target, std::span<const DiffOp> basis);

/// e.g. "(x^2 + x)*Dxx + (-2*x*y)*Dxy + 2*x - 1"; multiplication part last.
std::string to_string(const DiffOp& op);

/// Reads the operator text format: a sum of products of polynomial factors
/// and derivative symbols Dx, Dy, Dz, Dxx, Dxy, ... Named constants are
/// resolved from `constants`. Throws std::invalid_argument.
DiffOp parse_diffop(std::string_view text, const std::map<std::string, Rational>& constants = {});

}  // namespace qes
