#pragma once

#include "qes/diffop.hpp"
#include "qes/ratfun.hpp"

#include <stdexcept>

namespace qes {

class NotSecondOrder : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMetric : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symmetric 2x2 inverse metric g^{μν} with polynomial entries.
struct InverseMetric {
  MultiPoly gxx;
  MultiPoly gxy;
  MultiPoly gyy;

  friend bool operator==(const InverseMetric&, const InverseMetric&) = default;
};

/// Reads H = -g^{μν}∂_μ∂_ν + c^λ∂_λ + c⁰: gxx = -[Dxx], gyy = -[Dyy],
/// gxy = -[Dxy]/2. Throws NotSecondOrder unless H has order exactly 2 in x, y
/// and no z dependence.
InverseMetric extract_metric(const DiffOp& h);

/// gxx*gyy - gxy^2.
MultiPoly det_metric(const InverseMetric& g);

/// Covariant components A_x, A_y, and the contravariant ones A^x, A^y.
struct GaugeField {
  RatFun ax;
  RatFun ay;
  RatFun ax_up;
  RatFun ay_up;
};

/// A^λ = (c^λ + ∂_μ g^{μλ} - g^{μλ}∂_μ det / (2 det)) / 2, then lowered with
/// the inverse of g^{μν}. Throws SingularMetric if det is identically zero.
GaugeField gauge_field(const DiffOp& h, const InverseMetric& g);

/// ∂_x A_y - ∂_y A_x == 0 exactly.
bool closure_check(const GaugeField& a);

/// V = zero_order + g^{μν}A_μA_ν - (∂_μA^μ - A^μ∂_μ det / (2 det)).
/// With zero_order = c⁰ of H this is the full potential of
/// H = -g^{μν}(∇_μ - A_μ)(∇_ν - A_ν) + V; with the default it is the part
/// generated by the gauge field alone. Throws SingularMetric.
RatFun potential(const InverseMetric& g, const GaugeField& a, const RatFun& zero_order = RatFun());

struct LogGradient {
  RatFun dx;
  RatFun dy;
};

/// True iff grad log(prefactor) = -A componentwise, exactly. Wave functions
/// of the Schrödinger form are prefactor * Pol with Pol an eigenpolynomial of H.
bool gauge_factor_check(const GaugeField& a, const LogGradient& grad);

}  // namespace qes
