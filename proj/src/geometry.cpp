#include "qes/geometry.hpp"

namespace qes {

InverseMetric extract_metric(const DiffOp& h) {
  if (h.order() != 2) throw NotSecondOrder("operator has order " + std::to_string(h.order()) + ", expected 2");
  for (const auto& [d, c] : h.terms()) {
    if (d[2] != 0 || c.degree(Var::z) != 0)
      throw NotSecondOrder("operator depends on z; expected an operator in x and y");
  }
  InverseMetric g;
  g.gxx = -h.coeff({2, 0, 0});
  g.gyy = -h.coeff({0, 2, 0});
  g.gxy = h.coeff({1, 1, 0});
  g.gxy.scale(ratio(-1, 2));
  return g;
}

MultiPoly det_metric(const InverseMetric& g) { return g.gxx * g.gyy - g.gxy * g.gxy; }

GaugeField gauge_field(const DiffOp& h, const InverseMetric& g) {
  const MultiPoly det = det_metric(g);
  if (det.is_zero()) throw SingularMetric("inverse metric determinant vanishes identically");
  const MultiPoly cx = h.coeff({1, 0, 0});
  const MultiPoly cy = h.coeff({0, 1, 0});
  const MultiPoly dx_det = diff(det, Var::x);
  const MultiPoly dy_det = diff(det, Var::y);
  // a^λ = 2 det (c^λ + ∂_μ g^{μλ}) - g^{μλ} ∂_μ det, so A^λ = a^λ / (4 det).
  MultiPoly ax = MultiPoly(2) * det * (cx + diff(g.gxx, Var::x) + diff(g.gxy, Var::y)) -
                 (g.gxx * dx_det + g.gxy * dy_det);
  MultiPoly ay = MultiPoly(2) * det * (cy + diff(g.gxy, Var::x) + diff(g.gyy, Var::y)) -
                 (g.gxy * dx_det + g.gyy * dy_det);
  const MultiPoly four_det = MultiPoly(4) * det;
  GaugeField a;
  a.ax_up = RatFun(ax, four_det);
  a.ay_up = RatFun(ay, four_det);
  // Lowering: g_{μν} = adj(g^{..}) / det, so A_λ = adj_{λν} a^ν / (4 det^2).
  const MultiPoly den = four_det * det;
  a.ax = RatFun(g.gyy * ax - g.gxy * ay, den);
  a.ay = RatFun(g.gxx * ay - g.gxy * ax, den);
  return a;
}

bool closure_check(const GaugeField& a) { return ratfun_equal(diff(a.ay, Var::x), diff(a.ax, Var::y)); }

RatFun potential(const InverseMetric& g, const GaugeField& a, const RatFun& zero_order) {
  const MultiPoly det = det_metric(g);
  if (det.is_zero()) throw SingularMetric("inverse metric determinant vanishes identically");
  // g^{μν}A_μA_ν = A^μ A_μ
  const RatFun square = a.ax_up * a.ax + a.ay_up * a.ay;
  const RatFun divergence = diff(a.ax_up, Var::x) + diff(a.ay_up, Var::y);
  const RatFun two_det(MultiPoly(2) * det);
  const RatFun connection = (a.ax_up * RatFun(diff(det, Var::x)) + a.ay_up * RatFun(diff(det, Var::y))) / two_det;
  return zero_order + square - (divergence - connection);
}

bool gauge_factor_check(const GaugeField& a, const LogGradient& grad) {
  return ratfun_equal(grad.dx, -a.ax) && ratfun_equal(grad.dy, -a.ay);
}

}  // namespace qes
