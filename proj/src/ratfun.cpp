#include "qes/ratfun.hpp"

#include <stdexcept>

namespace qes {

RatFun::RatFun(MultiPoly num) : num_(std::move(num)), den_(1) {}

RatFun::RatFun(MultiPoly num, MultiPoly den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
  normalize();
}

// Only scalar content is removed: a constant denominator is folded into the
// numerator and the denominator's leading coefficient is made 1.
void RatFun::normalize() {
  if (num_.is_zero()) {
    den_ = MultiPoly(1);
    return;
  }
  const Rational lc = den_.leading_coeff();
  if (lc != 1) {
    const Rational inv = 1 / lc;
    num_.scale(inv);
    den_.scale(inv);
  }
}

RatFun& RatFun::operator+=(const RatFun& o) {
  if (den_ == o.den_) {
    num_ += o.num_;
  } else {
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ = den_ * o.den_;
  }
  normalize();
  return *this;
}

RatFun& RatFun::operator-=(const RatFun& o) {
  if (den_ == o.den_) {
    num_ -= o.num_;
  } else {
    num_ = num_ * o.den_ - o.num_ * den_;
    den_ = den_ * o.den_;
  }
  normalize();
  return *this;
}

RatFun& RatFun::operator*=(const RatFun& o) {
  num_ *= o.num_;
  den_ *= o.den_;
  normalize();
  return *this;
}

RatFun operator/(const RatFun& a, const RatFun& b) {
  if (b.is_zero()) throw std::domain_error("division by the zero rational function");
  return RatFun(a.num_ * b.den_, a.den_ * b.num_);
}

bool ratfun_equal(const RatFun& a, const RatFun& b) {
  if (a.den() == b.den()) return a.num() == b.num();
  return a.num() * b.den() == b.num() * a.den();
}

RatFun diff(const RatFun& f, Var v) {
  if (f.den().is_constant()) return RatFun(diff(f.num(), v), f.den());
  MultiPoly num = diff(f.num(), v) * f.den() - f.num() * diff(f.den(), v);
  return RatFun(std::move(num), f.den() * f.den());
}

Rational eval(const RatFun& f, const Point& point) {
  const Rational d = eval(f.den(), point);
  if (d == 0) throw std::domain_error("rational function evaluated at a pole");
  return eval(f.num(), point) / d;
}

std::string to_string(const RatFun& f) {
  if (f.den() == MultiPoly(1)) return to_string(f.num());
  return "(" + to_string(f.num()) + ")/(" + to_string(f.den()) + ")";
}

}  // namespace qes
