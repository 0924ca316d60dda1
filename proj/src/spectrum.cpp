#include "qes/subspace.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace qes {

UniPoly char_poly(const RatMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("char_poly: matrix must be square");
  const std::size_t n = m.rows();
  RatMatrix h = m;
  // Similarity reduction to upper Hessenberg form by exact elimination.
  for (std::size_t k = 0; k + 2 < n; ++k) {
    std::size_t r = k + 1;
    while (r < n && h(r, k) == 0) ++r;
    if (r == n) continue;
    if (r != k + 1) {
      for (std::size_t j = 0; j < n; ++j) std::swap(h(r, j), h(k + 1, j));
      for (std::size_t i = 0; i < n; ++i) std::swap(h(i, r), h(i, k + 1));
    }
    const Rational inv = 1 / h(k + 1, k);
    for (std::size_t i = k + 2; i < n; ++i) {
      if (h(i, k) == 0) continue;
      const Rational f = h(i, k) * inv;
      for (std::size_t j = k; j < n; ++j)
        if (h(k + 1, j) != 0) h(i, j) -= f * h(k + 1, j);
      for (std::size_t row = 0; row < n; ++row)
        if (h(row, i) != 0) h(row, k + 1) += f * h(row, i);
    }
  }
  // p_k(t) = (t - h_kk) p_{k-1} - sum_{i<k} h_ik (prod_{j=i+1..k} h_{j,j-1}) p_{i-1}
  std::vector<UniPoly> p;
  p.reserve(n + 1);
  p.emplace_back(std::vector<Rational>{1});
  const UniPoly t = UniPoly::monomial(1);
  for (std::size_t k = 0; k < n; ++k) {
    UniPoly next = (t - UniPoly({h(k, k)})) * p[k];
    Rational sub = 1;
    for (std::size_t i = k; i-- > 0;) {
      sub *= h(i + 1, i);
      if (sub == 0) break;
      if (h(i, k) == 0) continue;
      next -= p[i].scaled(h(i, k) * sub);
    }
    p.push_back(std::move(next));
  }
  return p.back();
}

namespace {

constexpr unsigned kPrecBits = 320;

struct Cplx {
  mpf_class re{0, kPrecBits};
  mpf_class im{0, kPrecBits};
};

Cplx make(double re, double im) {
  Cplx z;
  z.re = re;
  z.im = im;
  return z;
}

Cplx add(const Cplx& a, const Cplx& b) { Cplx z; z.re = a.re + b.re; z.im = a.im + b.im; return z; }
Cplx sub(const Cplx& a, const Cplx& b) { Cplx z; z.re = a.re - b.re; z.im = a.im - b.im; return z; }
Cplx mul(const Cplx& a, const Cplx& b) {
  Cplx z;
  z.re = a.re * b.re - a.im * b.im;
  z.im = a.re * b.im + a.im * b.re;
  return z;
}
Cplx div(const Cplx& a, const Cplx& b) {
  const mpf_class den(b.re * b.re + b.im * b.im, kPrecBits);
  Cplx z;
  z.re = (a.re * b.re + a.im * b.im) / den;
  z.im = (a.im * b.re - a.re * b.im) / den;
  return z;
}
mpf_class modulus(const Cplx& a) {
  mpf_class r(a.re * a.re + a.im * a.im, kPrecBits);
  return sqrt(r);
}

std::vector<mpf_class> to_mpf(const UniPoly& p) {
  std::vector<mpf_class> out;
  for (const auto& c : p.coeffs()) out.emplace_back(c, kPrecBits);
  return out;
}

Cplx horner(const std::vector<mpf_class>& c, const Cplx& z) {
  Cplx acc;
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    acc = mul(acc, z);
    acc.re += *it;
  }
  return acc;
}

mpf_class abs_horner(const std::vector<mpf_class>& c, const mpf_class& r) {
  mpf_class acc(0, kPrecBits);
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * r + abs(*it);
  return acc;
}

std::vector<std::complex<double>> double_roots(const UniPoly& p) {
  const int d = p.degree();
  const UniPoly mp = p.monic();
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
  bool finite = true;
  for (int i = 0; i < d; ++i) {
    if (i + 1 < d) comp(i + 1, i) = 1.0;
    const double c = -mp.coeff(i).get_d();
    finite = finite && std::isfinite(c);
    comp(i, d - 1) = c;
  }
  std::vector<std::complex<double>> out;
  if (finite) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    if (es.info() == Eigen::Success)
      for (int i = 0; i < d; ++i) out.push_back(es.eigenvalues()(i));
  }
  if (static_cast<int>(out.size()) != d) {
    // Fallback: points on a circle of the Cauchy radius.
    double radius = 1.0;
    for (int i = 0; i < d; ++i) radius = std::max(radius, 1.0 + std::abs(mp.coeff(i).get_d()));
    if (!std::isfinite(radius)) radius = 1e300;
    out.clear();
    for (int i = 0; i < d; ++i) out.push_back(std::polar(radius, 2.0 * M_PI * (i + 0.25) / d));
  }
  return out;
}

/// Roots of a square-free polynomial by Aberth iteration from Eigen starts.
std::vector<Cplx> polished_roots(const UniPoly& p) {
  const int d = p.degree();
  if (d < 1) return {};
  const auto c = to_mpf(p.monic());
  const auto dc = to_mpf(p.monic().derivative());
  std::vector<Cplx> z;
  for (const auto& r : double_roots(p)) z.push_back(make(r.real(), r.imag()));
  // Break exact coincidences of starting points.
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j)
      if (z[i].re == z[j].re && z[i].im == z[j].im) z[i].im += 1e-6 * (1 + i);
  mpf_class eps(1, kPrecBits);
  mpf_div_2exp(eps.get_mpf_t(), eps.get_mpf_t(), kPrecBits - 40);
  for (int iter = 0; iter < 400; ++iter) {
    mpf_class worst(0, kPrecBits);
    for (int k = 0; k < d; ++k) {
      const Cplx f = horner(c, z[k]);
      const Cplx df = horner(dc, z[k]);
      if (f.re == 0 && f.im == 0) continue;
      const Cplx w = div(f, df);
      Cplx s;
      for (int j = 0; j < d; ++j) {
        if (j == k) continue;
        s = add(s, div(make(1, 0), sub(z[k], z[j])));
      }
      const Cplx corr = div(w, sub(make(1, 0), mul(w, s)));
      z[k] = sub(z[k], corr);
      mpf_class scale = modulus(z[k]);
      if (scale < 1) scale = 1;
      mpf_class rel(modulus(corr) / scale, kPrecBits);
      if (rel > worst) worst = rel;
    }
    if (worst <= eps) break;
  }
  mpf_class bound(1, kPrecBits);
  mpf_div_2exp(bound.get_mpf_t(), bound.get_mpf_t(), kPrecBits / 2);
  // Backward error on the scale max(|r|, 1), matching the stopping rule; the
  // plain |r| scale is useless for roots at 0 when the constant term vanishes.
  for (const auto& r : z) {
    mpf_class scale = modulus(r);
    if (scale < 1) scale = 1;
    const mpf_class num = modulus(horner(c, r));
    const mpf_class den = abs_horner(c, scale);
    if (num > bound * den) throw RootFindingFailure("root polishing did not converge (residual check failed)");
  }
  return z;
}

/// Rational number p/q with q | lead that matches r, if any.
std::optional<Rational> reconstruct(const UniPoly& f, const Cplx& r) {
  mpf_class scale = modulus(r);
  if (scale < 1) scale = 1;
  mpf_class tiny(1, kPrecBits);
  mpf_div_2exp(tiny.get_mpf_t(), tiny.get_mpf_t(), kPrecBits / 3);
  if (abs(r.im) > tiny * scale) return std::nullopt;
  // Integer form: any rational root has denominator dividing the leading coefficient.
  BigInt common = 1;
  for (const auto& c : f.coeffs()) mpz_lcm(common.get_mpz_t(), common.get_mpz_t(), c.get_den_mpz_t());
  const BigInt lead = abs(BigInt(f.lead() * common));
  // Continued-fraction convergents of the exact value of the mpf approximation.
  Rational x;
  mpq_set_f(x.get_mpq_t(), r.re.get_mpf_t());
  const Rational target = x;
  Rational window;
  mpq_set_f(window.get_mpq_t(), mpf_class(tiny * scale, kPrecBits).get_mpf_t());
  BigInt h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  for (int step = 0; step < 4096; ++step) {
    BigInt a;
    mpz_fdiv_q(a.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    const BigInt h2 = a * h1 + h0;
    const BigInt k2 = a * k1 + k0;
    if (k2 > lead) break;
    const Rational cand = ratio(h2, k2);
    if (abs(cand - target) <= window && f(cand) == 0) return cand;
    h0 = h1; h1 = h2; k0 = k1; k1 = k2;
    const Rational frac = x - Rational(a);
    if (frac == 0) break;
    x = 1 / frac;
  }
  return std::nullopt;
}

std::complex<double> to_complex(const Cplx& z) { return {z.re.get_d(), z.im.get_d()}; }

}  // namespace

std::vector<Rational> rational_roots(const UniPoly& p) {
  std::vector<Rational> out;
  for (const auto& f : squarefree_decomposition(p)) {
    if (f.degree() < 1) continue;
    if (f.degree() == 1) {
      out.push_back(-f.coeff(0) / f.coeff(1));
      continue;
    }
    for (const auto& r : polished_roots(f))
      if (auto q = reconstruct(f, r)) out.push_back(*q);
  }
  std::sort(out.begin(), out.end());
  return out;
}

SpectralPattern eigenvalues(const RatMatrix& m, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("eigenvalues: tolerance must be positive");
  SpectralPattern pat;
  pat.tol = tol;
  const UniPoly cp = char_poly(m);
  const auto cp_mpf = to_mpf(cp);
  const auto dim = static_cast<double>(m.rows());

  struct Root {
    std::complex<double> value;
    double residual;
  };
  std::vector<Root> reals, upper, lower;

  const auto factors = squarefree_decomposition(cp);
  for (std::size_t mult = 1; mult <= factors.size(); ++mult) {
    const UniPoly& f = factors[mult - 1];
    if (f.degree() < 1) continue;
    std::vector<Cplx> roots;
    if (f.degree() == 1) {
      Cplx z;
      z.re = mpf_class(-f.coeff(0) / f.coeff(1), kPrecBits);
      roots.push_back(z);
    } else {
      roots = polished_roots(f);
    }
    for (const auto& z : roots) {
      std::optional<Rational> exact;
      if (f.degree() == 1) exact = -f.coeff(0) / f.coeff(1);
      else exact = reconstruct(f, z);
      Cplx zz = z;
      if (exact) {
        zz.re = mpf_class(*exact, kPrecBits);
        zz.im = 0;
      }
      const double res =
          mpf_class(modulus(horner(cp_mpf, zz)), kPrecBits).get_d() / std::pow(1.0 + modulus(zz).get_d(), dim);
      const auto v = to_complex(zz);
      for (std::size_t k = 0; k < mult; ++k) {
        if (exact) pat.rational_eigs.push_back(*exact);
        if (std::abs(v.imag()) <= tol * std::max(1.0, std::abs(v))) reals.push_back({{v.real(), 0.0}, res});
        else if (v.imag() > 0) upper.push_back({v, res});
        else lower.push_back({v, res});
      }
    }
  }

  std::sort(reals.begin(), reals.end(), [](const Root& a, const Root& b) { return a.value.real() < b.value.real(); });
  for (const auto& r : reals) {
    pat.real_eigs.push_back(r.value.real());
    pat.residuals.push_back(r.residual);
  }

  // Greedy nearest-conjugate matching, largest-magnitude ties resolved by real part.
  std::sort(upper.begin(), upper.end(), [](const Root& a, const Root& b) {
    if (std::abs(a.value) != std::abs(b.value)) return std::abs(a.value) < std::abs(b.value);
    return a.value.real() < b.value.real();
  });
  std::vector<bool> used(lower.size(), false);
  struct Pair {
    Root up, low;
  };
  std::vector<Pair> pairs;
  for (const auto& u : upper) {
    std::size_t best = lower.size();
    double best_dist = 0;
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(u.value - std::conj(lower[j].value));
      if (best == lower.size() || dist < best_dist) {
        best = j;
        best_dist = dist;
      }
    }
    if (best != lower.size() && best_dist <= tol * std::max(1.0, std::abs(u.value))) {
      used[best] = true;
      pairs.push_back({u, lower[best]});
    } else {
      pat.unpaired.push_back(u.value);
    }
  }
  for (std::size_t j = 0; j < lower.size(); ++j)
    if (!used[j]) pat.unpaired.push_back(lower[j].value);
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.up.value.real() != b.up.value.real()) return a.up.value.real() < b.up.value.real();
    return a.up.value.imag() < b.up.value.imag();
  });
  for (const auto& p : pairs) {
    pat.pair_eigs.push_back({p.up.value, p.low.value});
    pat.residuals.push_back(p.up.residual);
    pat.residuals.push_back(p.low.residual);
  }
  std::sort(pat.rational_eigs.begin(), pat.rational_eigs.end());
  return pat;
}

std::vector<MultiPoly> eigenpolynomials(const RatMatrix& m, const MonomialSpace& space, const Rational& eig) {
  if (m.rows() != space.dim() || m.cols() != space.dim())
    throw std::invalid_argument("eigenpolynomials: matrix does not match the space");
  if (char_poly(m)(eig) != 0) throw NotAnEigenvalue(to_string(eig) + " is not an eigenvalue");
  const RatMatrix shifted = m - scaled(RatMatrix::identity(m.rows()), eig);
  std::vector<MultiPoly> out;
  for (const auto& v : nullspace(shifted)) {
    MultiPoly p;
    for (std::size_t i = 0; i < v.size(); ++i) p.add_term(space.basis()[i], v[i]);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace qes
