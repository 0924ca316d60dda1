#include "qes/diffop.hpp"

#include "expr_parser.hpp"
#include "qes/linalg.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

namespace qes {

std::uint32_t order(const DerivIndex& d) { return total_degree(d); }

DiffOp DiffOp::identity() { return multiplication(MultiPoly(1)); }

DiffOp DiffOp::multiplication(MultiPoly c) { return term(std::move(c), DerivIndex{}); }

DiffOp DiffOp::partial(Var v, unsigned ord) {
  DerivIndex d{};
  d[static_cast<std::size_t>(v)] = ord;
  return term(MultiPoly(1), d);
}

DiffOp DiffOp::term(MultiPoly c, const DerivIndex& d) {
  DiffOp op;
  op.add_term(d, c);
  return op;
}

MultiPoly DiffOp::coeff(const DerivIndex& d) const {
  auto it = terms_.find(d);
  return it == terms_.end() ? MultiPoly() : it->second;
}

std::uint32_t DiffOp::order() const {
  std::uint32_t o = 0;
  for (const auto& [d, c] : terms_) o = std::max(o, qes::order(d));
  return o;
}

void DiffOp::add_term(const DerivIndex& d, const MultiPoly& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(d, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

DiffOp& DiffOp::operator+=(const DiffOp& o) {
  for (const auto& [d, c] : o.terms_) add_term(d, c);
  return *this;
}

DiffOp& DiffOp::operator-=(const DiffOp& o) {
  for (const auto& [d, c] : o.terms_) add_term(d, -c);
  return *this;
}

DiffOp& DiffOp::scale(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [d, p] : terms_) p.scale(c);
  return *this;
}

DiffOp DiffOp::operator-() const {
  DiffOp out = *this;
  return out.scale(-1);
}

DiffOp operator*(const MultiPoly& c, const DiffOp& op) {
  DiffOp out;
  for (const auto& [d, p] : op.terms_) out.add_term(d, c * p);
  return out;
}

DiffOp scaled(DiffOp op, const Rational& c) { return op.scale(c); }

namespace {

MultiPoly derivative(const MultiPoly& p, const DerivIndex& d) {
  MultiPoly out = p;
  for (std::size_t i = 0; i < kNumVars && !out.is_zero(); ++i) {
    if (d[i] > 0) out = diff(out, static_cast<Var>(i), d[i]);
  }
  return out;
}

BigInt binomial(unsigned n, unsigned k) {
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

}  // namespace

MultiPoly apply(const DiffOp& op, const MultiPoly& p) {
  MultiPoly out;
  for (const auto& [d, c] : op.terms()) {
    MultiPoly dp = derivative(p, d);
    if (!dp.is_zero()) out += c * dp;
  }
  return out;
}

DiffOp compose(const DiffOp& a, const DiffOp& b) {
  DiffOp out;
  for (const auto& [da, ca] : a.terms()) {
    for (const auto& [db, cb] : b.terms()) {
      // D^da (cb f) = sum_{g <= da} C(da, g) (D^g cb) D^(da - g) f
      for (std::uint32_t gx = 0; gx <= da[0]; ++gx) {
        for (std::uint32_t gy = 0; gy <= da[1]; ++gy) {
          for (std::uint32_t gz = 0; gz <= da[2]; ++gz) {
            const DerivIndex g{gx, gy, gz};
            MultiPoly dcb = derivative(cb, g);
            if (dcb.is_zero()) continue;
            const Rational mult(binomial(da[0], gx) * binomial(da[1], gy) * binomial(da[2], gz));
            dcb.scale(mult);
            DerivIndex dnew;
            for (std::size_t i = 0; i < kNumVars; ++i) dnew[i] = da[i] - g[i] + db[i];
            out.add_term(dnew, ca * dcb);
          }
        }
      }
    }
  }
  return out;
}

DiffOp commutator(const DiffOp& a, const DiffOp& b) { return compose(a, b) - compose(b, a); }

Sl2Triple make_sl2(unsigned n) {
  if (n == 0) throw std::invalid_argument("make_sl2: n must be >= 1");
  const MultiPoly z = MultiPoly::var(Var::z);
  const DiffOp dz = DiffOp::partial(Var::z);
  const DiffOp Nz = z * dz;
  Sl2Triple t;
  t.minus = dz;
  t.zero = Nz - DiffOp::multiplication(MultiPoly(ratio(static_cast<long>(n) - 1, 2)));
  t.plus = z * (Nz - DiffOp::multiplication(MultiPoly(static_cast<long>(n))));
  return t;
}

std::vector<DiffOp> Gen2D::all() const {
  std::vector<DiffOp> out{Nx, Ny, L0};
  out.insert(out.end(), Lp.begin(), Lp.end());
  out.push_back(Lmn);
  return out;
}

Gen2D make_gen2d(unsigned m, unsigned n) {
  if (m == 0 || n == 0) throw std::invalid_argument("make_gen2d: m and n must be >= 1");
  const MultiPoly x = MultiPoly::var(Var::x);
  const MultiPoly y = MultiPoly::var(Var::y);
  const DiffOp dx = DiffOp::partial(Var::x);
  const DiffOp dy = DiffOp::partial(Var::y);
  Gen2D g;
  g.m = m;
  g.n = n;
  g.Nx = x * dx;
  g.Ny = y * dy;
  g.L0 = dy;
  for (unsigned p = 0; p <= m; ++p) g.Lp.push_back(y.pow(p) * dx);
  const DiffOp inner = scaled(g.Nx, m) + g.Ny -
                       DiffOp::multiplication(MultiPoly(static_cast<long>(m) * static_cast<long>(n)));
  g.Lmn = y * inner;
  return g;
}

DiffOp quadratic_combination(const std::vector<std::vector<Rational>>& C2,
                             const std::vector<Rational>& C1, std::span<const DiffOp> gens) {
  const std::size_t k = gens.size();
  if (C2.size() != k || C1.size() != k)
    throw std::invalid_argument("quadratic_combination: coefficient tables must match the generator list");
  DiffOp out;
  for (std::size_t a = 0; a < k; ++a) {
    if (C2[a].size() != k) throw std::invalid_argument("quadratic_combination: C2 must be square");
    for (std::size_t b = 0; b < k; ++b) {
      const Rational sym = (C2[a][b] + C2[b][a]) / 2;
      if (sym == 0) continue;
      out += scaled(compose(gens[a], gens[b]), sym);
    }
    if (C1[a] != 0) out += scaled(gens[a], C1[a]);
  }
  return out;
}

std::optional<std::vector<Rational>> decompose(const DiffOp& target, std::span<const DiffOp> basis) {
  // One equation per (derivative index, monomial) pair that occurs anywhere.
  std::set<std::pair<DerivIndex, Exponents>> keys;
  auto collect = [&](const DiffOp& op) {
    for (const auto& [d, c] : op.terms())
      for (const auto& [e, v] : c.terms()) keys.emplace(d, e);
  };
  collect(target);
  for (const auto& b : basis) collect(b);
  RatMatrix m(keys.size(), basis.size());
  std::vector<Rational> rhs(keys.size());
  std::size_t row = 0;
  for (const auto& [d, e] : keys) {
    for (std::size_t j = 0; j < basis.size(); ++j) m(row, j) = basis[j].coeff(d).coeff(e);
    rhs[row] = target.coeff(d).coeff(e);
    ++row;
  }
  return solve(std::move(m), rhs);
}

std::string to_string(const DiffOp& op) {
  if (op.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [d, c] : op.terms()) {
    if (!first) out << " + ";
    first = false;
    if (order(d) == 0) {
      out << "(" << to_string(c) << ")";
      continue;
    }
    out << "(" << to_string(c) << ")*D";
    for (std::size_t i = 0; i < kNumVars; ++i)
      for (std::uint32_t k = 0; k < d[i]; ++k) out << var_name(static_cast<Var>(i));
  }
  return out.str();
}

DiffOp parse_diffop(std::string_view text, const std::map<std::string, Rational>& constants) {
  DiffOp op;
  for (const auto& [d, c] : detail::parse_formal(text, constants)) op.add_term(d, c);
  return op;
}

}  // namespace qes
