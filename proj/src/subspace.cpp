#include "qes/subspace.hpp"

#include <algorithm>
#include <sstream>

namespace qes {

MonomialSpace::MonomialSpace(SpaceKind kind, unsigned m, unsigned n, std::vector<Exponents> basis)
    : kind_(kind), m_(m), n_(n), basis_(std::move(basis)) {
  for (std::size_t i = 0; i < basis_.size(); ++i) index_.emplace(basis_[i], i);
}

MonomialSpace MonomialSpace::one_d(unsigned n) {
  std::vector<Exponents> b;
  for (std::uint32_t k = 0; k <= n; ++k) b.push_back({0, 0, k});
  return MonomialSpace(SpaceKind::OneD, 1, n, std::move(b));
}

MonomialSpace MonomialSpace::two_d(unsigned m, unsigned n) {
  if (m == 0 || n == 0) throw std::invalid_argument("two-variable module needs m >= 1 and n >= 1");
  std::vector<Exponents> b;
  for (std::uint32_t a = 0; a <= n; ++a)
    for (std::uint32_t c = 0; m * a + c <= m * n; ++c) b.push_back({a, c, 0});
  // Weighted degree m*a + b first (x carries weight m), then lex with x
  // most significant; for m = 1 this is plain graded lex.
  std::sort(b.begin(), b.end(), [m](const Exponents& l, const Exponents& r) {
    const auto wl = m * l[0] + l[1];
    const auto wr = m * r[0] + r[1];
    if (wl != wr) return wl < wr;
    return l < r;
  });
  return MonomialSpace(SpaceKind::TwoD, m, n, std::move(b));
}

MonomialSpace MonomialSpace::box(unsigned max_x, unsigned max_y) {
  std::vector<Exponents> b;
  for (std::uint32_t a = 0; a <= max_x; ++a)
    for (std::uint32_t c = 0; c <= max_y; ++c) b.push_back({a, c, 0});
  std::sort(b.begin(), b.end(), graded_lex_less);
  return MonomialSpace(SpaceKind::Box, max_x, max_y, std::move(b));
}

bool MonomialSpace::contains(const Exponents& e) const { return index_.count(e) > 0; }

std::optional<std::size_t> MonomialSpace::index_of(const Exponents& e) const {
  auto it = index_.find(e);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string MonomialSpace::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case SpaceKind::OneD: out << "F_" << n_ << " (z^k, k <= " << n_ << ")"; break;
    case SpaceKind::TwoD:
      out << "F_{" << m_ << "," << n_ << "} (x^a y^b, " << m_ << "a+b <= " << m_ * n_ << ")";
      break;
    case SpaceKind::Box: out << "box (x^a y^b, a <= " << m_ << ", b <= " << n_ << ")"; break;
  }
  return out.str();
}

MonomialSpace basis(unsigned m, unsigned n) { return MonomialSpace::two_d(m, n); }

std::size_t dim_formula(unsigned m, unsigned n) {
  return static_cast<std::size_t>(n + 1) + static_cast<std::size_t>(m) * n * (n + 1) / 2;
}

namespace {

std::string monomial_text(const Exponents& e) { return to_string(MultiPoly::monomial(e)); }

std::optional<InvarianceWitness> first_escape(const Exponents& source, const MultiPoly& image,
                                              const MonomialSpace& space) {
  // Report the largest offending term so the witness is stable.
  for (const auto& [e, c] : image.terms())
    if (!space.contains(e)) return InvarianceWitness{source, e, c};
  return std::nullopt;
}

}  // namespace

InvarianceResult is_invariant(const DiffOp& op, const MonomialSpace& space) {
  for (const auto& b : space.basis()) {
    const MultiPoly image = apply(op, MultiPoly::monomial(b));
    if (auto w = first_escape(b, image, space)) return {false, w};
  }
  return {};
}

std::string describe(const InvarianceWitness& w) {
  return "image of " + monomial_text(w.source) + " contains " + to_string(w.coeff) + "*" +
         monomial_text(w.image_term) + " outside the space";
}

NotInvariant::NotInvariant(InvarianceWitness w) : std::runtime_error(describe(w)), w_(std::move(w)) {}

RatMatrix matrix_of_serial(const DiffOp& op, const MonomialSpace& space) {
  const std::size_t d = space.dim();
  RatMatrix out(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    const MultiPoly image = apply(op, MultiPoly::monomial(space.basis()[j]));
    for (const auto& [e, c] : image.terms()) {
      auto i = space.index_of(e);
      if (!i) throw NotInvariant({space.basis()[j], e, c});
      out(*i, j) = c;
    }
  }
  return out;
}

RatMatrix matrix_of(const DiffOp& op, const MonomialSpace& space) {
  const std::size_t d = space.dim();
  const auto n = static_cast<long>(d);
  RatMatrix out(d, d);
  std::vector<std::optional<InvarianceWitness>> escapes(d);
  // Each column writes only its own entries; the operator is read-only.
#pragma omp parallel for schedule(dynamic)
  for (long jj = 0; jj < n; ++jj) {
    const auto j = static_cast<std::size_t>(jj);
    const MultiPoly image = apply(op, MultiPoly::monomial(space.basis()[j]));
    for (const auto& [e, c] : image.terms()) {
      auto i = space.index_of(e);
      if (!i) {
        escapes[j] = InvarianceWitness{space.basis()[j], e, c};
        break;
      }
      out(*i, j) = c;
    }
  }
  for (const auto& w : escapes)
    if (w) throw NotInvariant(*w);
  return out;
}

}  // namespace qes
