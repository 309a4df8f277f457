#pragma once

// Representations of (Z/p)^r in dimensions 2 and 3 and the induced right
// action on F[x,y] / F[x,y,z].

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modinv/field.hpp"
#include "modinv/matrix.hpp"
#include "modinv/poly.hpp"

namespace modinv {

using PolyF = Polynomial<Fq>;
using GroupElement = std::vector<std::uint32_t>;

const VarContext& ctx_xy();
const VarContext& ctx_xyz();

template <class C, class R>
Mat<C> rho_matrix(const R& ring, const C& c) {
  return {{ring.one(), c}, {ring.zero(), ring.one()}};
}

template <class C, class R>
Mat<C> sigma_matrix(const R& ring, const C& c1, const C& c2) {
  return {{ring.one(), ring.from_int(2) * c1, c1 * c1 + c2}, {ring.zero(), ring.one(), c1},
          {ring.zero(), ring.zero(), ring.one()}};
}

/// e_i -> rho(c_i).
template <class C>
struct Rep2T {
  std::uint32_t p = 0;
  typename C::Ring ring{};
  std::vector<C> basis;

  std::size_t rank() const { return basis.size(); }
  const VarContext& context() const { return ctx_xy(); }
  C image(const GroupElement& a) const {
    C c = ring.zero();
    for (std::size_t i = 0; i < basis.size(); ++i) c += ring.from_int(a[i]) * basis[i];
    return c;
  }
  Mat<C> matrix(const GroupElement& a) const { return rho_matrix(ring, image(a)); }
  Mat<C> generator(std::size_t i) const { return rho_matrix(ring, basis.at(i)); }
};

/// e_i -> sigma(c_1i, c_2i); M given row-wise.
template <class C>
struct Rep3T {
  std::uint32_t p = 0;
  typename C::Ring ring{};
  std::vector<C> c1, c2;

  std::size_t rank() const { return c1.size(); }
  const VarContext& context() const { return ctx_xyz(); }
  std::pair<C, C> image(const GroupElement& a) const {
    C s = ring.zero(), t = ring.zero();
    for (std::size_t i = 0; i < c1.size(); ++i) {
      C k = ring.from_int(a[i]);
      s += k * c1[i];
      t += k * c2[i];
    }
    return {s, t};
  }
  Mat<C> matrix(const GroupElement& a) const {
    auto [s, t] = image(a);
    return sigma_matrix(ring, s, t);
  }
  Mat<C> generator(std::size_t i) const { return sigma_matrix(ring, c1.at(i), c2.at(i)); }
};

using Rep2 = Rep2T<Fq>;
using Rep3 = Rep3T<Fq>;

/// All elements of (Z/p)^r in lexicographic order (identity first).
std::vector<GroupElement> group_elements(std::uint32_t p, std::size_t r);

template <class C, class Rep>
Polynomial<C> act(const Polynomial<C>& f, const GroupElement& g, const Rep& rep) {
  if (&f.context() != &rep.context()) fail(Errc::ContextMismatch, "polynomial not in the representation's ring");
  return substitute_linear(f, rep.matrix(g));
}

template <class C, class Rep>
Polynomial<C> act_generator(const Polynomial<C>& f, std::size_t i, const Rep& rep) {
  if (&f.context() != &rep.context()) fail(Errc::ContextMismatch, "polynomial not in the representation's ring");
  return substitute_linear(f, rep.generator(i));
}

template <class C, class Rep>
bool is_invariant(const Polynomial<C>& f, const Rep& rep) {
  for (std::size_t i = 0; i < rep.rank(); ++i)
    if (act_generator(f, i, rep) != f) return false;
  return true;
}

/// Distinct elements of the orbit of f.
template <class C, class Rep>
std::vector<Polynomial<C>> orbit(const Polynomial<C>& f, const Rep& rep) {
  std::vector<Polynomial<C>> out;
  for (const auto& g : group_elements(rep.p, rep.rank())) {
    Polynomial<C> img = act(f, g, rep);
    bool seen = false;
    for (const auto& o : out)
      if (o == img) {
        seen = true;
        break;
      }
    if (!seen) out.push_back(std::move(img));
  }
  return out;
}

/// Product of the distinct orbit elements, optionally modulo a monomial ideal.
template <class C, class Rep>
Polynomial<C> orbit_product(const Polynomial<C>& f, const Rep& rep, std::span<const Monomial> ideal = {}) {
  if (f.is_zero()) fail(Errc::ZeroPolynomial, "orbit product of zero");
  auto orb = orbit(f, rep);
  Polynomial<C> prod = orb[0];
  for (std::size_t i = 1; i < orb.size(); ++i) prod = prod.multiply(orb[i], ideal);
  return prod;
}

/// Context t, x1..xr used for D(t); x1 is variable 0, t is variable r.
const VarContext& dickson_context(std::size_t r);

/// D(t) = prod_{v in span(x1..xr)} (t - v), built by the additive recursion.
PolyF dickson_polynomial(std::uint32_t p, std::size_t r);

/// d_1..d_r (index 0 holds d_1) as polynomials in x1..xr (context "x1".."xr").
std::vector<PolyF> dickson(std::uint32_t p, std::size_t r);

const VarContext& dickson_vars(std::size_t r);

Fq psi_W(const PolyF& d, const std::vector<Fq>& basis);

/// d_1(W)..d_r(W) for the span of `basis`.
std::vector<Fq> dickson_values(std::uint32_t p, const std::vector<Fq>& basis);

/// y^{p^r} + sum_i d_{r-i}(W) y^{p^i} x^{p^r-p^i}.
PolyF nw_closed_form(const Rep2& rep);

struct InvariantSpace {
  std::size_t dimension = 0;
  std::vector<PolyF> basis;
};

/// Degree-d invariants by solving (g-1)f = 0 for every generator.
template <class Rep>
InvariantSpace invariant_space(const Rep& rep, std::uint32_t d, bool want_basis = false);

template <class Rep>
std::size_t invariant_space_dim(const Rep& rep, std::uint32_t d) {
  return invariant_space(rep, d, false).dimension;
}

/// Invariant-space computation for arbitrary commuting generator matrices.
InvariantSpace invariant_space_matrices(const std::vector<Mat<Fq>>& gens, const VarContext& ctx,
                                        const FieldRef& ring, std::uint32_t d, bool want_basis);

enum class RepType { Trivial, Type21, Type12, Type111 };
std::string type_name(RepType t);

/// Socle-series type of commuting unipotent 3x3 matrices.
RepType classify_type(const std::vector<Mat<Fq>>& gens);
RepType classify_type(const Rep3& rep);

bool is_faithful(const Rep2& rep);
bool is_faithful(const Rep3& rep);

/// F_p-dimension of the span of the given field elements.
std::size_t fp_rank(const std::vector<Fq>& elems);
/// Coefficients a in F_p with v = sum a_i basis_i, if v lies in the span.
std::optional<std::vector<std::uint32_t>> fp_coordinates(const std::vector<Fq>& basis, const Fq& v);

struct Canonical3 {
  Rep3 rep;                 // normal form
  Fq gamma, alpha;          // left action (gamma, alpha)
  std::vector<std::vector<std::uint32_t>> Q;  // right GL_r(F_p) matrix, r x r
  Mat<Fq> conjugator;       // T with T sigma(c) T^{-1} = sigma((gamma,alpha).c)
  std::size_t effective_rank = 0;  // number of nonzero columns
  std::string form;         // "column1", "row1-reduced", "row2-reduced"
};

enum class CanonicalTarget { Auto, Row1, Row2 };

/// Normal form: first column (1,0)^T, then F_p column reductions.
/// Row1 clears F_p-dependent first-row entries (zero columns moved last);
/// Row2 clears an F_p-dependent second-row entry into column 2.
Canonical3 canonicalize_rep3(const Rep3& rep, CanonicalTarget target = CanonicalTarget::Auto);

/// The (gamma, alpha) action on a column.
std::pair<Fq, Fq> left_action(const Fq& gamma, const Fq& alpha, const Fq& c1, const Fq& c2);

}  // namespace modinv
