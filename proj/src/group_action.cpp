#include "modinv/group_action.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <unordered_map>

namespace modinv {

const VarContext& ctx_xy() { return VarContext::make({"x", "y"}); }
const VarContext& ctx_xyz() { return VarContext::make({"x", "y", "z"}); }

std::vector<GroupElement> group_elements(std::uint32_t p, std::size_t r) {
  std::vector<GroupElement> out;
  GroupElement a(r, 0);
  while (true) {
    out.push_back(a);
    std::size_t i = r;
    while (i > 0) {
      --i;
      if (++a[i] < p) break;
      a[i] = 0;
      if (i == 0) return out;
    }
    if (r == 0) return out;
  }
}

const VarContext& dickson_vars(std::size_t r) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= r; ++i) names.push_back("x" + std::to_string(i));
  return VarContext::make(names);
}

const VarContext& dickson_context(std::size_t r) {
  std::vector<std::string> names = dickson_vars(r).names();
  names.push_back("t");
  return VarContext::make(names);
}

PolyF dickson_polynomial(std::uint32_t p, std::size_t r) {
  const auto& ctx = dickson_context(r);
  FieldRef R(GaloisField::prime(p));
  PolyF D = PolyF::variable(ctx, R, r);
  for (std::size_t i = 0; i < r; ++i) {
    std::vector<PolyF> images;
    for (std::size_t v = 0; v <= r; ++v) images.push_back(PolyF::variable(ctx, R, v == r ? i : v));
    PolyF at_w = compose(D, images);
    D = D.pow(p) - at_w.pow(p - 1) * D;
  }
  return D;
}

std::vector<PolyF> dickson(std::uint32_t p, std::size_t r) {
  PolyF D = dickson_polynomial(p, r);
  const auto& out_ctx = dickson_vars(r);
  FieldRef R(GaloisField::prime(p));
  std::vector<std::vector<PolyF::Term>> parts(r);
  for (auto& t : D.terms()) {
    std::uint32_t e = t.m[r];
    std::uint64_t q = 1;
    std::size_t i = 0;
    while (q < e) {
      q *= p;
      ++i;
    }
    if (q != e) fail(Errc::InvalidInput, "Dickson polynomial is not additive");
    if (i == r) continue;
    Monomial m = t.m;
    m.set(r, 0);
    parts[r - 1 - i].push_back({m, t.c});
  }
  std::vector<PolyF> d;
  for (auto& ts : parts) d.push_back(PolyF::from_terms(out_ctx, R, ts));
  return d;
}

Fq psi_W(const PolyF& d, const std::vector<Fq>& basis) {
  if (basis.size() != d.context().size()) fail(Errc::ContextMismatch, "basis length differs from variable count");
  const GaloisField& F = basis[0].field();
  Fq s = F.zero();
  for (auto& t : d.terms()) {
    Fq v = F.from_int(t.c.field().index_of(t.c));
    for (std::size_t i = 0; i < basis.size(); ++i)
      if (t.m[i]) v *= basis[i].pow(t.m[i]);
    s += v;
  }
  return s;
}

std::vector<Fq> dickson_values(std::uint32_t p, const std::vector<Fq>& basis) {
  std::vector<Fq> out;
  for (auto& d : dickson(p, basis.size())) out.push_back(psi_W(d, basis));
  return out;
}

PolyF nw_closed_form(const Rep2& rep) {
  const std::size_t r = rep.rank();
  const auto& ctx = ctx_xy();
  auto dv = dickson_values(rep.p, rep.basis);
  std::uint32_t pr = 1;
  for (std::size_t i = 0; i < r; ++i) pr *= rep.p;
  std::vector<PolyF::Term> ts;
  std::uint32_t e[2] = {0, pr};
  ts.push_back({Monomial::from_exponents(e), rep.ring.one()});
  std::uint32_t pi = 1;
  for (std::size_t i = 0; i < r; ++i, pi *= rep.p) {
    const Fq& c = dv[r - i - 1];
    if (c.is_zero()) continue;
    std::uint32_t f[2] = {pr - pi, pi};
    ts.push_back({Monomial::from_exponents(f), c});
  }
  return PolyF::from_terms(ctx, rep.ring, ts);
}

InvariantSpace invariant_space_matrices(const std::vector<Mat<Fq>>& gens, const VarContext& ctx,
                                        const FieldRef& ring, std::uint32_t d, bool want_basis) {
  auto monos = monomials_of_degree(ctx.size(), d);
  const std::size_t n = monos.size();
  std::unordered_map<Monomial, std::size_t, MonomialHash> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(monos[i], i);
  Mat<Fq> rows;
  for (auto& g : gens) {
    Mat<Fq> block(n, std::vector<Fq>(n, ring.zero()));
    for (std::size_t j = 0; j < n; ++j) {
      PolyF img = substitute_linear(PolyF::monomial(ctx, ring, monos[j], ring.one()), g);
      for (auto& t : img.terms()) block[index.at(t.m)][j] += t.c;
      block[j][j] -= ring.one();
    }
    for (auto& row : block) rows.push_back(std::move(row));
  }
  InvariantSpace out;
  auto ker = kernel(rows, n, ring);
  out.dimension = ker.size();
  if (want_basis) {
    for (auto& v : ker) {
      std::vector<PolyF::Term> ts;
      for (std::size_t j = 0; j < n; ++j)
        if (!v[j].is_zero()) ts.push_back({monos[j], v[j]});
      out.basis.push_back(PolyF::from_terms(ctx, ring, ts));
    }
  }
  return out;
}

template <class Rep>
InvariantSpace invariant_space(const Rep& rep, std::uint32_t d, bool want_basis) {
  std::vector<Mat<Fq>> gens;
  for (std::size_t i = 0; i < rep.rank(); ++i) gens.push_back(rep.generator(i));
  return invariant_space_matrices(gens, rep.context(), rep.ring, d, want_basis);
}

template InvariantSpace invariant_space<Rep2>(const Rep2&, std::uint32_t, bool);
template InvariantSpace invariant_space<Rep3>(const Rep3&, std::uint32_t, bool);

std::string type_name(RepType t) {
  switch (t) {
    case RepType::Trivial: return "trivial";
    case RepType::Type21: return "type21";
    case RepType::Type12: return "type12";
    case RepType::Type111: return "type111";
  }
  return "unknown";
}

RepType classify_type(const std::vector<Mat<Fq>>& gens) {
  if (gens.empty()) return RepType::Trivial;
  FieldRef R = gens[0][0][0].ring();
  const std::size_t n = gens[0].size();
  if (n != 3) fail(Errc::InvalidInput, "classification needs 3x3 matrices");
  auto I = identity_matrix(R, n);
  std::vector<Mat<Fq>> nil;
  for (auto& g : gens) {
    Mat<Fq> a = g - I;
    if (!is_zero_matrix(matrix_power(a, 3))) fail(Errc::NotUnipotent, "generator is not unipotent");
    nil.push_back(std::move(a));
  }
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j)
      if (gens[i] * gens[j] != gens[j] * gens[i]) fail(Errc::NonCommuting, "generators do not commute");
  Mat<Fq> stack1, stack2;
  for (auto& a : nil)
    for (auto& row : a) stack1.push_back(row);
  for (auto& a : nil)
    for (auto& b : nil)
      for (auto& row : b * a) stack2.push_back(row);
  std::size_t fixed = n - rank(stack1);
  std::size_t w2 = n - rank(stack2);
  if (fixed == 3) return RepType::Trivial;
  if (fixed == 2) return RepType::Type21;
  if (fixed == 1 && w2 == 3) return RepType::Type12;
  return RepType::Type111;
}

RepType classify_type(const Rep3& rep) {
  std::vector<Mat<Fq>> gens;
  for (std::size_t i = 0; i < rep.rank(); ++i) gens.push_back(rep.generator(i));
  return classify_type(gens);
}

namespace {

// Coordinates of a over F_p, as prime-field elements.
std::vector<Fq> fp_vector(const Fq& a) {
  const GaloisField& F = a.field();
  const GaloisField& P = GaloisField::prime(F.characteristic());
  std::vector<Fq> v;
  for (auto c : F.residues(a)) v.push_back(P.from_int(c));
  return v;
}

bool nonidentity_kernel(std::uint32_t p, std::size_t r, const std::function<bool(const GroupElement&)>& is_id) {
  for (const auto& g : group_elements(p, r)) {
    bool zero = std::all_of(g.begin(), g.end(), [](std::uint32_t v) { return v == 0; });
    if (!zero && is_id(g)) return true;
  }
  return false;
}

}  // namespace

std::size_t fp_rank(const std::vector<Fq>& elems) {
  if (elems.empty()) return 0;
  Mat<Fq> m;
  for (auto& e : elems) m.push_back(fp_vector(e));
  return rank(m);
}

std::optional<std::vector<std::uint32_t>> fp_coordinates(const std::vector<Fq>& basis, const Fq& v) {
  const GaloisField& P = GaloisField::prime(v.field().characteristic());
  const std::size_t k = v.field().degree();
  const std::size_t n = basis.size();
  // columns: basis elements, then v
  Mat<Fq> m(k, std::vector<Fq>(n + 1, P.zero()));
  for (std::size_t j = 0; j < n; ++j) {
    auto c = fp_vector(basis[j]);
    for (std::size_t i = 0; i < k; ++i) m[i][j] = c[i];
  }
  auto c = fp_vector(v);
  for (std::size_t i = 0; i < k; ++i) m[i][n] = c[i];
  auto piv = rref(m);
  if (!piv.empty() && piv.back() == n) return std::nullopt;
  std::vector<std::uint32_t> out(n, 0);
  for (std::size_t i = 0; i < piv.size(); ++i) out[piv[i]] = P.index_of(m[i][n]);
  return out;
}

bool is_faithful(const Rep2& rep) {
  return !nonidentity_kernel(rep.p, rep.rank(), [&](const GroupElement& g) { return rep.image(g).is_zero(); });
}

bool is_faithful(const Rep3& rep) {
  return !nonidentity_kernel(rep.p, rep.rank(), [&](const GroupElement& g) {
    auto [a, b] = rep.image(g);
    return a.is_zero() && b.is_zero();
  });
}

std::pair<Fq, Fq> left_action(const Fq& gamma, const Fq& alpha, const Fq& c1, const Fq& c2) {
  return {alpha * c1, alpha * gamma * c1 + alpha * alpha * c2};
}

namespace {

struct ColumnState {
  std::uint32_t p;
  std::vector<Fq> c1, c2;
  std::vector<std::vector<std::int64_t>> Q;  // columns of Q track the column operations

  void swap_cols(std::size_t a, std::size_t b) {
    std::swap(c1[a], c1[b]);
    std::swap(c2[a], c2[b]);
    for (auto& row : Q) std::swap(row[a], row[b]);
  }
  // column j -= k * column i
  void sub_col(std::size_t j, std::size_t i, std::uint32_t k) {
    if (k == 0) return;
    const GaloisField& F = c1[0].field();
    Fq kk = F.from_int(k);
    c1[j] -= kk * c1[i];
    c2[j] -= kk * c2[i];
    for (auto& row : Q) row[j] = ((row[j] - static_cast<std::int64_t>(k) * row[i]) % p + p) % p;
  }
  // stable move of column j to position pos (pos <= j)
  void move_col(std::size_t j, std::size_t pos) {
    for (std::size_t k = j; k > pos; --k) swap_cols(k, k - 1);
  }
};

// Clears F_p-dependent entries of `row` among the columns in `cols`; returns
// the columns that were cleared.
std::vector<std::size_t> fp_reduce_row(ColumnState& s, bool second_row, const std::vector<std::size_t>& cols) {
  std::vector<std::size_t> indep, cleared;
  for (std::size_t j : cols) {
    auto& row = second_row ? s.c2 : s.c1;
    if (row[j].is_zero()) {
      cleared.push_back(j);
      continue;
    }
    std::vector<Fq> b;
    for (auto i : indep) b.push_back(row[i]);
    auto coords = b.empty() ? std::nullopt : fp_coordinates(b, row[j]);
    if (!coords) {
      indep.push_back(j);
      continue;
    }
    for (std::size_t t = 0; t < indep.size(); ++t) s.sub_col(j, indep[t], (*coords)[t]);
    cleared.push_back(j);
  }
  return cleared;
}

}  // namespace

Canonical3 canonicalize_rep3(const Rep3& rep, CanonicalTarget target) {
  const std::size_t r = rep.rank();
  const GaloisField& F = rep.ring.field();
  ColumnState s{rep.p, rep.c1, rep.c2, {}};
  s.Q.assign(r, std::vector<std::int64_t>(r, 0));
  for (std::size_t i = 0; i < r; ++i) s.Q[i][i] = 1;

  std::size_t piv = r;
  for (std::size_t j = 0; j < r; ++j)
    if (!s.c1[j].is_zero()) {
      piv = j;
      break;
    }
  if (piv == r) fail(Errc::NotType111, "no column has a nonzero first entry");
  s.move_col(piv, 0);

  Fq alpha = s.c1[0].inverse();
  Fq gamma = -(alpha * s.c2[0] / s.c1[0]);
  for (std::size_t j = 0; j < r; ++j) std::tie(s.c1[j], s.c2[j]) = left_action(gamma, alpha, s.c1[j], s.c2[j]);

  Canonical3 out;
  out.form = "column1";
  std::vector<std::size_t> rest;
  for (std::size_t j = 1; j < r; ++j) rest.push_back(j);

  auto first_row_dependent = [&]() { return fp_rank(s.c1) < r; };
  bool row1 = target == CanonicalTarget::Row1 || (target == CanonicalTarget::Auto && first_row_dependent());
  if (row1) {
    std::vector<std::size_t> all(r);
    std::iota(all.begin(), all.end(), 0);
    fp_reduce_row(s, false, all);
    // nonzero first-row columns first, then the rest, stably
    std::size_t pos = 0;
    for (std::size_t j = 0; j < r; ++j)
      if (!s.c1[j].is_zero()) s.move_col(j, pos++);
    std::vector<std::size_t> tail;
    for (std::size_t j = pos; j < r; ++j) tail.push_back(j);
    fp_reduce_row(s, true, tail);
    std::size_t q = pos;
    for (std::size_t j = pos; j < r; ++j)
      if (!s.c2[j].is_zero()) s.move_col(j, q++);
    out.form = "row1-reduced";
  } else if (target == CanonicalTarget::Row2 || target == CanonicalTarget::Auto) {
    std::vector<Fq> second(s.c2.begin() + 1, s.c2.end());
    if (target == CanonicalTarget::Row2 || fp_rank(second) < r - 1) {
      auto cleared = fp_reduce_row(s, true, rest);
      std::size_t pos = 1;
      for (std::size_t j : cleared) s.move_col(j, pos++);
      out.form = "row2-reduced";
    }
  }

  out.rep = rep;
  out.rep.c1 = s.c1;
  out.rep.c2 = s.c2;
  out.gamma = gamma;
  out.alpha = alpha;
  out.Q.assign(r, std::vector<std::uint32_t>(r, 0));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) out.Q[i][j] = static_cast<std::uint32_t>(s.Q[i][j]);
  out.effective_rank = 0;
  for (std::size_t j = 0; j < r; ++j)
    if (!s.c1[j].is_zero() || !s.c2[j].is_zero()) ++out.effective_rank;
  // T = diag(alpha^2, alpha, 1) with T[0][1] = gamma*alpha
  out.conjugator = {{alpha * alpha, gamma * alpha, F.zero()}, {F.zero(), alpha, F.zero()}, {F.zero(), F.zero(), F.one()}};
  return out;
}

}  // namespace modinv
