#include <random>

#include "doctest.h"
#include "modinv/group_action.hpp"

using namespace modinv;

namespace {

Fq random_elem(const GaloisField& F, std::mt19937_64& rng) {
  return F.from_index(static_cast<std::uint32_t>(rng() % F.order()));
}

PolyF var(const VarContext& ctx, const GaloisField& F, std::size_t i) { return PolyF::variable(ctx, FieldRef(F), i); }

Rep2 rep2(const GaloisField& F, std::vector<Fq> basis) { return Rep2{F.characteristic(), FieldRef(F), std::move(basis)}; }
Rep3 rep3(const GaloisField& F, std::vector<Fq> c1, std::vector<Fq> c2) {
  return Rep3{F.characteristic(), FieldRef(F), std::move(c1), std::move(c2)};
}

// Brute force: prod over all F_p-combinations v of (t - v).
PolyF dickson_oracle(std::uint32_t p, std::size_t r) {
  const auto& ctx = dickson_context(r);
  const auto& F = GaloisField::prime(p);
  PolyF prod = PolyF::constant(ctx, FieldRef(F), 1);
  for (auto& a : group_elements(p, r)) {
    PolyF v = var(ctx, F, r);
    for (std::size_t i = 0; i < r; ++i) v -= var(ctx, F, i) * F.from_int(a[i]);
    prod = prod * v;
  }
  return prod;
}

}  // namespace

TEST_CASE("action on variables") {
  const auto& F3 = GaloisField::prime(3);
  auto R = rep2(F3, {F3.one()});
  PolyF x = var(ctx_xy(), F3, 0), y = var(ctx_xy(), F3, 1);
  CHECK(act(y, {1}, R) == y + x);
  auto S = rep3(F3, {F3.one()}, {F3.zero()});
  const auto& c = ctx_xyz();
  PolyF X = var(c, F3, 0), Y = var(c, F3, 1), Z = var(c, F3, 2);
  CHECK(act(Z, {1}, S) == Z + Y * F3.from_int(2) + X);
  PolyF delta = Y * Y - X * Z;
  CHECK(act(delta, {1}, S) == delta);
  CHECK_THROWS_AS(act(Z, {1}, R), Error);
  // right action: acting by g then h equals acting by g+h
  const auto& F = GaloisField::make(3, 3);
  std::mt19937_64 rng(4);
  auto T = rep3(F, {random_elem(F, rng), random_elem(F, rng)}, {random_elem(F, rng), random_elem(F, rng)});
  PolyF f = Z.pow(2) * Y + X.pow(3);
  auto fF = map_coefficients<Fq>(f, c, FieldRef(F), [&](const Fq& a) { return F.from_int(F3.index_of(a)); });
  CHECK(act(act(fF, {1, 2}, T), {2, 2}, T) == act(fF, {0, 1}, T));
}

TEST_CASE("orbit products") {
  const auto& F3 = GaloisField::prime(3);
  auto R = rep2(F3, {F3.one()});
  PolyF x = var(ctx_xy(), F3, 0), y = var(ctx_xy(), F3, 1);
  CHECK(orbit_product(y, R) == y.pow(3) - x.pow(2) * y);
  CHECK(orbit_product(x, R) == x);
  auto S = rep3(F3, {F3.one()}, {F3.zero()});
  const auto& c = ctx_xyz();
  PolyF X = var(c, F3, 0), Y = var(c, F3, 1), Z = var(c, F3, 2);
  PolyF nz = orbit_product(Z, S);
  CHECK(nz == Z * (Z + Y * F3.from_int(2) + X) * (Z + Y + X));
  CHECK(is_invariant(nz, S));
}

TEST_CASE("Dickson invariants") {
  const auto& F2 = GaloisField::prime(2);
  auto d = dickson(2, 2);
  const auto& v = dickson_vars(2);
  PolyF a = var(v, F2, 0), b = var(v, F2, 1);
  CHECK(d[0] == a * a + a * b + b * b);
  CHECK(d[1] == a * a * b + a * b * b);
  const auto& F3 = GaloisField::prime(3);
  auto e = dickson(3, 1);
  CHECK(e[0] == var(dickson_vars(1), F3, 0).pow(2) * F3.from_int(2));
  for (auto [p, r] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {2, 3}, {3, 1}, {3, 2}, {5, 1}, {5, 2}})
    CHECK(dickson_polynomial(p, r) == dickson_oracle(p, r));
}

TEST_CASE("psi_W") {
  const auto& F3 = GaloisField::prime(3);
  CHECK(dickson_values(3, {F3.one()})[0] == F3.from_int(2));
  // W = F_{p^r} inside F_{p^r}
  for (auto [p, r] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {2, 3}, {5, 2}}) {
    const auto& F = GaloisField::make(p, r);
    std::vector<Fq> basis;
    Fq t = F.generator();
    for (int i = 0; i < r; ++i) basis.push_back(t.pow(i));
    auto dv = dickson_values(p, basis);
    for (int i = 0; i + 1 < r; ++i) CHECK(dv[i].is_zero());
    CHECK(dv[r - 1] == F.from_int(-1));
  }
  // invariance under basis change
  const auto& F = GaloisField::make(3, 4);
  std::mt19937_64 rng(2);
  for (int it = 0; it < 20; ++it) {
    Fq a = random_elem(F, rng), b = random_elem(F, rng);
    auto d1 = dickson_values(3, {a, b});
    auto d2 = dickson_values(3, {a + b * F.from_int(2), b + a});
    if (fp_rank({a, b}) < 2) continue;
    CHECK(d1 == d2);
  }
}

TEST_CASE("closed form of N_W(y)") {
  std::mt19937_64 rng(13);
  int checked = 0;
  for (std::uint32_t p : {2u, 3u, 5u})
    for (std::size_t r : {1u, 2u})
      for (std::uint32_t k = static_cast<std::uint32_t>(r); k <= 4; ++k) {
        const auto& F = GaloisField::make(p, k);
        for (int it = 0; it < 3; ++it) {
          std::vector<Fq> basis;
          do {
            basis.clear();
            for (std::size_t i = 0; i < r; ++i) basis.push_back(random_elem(F, rng));
          } while (fp_rank(basis) < r);
          auto R = rep2(F, basis);
          CHECK(nw_closed_form(R) == orbit_product(var(ctx_xy(), F, 1), R));
          ++checked;
        }
      }
  CHECK(checked > 0);
}

TEST_CASE("invariant space oracle") {
  const auto& F3 = GaloisField::prime(3);
  auto S = rep3(F3, {F3.one()}, {F3.zero()});
  CHECK(invariant_space_dim(S, 0) == 1);
  CHECK(invariant_space_dim(S, 1) == 1);
  CHECK(invariant_space_dim(S, 2) == 2);
  auto sp = invariant_space(S, 2, true);
  for (auto& f : sp.basis) CHECK(is_invariant(f, S));
  // removing a generator never shrinks the space
  const auto& F = GaloisField::make(3, 2);
  Fq t = F.generator();
  auto T2 = rep3(F, {F.one(), t}, {F.zero(), F.one()});
  auto T1 = rep3(F, {F.one()}, {F.zero()});
  for (std::uint32_t d = 0; d <= 6; ++d) CHECK(invariant_space_dim(T1, d) >= invariant_space_dim(T2, d));
}

TEST_CASE("type (1,2) invariants are F[x,y,N(z)]") {
  const auto& F = GaloisField::make(3, 2);
  Fq t = F.generator();
  auto one = F.one(), zero = F.zero();
  std::vector<Mat<Fq>> gens{{{one, one, t}, {zero, one, zero}, {zero, zero, one}},
                            {{one, t, one}, {zero, one, zero}, {zero, zero, one}}};
  CHECK(classify_type(gens) == RepType::Type12);
  // |U| = 9: dims of F[x,y,N] with N of degree 9
  for (std::uint32_t d = 0; d <= 18; ++d) {
    std::size_t expect = 0;
    for (std::uint32_t k = 0; 9 * k <= d; ++k) expect += d - 9 * k + 1;
    CHECK(invariant_space_matrices(gens, ctx_xyz(), FieldRef(F), d, false).dimension == expect);
  }
}

TEST_CASE("classification") {
  const auto& F = GaloisField::make(3, 2);
  Fq t = F.generator();
  CHECK(classify_type(rep3(F, {F.zero()}, {t})) == RepType::Type21);
  CHECK(classify_type(rep3(GaloisField::prime(3), {GaloisField::prime(3).one()}, {GaloisField::prime(3).zero()})) ==
        RepType::Type111);
  CHECK(classify_type(rep3(F, {F.zero()}, {F.zero()})) == RepType::Trivial);
  auto one = F.one(), zero = F.zero();
  Mat<Fq> a{{one, one, zero}, {zero, one, zero}, {zero, zero, one}};
  Mat<Fq> b{{one, zero, zero}, {zero, one, one}, {zero, zero, one}};
  CHECK_THROWS_AS(classify_type({a, b}), Error);
  Mat<Fq> c{{t, zero, zero}, {zero, one, zero}, {zero, zero, one}};
  try {
    classify_type({c});
    FAIL("expected NotUnipotent");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotUnipotent);
  }
}

TEST_CASE("faithfulness") {
  const auto& F3 = GaloisField::prime(3);
  CHECK_FALSE(is_faithful(rep2(F3, {F3.one(), F3.from_int(2)})));
  const auto& F9 = GaloisField::make(3, 2);
  CHECK(is_faithful(rep2(F9, {F9.one(), F9.generator()})));
  Fq c23 = F9.generator();
  CHECK_FALSE(is_faithful(rep3(F9, {F9.one(), F9.from_int(2), F9.zero()}, {F9.zero(), F9.zero(), c23})));
}

TEST_CASE("canonical forms") {
  const auto& F = GaloisField::make(3, 2);
  Fq two = F.from_int(2);
  auto R = rep3(F, {two, F.zero()}, {F.zero(), two});
  auto C = canonicalize_rep3(R);
  CHECK(C.alpha == two);
  CHECK(C.rep.c1 == std::vector<Fq>{F.one(), F.zero()});
  CHECK(C.rep.c2[0].is_zero());
  CHECK(C.rep.c2[1] == two * C.alpha * C.alpha);

  Fq t = F.generator();
  auto N = rep3(F, {F.one(), t}, {F.zero(), F.one()});
  auto D = canonicalize_rep3(N);
  CHECK(D.rep.c1 == N.c1);
  CHECK(D.rep.c2 == N.c2);
  CHECK(D.alpha == F.one());
  CHECK(D.gamma.is_zero());

  // the conjugator intertwines the (gamma, alpha) action
  std::mt19937_64 rng(8);
  const auto& G = GaloisField::make(3, 4);
  for (int it = 0; it < 30; ++it) {
    std::vector<Fq> c1{random_elem(G, rng), random_elem(G, rng), random_elem(G, rng)};
    std::vector<Fq> c2{random_elem(G, rng), random_elem(G, rng), random_elem(G, rng)};
    if (c1[0].is_zero() && c1[1].is_zero() && c1[2].is_zero()) continue;
    auto M = rep3(G, c1, c2);
    auto K = canonicalize_rep3(M);
    CHECK(K.rep.c1[0] == G.one());
    CHECK(K.rep.c2[0].is_zero());
    // columns of K.rep equal L * M * Q
    for (std::size_t j = 0; j < 3; ++j) {
      Fq s1 = G.zero(), s2 = G.zero();
      for (std::size_t i = 0; i < 3; ++i) {
        Fq q = G.from_int(K.Q[i][j]);
        auto [a, b] = left_action(K.gamma, K.alpha, c1[i], c2[i]);
        s1 += q * a;
        s2 += q * b;
      }
      CHECK(s1 == K.rep.c1[j]);
      CHECK(s2 == K.rep.c2[j]);
    }
    Mat<Fq> T = K.conjugator;
    CHECK(rank(T) == 3);
    auto s = sigma_matrix(FieldRef(G), c1[0], c2[0]);
    auto [a, b] = left_action(K.gamma, K.alpha, c1[0], c2[0]);
    auto s2 = sigma_matrix(FieldRef(G), a, b);
    CHECK(T * s == s2 * T);
  }
}

TEST_CASE("canonical forms reach degenerate shapes") {
  const auto& F = GaloisField::make(3, 4);
  std::mt19937_64 rng(21);
  for (int it = 0; it < 30; ++it) {
    Fq a = random_elem(F, rng), b = random_elem(F, rng), c = random_elem(F, rng);
    // first row dependent over F_p
    auto M = rep3(F, {F.one(), a, a + F.one()}, {F.zero(), b, c});
    if (fp_rank({F.one(), a}) < 2) continue;
    auto K = canonicalize_rep3(M);
    CHECK(K.form == "row1-reduced");
    CHECK(K.rep.c1[2].is_zero());
    // second row dependent, first row independent
    Fq d = random_elem(F, rng);
    auto N = rep3(F, {F.one(), a, d}, {F.zero(), b, b * F.from_int(2)});
    if (fp_rank({F.one(), a, d}) < 3 || b.is_zero()) continue;
    auto L = canonicalize_rep3(N);
    CHECK(L.form == "row2-reduced");
    CHECK(L.rep.c2[1].is_zero());
  }
}
