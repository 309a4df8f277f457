#include <random>

#include "doctest.h"
#include "modinv/group_action.hpp"
#include "modinv/sagbi.hpp"

using namespace modinv;

namespace {

using GS = GeneratorSetT<Fq>;

Monomial mono(std::uint32_t a, std::uint32_t b, std::uint32_t c = 0) {
  std::uint32_t e[3] = {a, b, c};
  return Monomial::from_exponents(e);
}

struct SymSq {
  const GaloisField& F;
  Rep3 rep;
  PolyF x, y, z, delta, ny, nz;
  explicit SymSq(const GaloisField& f, std::vector<Fq> W)
      : F(f), rep{f.characteristic(), FieldRef(f), W, std::vector<Fq>(W.size(), f.zero())} {
    const auto& c = ctx_xyz();
    FieldRef R(F);
    x = PolyF::variable(c, R, 0);
    y = PolyF::variable(c, R, 1);
    z = PolyF::variable(c, R, 2);
    delta = y * y - x * z;
    ny = orbit_product(y, rep);
    nz = orbit_product(z, rep);
  }
  GS gens() const { return GS({"x", "d", "Ny", "Nz"}, {x, delta, ny, nz}); }
};

}  // namespace

TEST_CASE("tat enumeration") {
  auto t = enumerate_tats({mono(1, 0), mono(0, 2), mono(0, 3), mono(0, 0, 3)}, 36);
  REQUIRE(t.size() == 1);
  CHECK(t[0].I == Exponents{0, 3, 0, 0});
  CHECK(t[0].J == Exponents{0, 0, 2, 0});
  CHECK(t[0].degree == 6);

  auto u = enumerate_tats({mono(1, 0), mono(0, 3), mono(0, 5), mono(0, 0, 9)}, 162);
  REQUIRE(u.size() == 1);
  CHECK(u[0].I == Exponents{0, 5, 0, 0});
  CHECK(u[0].J == Exponents{0, 0, 3, 0});

  CHECK(enumerate_tats({mono(1, 0), mono(0, 1), mono(0, 0, 3)}, 18).empty());

  // rank-3 shape: two pairs, of degrees 18 and 33
  auto w = enumerate_tats({mono(1, 0), mono(0, 6), mono(0, 9), mono(0, 11), mono(0, 0, 27)}, 200);
  REQUIRE(w.size() == 2);
  CHECK(w[0].degree == 18);
  CHECK(w[1].degree == 33);
  CHECK(w[1].J == Exponents{0, 0, 0, 3, 0});
  CHECK(w[1].I == Exponents{0, 1, 3, 0, 0});
}

TEST_CASE("factorization tie-break") {
  LeadFactorizer f({mono(0, 2), mono(0, 3)});
  CHECK(*f.factor(mono(0, 6)) == Exponents{0, 2});
  CHECK(*f.factor(mono(0, 7)) == Exponents{2, 1});
  CHECK_FALSE(f.factor(mono(0, 1)));
  CHECK_FALSE(f.factor(mono(1, 2)));
}

TEST_CASE("subduction") {
  SymSq S(GaloisField::prime(3), {GaloisField::prime(3).one()});
  GS B = S.gens();
  auto c = subduct(S.ny * S.ny, B);
  CHECK(c.remainder.is_zero());
  CHECK(c.steps.size() == 1);
  auto d = subduct(S.delta, B);
  CHECK(d.remainder.is_zero());
  CHECK(d.steps.size() == 1);

  const auto& F = GaloisField::prime(3);
  GS C({"x", "q"}, {S.x, S.y * S.y});
  CHECK(subduct(S.y, C).remainder == S.y);
  (void)F;
}

TEST_CASE("symmetric square certificate and relation") {
  const auto& F = GaloisField::prime(3);
  SymSq S(F, {F.one()});
  GS B = S.gens();
  auto cert = sagbi_test(B);
  CHECK(cert.passed);
  REQUIRE(cert.tats.size() == 1);
  auto rels = extract_relations(cert, B);
  REQUIRE(rels.size() == 1);
  CHECK(evaluate_relation(rels[0], B).is_zero());
  CHECK(relation_degree(rels[0], B) == 6);
  // expected: d^3 - Ny^2 + x^3 Nz + x^2 d^2 + x^4 d
  const auto& sym = B.symbols();
  FieldRef R(F);
  auto v = [&](std::size_t i) { return PolyF::variable(sym, R, i); };
  PolyF expect = v(1).pow(3) - v(2).pow(2) + v(0).pow(3) * v(3) + v(0).pow(2) * v(1).pow(2) + v(0).pow(4) * v(1);
  CHECK(rels[0] == expect);

  // without x the pair does not subduct
  GS noX({"d", "Ny", "Nz"}, {S.delta, S.ny, S.nz});
  auto bad = sagbi_test(noX);
  CHECK_FALSE(bad.passed);

  GS tiny({"x", "u", "q"}, {S.x, S.y + S.x, S.y * S.y});
  CHECK(sagbi_test(tiny).passed);

  auto res = sagbi_divide_by_x(B);
  CHECK(res.adjoined.empty());
  CHECK(res.B.size() == 4);

  GS missing({"x", "d", "Ny"}, {S.x, S.delta, S.ny});
  try {
    sagbi_divide_by_x(missing);
    FAIL("expected HypothesisViolation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::HypothesisViolation);
  }
}

TEST_CASE("lead-term algebra counts match invariant dimensions") {
  const auto& F = GaloisField::prime(3);
  SymSq S(F, {F.one()});
  auto counts = lead_algebra_counts(S.gens().lead_monomials(), 12);
  for (std::uint32_t d = 0; d <= 12; ++d) CHECK(counts[d] == invariant_space_dim(S.rep, d));
  // dropping N(z) loses a monomial first in degree p
  auto less = lead_algebra_counts({mono(1, 0), mono(0, 2), mono(0, 3)}, 3);
  CHECK(less[3] + 1 == invariant_space_dim(S.rep, 3));
}

TEST_CASE("tail coefficient solver") {
  const auto& F = GaloisField::prime(5);
  SymSq S(F, {F.one()});
  std::vector<Monomial> ideal{mono(3, 0)};
  CHECK(solve_tail_coefficients<Fq>(S.y * S.y, {}, S.y * S.y, ideal).empty());
  PolyF base = S.y.pow(3);
  PolyF target = S.y.pow(3) + S.x * S.y * S.y * F.from_int(2) - S.x * S.x * S.z * F.from_int(3);
  auto c = solve_tail_coefficients<Fq>(base, {S.x * S.y * S.y, S.x * S.x * S.z}, target, ideal);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == F.from_int(2));
  CHECK(c[1] == F.from_int(-3));
  CHECK_THROWS_AS(solve_tail_coefficients<Fq>(base, {S.x * S.y * S.y}, target, ideal), Error);
  CHECK_THROWS_AS(solve_tail_coefficients<Fq>(base, {S.x * S.y * S.y, S.x * S.y * S.y}, base, ideal), Error);
}

TEST_CASE("subduction soundness on random inputs") {
  const auto& F = GaloisField::make(3, 2);
  SymSq S(F, {F.one(), F.generator()});
  GS B = S.gens();
  std::mt19937_64 rng(3);
  LeadFactorizer fac(B.lead_monomials());
  PowerProducts<Fq> prods(B);
  for (int it = 0; it < 200; ++it) {
    std::uint32_t deg = 2 + rng() % 10;
    PolyF f(ctx_xyz(), FieldRef(F));
    for (auto& m : monomials_of_degree(3, deg))
      if (rng() % 4 == 0) f += PolyF::monomial(ctx_xyz(), FieldRef(F), m, F.from_index(rng() % 9));
    auto cert = subduct(f, B, fac, prods);
    PolyF acc = cert.remainder;
    for (auto& s : cert.steps) acc += prods.get(s.a) * s.coeff;
    CHECK(acc == f);
    if (!cert.remainder.is_zero()) CHECK_FALSE(fac.factor(cert.remainder.lm()));
  }
}
