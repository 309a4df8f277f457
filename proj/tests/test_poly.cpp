#include <random>

#include "doctest.h"
#include "modinv/field.hpp"
#include "modinv/poly.hpp"

using namespace modinv;

namespace {

using P = Polynomial<Fq>;

struct Xyz {
  const GaloisField& F;
  const VarContext& ctx = VarContext::make({"x", "y", "z"});
  FieldRef R{F};
  explicit Xyz(const GaloisField& f) : F(f) {}
  P x() const { return P::variable(ctx, R, 0); }
  P y() const { return P::variable(ctx, R, 1); }
  P z() const { return P::variable(ctx, R, 2); }
  P c(std::int64_t n) const { return P::constant(ctx, R, n); }
  P k(const Fq& a) const { return P::constant(ctx, R, a); }
};

Monomial mono(std::uint32_t a, std::uint32_t b, std::uint32_t c = 0) {
  std::uint32_t e[3] = {a, b, c};
  return Monomial::from_exponents(e);
}

P random_poly(const Xyz& S, std::mt19937_64& rng, int terms, int maxdeg, bool homogeneous) {
  std::vector<P::Term> ts;
  int d = 1 + static_cast<int>(rng() % maxdeg);
  for (int i = 0; i < terms; ++i) {
    int deg = homogeneous ? d : static_cast<int>(rng() % (maxdeg + 1));
    std::uint32_t a = static_cast<std::uint32_t>(rng() % (deg + 1));
    std::uint32_t b = static_cast<std::uint32_t>(rng() % (deg - a + 1));
    ts.push_back({mono(a, b, deg - a - b), S.F.from_index(static_cast<std::uint32_t>(rng() % S.F.order()))});
  }
  return P::from_terms(S.ctx, S.R, ts);
}

}  // namespace

TEST_CASE("grevlex comparisons") {
  const auto& ctx = VarContext::make({"x", "y", "z"});
  CHECK(grevlex_compare(ctx, mono(0, 2), ctx, mono(1, 0, 1)) == Ordering::GT);
  CHECK(grevlex_compare(ctx, mono(2, 0), ctx, mono(0, 3)) == Ordering::LT);
  CHECK(grevlex_less(mono(2, 0), mono(1, 1)));
  CHECK(grevlex_less(mono(1, 1), mono(0, 2)));
  const auto& other = VarContext::make({"x", "y"});
  CHECK_THROWS_AS(grevlex_compare(ctx, mono(1, 0), other, mono(1, 0)), Error);
}

TEST_CASE("lead terms") {
  Xyz S(GaloisField::prime(3));
  P delta = S.y() * S.y() - S.x() * S.z();
  CHECK(delta.lm() == mono(0, 2));
  CHECK(delta.lc() == S.F.one());
  CHECK(delta.to_string() == "y^2 - x*z");
  P nw = S.y().pow(3) - S.y() * S.x().pow(2);
  CHECK(nw.lm() == mono(0, 3));
  Xyz S5(GaloisField::prime(5));
  P f = S5.x() * S5.F.from_int(5);
  CHECK(f.is_zero());
  try {
    (void)f.lm();
    FAIL("expected ZeroPolynomial");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroPolynomial);
  }
}

TEST_CASE("arithmetic") {
  Xyz S(GaloisField::prime(3));
  CHECK((S.y() + S.x()) * (S.y() - S.x()) == S.y().pow(2) - S.x().pow(2));
  CHECK((S.y() + S.x()).pow(3) == S.y().pow(3) + S.x().pow(3));
  P delta = S.y() * S.y() - S.x() * S.z();
  try {
    (void)exact_div(delta, S.x());
    FAIL("expected NotDivisible");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotDivisible);
  }
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    P f = random_poly(S, rng, 5, 4, false), g = random_poly(S, rng, 3, 3, false);
    if (g.is_zero()) continue;
    CHECK(exact_div(f * g, g) == f);
    // pow agrees with repeated multiplication
    P r = S.c(1);
    for (int e = 0; e < 7; ++e) {
      CHECK(f.pow(e) == r);
      r = r * f;
    }
  }
}

TEST_CASE("divide by x power") {
  Xyz S(GaloisField::prime(3));
  P f = S.x().pow(2) * S.z() - S.x().pow(3);
  CHECK(divide_by_x_power(f, 2) == S.z() - S.x());
  CHECK_THROWS_AS(divide_by_x_power(S.y(), 1), Error);
}

TEST_CASE("reduce modulo monomial ideal") {
  Xyz S(GaloisField::prime(3));
  P f = S.y().pow(4) + S.x().pow(3) * S.y();
  std::vector<Monomial> gens{mono(3, 0)};
  CHECK(reduce_mod_monomial_ideal(f, gens) == S.y().pow(4));
  std::vector<Monomial> one{Monomial{}};
  CHECK(reduce_mod_monomial_ideal(f, one).is_zero());
  // truncated products agree with reduce-after-multiply
  std::mt19937_64 rng(3);
  std::vector<Monomial> n{mono(7, 0), mono(6, 1)};
  for (int i = 0; i < 30; ++i) {
    P a = random_poly(S, rng, 6, 6, false), b = random_poly(S, rng, 6, 6, false);
    CHECK(a.multiply(b, n) == reduce_mod_monomial_ideal(a * b, n));
    CHECK(a.pow_truncated(4, n) == reduce_mod_monomial_ideal(a.pow(4), n));
  }
}

TEST_CASE("substitute_linear") {
  const auto& F = GaloisField::make(3, 2);
  Xyz S(F);
  Fq c1 = F.generator(), c2 = F.generator() + F.one();
  auto sigma = [&](Fq a, Fq b) {
    return std::vector<std::vector<Fq>>{{F.one(), F.from_int(2) * a, a * a + b}, {F.zero(), F.one(), a},
                                        {F.zero(), F.zero(), F.one()}};
  };
  P delta = S.y() * S.y() - S.x() * S.z();
  CHECK(substitute_linear(delta, sigma(c1, c2)) == delta - S.k(c2) * S.x().pow(2));
  std::vector<std::vector<Fq>> id{{F.one(), F.zero(), F.zero()}, {F.zero(), F.one(), F.zero()},
                                  {F.zero(), F.zero(), F.one()}};
  CHECK(substitute_linear(delta, id) == delta);

  const auto& xy = VarContext::make({"x", "y"});
  FieldRef R(F);
  P y = P::variable(xy, R, 1), x = P::variable(xy, R, 0);
  std::vector<std::vector<Fq>> rho{{F.one(), c1}, {F.zero(), F.one()}};
  CHECK(substitute_linear(y, rho) == y + x * c1);

  std::vector<std::vector<Fq>> sing{{F.one(), F.zero()}, {F.zero(), F.zero()}};
  CHECK_THROWS_AS(substitute_linear(y, sing), Error);
}

TEST_CASE("grevlex is a monomial order") {
  std::mt19937_64 rng(17);
  auto rnd = [&]() {
    std::uint32_t e[3] = {static_cast<std::uint32_t>(rng() % 6), static_cast<std::uint32_t>(rng() % 6),
                          static_cast<std::uint32_t>(rng() % 6)};
    return Monomial::from_exponents(e);
  };
  for (int i = 0; i < 10000; ++i) {
    Monomial a = rnd(), b = rnd(), n = rnd();
    int c = grevlex_cmp(a, b);
    CHECK(c == -grevlex_cmp(b, a));
    if (c < 0) CHECK(grevlex_less(a * n, b * n));
    if (c == 0) CHECK(a == b);
  }
}

TEST_CASE("lead term multiplicativity and divide-by-x soundness") {
  const auto& F = GaloisField::make(5, 2);
  Xyz S(F);
  std::mt19937_64 rng(23);
  for (int i = 0; i < 300; ++i) {
    P f = random_poly(S, rng, 4, 5, false), g = random_poly(S, rng, 4, 5, false);
    if (f.is_zero() || g.is_zero()) continue;
    P fg = f * g;
    CHECK(fg.lm() == f.lm() * g.lm());
    CHECK(fg.lc() == f.lc() * g.lc());
  }
  for (int i = 0; i < 300; ++i) {
    P f = random_poly(S, rng, 6, 6, true);
    if (f.is_zero()) continue;
    std::uint32_t m = f.lm()[0];
    // every monomial of degree d below lm is divisible by x^m
    for (auto& t : f.terms()) CHECK(t.m[0] >= m);
    CHECK_NOTHROW(divide_by_x_power(f, m));
  }
}

TEST_CASE("substitution composes as a right action") {
  const auto& F = GaloisField::make(3, 3);
  Xyz S(F);
  std::mt19937_64 rng(31);
  auto rnd = [&]() { return F.from_index(static_cast<std::uint32_t>(rng() % F.order())); };
  auto unitri = [&]() {
    return std::vector<std::vector<Fq>>{{F.one(), rnd(), rnd()}, {F.zero(), F.one(), rnd()},
                                        {F.zero(), F.zero(), F.one()}};
  };
  auto mul = [&](const std::vector<std::vector<Fq>>& A, const std::vector<std::vector<Fq>>& B) {
    std::vector<std::vector<Fq>> C(3, std::vector<Fq>(3, F.zero()));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) C[i][j] += A[i][k] * B[k][j];
    return C;
  };
  for (int i = 0; i < 100; ++i) {
    P f = random_poly(S, rng, 5, 5, false);
    auto A = unitri(), B = unitri();
    CHECK(substitute_linear(substitute_linear(f, A), B) == substitute_linear(f, mul(A, B)));
  }
}
