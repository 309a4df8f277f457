#include <random>

#include "doctest.h"
#include "modinv/harness.hpp"

using namespace modinv;
using harness::json;

TEST_CASE("verify reports are reproducible from the seed") {
  harness::Options opt;
  opt.p = 3;
  opt.trials = 2;
  opt.seed = 42;
  json a = harness::verify("thm8.6", opt), b = harness::verify("thm8.6", opt);
  CHECK(a == b);
  CHECK(harness::passed(a));
  opt.seed = 43;
  CHECK(harness::verify("thm8.6", opt)["params"] != a["params"]);
}

TEST_CASE("verify rejects unknown ids and unmet preconditions") {
  harness::Options opt;
  CHECK_THROWS_AS(harness::verify("thm9.9", opt), Error);
  opt.p = 2;
  CHECK_THROWS_AS(harness::verify("thm7.2", opt), Error);
  opt.p = 3;
  opt.r = 3;
  CHECK_THROWS_AS(harness::verify("thm7.4", opt), Error);
}

TEST_CASE("serialized cases round-trip through recheck") {
  const GaloisField& F = GaloisField::make(3, 4);
  std::mt19937_64 rng(5);
  for (const char* s : {"rank2-generic", "rank3-g123zero", "rank3-symsq"}) {
    Rep3 M = harness::sample_stratum(s, 3, 0, F, rng);
    json c = harness::case_json(classify_sigma(M));
    CHECK(harness::recheck_case(c, F));
    // corrupt one generator coefficient
    json bad = json::parse(c.dump());
    auto& terms = bad["generators"].back()["poly"]["terms"];
    terms[0][0] = (terms[0][0].get<std::uint32_t>() + 1) % F.order();
    CHECK_FALSE(harness::recheck_case(bad, F));
  }
}

TEST_CASE("polynomial json round-trip") {
  const GaloisField& F = GaloisField::make(5, 2);
  FieldRef R(F);
  PolyF x = PolyF::variable(ctx_xyz(), R, 0), z = PolyF::variable(ctx_xyz(), R, 2);
  PolyF f = x.pow(3) * F.from_index(7) + z * z - x * z;
  CHECK(harness::poly_from_json(harness::poly_json(f), ctx_xyz(), R) == f);
}
