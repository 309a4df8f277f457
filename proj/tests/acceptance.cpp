// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "modinv/harness.hpp"

using namespace modinv;
using harness::json;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::vector<std::string> failed_assertions(const json& rep) {
  std::vector<std::string> out;
  for (auto& a : rep["assertions"])
    if (!a["pass"].get<bool>()) out.push_back(a["name"].get<std::string>() + (a.contains("detail") ? " [" + a["detail"].get<std::string>() + "]" : ""));
  return out;
}

void require_report(Outcome& o, const json& rep, const std::string& label) {
  auto bad = failed_assertions(rep);
  o.require(bad.empty(), label + " (" + std::to_string(rep["assertions"].size()) + " assertions)");
  for (std::size_t i = 0; i < bad.size() && i < 6; ++i) o.lines.push_back("       " + bad[i]);
}

json run_verify(const std::string& th, std::uint32_t p, std::uint32_t r, std::uint32_t k, std::uint32_t trials,
                std::uint64_t seed = 1) {
  harness::Options opt;
  opt.p = p;
  opt.r = r;
  opt.k = k;
  opt.trials = trials;
  opt.seed = seed;
  return harness::verify(th, opt);
}

json sigma_job(const Rep3& M) {
  json c1 = json::array(), c2 = json::array();
  for (auto& c : M.c1) c1.push_back(harness::element_json(c));
  for (auto& c : M.c2) c2.push_back(harness::element_json(c));
  return {{"field", harness::field_json(M.ring.field())}, {"kind", "sigma"}, {"M", {{"c1", c1}, {"c2", c2}}}};
}

Outcome criterion1() {
  Outcome o;
  for (std::uint32_t p : {2u, 3u, 5u})
    for (std::uint32_t r : {1u, 2u})
      require_report(o, run_verify("thm3.3", p, r, 4, 10, 11), "closed form p=" + std::to_string(p) + " r=" + std::to_string(r));
  return o;
}

Outcome criterion2() {
  Outcome o;
  for (std::uint32_t p : {3u, 5u})
    for (std::uint32_t r : {1u, 2u}) {
      std::string tag = " p=" + std::to_string(p) + " r=" + std::to_string(r);
      require_report(o, run_verify("lem4.1", p, r, 4, 3, 5), "relation vanishes" + tag);
      json rep = run_verify("thm4.3", p, r, 4, 3, 5);
      require_report(o, rep, "single tat subducts to zero, relation degree 2p^r" + tag);
    }
  return o;
}

Outcome criterion3() {
  Outcome o;
  json r3 = run_verify("lem7.1", 3, 2, 6, 5, 3);
  require_report(o, r3, "p=3: generic coefficients and 5 specializations");
  for (std::uint32_t p : {5u, 7u})
    require_report(o, run_verify("lem7.1", p, 2, 6, 5, 3), "p=" + std::to_string(p) + ": 5 specializations");
  return o;
}

Outcome criterion4() {
  Outcome o;
  require_report(o, run_verify("thm7.2", 3, 2, 6, 5, 7), "thm7.2 divide-by-x pipeline, lms {x,y^3,y^5,z^9}, one relation of degree 15");
  require_report(o, run_verify("thm7.4", 3, 2, 6, 5, 7), "thm7.4 lms {x,y^p,y^{p+1},z^{p^2}}, relation degree p(p+1)");
  require_report(o, run_verify("thm7.5", 3, 2, 6, 5, 7), "thm7.5 lms {x,y^2,y^p,z^{p^2}}, relation degree 2p");
  return o;
}

Outcome criterion5() {
  Outcome o;
  require_report(o, run_verify("lem8.1", 3, 3, 6, 5, 9), "modified combination lead term; f3 divides out");
  require_report(o, run_verify("lem8.4", 3, 3, 6, 5, 9), "N-tilde lead term with solved c_i");
  require_report(o, run_verify("thm8.5", 3, 3, 6, 5, 9), "certificate, lms {x,y^6,y^9,y^11,z^27}, two relations");
  return o;
}

Outcome criterion6() {
  Outcome o;
  const GaloisField& F = GaloisField::make(3, 6);
  struct Want {
    const char* stratum;
    const char* tag;
    const char* theorem;
  };
  const Want wants[] = {{"rank3-g135zero", "rank3-g135zero", "thm8.6"},
                        {"rank3-g123zero", "rank3-g123zero-124-135", "thm8.9-case"},
                        {"rank3-g123-135zero", "rank3-g123-135zero", "thm8.10-case"},
                        {"rank3-unfaithful", "rank3-unfaithful", "thm8.7"},
                        {"rank3-symsq", "rank3-symsq", "thm8.8"}};
  std::mt19937_64 rng(17);
  for (auto& w : wants)
    for (int t = 0; t < 3; ++t) {
      Rep3 M = harness::sample_stratum(w.stratum, 3, 3, F, rng);
      json rep = harness::classify(sigma_job(M));
      const auto& c = rep["case"];
      bool routed = c["tag"] == w.tag && c["theorem"] == w.theorem;
      o.require(routed, std::string(w.stratum) + " -> " + c["tag"].get<std::string>() + " (" + c["theorem"].get<std::string>() + ")");
      require_report(o, rep, std::string("  ") + w.stratum + " classify report");
      if (std::string(w.stratum) == "rank3-unfaithful") o.require(!c["faithful"].get<bool>(), "  non-faithfulness detected");
    }
  return o;
}

Outcome criterion7() {
  Outcome o;
  const std::uint32_t p = 3, D = 2 * p * p;
  std::mt19937_64 rng(23);
  for (std::uint32_t r : {1u, 2u}) {
    const GaloisField& F = GaloisField::make(p, 4);
    Rep2 W = harness::sample_faithful_w(p, r, F, rng);
    json W_json = json::array();
    for (auto& b : W.basis) W_json.push_back(harness::element_json(b));
    json job = {{"field", harness::field_json(F)}, {"kind", "symsq"}, {"W", W_json}};
    json rep = harness::oracle(job, D);
    require_report(o, rep, "symmetric square r=" + std::to_string(r) + ", degrees 0.." + std::to_string(D));
    job["drop"] = {"Nz"};
    json dropped = harness::oracle(job, D);
    std::uint32_t q = r == 1 ? p : p * p;
    o.require(dropped["first_mismatch"] == q, "  dropping N(z): first mismatch at degree " + dropped["first_mismatch"].dump() +
                                                  " (expected p^r = " + std::to_string(q) + ")");
  }
  const GaloisField& F = GaloisField::make(p, 6);
  Rep3 M = harness::sample_stratum("rank2-generic", p, 2, F, rng);
  require_report(o, harness::oracle(sigma_job(M), D), "rank-2 generic, degrees 0.." + std::to_string(D));
  return o;
}

Outcome criterion8() {
  Outcome o;
  harness::Options opt;
  opt.p = 3;
  opt.r = 4;
  opt.trials = 3;
  opt.seed = 29;
  json rep = harness::conjecture(opt);
  for (auto& t : rep["trials"]) {
    std::string st = t["status"].get<std::string>();
    bool reported = st == "consistent" || ((st == "inconsistent" || st == "inconclusive") &&
                                           (!t.value("findings", json::array()).empty() || t.contains("reason")));
    std::string lms;
    if (t.contains("observed_lead_monomials"))
      for (auto& [n, m] : t["observed_lead_monomials"].items()) lms += " " + n + "=" + m.get<std::string>();
    o.require(reported, "trial " + t["trial"].dump() + ": " + st + lms);
    if (t.contains("predicted_tats"))
      for (auto& pt : t["predicted_tats"]) o.lines.push_back("       tat " + pt["pair"].get<std::string>() + ": " + pt["match"].get<std::string>());
  }
  o.require(rep["trials"].size() == 3, "three trials reported");
  return o;
}

// Randomized property suites.
Outcome criterion9() {
  Outcome o;
  std::mt19937_64 rng(31);
  std::size_t n_sub = 0, n_div = 0, n_pl = 0, n_fr = 0, n_inv = 0;
  std::size_t bad_sub = 0, bad_div = 0, bad_pl = 0, bad_fr = 0, bad_inv = 0;
  const GaloisField& F = GaloisField::make(3, 6);
  FieldRef R(F);
  auto rnd = [&] { return F.from_index(static_cast<std::uint32_t>(rng() % F.order())); };

  // subduction soundness: f = sum of steps + remainder, and algebra elements subduct to zero
  std::vector<GeneratorSet> bases;
  bases.push_back(symmetric_square_generators(harness::sample_faithful_w(3, 1, F, rng)).B);
  bases.push_back(classify_sigma(harness::sample_stratum("rank2-generic", 3, 2, F, rng)).B);
  bases.push_back(classify_sigma(harness::sample_stratum("rank2-g13zero", 3, 2, F, rng)).B);
  for (auto& B : bases) {
    PowerProducts<Fq> prods(B);
    LeadFactorizer fac(B.lead_monomials());
    for (int t = 0; t < 100; ++t) {
      PolyF f(B.context(), R);
      for (int term = 0; term < 3; ++term) {
        Exponents a(B.size());
        for (auto& e : a) e = static_cast<std::uint32_t>(rng() % 3);
        f += prods.get(a) * rnd();
      }
      bool in_algebra = t % 2 == 0;
      if (!in_algebra) f += PolyF::monomial(B.context(), R, Monomial::var(2, 1 + rng() % 4), F.one());
      auto cert = subduct(f, B, fac, prods);
      PolyF back = cert.remainder;
      for (auto& s : cert.steps) back += prods.get(s.a) * s.coeff;
      bool ok = back == f && (!in_algebra || cert.remainder.is_zero());
      if (!cert.remainder.is_zero()) ok = ok && !fac.factor(cert.remainder.lm());
      ++n_sub;
      bad_sub += !ok;
    }
  }

  // grevlex divide-by-x exactness
  const VarContext& ctx = ctx_xyz();
  for (int t = 0; t < 300; ++t) {
    std::uint32_t d = 1 + rng() % 8, m = rng() % 4;
    std::vector<PolyF::Term> ts;
    for (int k = 0; k < 6; ++k) {
      std::uint32_t a = rng() % (d + 1), b = rng() % (d - a + 1);
      std::uint32_t e[3] = {a, b, d - a - b};
      ts.push_back({Monomial::from_exponents(e), rnd()});
    }
    PolyF h = PolyF::from_terms(ctx, R, ts);
    if (h.is_zero()) continue;
    PolyF f = h.mul_monomial(Monomial::var(0, m));
    bool ok = x_adic_valuation(h) == h.lm()[0] && x_adic_valuation(f) == f.lm()[0] &&
              divide_by_x_power(f, m) == h;
    ++n_div;
    bad_div += !ok;
  }

  // Pluecker vanishing and the Frobenius minor shift at random specializations
  for (int t = 0; t < 20; ++t) {
    std::uint32_t r = 2 + t % 2;
    Rep3 M = harness::sample_stratum("generic", 3, r, F, rng);
    auto S = specialized_source(M);
    auto Ks = subsequences(2 * r + 2, r + 2);
    for (int u = 0; u < 10; ++u) {
      const auto& K = Ks[rng() % Ks.size()];
      auto Ls = subsequences(r + 2, 3);
      const auto& Li = Ls[rng() % Ls.size()];
      MinorIndex L{K[Li[0] - 1], K[Li[1] - 1], K[Li[2] - 1]};
      bool ok = true;
      try {
        plucker_combination(S, K, L);
      } catch (const Error&) {
        ok = false;
      }
      ++n_pl;
      bad_pl += !ok;
    }
    for (auto& I : subsequences(2 * r, r)) {
      ++n_fr;
      bad_fr += gamma_value(M, shift_minor(I, 1)) != gamma_value(M, I).pow(3);
    }
  }

  // invariance of every emitted generator, across strata
  const char* strata[] = {"rank2-generic", "rank2-g13zero", "rank2-g12zero", "rank2-unfaithful", "rank3-generic",
                          "rank3-g135zero", "rank3-g123zero", "rank3-g123-135zero", "rank3-symsq", "rank3-unfaithful"};
  for (int t = 0; t < 3; ++t)
    for (auto* s : strata) {
      Rep3 M = harness::sample_stratum(s, 3, 0, F, rng);
      auto res = classify_sigma(M);
      for (auto& g : res.B.gens()) {
        ++n_inv;
        bad_inv += !is_invariant(g, res.canonical);
      }
      for (auto& c : res.checks)
        if (c.name == "generators transported to the input basis are invariant") {
          ++n_inv;
          bad_inv += !c.pass;
        }
    }

  auto line = [&](const char* what, std::size_t n, std::size_t bad) {
    o.require(bad == 0, std::string(what) + ": " + std::to_string(n - bad) + "/" + std::to_string(n));
  };
  line("subduction soundness", n_sub, bad_sub);
  line("divide-by-x exactness", n_div, bad_div);
  line("Pluecker vanishing", n_pl, bad_pl);
  line("Frobenius minor shift", n_fr, bad_fr);
  line("generator invariance", n_inv, bad_inv);
  std::size_t total = n_sub + n_div + n_pl + n_fr + n_inv;
  o.require(total >= 1000, std::to_string(total) + " randomized instances");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  bool verbose = argc > 1 && std::string(argv[1]) == "-v";
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"closed form for N_W(y)", criterion1},
      {"symmetric square hypersurface", criterion2},
      {"rank-2 N-tilde lead term", criterion3},
      {"rank-2 strata", criterion4},
      {"rank-3 generic", criterion5},
      {"rank-3 degenerate dispatch", criterion6},
      {"oracle equivalence", criterion7},
      {"complete-intersection evidence", criterion8},
      {"property suites", criterion9}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("error: ") + e.what());
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("%s criterion %zu: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, s);
    if (verbose || !o.pass)
      for (auto& l : o.lines) std::printf("    %s\n", l.c_str());
  }
  return failures ? 1 : 0;
}
