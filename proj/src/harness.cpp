#include "modinv/harness.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace modinv::harness {

namespace {

std::uint64_t ipow(std::uint64_t b, std::uint32_t e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

Monomial xyz(std::uint32_t a, std::uint32_t b, std::uint32_t c = 0) {
  std::uint32_t e[3] = {a, b, c};
  return Monomial::from_exponents(e);
}

Fq random_elem(const GaloisField& F, std::mt19937_64& rng) {
  return F.from_index(static_cast<std::uint32_t>(rng() % F.order()));
}

Fq random_nonzero(const GaloisField& F, std::mt19937_64& rng) {
  for (;;) {
    Fq a = random_elem(F, rng);
    if (!a.is_zero()) return a;
  }
}

std::uint32_t random_fp(std::uint32_t p, std::mt19937_64& rng, bool nonzero = false) {
  if (nonzero) return 1 + static_cast<std::uint32_t>(rng() % (p - 1));
  return static_cast<std::uint32_t>(rng() % p);
}

bool all_zero(const std::vector<Fq>& v) {
  return std::all_of(v.begin(), v.end(), [](const Fq& c) { return c.is_zero(); });
}

// Random F_p column operations (a random element of GL_r(F_p) acting on the right).
void random_columns(Rep3& M, std::mt19937_64& rng) {
  const std::size_t r = M.rank();
  if (r == 0) return;
  const GaloisField& F = M.ring.field();
  for (std::size_t t = 0; t < 3 * r; ++t) {
    std::size_t i = rng() % r, j = rng() % r;
    switch (rng() % 3) {
      case 0:
        if (i != j) {
          Fq k = F.from_int(random_fp(M.p, rng));
          M.c1[j] += k * M.c1[i];
          M.c2[j] += k * M.c2[i];
        }
        break;
      case 1:
        std::swap(M.c1[i], M.c1[j]);
        std::swap(M.c2[i], M.c2[j]);
        break;
      default: {
        Fq s = F.from_int(random_fp(M.p, rng, true));
        M.c1[j] *= s;
        M.c2[j] *= s;
      }
    }
  }
}

void random_basis_change(Rep3& M, std::mt19937_64& rng) {
  const GaloisField& F = M.ring.field();
  Fq gamma = random_elem(F, rng), alpha = random_nonzero(F, rng);
  for (std::size_t j = 0; j < M.rank(); ++j) std::tie(M.c1[j], M.c2[j]) = left_action(gamma, alpha, M.c1[j], M.c2[j]);
}

Fq g(const Rep3& M, const char* label) { return gamma_value(M, parse_minor(label)); }

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Accumulates assertions and findings for one report.
struct Run {
  json assertions = json::array();
  json findings = json::array();
  json trials = json::array();
  std::set<std::string> seen;

  void check(const std::string& name, bool ok, const std::string& detail = "") {
    json a = {{"name", name}, {"pass", ok}};
    if (!detail.empty()) a["detail"] = detail;
    assertions.push_back(std::move(a));
  }
  void finding(const std::string& s) {
    if (seen.insert(s).second) findings.push_back(s);
  }
  bool passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const json& a) { return a["pass"].get<bool>(); });
  }
};

std::string trial_prefix(std::size_t t) { return "trial " + std::to_string(t + 1) + ": "; }

void absorb_case(Run& run, const std::string& prefix, const CaseResult& res) {
  for (auto& c : res.checks) run.check(prefix + c.name, c.pass, c.detail);
  for (auto& n : res.notes) run.finding(n);
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::size_t t) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(t)};
  return std::mt19937_64(seq);
}

json rep3_json(const Rep3& M) {
  json c1 = json::array(), c2 = json::array();
  for (auto& c : M.c1) c1.push_back(element_json(c));
  for (auto& c : M.c2) c2.push_back(element_json(c));
  return {{"c1", c1}, {"c2", c2}};
}

json elems_json(const std::vector<Fq>& v) {
  json out = json::array();
  for (auto& c : v) out.push_back(element_json(c));
  return out;
}

std::vector<Fq> elems_from_json(const GaloisField& F, const json& j) {
  std::vector<Fq> out;
  for (auto& e : j) out.push_back(element_from_json(F, e));
  return out;
}

Rep3 rep3_from_json(const GaloisField& F, const json& j) {
  Rep3 M{F.characteristic(), FieldRef(F), elems_from_json(F, j.at("c1")), elems_from_json(F, j.at("c2"))};
  if (M.c1.size() != M.c2.size()) fail(Errc::InvalidInput, "c1 and c2 differ in length");
  return M;
}

json mono_json(const Monomial& m, std::size_t nvars) {
  json e = json::array();
  for (std::size_t i = 0; i < nvars; ++i) e.push_back(m[i]);
  return e;
}

std::uint32_t default_rank(const std::string& th) {
  if (th == "lem4.1" || th == "thm4.3") return 1;
  if (th == "thm6.4-via-specialization") return 4;
  if (th.rfind("lem8", 0) == 0 || th.rfind("thm8", 0) == 0) return 3;
  return 2;
}

std::uint32_t fixed_rank(const std::string& th) {
  if (th == "lem7.1" || th.rfind("thm7", 0) == 0) return 2;
  if (th.rfind("lem8", 0) == 0 || th.rfind("thm8", 0) == 0) return 3;
  return 0;
}

// ---- individual theorems ---------------------------------------------------

using TrialFn = std::function<json(Run&, const std::string&, std::mt19937_64&)>;

void run_trials(Run& run, const Options& opt, const TrialFn& fn) {
  for (std::size_t t = 0; t < opt.trials; ++t) {
    auto rng = trial_rng(opt.seed, t);
    auto t0 = Clock::now();
    json data = fn(run, trial_prefix(t), rng);
    data["trial"] = t + 1;
    if (opt.timings) data["seconds"] = seconds_since(t0);
    run.trials.push_back(std::move(data));
  }
}

void verify_thm33(Run& run, const Options& opt, std::uint32_t r) {
  const GaloisField& F = GaloisField::make(opt.p, std::max(opt.k, r));
  run_trials(run, opt, [&](Run& run, const std::string& pre, std::mt19937_64& rng) {
    Rep2 W = sample_faithful_w(opt.p, r, F, rng);
    PolyF y = PolyF::variable(ctx_xy(), W.ring, 1);
    PolyF orb = orbit_product(y, W), closed = nw_closed_form(W);
    run.check(pre + "closed form equals the orbit product of y", orb == closed);
    auto dv = dickson_values(W.p, W.basis);
    run.check(pre + "faithful and d_r(W) != 0", is_faithful(W) && !dv.back().is_zero());
    // a dependent basis of the same length
    Rep2 U = W;
    U.basis.back() = U.basis.front() * F.from_int(2);
    if (r >= 2 && opt.p > 2) {
      auto du = dickson_values(U.p, U.basis);
      run.check(pre + "dependent basis: not faithful and d_r = 0", !is_faithful(U) && du.back().is_zero());
    }
    return json{{"W", elems_json(W.basis)}, {"N_W(y)", poly_json(closed)}};
  });
}

void verify_symsq(Run& run, const Options& opt, std::uint32_t r, bool full) {
  const GaloisField& F = GaloisField::make(opt.p, std::max(opt.k, r));
  run_trials(run, opt, [&](Run& run, const std::string& pre, std::mt19937_64& rng) {
    Rep2 W = sample_faithful_w(opt.p, r, F, rng);
    PolyF rel = symmetric_square_relation(W);
    run.check(pre + "delta^{p^r} - N(y)^2 + x^{p^r} N(z) + H_W(x, delta) = 0", rel.is_zero());
    json data = {{"W", elems_json(W.basis)}, {"H_W", poly_json(h_w_polynomial(W))}};
    if (full) {
      auto res = symmetric_square_generators(W);
      absorb_case(run, pre, res);
      json cj = case_json(res);
      run.check(pre + "serialized certificate re-verifies", recheck_case(cj, F));
      data["case"] = std::move(cj);
    }
    return data;
  });
}

Mat<Fq> sigma_of(const GaloisField& F, const Fq& c1, const Fq& c2) { return sigma_matrix(FieldRef(F), c1, c2); }

void verify_prop5(Run& run, const Options& opt, std::uint32_t r) {
  const GaloisField& F = GaloisField::make(opt.p, std::max(opt.k, r));
  FieldRef R(F);
  run_trials(run, opt, [&](Run& run, const std::string& pre, std::mt19937_64& rng) {
    Rep3 M{opt.p, R, {}, {}};
    for (std::size_t j = 0; j < r; ++j) {
      M.c1.push_back(random_elem(F, rng));
      M.c2.push_back(random_elem(F, rng));
    }
    M.c1[0] = random_nonzero(F, rng);
    run.check(pre + "sigma image is type (1,1,1)", classify_type(M) == RepType::Type111);
    // commuting with sigma(1,0) forces the sigma shape
    Fq a = random_elem(F, rng), b = random_elem(F, rng), c = random_elem(F, rng);
    Mat<Fq> s10 = sigma_of(F, F.one(), F.zero());
    Mat<Fq> u{{F.one(), F.from_int(2) * c, b}, {F.zero(), F.one(), c}, {F.zero(), F.zero(), F.one()}};
    run.check(pre + "unipotent matrix commuting with sigma(1,0) lies in the sigma image",
              u * s10 == s10 * u && u == sigma_of(F, c, b - c * c));
    if (a != F.from_int(2) * c) {
      Mat<Fq> w{{F.one(), a, b}, {F.zero(), F.one(), c}, {F.zero(), F.zero(), F.one()}};
      run.check(pre + "entry (1,2) != 2 (2,3) does not commute with sigma(1,0)", w * s10 != s10 * w);
    }
    // conjugation by the left action
    Fq gm = random_elem(F, rng), al = random_nonzero(F, rng);
    Mat<Fq> T{{al * al, gm * al, F.zero()}, {F.zero(), al, F.zero()}, {F.zero(), F.zero(), F.one()}};
    bool conj = true;
    for (std::size_t j = 0; j < r; ++j) {
      auto [d1, d2] = left_action(gm, al, M.c1[j], M.c2[j]);
      conj = conj && T * M.generator(j) == sigma_of(F, d1, d2) * T;
    }
    run.check(pre + "T sigma(c) T^-1 = sigma((gamma, alpha).c)", conj);
    auto can = canonicalize_rep3(M);
    bool cj = true;
    for (std::size_t j = 0; j < r; ++j) {
      auto [d1, d2] = left_action(can.gamma, can.alpha, M.c1[j], M.c2[j]);
      cj = cj && can.conjugator * M.generator(j) == sigma_of(F, d1, d2) * can.conjugator;
    }
    run.check(pre + "canonical form conjugator", cj);
    run.check(pre + "canonical first column is (1, 0)", can.rep.c1[0].is_one() && can.rep.c2[0].is_zero());
    // same image group: equal F_p-spans of the transformed and canonical columns
    bool span = true;
    {
      auto rk = [&](const std::vector<std::pair<Fq, Fq>>& cols) {
        Mat<Fq> m;
        for (auto& [x1, x2] : cols) {
          auto r1 = F.residues(x1), r2 = F.residues(x2);
          std::vector<Fq> row;
          for (auto v : r1) row.push_back(F.from_int(v));
          for (auto v : r2) row.push_back(F.from_int(v));
          m.push_back(row);
        }
        return rank(m);
      };
      std::vector<std::pair<Fq, Fq>> A, B, AB;
      for (std::size_t j = 0; j < r; ++j) {
        auto d = left_action(can.gamma, can.alpha, M.c1[j], M.c2[j]);
        A.push_back(d);
        B.push_back({can.rep.c1[j], can.rep.c2[j]});
      }
      AB = A;
      AB.insert(AB.end(), B.begin(), B.end());
      span = rk(A) == rk(B) && rk(A) == rk(AB);
    }
    run.check(pre + "canonical columns span the same F_p-space", span);
    // type (2,1) and type (1,2)
    Rep3 Z{opt.p, R, std::vector<Fq>(r, F.zero()), {}};
    for (std::size_t j = 0; j < r; ++j) Z.c2.push_back(random_nonzero(F, rng));
    run.check(pre + "sigma(0, c) image is type (2,1)", classify_type(Z) == RepType::Type21);
    auto t21 = classify_sigma(Z);
    absorb_case(run, pre + "type (2,1): ", t21);
    std::vector<std::pair<Fq, Fq>> U;
    std::vector<Mat<Fq>> mats;
    for (std::size_t j = 0; j < r; ++j) {
      U.push_back({random_nonzero(F, rng), random_elem(F, rng)});
      mats.push_back({{F.one(), U.back().first, U.back().second}, {F.zero(), F.one(), F.zero()}, {F.zero(), F.zero(), F.one()}});
    }
    run.check(pre + "[[1,c1,c2],[0,1,0],[0,0,1]] image is type (1,2)", classify_type(mats) == RepType::Type12);
    auto t12 = type12_generators(U, opt.p);
    absorb_case(run, pre + "type (1,2): ", t12);
    return json{{"M", rep3_json(M)}, {"canonical", rep3_json(can.rep)}, {"form", can.form}};
  });
}

// Sample for the degree hypothesis deg N(y) deg N(delta) = 2|G|.
Rep3 sample_split(std::uint32_t p, std::uint32_t r, const GaloisField& F, std::mt19937_64& rng) {
  FieldRef R(F);
  for (int attempt = 0; attempt < 100; ++attempt) {
    Rep3 M{p, R, {}, {}};
    if (r == 2) {
      Fq a = random_nonzero(F, rng), d = random_nonzero(F, rng);
      M.c1 = {a, F.zero()};
      M.c2 = {d, d * F.from_int(random_fp(p, rng, true))};
    } else {
      M.c1 = {random_nonzero(F, rng), F.zero(), F.zero()};
      M.c2 = {F.zero(), random_nonzero(F, rng), random_nonzero(F, rng)};
    }
    random_columns(M, rng);
    if (is_faithful(M) && fp_rank(M.c1) + fp_rank(M.c2) == r) return M;
  }
  fail(Errc::PreconditionUnmet, "resampling exhausted after 100 attempts");
}

void verify_thm54(Run& run, const Options& opt, std::uint32_t r) {
  if (r != 2 && r != 3) fail(Errc::PreconditionUnmet, "thm5.4 samples are built for r = 2 or 3");
  const GaloisField& F = GaloisField::make(opt.p, std::max(opt.k, r));
  FieldRef R(F);
  const VarContext& cw = VarContext::make({"x", "y", "w"});
  run_trials(run, opt, [&](Run& run, const std::string& pre, std::mt19937_64& rng) {
    Rep3 M = sample_split(opt.p, r, F, rng);
    XYZ<Fq> v(R);
    PolyF ny = orbit_product(v.y, M), nd = orbit_product(v.delta, M);
    const std::uint64_t order = ipow(opt.p, r);
    run.check(pre + "deg N(y) deg N(delta) = 2|G|", std::uint64_t(ny.lm().deg) * nd.lm().deg == 2 * order,
              std::to_string(ny.lm().deg) + " * " + std::to_string(nd.lm().deg));
    run.check(pre + "N(y), N(delta) invariant", is_invariant(ny, M) && is_invariant(nd, M));
    // G acting on F[x, y, w], w = delta / x
    std::vector<Mat<Fq>> mats;
    for (std::size_t j = 0; j < r; ++j)
      mats.push_back({{F.one(), F.zero(), -M.c2[j]}, {F.zero(), F.one(), M.c1[j]}, {F.zero(), F.zero(), F.one()}});
    PolyF x = PolyF::variable(cw, R, 0), y = PolyF::variable(cw, R, 1), w = PolyF::variable(cw, R, 2);
    std::vector<Fq> span{F.zero()};
    for (auto& c : M.c2) {
      std::vector<Fq> next;
      for (auto& s : span)
        for (std::uint32_t k = 0; k < opt.p; ++k) {
          Fq e = s + F.from_int(k) * c;
          if (std::find(next.begin(), next.end(), e) == next.end()) next.push_back(e);
        }
      span = std::move(next);
    }
    PolyF nw = PolyF::constant(cw, R, F.one());
    for (auto& s : span) nw = nw * (w + x * s);
    bool inv = true;
    for (auto& m : mats) inv = inv && substitute_linear(nw, m) == nw;
    run.check(pre + "N(w) invariant on F[x, y, delta/x]", inv);
    // N(delta) = x^{deg N(w)} N(w)(x, y, delta/x)
    std::vector<PolyF::Term> ts;
    const std::uint32_t n = nw.lm().deg;
    PolyF back(ctx_xyz(), R);
    for (auto& t : nw.terms())
      back += (v.x.pow(t.m[0] + n - t.m[2]) * v.y.pow(t.m[1]) * v.delta.pow(t.m[2])) * t.c;
    run.check(pre + "N(delta) = x^n N(w)|_{w = delta/x}", back == nd);
    std::uint32_t dy = ny.lm().deg, dw = n;
    std::uint32_t D = std::min<std::uint32_t>(dy + dw, 2 * opt.p * opt.p);
    std::uint32_t e0[3] = {0, dy, 0}, e1[3] = {0, 0, dw};
    auto counts = lead_algebra_counts({xyz(1, 0), Monomial::from_exponents(e0), Monomial::from_exponents(e1)}, D);
    bool hilb = true;
    std::string first;
    for (std::uint32_t d = 0; d <= D; ++d) {
      auto dim = invariant_space_matrices(mats, cw, R, d, false).dimension;
      if (dim != counts[d] && first.empty()) first = "degree " + std::to_string(d);
      hilb = hilb && dim == counts[d];
    }
    run.check(pre + "F[x,y,w]^G has the Hilbert function of F[x, N(y), N(w)] up to degree " + std::to_string(D),
              hilb, first);
    return json{{"M", rep3_json(M)}, {"N(y)", poly_json(ny)}, {"N(w)", poly_json(nw)}};
  });
}

void verify_lem62(Run& run, const Options& opt, std::uint32_t r) {
  const GaloisField& F = GaloisField::make(opt.p, std::max(opt.k, r));
  run_trials(run, opt, [&](Run& run, const std::string& pre, std::mt19937_64& rng) {
    Rep3 M = sample_stratum("generic", opt.p, r, F, rng);
    auto S = specialized_source(M);
    std::size_t n = 0, bad = 0;
    std::map<std::string, std::size_t> patterns;
    for (auto& K : subsequences(2 * r + 2, r + 2))
      for (auto& L : subsequences(r + 2, 3)) {
        MinorIndex LL{K[L[0] - 1], K[L[1] - 1], K[L[2] - 1]};
        ++n;
        try {
          auto T = plucker_combination(S, K, LL);
          std::string s;
          for (int v : T.signs) s += v > 0 ? '+' : '-';
          ++patterns[s];
        } catch (const Error&) {
          ++bad;
        }
      }
    run.check(pre + "three-term combination vanishes for every (K, L)", bad == 0,
              std::to_string(n - bad) + "/" + std::to_string(n));
    return json{{"M", rep3_json(M)}, {"instances", n}, {"sign_patterns", patterns}};
  });
}

void verify_lem63(Run& run, const Options& opt, std::uint32_t r) {
  const GaloisField& F = GaloisField::make(opt.p, std::max(opt.k, r));
  run_trials(run, opt, [&](Run& run, const std::string& pre, std::mt19937_64& rng) {
    Rep3 M = sample_stratum("generic", opt.p, r, F, rng);
    auto S = specialized_source(M);
    std::size_t n = 0, bad = 0;
    std::string first;
    for (auto& J : subsequences(2 * r + 2, r + 1)) {
      ++n;
      try {
        auto terms = decompose_powers(S, J);
        if (!decomposition_defect(S, J, terms).is_zero()) {
          ++bad;
          if (first.empty()) first = minor_label(J);
        }
      } catch (const Error& e) {
        ++bad;
        if (first.empty()) first = minor_label(J) + ": " + e.what();
      }
    }
    run.check(pre + "f~_J is a combination of Frobenius powers of f~_1 and f~_2 for every J", bad == 0,
              first.empty() ? std::to_string(n) + " indices" : first);
    return json{{"M", rep3_json(M)}, {"indices", n}};
  });
}

void oracle_rows(Run& run, const std::string& pre, const std::vector<Monomial>& lms,
                 const std::function<std::size_t(std::uint32_t)>& dim, std::uint32_t D, json* table) {
  auto counts = lead_algebra_counts(lms, D);
  std::optional<std::uint32_t> first;
  for (std::uint32_t d = 0; d <= D; ++d) {
    std::size_t a = dim(d);
    if (a != counts[d] && !first) first = d;
    if (table) table->push_back({{"degree", d}, {"invariants", a}, {"lead_algebra", counts[d]}, {"equal", a == counts[d]}});
  }
  run.check(pre + "invariant dimensions equal lead-term-algebra counts up to degree " + std::to_string(D), !first,
            first ? "first mismatch at degree " + std::to_string(*first) : "");
}

json case_trial(Run& run, const std::string& pre, const CaseResult& res, const std::string& want_tag,
                const GaloisField& F) {
  run.check(pre + "dispatched to " + want_tag, res.tag == want_tag, res.tag);
  absorb_case(run, pre, res);
  json cj = case_json(res);
  run.check(pre + "serialized certificate re-verifies", recheck_case(cj, F));
  return json{{"case", std::move(cj)}};
}

void verify_thm64(Run& run, const Options& opt, std::uint32_t r) {
  if (r < 2) fail(Errc::PreconditionUnmet, "needs r >= 2");
  const GaloisField& F = GaloisField::make(opt.p, std::max(opt.k, r));
  run_trials(run, opt, [&](Run& run, const std::string& pre, std::mt19937_64& rng) {
    Rep3 M = sample_stratum("generic", opt.p, r, F, rng);
    auto f = generic_f1_f2(specialized_source(M));
    auto want = generic_f1_f2_lms(opt.p, r);
    run.check(pre + "lm(f1), lm(f2) as predicted", f.f1.lm() == want.first && f.f2.lm() == want.second);
    run.check(pre + "f1, f2 invariant", is_invariant(f.f1, M) && is_invariant(f.f2, M));
    auto out = divide_by_x_adaptive(sdx_start(M), opt.p);
    run.check(pre + "divide-by-x completion from {x, f1, f2, N(z)} certifies", out.cert.passed,
              std::to_string(out.B.size()) + " generators");
    bool inv = true;
    for (auto& gg : out.B.gens()) inv = inv && is_invariant(gg, M);
    run.check(pre + "completed generators invariant", inv);
    std::uint32_t D = std::min<std::uint32_t>(2 * opt.p * opt.p, 24);
    oracle_rows(run, pre, out.B.lead_monomials(), [&](std::uint32_t d) { return invariant_space_dim(M, d); }, D,
                nullptr);
    json lms = json::object();
    for (std::size_t i = 0; i < out.B.size(); ++i)
      lms[out.B.names()[i]] = monomial_to_string(ctx_xyz(), out.B[i].lm());
    return json{{"M", rep3_json(M)}, {"lead_monomials", lms}};
  });
}

void verify_lem71(Run& run, const Options& opt) {
  if (opt.p == 3) {
    auto G = rank2_Ntilde_generic(3);
    run.check("generic coefficients: lt(N-tilde) = -1/2 g12^{2p+2} x^{2p} z^{p^2}", G.ok);
    if (!G.printed_ok) run.finding("generic p=3: the printed tail coefficients miss the stated lead term; re-solved tail reaches it");
    run.check("generic coefficients: f1^2 - g12^2 delta^p - 2 x^{p-2} f2 = -g12 (g14 delta x^{2p-2} + g24 y x^{2p-1})",
              rank2_f2eqn_generic(3));
  }
  const GaloisField& F = GaloisField::make(opt.p, opt.k);
  run_trials(run, opt, [&](Run& run, const std::string& pre, std::mt19937_64& rng) {
    Rep3 M = sample_stratum("rank2-generic", opt.p, 2, F, rng);
    auto N = rank2_Ntilde(M, true);
    for (auto& c : N.checks) run.check(pre + c.name, c.pass, c.detail);
    for (auto& n : N.notes) run.finding(n);
    return json{{"M", rep3_json(M)}, {"printed_ok", N.printed_ok}, {"N", poly_json(N.N)}};
  });
}

void verify_stratum(Run& run, const Options& opt, const std::string& stratum, std::uint32_t r,
                    const std::string& want_tag, bool sdx) {
  const GaloisField& F = GaloisField::make(opt.p, opt.k);
  run_trials(run, opt, [&](Run& run, const std::string& pre, std::mt19937_64& rng) {
    Rep3 M = sample_stratum(stratum, opt.p, r, F, rng);
    auto res = classify_sigma(M);
    json data = case_trial(run, pre, res, want_tag, F);
    if (sdx) {
      auto out = divide_by_x_adaptive(sdx_start(M), opt.p);
      const std::uint32_t p = opt.p;
      run.check(pre + "divide-by-x from {x, f1, f2, N(z)} adjoins nothing", out.adjoined.empty());
      run.check(pre + "divide-by-x lead monomials {x, y^p, y^{p+2}, z^{p^2}}",
                out.B.lead_monomials() == std::vector<Monomial>{xyz(1, 0), xyz(0, p), xyz(0, p + 2), xyz(0, 0, p * p)});
      auto rels = extract_relations(out.cert, out.B);
      run.check(pre + "divide-by-x: one relation of degree p(p+2)",
                rels.size() == 1 && relation_degree(rels[0], out.B) == p * (p + 2));
    }
    data["M"] = rep3_json(M);
    return data;
  });
}

void verify_f3(Run& run, const Options& opt, int which) {
  const GaloisField& F = GaloisField::make(opt.p, opt.k);
  run_trials(run, opt, [&](Run& run, const std::string& pre, std::mt19937_64& rng) {
    Rep3 M = sample_stratum("rank3-generic", opt.p, 3, F, rng);
    auto f = rank3_f3(M);
    for (auto& c : f.checks) run.check(pre + c.name, c.pass, c.detail);
    run.check(pre + "f3 times -2 x^{p^2-2} equals the numerator",
              f.f3.mul_term(Monomial::var(0, opt.p * opt.p - 2), -F.from_int(2)) == f.numerator);
    json data = {{"M", rep3_json(M)}, {"f3", poly_json(f.f3)}};
    if (which == 4) {
      auto N = rank3_Ntilde_generic(M, f);
      for (auto& c : N.checks) run.check(pre + c.name, c.pass, c.detail);
      data["c"] = elems_json(N.solved);
      run.check(pre + "N invariant", N.solved_ok && is_invariant(N.N, M));
    }
    return data;
  });
}

}  // namespace

// ---- serialization -----------------------------------------------------------

const GaloisField& field_from_json(const json& j) {
  std::uint32_t p = j.at("p").get<std::uint32_t>();
  std::uint32_t k = j.value("k", 1u);
  if (j.contains("modulus")) return GaloisField::make(p, k, j.at("modulus").get<std::vector<std::uint32_t>>());
  return GaloisField::make(p, k);
}

json field_json(const GaloisField& F) {
  return {{"p", F.characteristic()}, {"k", F.degree()}, {"modulus", F.modulus()}};
}

Fq element_from_json(const GaloisField& F, const json& j) {
  if (j.is_number_integer()) {
    auto v = j.get<std::int64_t>();
    if (v < 0 || v >= F.order()) fail(Errc::InvalidInput, "element index out of range");
    return F.from_index(static_cast<std::uint32_t>(v));
  }
  if (j.is_array()) {
    auto r = j.get<std::vector<std::uint32_t>>();
    if (r.size() > F.degree()) fail(Errc::InvalidInput, "too many residues");
    for (auto& v : r) v %= F.characteristic();
    return F.from_residues(r);
  }
  fail(Errc::InvalidInput, "field element must be an index or a residue array");
}

json element_json(const Fq& a) { return a.field().index_of(a); }

json poly_json(const PolyF& f) {
  const auto& ctx = f.context();
  json vars = json::array();
  for (std::size_t i = 0; i < ctx.size(); ++i) vars.push_back(ctx.name(i));
  json terms = json::array();
  for (auto& t : f.terms()) terms.push_back({element_json(t.c), mono_json(t.m, ctx.size())});
  return {{"vars", vars}, {"terms", terms}};
}

PolyF poly_from_json(const json& j, const VarContext& ctx, FieldRef R) {
  auto vars = j.at("vars").get<std::vector<std::string>>();
  if (vars.size() != ctx.size()) fail(Errc::ContextMismatch, "variable count differs");
  std::vector<PolyF::Term> ts;
  for (auto& t : j.at("terms")) {
    auto e = t.at(1).get<std::vector<std::uint32_t>>();
    ts.push_back({Monomial::from_exponents(e), element_from_json(R.field(), t.at(0))});
  }
  return PolyF::from_terms(ctx, R, ts);
}

json case_json(const CaseResult& r) {
  json out;
  out["tag"] = r.tag;
  out["theorem"] = r.theorem;
  out["faithful"] = r.faithful;
  out["effective_rank"] = r.effective_rank;
  if (r.tag == "rho") {
    out["W"] = elems_json(r.input.c1);
  } else if (r.tag == "type12") {
    json U = json::array();
    for (std::size_t j = 0; j < r.input.c1.size(); ++j) U.push_back({element_json(r.input.c1[j]), element_json(r.input.c2[j])});
    out["U"] = U;
  } else {
    out["input"] = rep3_json(r.input);
    out["canonical"] = rep3_json(r.canonical);
  }
  json gens = json::array();
  if (r.B.size()) {
    const auto& ctx = r.B.context();
    for (std::size_t i = 0; i < r.B.size(); ++i)
      gens.push_back({{"name", r.B.names()[i]},
                      {"lead_monomial", monomial_to_string(ctx, r.B[i].lm())},
                      {"degree", r.B[i].lm().deg},
                      {"poly", poly_json(r.B[i])}});
  }
  out["generators"] = gens;
  json tats = json::array();
  for (auto& t : r.cert.tats)
    tats.push_back({{"lead_monomial", r.B.size() ? monomial_to_string(r.B.context(), t.pair.lm) : ""},
                    {"I", t.pair.I},
                    {"J", t.pair.J},
                    {"degree", t.pair.degree},
                    {"lambda", element_json(t.lambda)},
                    {"subduction_steps", t.cert.steps.size()},
                    {"subducts_to_zero", t.zero()}});
  out["certificate"] = {{"degree_bound", r.cert.degree_bound}, {"passed", r.cert.passed}, {"tats", tats}};
  json rels = json::array();
  for (std::size_t i = 0; i < r.relations.size(); ++i)
    rels.push_back({{"degree", i < r.relation_degrees.size() ? r.relation_degrees[i] : 0u}, {"poly", poly_json(r.relations[i])}});
  out["relations"] = rels;
  json checks = json::array();
  for (auto& c : r.checks) {
    json a = {{"name", c.name}, {"pass", c.pass}};
    if (!c.detail.empty()) a["detail"] = c.detail;
    checks.push_back(a);
  }
  out["checks"] = checks;
  out["notes"] = r.notes;
  return out;
}

bool recheck_case(const json& cj, const GaloisField& F) {
  FieldRef R(F);
  const auto& gj = cj.at("generators");
  if (gj.empty()) return true;
  auto vars = gj.at(0).at("poly").at("vars").get<std::vector<std::string>>();
  const VarContext& ctx = VarContext::make(vars);
  std::vector<PolyF> gens;
  std::vector<std::string> names;
  for (auto& g : gj) {
    gens.push_back(poly_from_json(g.at("poly"), ctx, R));
    names.push_back(g.at("name").get<std::string>());
  }
  std::vector<Mat<Fq>> mats;
  const std::uint32_t p = F.characteristic();
  if (cj.contains("W")) {
    Rep2 W{p, R, elems_from_json(F, cj.at("W"))};
    for (std::size_t i = 0; i < W.rank(); ++i) mats.push_back(W.generator(i));
  } else if (cj.contains("U")) {
    for (auto& u : cj.at("U"))
      mats.push_back({{F.one(), element_from_json(F, u.at(0)), element_from_json(F, u.at(1))},
                      {F.zero(), F.one(), F.zero()},
                      {F.zero(), F.zero(), F.one()}});
  } else {
    Rep3 M = rep3_from_json(F, cj.at("canonical"));
    for (std::size_t i = 0; i < M.rank(); ++i) mats.push_back(M.generator(i));
  }
  for (auto& gg : gens)
    for (auto& m : mats)
      if (substitute_linear(gg, m) != gg) return false;
  const VarContext& sym = VarContext::make(names);
  for (auto& rj : cj.at("relations")) {
    PolyF rel = poly_from_json(rj.at("poly"), sym, R);
    if (!compose(rel, gens).is_zero()) return false;
  }
  return true;
}

// ---- sampling ------------------------------------------------------------------

Rep2 sample_faithful_w(std::uint32_t p, std::uint32_t r, const GaloisField& F, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Rep2 W{p, FieldRef(F), {}};
    for (std::uint32_t i = 0; i < r; ++i) W.basis.push_back(random_elem(F, rng));
    if (fp_rank(W.basis) == r) return W;
  }
  fail(Errc::PreconditionUnmet, "resampling exhausted after 100 attempts");
}

Rep3 sample_stratum(const std::string& stratum, std::uint32_t p, std::uint32_t r, const GaloisField& F,
                    std::mt19937_64& rng) {
  if (p <= 2) fail(Errc::PreconditionUnmet, "sigma-type representations need p > 2");
  FieldRef R(F);
  auto rnd = [&] { return random_elem(F, rng); };
  auto nz = [&] { return random_nonzero(F, rng); };
  std::uint32_t need = stratum.rfind("rank2", 0) == 0 ? 2 : stratum.rfind("rank3", 0) == 0 ? 3 : r;
  if (need != r && r != 0) fail(Errc::PreconditionUnmet, stratum + " needs r = " + std::to_string(need));
  r = need;
  if (r == 0) fail(Errc::PreconditionUnmet, "rank must be positive");
  for (int attempt = 0; attempt < 100; ++attempt) {
    Rep3 M{p, R, {}, {}};
    for (std::uint32_t j = 0; j < r; ++j) {
      M.c1.push_back(rnd());
      M.c2.push_back(rnd());
    }
    bool basis_change = true;
    if (stratum == "rank2-g13zero") {
      M.c1[1] = F.zero();
    } else if (stratum == "rank2-g12zero" || stratum == "rank3-symsq") {
      Fq l = rnd();
      for (std::uint32_t j = 0; j < r; ++j) M.c2[j] = l * M.c1[j];
    } else if (stratum == "rank2-unfaithful") {
      Fq k = F.from_int(random_fp(p, rng));
      M.c1[1] = k * M.c1[0];
      M.c2[1] = k * M.c2[0];
    } else if (stratum == "rank3-g135zero") {
      M.c1[2] = M.c1[0] + M.c1[1];
    } else if (stratum == "rank3-g123zero") {
      Fq l = rnd(), m = nz();
      for (std::uint32_t j = 0; j < 3; ++j) M.c2[j] = l * M.c1[j] + m * M.c1[j].frobenius();
    } else if (stratum == "rank3-g123-135zero") {
      M.c1 = {nz(), F.zero(), F.zero()};
      M.c2[0] = F.zero();
    } else if (stratum == "rank3-unfaithful") {
      Fq a = nz();
      M.c1 = {a, F.from_int(2) * a, F.zero()};
      M.c2 = {F.zero(), F.zero(), nz()};
    } else if (stratum != "generic" && stratum != "rank2-generic" && stratum != "rank3-generic") {
      fail(Errc::InvalidInput, "unknown stratum " + stratum);
    }
    random_columns(M, rng);
    if (basis_change) random_basis_change(M, rng);
    if (all_zero(M.c1)) continue;
    bool ok = false;
    if (stratum == "generic" && r >= 4) {
      auto f = generic_f1_f2(specialized_source(M));
      auto want = generic_f1_f2_lms(p, r);
      ok = is_faithful(M) && f.f1.lm() == want.first && f.f2.lm() == want.second;
    } else if (stratum == "generic" && r == 1) {
      ok = true;
    } else if (r == 2) {
      Fq g12 = g(M, "12"), g13 = g(M, "13");
      if (stratum == "rank2-generic" || stratum == "generic") ok = !g12.is_zero() && !g13.is_zero();
      if (stratum == "rank2-g13zero") ok = !g12.is_zero() && g13.is_zero() && is_faithful(M);
      if (stratum == "rank2-g12zero") ok = g12.is_zero() && !g13.is_zero();
      if (stratum == "rank2-unfaithful") ok = g12.is_zero() && g13.is_zero();
    } else if (r == 3) {
      Fq g123 = g(M, "123"), g124 = g(M, "124"), g135 = g(M, "135");
      if (stratum == "rank3-generic" || stratum == "generic") ok = !g123.is_zero() && !g135.is_zero();
      if (stratum == "rank3-g135zero") ok = !g123.is_zero() && g135.is_zero();
      if (stratum == "rank3-g123zero") ok = g123.is_zero() && !g124.is_zero() && !g135.is_zero();
      if (stratum == "rank3-g123-135zero") ok = g123.is_zero() && g135.is_zero() && !g124.is_zero() && is_faithful(M);
      if (stratum == "rank3-symsq") ok = g123.is_zero() && g124.is_zero() && !g135.is_zero();
      if (stratum == "rank3-unfaithful")
        ok = g123.is_zero() && g124.is_zero() && g135.is_zero() && classify_type(M) == RepType::Type111;
    }
    if (ok) return M;
  }
  fail(Errc::PreconditionUnmet, "resampling exhausted after 100 attempts for " + stratum);
}

// ---- commands ------------------------------------------------------------------

const std::vector<std::string>& supported_theorems() {
  static const std::vector<std::string> ids = {
      "thm3.3", "lem4.1", "thm4.3", "prop5.x", "thm5.4", "lem6.2", "lem6.3", "thm6.4-via-specialization",
      "lem7.1", "thm7.2", "thm7.4", "thm7.5", "lem8.1", "lem8.3", "lem8.4", "thm8.5", "thm8.6",
      "thm8.9-case", "thm8.10-case", "thm8.7", "thm8.8"};
  return ids;
}

json verify(const std::string& th, const Options& opt) {
  const auto& ids = supported_theorems();
  if (std::find(ids.begin(), ids.end(), th) == ids.end()) fail(Errc::UnknownTheorem, th);
  if (opt.p > 2 || th != "thm3.3") {
    if (opt.p <= 2) fail(Errc::PreconditionUnmet, "p = " + std::to_string(opt.p) + ": these constructions assume p > 2");
  }
  if (!is_prime(opt.p)) fail(Errc::NotPrime, std::to_string(opt.p));
  std::uint32_t r = opt.r ? opt.r : default_rank(th);
  if (auto fr = fixed_rank(th); fr && r != fr) fail(Errc::PreconditionUnmet, th + " is a rank-" + std::to_string(fr) + " statement");
  if (r > 8) fail(Errc::PreconditionUnmet, "rank above 8 is outside the supported range");

  auto t0 = Clock::now();
  Run run;
  if (th == "thm3.3") verify_thm33(run, opt, r);
  else if (th == "lem4.1") verify_symsq(run, opt, r, false);
  else if (th == "thm4.3") verify_symsq(run, opt, r, true);
  else if (th == "prop5.x") verify_prop5(run, opt, r);
  else if (th == "thm5.4") verify_thm54(run, opt, r);
  else if (th == "lem6.2") verify_lem62(run, opt, r);
  else if (th == "lem6.3") verify_lem63(run, opt, r);
  else if (th == "thm6.4-via-specialization") verify_thm64(run, opt, r);
  else if (th == "lem7.1") verify_lem71(run, opt);
  else if (th == "thm7.2") verify_stratum(run, opt, "rank2-generic", 2, "rank2-generic", true);
  else if (th == "thm7.4") verify_stratum(run, opt, "rank2-g13zero", 2, "rank2-g13zero", false);
  else if (th == "thm7.5") verify_stratum(run, opt, "rank2-g12zero", 2, "rank2-g12zero", false);
  else if (th == "lem8.1") verify_f3(run, opt, 1);
  else if (th == "lem8.3") verify_f3(run, opt, 3);
  else if (th == "lem8.4") verify_f3(run, opt, 4);
  else if (th == "thm8.5") verify_stratum(run, opt, "rank3-generic", 3, "rank3-generic", false);
  else if (th == "thm8.6") verify_stratum(run, opt, "rank3-g135zero", 3, "rank3-g135zero", false);
  else if (th == "thm8.9-case") verify_stratum(run, opt, "rank3-g123zero", 3, "rank3-g123zero-124-135", false);
  else if (th == "thm8.10-case") verify_stratum(run, opt, "rank3-g123-135zero", 3, "rank3-g123-135zero", false);
  else if (th == "thm8.7") verify_stratum(run, opt, "rank3-unfaithful", 3, "rank3-unfaithful", false);
  else if (th == "thm8.8") verify_stratum(run, opt, "rank3-symsq", 3, "rank3-symsq", false);

  json out;
  out["command"] = "verify";
  out["theorem"] = th;
  out["params"] = {{"p", opt.p}, {"r", r}, {"k", opt.k}, {"trials", opt.trials}, {"seed", opt.seed}};
  out["assertions"] = std::move(run.assertions);
  out["findings"] = std::move(run.findings);
  out["trials"] = std::move(run.trials);
  out["passed"] = passed(out);
  if (opt.timings) out["timings"] = {{"total_seconds", seconds_since(t0)}};
  return out;
}

namespace {

struct Built {
  CaseResult res;
  std::function<std::size_t(std::uint32_t)> dim;
  std::string type;
};

Mat<Fq> matrix_from_json(const GaloisField& F, const json& j) {
  Mat<Fq> m;
  for (auto& row : j) m.push_back(elems_from_json(F, row));
  if (m.size() != 3 || std::any_of(m.begin(), m.end(), [](auto& r) { return r.size() != 3; }))
    fail(Errc::InvalidInput, "matrices must be 3x3");
  return m;
}

Built build_job(const json& job) {
  const GaloisField& F = field_from_json(job.at("field"));
  FieldRef R(F);
  const std::uint32_t p = F.characteristic();
  std::string kind = job.at("kind").get<std::string>();
  Built b;
  if (kind == "rho") {
    Rep2 W{p, R, elems_from_json(F, job.at("W"))};
    PolyF x = PolyF::variable(ctx_xy(), R, 0), y = PolyF::variable(ctx_xy(), R, 1);
    PolyF ny = nw_closed_form(W);
    b.res.tag = "rho";
    b.res.theorem = "thm3.3";
    b.res.input = b.res.canonical = Rep3{p, R, W.basis, std::vector<Fq>(W.rank(), F.zero())};
    b.res.effective_rank = fp_rank(W.basis);
    b.res.faithful = is_faithful(W);
    b.res.B = GeneratorSet({"x", "Ny"}, {x, ny});
    b.res.check("N_W(y) closed form equals the orbit product", ny == orbit_product(y, W));
    b.res.check("generators invariant", is_invariant(ny, W));
    b.res.cert.passed = true;
    b.res.notes.push_back("polynomial ring F[x, N_W(y)]");
    b.dim = [W](std::uint32_t d) { return invariant_space_dim(W, d); };
    b.type = "rho";
    return b;
  }
  if (kind == "symsq") {
    Rep2 W{p, R, elems_from_json(F, job.at("W"))};
    b.res = symmetric_square_generators(W);
    Rep3 M = b.res.input;
    b.dim = [M](std::uint32_t d) { return invariant_space_dim(M, d); };
    b.type = "type111";
    return b;
  }
  std::vector<Mat<Fq>> mats;
  Rep3 M{p, R, {}, {}};
  std::vector<std::pair<Fq, Fq>> U;
  if (kind == "sigma") {
    M = rep3_from_json(F, job.at("M"));
    for (std::size_t j = 0; j < M.rank(); ++j) mats.push_back(M.generator(j));
  } else if (kind == "type12") {
    for (auto& u : job.at("U")) U.push_back({element_from_json(F, u.at(0)), element_from_json(F, u.at(1))});
    for (auto& [a, c] : U) mats.push_back({{F.one(), a, c}, {F.zero(), F.one(), F.zero()}, {F.zero(), F.zero(), F.one()}});
  } else if (kind == "matrices") {
    for (auto& m : job.at("generators")) mats.push_back(matrix_from_json(F, m));
    bool sigma = true, t12 = true;
    for (auto& m : mats) {
      sigma = sigma && m[1][0].is_zero() && m[2][0].is_zero() && m[2][1].is_zero() && m[0][0].is_one() &&
              m[1][1].is_one() && m[2][2].is_one() && m[0][1] == F.from_int(2) * m[1][2];
      t12 = t12 && m == Mat<Fq>{{F.one(), m[0][1], m[0][2]}, {F.zero(), F.one(), F.zero()}, {F.zero(), F.zero(), F.one()}};
    }
    if (sigma && p > 2) {
      kind = "sigma";
      for (auto& m : mats) {
        M.c1.push_back(m[1][2]);
        M.c2.push_back(m[0][2] - m[1][2] * m[1][2]);
      }
    } else if (t12) {
      kind = "type12";
      for (auto& m : mats) U.push_back({m[0][1], m[0][2]});
    } else {
      kind = "other";
    }
  } else {
    fail(Errc::InvalidInput, "unknown job kind " + kind);
  }
  b.type = type_name(classify_type(mats));
  auto mats_copy = mats;
  b.dim = [mats_copy, R](std::uint32_t d) { return invariant_space_matrices(mats_copy, ctx_xyz(), R, d, false).dimension; };
  if (kind == "sigma") {
    b.res = classify_sigma(M);
  } else if (kind == "type12") {
    if (b.type != "type12") fail(Errc::InvalidInput, "matrices of the (1,2) shape but of type " + b.type);
    b.res = type12_generators(U, p);
    b.res.input = b.res.canonical = Rep3{p, R, {}, {}};
    for (auto& [a, c] : U) {
      b.res.input.c1.push_back(a);
      b.res.input.c2.push_back(c);
    }
  } else {
    b.res.tag = "type-" + b.type;
    b.res.theorem = "none";
    b.res.notes.push_back("no generator construction for this presentation; type only");
  }
  return b;
}

}  // namespace

json classify(const json& job, bool timings) {
  auto t0 = Clock::now();
  Built b = build_job(job);
  const GaloisField& F = field_from_json(job.at("field"));
  Run run;
  absorb_case(run, "", b.res);
  json cj = case_json(b.res);
  if (b.res.B.size()) run.check("serialized certificate re-verifies", recheck_case(cj, F));
  json out;
  out["command"] = "classify";
  out["field"] = field_json(F);
  out["type"] = b.type;
  out["case"] = std::move(cj);
  if (job.contains("oracle_degree") && b.res.B.size()) {
    json table = json::array();
    oracle_rows(run, "oracle: ", b.res.B.lead_monomials(), b.dim, job.at("oracle_degree").get<std::uint32_t>(), &table);
    out["oracle"] = table;
  }
  out["assertions"] = std::move(run.assertions);
  out["findings"] = std::move(run.findings);
  out["passed"] = passed(out);
  if (timings) out["timings"] = {{"total_seconds", seconds_since(t0)}};
  return out;
}

json oracle(const json& job, std::uint32_t max_degree) {
  Built b = build_job(job);
  const GaloisField& F = field_from_json(job.at("field"));
  if (!b.res.B.size()) fail(Errc::InvalidInput, "no generator set for this input");
  std::vector<Monomial> lms;
  std::vector<std::string> used;
  std::set<std::string> drop;
  if (job.contains("drop"))
    for (auto& d : job.at("drop")) drop.insert(d.get<std::string>());
  for (std::size_t i = 0; i < b.res.B.size(); ++i)
    if (!drop.count(b.res.B.names()[i])) {
      lms.push_back(b.res.B[i].lm());
      used.push_back(b.res.B.names()[i]);
    }
  Run run;
  json table = json::array();
  oracle_rows(run, "", lms, b.dim, max_degree, &table);
  json out;
  out["command"] = "oracle";
  out["field"] = field_json(F);
  out["tag"] = b.res.tag;
  out["generators"] = used;
  out["dropped"] = std::vector<std::string>(drop.begin(), drop.end());
  out["max_degree"] = max_degree;
  out["table"] = std::move(table);
  json first = nullptr;
  for (auto& row : out["table"])
    if (!row["equal"].get<bool>()) {
      first = row["degree"];
      break;
    }
  out["first_mismatch"] = first;
  out["assertions"] = std::move(run.assertions);
  out["passed"] = passed(out);
  return out;
}

// ---- conjecture --------------------------------------------------------------------

namespace {

using NamedExps = std::map<std::string, std::uint64_t>;

struct PredictedTat {
  NamedExps lhs, rhs;
};

struct Prediction {
  std::uint32_t s = 0;
  std::map<std::string, std::uint64_t> ydeg;  // f_i -> exponent of y in lm
  std::vector<PredictedTat> tats;
};

Prediction predict(std::uint32_t p, std::uint32_t r) {
  Prediction P;
  P.s = (r + 1) / 2;
  const std::uint32_t s = P.s;
  auto f = [](std::uint32_t i) { return "f" + std::to_string(i); };
  if (r % 2 == 0) {
    P.ydeg[f(1)] = ipow(p, s);
    for (std::uint32_t i = 2; i <= s + 1; ++i) P.ydeg[f(i)] = ipow(p, s + i - 2) + 2 * ipow(p, s - i + 1);
    P.tats.push_back({{{f(2), p}}, {{f(1), p + 2}}});
    for (std::uint32_t i = 3; i <= s + 1; ++i)
      P.tats.push_back({{{f(i), p}}, {{f(i - 1), 1}, {f(1), (ipow(p, 2) - 1) * ipow(p, i - 3)}}});
  } else {
    P.ydeg[f(1)] = 2 * ipow(p, s - 1);
    P.ydeg[f(2)] = ipow(p, s);
    for (std::uint32_t i = 3; i <= s + 1; ++i) P.ydeg[f(i)] = ipow(p, s + i - 3) + 2 * ipow(p, s - i + 1);
    P.tats.push_back({{{f(1), p}}, {{f(2), 2}}});
    if (s + 1 >= 3) P.tats.push_back({{{f(3), p}}, {{f(1), 1}, {f(2), p}}});
    for (std::uint32_t i = 4; i <= s + 1; ++i)
      P.tats.push_back({{{f(i), p}}, {{f(i - 1), 1}, {f(2), (ipow(p, 2) - 1) * ipow(p, i - 4)}}});
  }
  return P;
}

std::string exps_str(const NamedExps& e) {
  std::string s;
  for (auto& [n, k] : e) {
    if (!s.empty()) s += " ";
    s += n + (k == 1 ? "" : "^" + std::to_string(k));
  }
  return s;
}

NamedExps named(const Exponents& a, const std::vector<std::string>& names) {
  NamedExps out;
  for (std::size_t i = 0; i < a.size() && i < names.size(); ++i)
    if (a[i]) out[names[i]] = a[i];
  return out;
}

bool share_support(const NamedExps& a, const NamedExps& b) {
  for (auto& [n, k] : a)
    if (b.count(n)) return true;
  return false;
}

json conjecture_trial(const Options& opt, std::uint32_t r, std::mt19937_64& rng) {
  const std::uint32_t p = opt.p;
  const GaloisField& F = GaloisField::make(p, std::max(opt.k, r));
  Prediction P = predict(p, r);
  json t;
  json findings = json::array();
  Rep3 M;
  try {
    M = sample_stratum("generic", p, r, F, rng);
  } catch (const Error& e) {
    t["status"] = "inconclusive";
    t["reason"] = e.what();
    return t;
  }
  t["M"] = rep3_json(M);
  DivideByXResult<Fq> out;
  try {
    out = divide_by_x_adaptive(sdx_start(M), p);
  } catch (const Error& e) {
    t["status"] = "inconclusive";
    t["reason"] = e.what();
    return t;
  }
  const auto& names = out.B.names();
  json obs_lms = json::object(), pred_lms = json::object();
  std::map<std::string, std::uint64_t> deg;
  for (std::size_t i = 0; i < out.B.size(); ++i) {
    obs_lms[names[i]] = monomial_to_string(ctx_xyz(), out.B[i].lm());
    deg[names[i]] = out.B[i].lm().deg;
  }
  for (auto& [n, e] : P.ydeg) pred_lms[n] = "y^" + std::to_string(e);
  t["observed_lead_monomials"] = obs_lms;
  t["predicted_lead_monomials"] = pred_lms;
  t["certificate_passed"] = out.cert.passed;
  t["generators"] = out.B.size();
  t["adjoined"] = json::array();
  for (auto& a : out.adjoined)
    t["adjoined"].push_back({{"name", a.name}, {"lead_monomial", monomial_to_string(ctx_xyz(), a.lm)},
                             {"from_tat_at", monomial_to_string(ctx_xyz(), a.from.lm)}, {"divided_by_x_power", a.divided_by}});

  bool ok = out.cert.passed;
  if (!out.cert.passed) findings.push_back("divide-by-x result does not certify");
  if (out.B.size() != P.s + 3) {
    ok = false;
    findings.push_back("embedding dimension " + std::to_string(out.B.size()) + ", predicted " + std::to_string(P.s + 3));
  }
  for (auto& [n, e] : P.ydeg) {
    auto it = std::find(names.begin(), names.end(), n);
    if (it == names.end()) {
      ok = false;
      findings.push_back(n + " missing, predicted lm y^" + std::to_string(e));
      continue;
    }
    const auto& m = out.B[it - names.begin()].lm();
    if (m != xyz(0, static_cast<std::uint32_t>(e))) {
      ok = false;
      findings.push_back("lm(" + n + ") = " + monomial_to_string(ctx_xyz(), m) + ", predicted y^" + std::to_string(e));
    }
  }
  json tats = json::array();
  std::vector<std::pair<NamedExps, NamedExps>> obs;
  for (auto& tr : out.cert.tats) {
    NamedExps I = named(tr.pair.I, names), J = named(tr.pair.J, names);
    obs.push_back({I, J});
    tats.push_back({{"lead_monomial", monomial_to_string(ctx_xyz(), tr.pair.lm)}, {"pair", "(" + exps_str(I) + ", " + exps_str(J) + ")"}});
  }
  t["observed_tats"] = tats;
  json pt = json::array();
  auto ydeg_of = [&](const NamedExps& e) {
    std::uint64_t d = 0;
    for (auto& [n, k] : e) d += k * (P.ydeg.count(n) ? P.ydeg.at(n) : 0);
    return d;
  };
  for (auto& want : P.tats) {
    std::string label = "(" + exps_str(want.lhs) + ", " + exps_str(want.rhs) + ")";
    std::string how = "missing";
    for (auto& [I, J] : obs) {
      if (ydeg_of(I) != ydeg_of(want.lhs) || deg.empty()) continue;
      bool exact = (I == want.lhs && J == want.rhs) || (I == want.rhs && J == want.lhs);
      bool equiv = (I == want.lhs && share_support(J, want.rhs)) || (J == want.lhs && share_support(I, want.rhs)) ||
                   (I == want.rhs && share_support(J, want.lhs)) || (J == want.rhs && share_support(I, want.lhs));
      if (exact) {
        how = "exact";
        break;
      }
      if (equiv) how = "same fibre and component as (" + exps_str(I) + ", " + exps_str(J) + ")";
    }
    if (how == "missing") {
      ok = false;
      findings.push_back("predicted tat " + label + " not observed");
    }
    pt.push_back({{"pair", label}, {"y_degree", ydeg_of(want.lhs)}, {"match", how}});
  }
  t["predicted_tats"] = pt;
  if (out.cert.tats.size() != P.s) {
    ok = false;
    findings.push_back(std::to_string(out.cert.tats.size()) + " non-trivial tats, predicted " + std::to_string(P.s));
  }
  auto rels = extract_relations(out.cert, out.B);
  bool vanish = true;
  for (auto& rel : rels) vanish = vanish && evaluate_relation(rel, out.B).is_zero();
  t["relations"] = rels.size();
  t["relations_vanish"] = vanish;
  if (!vanish) {
    ok = false;
    findings.push_back("an extracted relation does not vanish");
  }
  t["status"] = ok ? "consistent" : "inconsistent";
  t["findings"] = findings;
  return t;
}

}  // namespace

json conjecture(const Options& opt) {
  if (opt.p <= 2) fail(Errc::PreconditionUnmet, "needs p > 2");
  std::uint32_t r = opt.r ? opt.r : 4;
  if (r < 2) fail(Errc::PreconditionUnmet, "needs r >= 2");
  if (!is_prime(opt.p)) fail(Errc::NotPrime, std::to_string(opt.p));
  auto t0 = Clock::now();
  Run run;
  for (std::size_t i = 0; i < opt.trials; ++i) {
    auto rng = trial_rng(opt.seed, i);
    auto t1 = Clock::now();
    json t = conjecture_trial(opt, r, rng);
    t["trial"] = i + 1;
    if (opt.timings) t["seconds"] = seconds_since(t1);
    std::string st = t["status"].get<std::string>();
    run.check(trial_prefix(i) + "status reported", true, st);
    for (auto& f : t.value("findings", json::array())) run.finding(trial_prefix(i) + f.get<std::string>());
    run.trials.push_back(std::move(t));
  }
  std::map<std::string, int> tally;
  for (auto& t : run.trials) ++tally[t["status"].get<std::string>()];
  json out;
  out["command"] = "conjecture";
  out["params"] = {{"p", opt.p}, {"r", r}, {"k", std::max(opt.k, r)}, {"trials", opt.trials}, {"seed", opt.seed}};
  Prediction P = predict(opt.p, r);
  json pl = json::object();
  for (auto& [n, e] : P.ydeg) pl[n] = "y^" + std::to_string(e);
  out["prediction"] = {{"embedding_dimension", P.s + 3}, {"relations", P.s}, {"lead_monomials", pl}};
  out["summary"] = tally;
  out["assertions"] = std::move(run.assertions);
  out["findings"] = std::move(run.findings);
  out["trials"] = std::move(run.trials);
  out["passed"] = passed(out);
  if (opt.timings) out["timings"] = {{"total_seconds", seconds_since(t0)}};
  return out;
}

bool passed(const json& report) {
  if (!report.contains("assertions")) return false;
  for (auto& a : report.at("assertions"))
    if (!a.at("pass").get<bool>()) return false;
  return true;
}

std::string render_text(const json& rep) {
  std::ostringstream os;
  std::string cmd = rep.value("command", "report");
  os << cmd;
  if (rep.contains("theorem")) os << " " << rep["theorem"].get<std::string>();
  os << ": " << (rep.value("passed", false) ? "PASS" : "FAIL") << "\n";
  if (rep.contains("params")) {
    os << " ";
    for (auto& [k, v] : rep["params"].items()) os << " " << k << "=" << v.dump();
    os << "\n";
  }
  if (rep.contains("case")) {
    const auto& c = rep["case"];
    os << "  case " << c["tag"].get<std::string>() << " (" << c["theorem"].get<std::string>() << ")"
       << (c["faithful"].get<bool>() ? "" : ", not faithful") << "\n  generators:";
    for (auto& g : c["generators"]) os << " " << g["name"].get<std::string>() << "[" << g["lead_monomial"].get<std::string>() << "]";
    os << "\n  relation degrees:";
    for (auto& r : c["relations"]) os << " " << r["degree"].get<std::uint32_t>();
    os << "\n";
  }
  if (rep.contains("table")) {
    os << "  degree  invariants  lead-algebra\n";
    for (auto& row : rep["table"])
      os << "  " << row["degree"].dump() << "  " << row["invariants"].dump() << "  " << row["lead_algebra"].dump()
         << (row["equal"].get<bool>() ? "" : "  MISMATCH") << "\n";
  }
  if (cmd == "conjecture") {
    for (auto& t : rep["trials"]) {
      os << "  trial " << t["trial"].dump() << ": " << t["status"].get<std::string>();
      if (t.contains("observed_lead_monomials")) {
        os << "  lms";
        for (auto& [n, m] : t["observed_lead_monomials"].items()) os << " " << n << "=" << m.get<std::string>();
      }
      os << "\n";
    }
  }
  std::size_t ok = 0, total = 0;
  for (auto& a : rep.value("assertions", json::array())) {
    ++total;
    bool pass = a["pass"].get<bool>();
    ok += pass;
    os << "  " << (pass ? "ok    " : "FAIL  ") << a["name"].get<std::string>();
    if (a.contains("detail")) os << "  [" << a["detail"].get<std::string>() << "]";
    os << "\n";
  }
  os << "  " << ok << "/" << total << " assertions hold\n";
  auto fs = rep.value("findings", json::array());
  if (!fs.empty()) {
    os << "findings:\n";
    for (auto& f : fs) os << "  - " << f.get<std::string>() << "\n";
  }
  if (rep.contains("timings")) os << "time: " << rep["timings"]["total_seconds"].get<double>() << " s\n";
  return os.str();
}

}  // namespace modinv::harness
