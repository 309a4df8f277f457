#pragma once

// The Frobenius-power matrix Gamma, its minors, the invariants f_J built from
// it, and the case-specific generators and N-tilde elements for ranks 2 and 3.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "modinv/generic_coeff.hpp"
#include "modinv/group_action.hpp"
#include "modinv/sagbi.hpp"

namespace modinv {

using MinorIndex = std::vector<std::uint32_t>;  // 1-based rows of Gamma
using PolyG = Polynomial<GenericCoeff>;
using GeneratorSet = GeneratorSetT<Fq>;

std::string minor_label(const MinorIndex& I);
MinorIndex parse_minor(const std::string& label);
/// Strictly increasing, within 1..2r+2, of the given length.
void check_minor_index(std::uint32_t r, const MinorIndex& I, std::size_t length);
MinorIndex shift_minor(const MinorIndex& I, std::uint32_t k);
/// All strictly increasing sequences of the given length in 1..n.
std::vector<MinorIndex> subsequences(std::uint32_t n, std::size_t length);

/// gamma_I as a polynomial in x11..x1r, x21..x2r (cofactor expansion).
const PolyFp& gamma_minor(std::uint32_t p, std::uint32_t r, const MinorIndex& I);
/// gamma_I evaluated at M.
Fq gamma_value(const Rep3& M, const MinorIndex& I);
/// Evaluation point for psi_M, ordered like param_context(r).
std::vector<Fq> param_point(const Rep3& M);

/// Localization of F_p[x_ij] at the given minors.
GenericRing generic_ring(std::uint32_t p, std::uint32_t r, const std::vector<MinorIndex>& declared);
/// Localization at every r x r minor of Gamma.
GenericRing generic_ring_all(std::uint32_t p, std::uint32_t r);
/// The generic representation e_j -> sigma(x1j, x2j) over the parameter ring.
Rep3T<GenericCoeff> generic_rep(const GenericRing& R);

/// Either the generic minors or their values at a fixed M.
template <class C>
struct MinorSource {
  std::uint32_t p = 0, r = 0;
  typename C::Ring ring{};
  std::function<C(const MinorIndex&)> gamma;
  C g(const std::string& label) const { return gamma(parse_minor(label)); }
};

MinorSource<GenericCoeff> generic_source(const GenericRing& R);
MinorSource<Fq> specialized_source(const Rep3& M);

template <class C>
struct XYZ {
  Polynomial<C> x, y, z, delta;
  explicit XYZ(const typename C::Ring& R) {
    const auto& c = ctx_xyz();
    x = Polynomial<C>::variable(c, R, 0);
    y = Polynomial<C>::variable(c, R, 1);
    z = Polynomial<C>::variable(c, R, 2);
    delta = y * y - x * z;
  }
  Polynomial<C> xp(std::uint32_t k) const { return x.pow(k); }
};

/// x-denominator of the v entry in row j: p^i for y/x rows, 2p^i for delta/x^2 rows.
std::uint32_t v_denominator(std::uint32_t p, std::uint32_t j);
/// The exponent e with f_J = x^e f~_J.
inline std::uint32_t f_shift(std::uint32_t p, const MinorIndex& J) { return v_denominator(p, J.back()); }

template <class C>
Polynomial<C> v_numerator(const MinorSource<C>& S, const XYZ<C>& v, std::uint32_t j) {
  std::uint32_t i = (j - 1) / 2;
  std::uint64_t q = 1;
  for (std::uint32_t k = 0; k < i; ++k) q *= S.p;
  if (j % 2 == 1) return v.y.pow(q);
  return -v.delta.pow(q);
}

/// f_J: the (r+1)-minor of Gamma augmented by v, times x^{f_shift(J)}.
template <class C>
Polynomial<C> f_J(const MinorSource<C>& S, const MinorIndex& J) {
  check_minor_index(S.r, J, S.r + 1);
  XYZ<C> v(S.ring);
  const std::uint32_t e = f_shift(S.p, J);
  Polynomial<C> out(ctx_xyz(), S.ring);
  for (std::size_t k = 0; k <= S.r; ++k) {
    MinorIndex rest;
    for (std::size_t t = 0; t <= S.r; ++t)
      if (t != k) rest.push_back(J[t]);
    C g = S.gamma(rest);
    if (g.is_zero()) continue;
    // sign (-1)^{(k+1) + (r+1)}
    if ((k + S.r) % 2 == 1) g = -g;
    out += v_numerator(S, v, J[k]).mul_term(Monomial::var(0, e - v_denominator(S.p, J[k])), g);
  }
  return out;
}

/// sum signs[i] * gamma_idx[i] * f~_{f_idx[i]} = 0.
struct PluckerTerms {
  std::array<int, 3> signs{};
  std::array<MinorIndex, 3> gamma_idx, f_idx;
};

/// The three-term relation from the Pluecker identity of Gamma with the v column
/// and a unit row appended; K has length r+2 and L = (l1,l2,l3) lies in K.
template <class C>
PluckerTerms plucker_combination(const MinorSource<C>& S, const MinorIndex& K, const MinorIndex& L) {
  check_minor_index(S.r, K, S.r + 2);
  if (L.size() != 3 || !(L[0] < L[1] && L[1] < L[2])) fail(Errc::BadIndex, "L must be an increasing triple");
  for (auto l : L)
    if (std::find(K.begin(), K.end(), l) == K.end()) fail(Errc::BadIndex, "L is not contained in K");
  auto without = [&](std::initializer_list<std::uint32_t> drop) {
    MinorIndex out;
    for (auto k : K)
      if (std::find(drop.begin(), drop.end(), k) == drop.end()) out.push_back(k);
    return out;
  };
  PluckerTerms T;
  T.gamma_idx = {without({L[0], L[1]}), without({L[1], L[2]}), without({L[0], L[2]})};
  T.f_idx = {without({L[2]}), without({L[0]}), without({L[1]})};
  std::uint32_t E = 0;
  for (auto& J : T.f_idx) E = std::max(E, f_shift(S.p, J));
  std::array<Polynomial<C>, 3> t;
  for (std::size_t i = 0; i < 3; ++i)
    t[i] = f_J(S, T.f_idx[i]).mul_term(Monomial::var(0, E - f_shift(S.p, T.f_idx[i])), S.gamma(T.gamma_idx[i]));
  for (int mask = 0; mask < 4; ++mask) {
    std::array<int, 3> s{1, (mask & 1) ? -1 : 1, (mask & 2) ? -1 : 1};
    Polynomial<C> sum = t[0];
    sum = s[1] > 0 ? sum + t[1] : sum - t[1];
    sum = s[2] > 0 ? sum + t[2] : sum - t[2];
    if (sum.is_zero()) {
      T.signs = s;
      return T;
    }
  }
  fail(Errc::NoVanishingCombination, "no sign choice annihilates K=" + minor_label(K) + " L=" + minor_label(L));
}

/// f~_J = sum coeff * f~_base^{p^i}; base 0 is (1..r+1), base 1 is (2..r+2).
template <class C>
struct PowerTerm {
  int base = 0;
  std::uint32_t i = 0;
  C coeff;
};

template <class C>
std::vector<PowerTerm<C>> decompose_powers(const MinorSource<C>& S, const MinorIndex& J) {
  check_minor_index(S.r, J, S.r + 1);
  const std::uint32_t t = J.back() - J.front();
  if (t == S.r) {
    std::uint32_t j1 = J.front();
    if (j1 % 2 == 1) return {{0, (j1 - 1) / 2, S.ring.one()}};
    return {{1, (j1 - 2) / 2, S.ring.one()}};
  }
  std::uint32_t m = J.front() + 1;
  while (std::find(J.begin(), J.end(), m) != J.end()) ++m;
  MinorIndex K = J;
  K.insert(std::upper_bound(K.begin(), K.end(), m), m);
  auto T = plucker_combination(S, K, {J.front(), m, J.back()});
  // T.f_idx[2] == J; solve for it.
  C lead = S.gamma(T.gamma_idx[2]);
  if (T.signs[2] < 0) lead = -lead;
  if (lead.is_zero()) fail(Errc::DenominatorVanishes, "g" + minor_label(T.gamma_idx[2]) + " vanishes");
  C inv = lead.inverse();
  std::map<std::pair<int, std::uint32_t>, C> acc;
  for (std::size_t a = 0; a < 2; ++a) {
    C g = S.gamma(T.gamma_idx[a]);
    if (g.is_zero()) continue;
    C scale = -(T.signs[a] < 0 ? -g : g) * inv;
    for (auto& pt : decompose_powers(S, T.f_idx[a])) {
      auto key = std::make_pair(pt.base, pt.i);
      auto it = acc.find(key);
      C v = pt.coeff * scale;
      if (it == acc.end())
        acc.emplace(key, v);
      else
        it->second += v;
    }
  }
  std::vector<PowerTerm<C>> out;
  for (auto& [k, c] : acc)
    if (!c.is_zero()) out.push_back({k.first, k.second, c});
  return out;
}

/// x^E f~_J - sum coeff x^E f~_base^{p^i} for the smallest E clearing all terms; zero iff the decomposition holds.
template <class C>
Polynomial<C> decomposition_defect(const MinorSource<C>& S, const MinorIndex& J, const std::vector<PowerTerm<C>>& terms) {
  MinorIndex base[2];
  for (std::uint32_t k = 1; k <= S.r + 1; ++k) {
    base[0].push_back(k);
    base[1].push_back(k + 1);
  }
  auto power_of = [&](std::uint32_t i) {
    std::uint64_t q = 1;
    for (std::uint32_t k = 0; k < i; ++k) q *= S.p;
    return q;
  };
  std::uint64_t E = f_shift(S.p, J);
  for (auto& t : terms) E = std::max<std::uint64_t>(E, f_shift(S.p, base[t.base]) * power_of(t.i));
  Polynomial<C> out = f_J(S, J).mul_monomial(Monomial::var(0, static_cast<std::uint32_t>(E - f_shift(S.p, J))));
  Polynomial<C> fb[2] = {f_J(S, base[0]), f_J(S, base[1])};
  for (auto& t : terms) {
    std::uint64_t q = power_of(t.i);
    std::uint64_t sh = E - f_shift(S.p, base[t.base]) * q;
    out -= fb[t.base].pow(q).mul_term(Monomial::var(0, static_cast<std::uint32_t>(sh)), t.coeff);
  }
  return out;
}

template <class C>
struct F1F2 {
  Polynomial<C> f1, f2;
};

/// f1 = f_(1..r+1); f2 = f_(1..r,r+2) for r odd, and
/// (gamma_(1..r) f_(1..r,r+2) + f1^2) / (2 x^{p^s - 2p^{s-1}}) for r even.
template <class C>
F1F2<C> generic_f1_f2(const MinorSource<C>& S) {
  if (S.p <= 2) fail(Errc::PreconditionUnmet, "sigma-type representations need p > 2");
  MinorIndex a, b, g;
  for (std::uint32_t k = 1; k <= S.r + 1; ++k) a.push_back(k);
  for (std::uint32_t k = 1; k <= S.r; ++k) b.push_back(k), g.push_back(k);
  b.push_back(S.r + 2);
  F1F2<C> out{f_J(S, a), f_J(S, b)};
  if (S.r % 2 == 0) {
    std::uint32_t s = (S.r + 1) / 2;
    std::uint64_t ps = 1;
    for (std::uint32_t k = 0; k < s; ++k) ps *= S.p;
    std::uint32_t m = static_cast<std::uint32_t>(ps - 2 * (ps / S.p));
    Polynomial<C> num = out.f2 * S.gamma(g) + out.f1 * out.f1;
    if (x_adic_valuation(num) < m && !num.is_zero()) fail(Errc::DivisionFailure, "f2 numerator not divisible by x^" + std::to_string(m));
    out.f2 = divide_by_x_power(num, m) * S.ring.from_int(2).inverse();
  }
  return out;
}

/// lm(f1), lm(f2) predicted for the generic case.
std::pair<Monomial, Monomial> generic_f1_f2_lms(std::uint32_t p, std::uint32_t r);

/// f3 numerator before division: f1^p + g123^{p-2} f2^2 + 2(-g123)^{(p-3)/2} g125 x^{p^2-p} f1^{(p+1)/2}.
template <class C>
Polynomial<C> rank3_f3_numerator(const MinorSource<C>& S, const Polynomial<C>& f1, const Polynomial<C>& f2,
                                 std::span<const Monomial> ideal = {}) {
  const std::uint32_t p = S.p;
  C g123 = S.g("123"), g125 = S.g("125");
  Polynomial<C> out = f1.pow_truncated(p, ideal);
  out += f2.multiply(f2, ideal) * g123.pow(static_cast<std::int64_t>(p) - 2);
  C k = S.ring.from_int(2) * (-g123).pow((p - 3) / 2) * g125;
  out += f1.pow_truncated((p + 1) / 2, ideal).mul_term(Monomial::var(0, p * p - p), k);
  if (!ideal.empty()) out = out.filter_ideal(ideal);
  return out;
}

// ---- evaluation-based constructions -------------------------------------

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CaseResult {
  std::string tag;
  std::string theorem;
  Rep3 input;
  Rep3 canonical;
  std::size_t effective_rank = 0;
  bool faithful = true;
  GeneratorSet B;
  SagbiCertificate<Fq> cert;
  std::vector<PolyF> relations;
  std::vector<std::uint32_t> relation_degrees;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  bool passed() const;
  void check(const std::string& name, bool ok, const std::string& detail = "");
};

/// Degree bound for the tat search: p times the largest degree of a
/// generator whose lead monomial is a pure power of y.
std::uint32_t case_degree_bound(std::uint32_t p, const GeneratorSet& B);

/// H_W(s,t) with H_W(x, y^2) = N_W(y)^2 - y^{2p^r}, in the context (s, t).
PolyF h_w_polynomial(const Rep2& rep);
const VarContext& ctx_st();

/// {x, delta, N_W(y), N_W(z)} with the hypersurface relation verified.
CaseResult symmetric_square_generators(const Rep2& rep);
/// delta^{p^r} - N_W(y)^2 + x^{p^r} N_W(z) + H_W(x, delta).
PolyF symmetric_square_relation(const Rep2& rep);

struct NtildeResult {
  PolyF Ntilde;  // full element (empty if only computed modulo the ideal)
  PolyF reduced; // modulo the stated monomial ideal
  PolyF N;       // Ntilde divided by the stated x-power
  std::vector<Fq> printed, solved;
  bool printed_ok = false, solved_ok = false;
  std::vector<Check> checks;
  std::vector<std::string> notes;
};

/// Rank 2, gamma12 gamma13 != 0: N-tilde with the printed tail, lead term check
/// modulo (x^{2p+1}, y x^{2p}), re-derivation of the tail coefficients.
NtildeResult rank2_Ntilde(const Rep3& M, bool full = true);

/// Generic rank-2 N-tilde modulo (x^{2p+1}, y x^{2p}) with the printed tail.
/// The printed tail is tried first; on a miss the tail is re-solved.
struct GenericNtilde {
  PolyG reduced;
  PolyG expected;
  std::vector<GenericCoeff> printed, solved;
  bool printed_ok = false, ok = false;
};
GenericNtilde rank2_Ntilde_generic(std::uint32_t p);
/// f1^2 - g12^2 delta^p - 2 x^{p-2} f2 = -g12 (g14 delta x^{2p-2} + g24 y x^{2p-1}), generically.
bool rank2_f2eqn_generic(std::uint32_t p);

struct F3Result {
  PolyF f1, f2, numerator, f3;
  std::vector<Check> checks;
};
/// f3 at M (gamma123 != 0) with the lead-term and congruence checks.
F3Result rank3_f3(const Rep3& M);

/// Lemma-style N-tilde for rank 3 generic (solver-derived c1..c3).
NtildeResult rank3_Ntilde_generic(const Rep3& M, const F3Result& f);

/// {x, f1, f2, N(z)} at M.
GeneratorSet sdx_start(const Rep3& M);
/// Divide-by-x with the tat degree bound recomputed from the completed set
/// until it stabilizes; adjoined generators are named f3, f4, ...
DivideByXResult<Fq> divide_by_x_adaptive(const GeneratorSet& B, std::uint32_t p);

CaseResult rank2_case(const Rep3& M);
CaseResult rank3_case(const Rep3& M);
/// Any sigma-type input: canonicalize, reduce to a faithful image and dispatch.
CaseResult classify_sigma(const Rep3& M);
/// Type (1,2): image {[[1,c1,c2],[0,1,0],[0,0,1]]}; generators {x, y, N_U(z)}.
CaseResult type12_generators(const std::vector<std::pair<Fq, Fq>>& U, std::uint32_t p);

/// Columns of M forming an F_p-basis of the image group.
Rep3 faithful_image(const Rep3& M);

/// psi_M applied to a polynomial with generic coefficients.
PolyF specialize(const PolyG& f, const Rep3& M);

}  // namespace modinv
