#pragma once

// Subduction, the SAGBI test and the divide-by-x completion loop.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "modinv/poly.hpp"

namespace modinv {

using Exponents = std::vector<std::uint32_t>;

template <class C>
class GeneratorSetT {
 public:
  using Poly = Polynomial<C>;

  GeneratorSetT() = default;
  GeneratorSetT(std::vector<std::string> names, std::vector<Poly> gens) {
    if (names.size() != gens.size()) fail(Errc::InvalidInput, "names and generators differ in length");
    for (std::size_t i = 0; i < gens.size(); ++i) add(names[i], gens[i]);
  }

  void add(const std::string& name, const Poly& g) {
    if (g.is_zero()) fail(Errc::ZeroPolynomial, "generator " + name + " is zero");
    if (!g.is_homogeneous()) fail(Errc::InvalidInput, "generator " + name + " is not homogeneous");
    if (!gens_.empty()) gens_[0].check(g);
    for (auto& n : names_)
      if (n == name) fail(Errc::InvalidInput, "duplicate generator name " + name);
    if (names_.size() >= kMaxVars) fail(Errc::InvalidInput, "too many generators");
    names_.push_back(name);
    gens_.push_back(g);
  }

  std::size_t size() const { return gens_.size(); }
  const Poly& operator[](std::size_t i) const { return gens_.at(i); }
  const std::vector<Poly>& gens() const { return gens_; }
  const std::vector<std::string>& names() const { return names_; }
  const VarContext& context() const { return gens_.at(0).context(); }
  const typename C::Ring& ring() const { return gens_.at(0).ring(); }
  /// Context whose variables are the generator names.
  const VarContext& symbols() const { return VarContext::make(names_); }

  std::vector<Monomial> lead_monomials() const {
    std::vector<Monomial> out;
    for (auto& g : gens_) out.push_back(g.lm());
    return out;
  }
  std::uint32_t max_degree() const {
    std::uint32_t d = 0;
    for (auto& g : gens_) d = std::max<std::uint32_t>(d, g.lm().deg);
    return d;
  }
  /// 2 * (max generator degree) * (max lead-monomial degree).
  std::uint32_t default_degree_bound() const { return 2 * max_degree() * max_degree(); }

  std::optional<std::size_t> index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    return std::nullopt;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Poly> gens_;
};

struct TatPair {
  Exponents I, J;
  std::uint32_t degree = 0;
  Monomial lm;
};

/// Minimal non-trivial binomial relations among the given lead monomials, up
/// to the degree bound. Fibres of the exponent map are split into components
/// of the shared-support graph; each extra component contributes one pair,
/// joined to the component whose representative is largest in the
/// latest-generator-first order.
std::vector<TatPair> enumerate_tats(const std::vector<Monomial>& lms, std::uint32_t degree_bound);

/// Exponent vector a with prod lm_i^{a_i} = m, maximizing the exponent of the
/// latest generator first.
class LeadFactorizer {
 public:
  explicit LeadFactorizer(std::vector<Monomial> lms) : lms_(std::move(lms)) {}
  std::optional<Exponents> factor(const Monomial& m);
  const std::vector<Monomial>& lead_monomials() const { return lms_; }

 private:
  bool search(std::size_t i, const Monomial& t, Exponents& a);
  std::vector<Monomial> lms_;
  std::unordered_map<Monomial, std::optional<Exponents>, MonomialHash> memo_;
};

/// Counts of degree-d monomials in the algebra generated by `lms`, d = 0..max_degree.
std::vector<std::uint64_t> lead_algebra_counts(const std::vector<Monomial>& lms, std::uint32_t max_degree);

template <class C>
class PowerProducts {
 public:
  using Poly = Polynomial<C>;
  explicit PowerProducts(const GeneratorSetT<C>& B) : B_(B) {
    for (std::size_t i = 0; i < B.size(); ++i) monomial_gen_.push_back(B[i].size() == 1);
  }

  Poly get(const Exponents& a) {
    Exponents rest = a;
    Monomial shift;
    C scale = B_.ring().one();
    for (std::size_t i = 0; i < a.size(); ++i)
      if (monomial_gen_[i] && a[i]) {
        shift = shift * B_[i].lm().pow(a[i]);
        scale = scale * B_[i].lc().pow(a[i]);
        rest[i] = 0;
      }
    const Poly& core = rest_product(rest);
    return core.mul_term(shift, scale);
  }

 private:
  const Poly& power(std::size_t i, std::uint32_t k) {
    auto key = std::make_pair(i, k);
    auto it = powers_.find(key);
    if (it == powers_.end()) it = powers_.emplace(key, B_[i].pow(k)).first;
    return it->second;
  }
  const Poly& rest_product(const Exponents& a) {
    auto it = products_.find(a);
    if (it != products_.end()) return it->second;
    Poly acc = Poly::constant(B_.context(), B_.ring(), B_.ring().one());
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i]) acc = acc * power(i, a[i]);
    return products_.emplace(a, std::move(acc)).first->second;
  }

  const GeneratorSetT<C>& B_;
  std::vector<bool> monomial_gen_;
  std::map<std::pair<std::size_t, std::uint32_t>, Poly> powers_;
  std::map<Exponents, Poly> products_;
};

template <class C>
struct SubductionStep {
  C coeff;
  Exponents a;
};

template <class C>
struct SubductionCertificate {
  std::vector<SubductionStep<C>> steps;
  Polynomial<C> remainder;
};

template <class C>
SubductionCertificate<C> subduct(const Polynomial<C>& f, const GeneratorSetT<C>& B, LeadFactorizer& fac,
                                 PowerProducts<C>& prods) {
  SubductionCertificate<C> cert;
  Polynomial<C> g = f;
  const std::uint64_t guard = g.is_zero() ? 0 : monomial_count(g.context().size(), g.lm().deg) + 1;
  std::uint64_t n = 0;
  while (!g.is_zero()) {
    auto a = fac.factor(g.lm());
    if (!a) break;
    if (++n > guard) fail(Errc::NonTermination, "subduction exceeded the monomial count");
    Polynomial<C> P = prods.get(*a);
    C lambda = g.lc() * P.lc().inverse();
    g -= P * lambda;
    cert.steps.push_back({lambda, std::move(*a)});
  }
  cert.remainder = std::move(g);
  return cert;
}

template <class C>
SubductionCertificate<C> subduct(const Polynomial<C>& f, const GeneratorSetT<C>& B) {
  LeadFactorizer fac(B.lead_monomials());
  PowerProducts<C> prods(B);
  return subduct(f, B, fac, prods);
}

template <class C>
struct TatResult {
  TatPair pair;
  C lambda;  // f^I - lambda f^J is subducted
  SubductionCertificate<C> cert;
  bool zero() const { return cert.remainder.is_zero(); }
};

template <class C>
struct SagbiCertificate {
  std::vector<std::string> names;
  std::vector<TatResult<C>> tats;
  std::uint32_t degree_bound = 0;
  bool passed = false;
};

template <class C>
SagbiCertificate<C> sagbi_test(const GeneratorSetT<C>& B, std::uint32_t degree_bound = 0) {
  SagbiCertificate<C> cert;
  cert.names = B.names();
  cert.degree_bound = degree_bound ? degree_bound : B.default_degree_bound();
  LeadFactorizer fac(B.lead_monomials());
  PowerProducts<C> prods(B);
  cert.passed = true;
  for (auto& t : enumerate_tats(B.lead_monomials(), cert.degree_bound)) {
    Polynomial<C> a = prods.get(t.I), b = prods.get(t.J);
    C lambda = a.lc() * b.lc().inverse();
    Polynomial<C> f = a - b * lambda;
    TatResult<C> res{t, lambda, subduct(f, B, fac, prods)};
    if (!res.zero()) cert.passed = false;
    cert.tats.push_back(std::move(res));
  }
  return cert;
}

template <class C>
Polynomial<C> symbol_product(const VarContext& sym, const typename C::Ring& ring, const Exponents& a, const C& c) {
  return Polynomial<C>::monomial(sym, ring, Monomial::from_exponents(a), c);
}

/// One relation per tat: t^I - lambda t^J - sum c_k t^{a_k} - remainder(=0).
template <class C>
std::vector<Polynomial<C>> extract_relations(const SagbiCertificate<C>& cert, const GeneratorSetT<C>& B) {
  const VarContext& sym = B.symbols();
  const auto& R = B.ring();
  std::vector<Polynomial<C>> out;
  for (auto& t : cert.tats) {
    if (!t.zero()) continue;
    std::vector<typename Polynomial<C>::Term> ts;
    ts.push_back({Monomial::from_exponents(t.pair.I), R.one()});
    ts.push_back({Monomial::from_exponents(t.pair.J), -t.lambda});
    for (auto& s : t.cert.steps) ts.push_back({Monomial::from_exponents(s.a), -s.coeff});
    out.push_back(Polynomial<C>::from_terms(sym, R, ts));
  }
  return out;
}

/// Substitutes the generators for their symbols.
template <class C>
Polynomial<C> evaluate_relation(const Polynomial<C>& rel, const GeneratorSetT<C>& B) {
  return compose(rel, B.gens());
}

/// Degree of a relation in the generators' grading.
template <class C>
std::uint32_t relation_degree(const Polynomial<C>& rel, const GeneratorSetT<C>& B) {
  std::uint32_t d = 0;
  for (auto& t : rel.terms()) {
    std::uint32_t s = 0;
    for (std::size_t i = 0; i < B.size(); ++i) s += t.m[i] * B[i].lm().deg;
    d = std::max(d, s);
  }
  return d;
}

template <class C>
struct Adjoined {
  std::string name;
  Monomial lm;
  std::uint32_t divided_by = 0;  // x-power removed
  TatPair from;
};

template <class C>
struct DivideByXResult {
  GeneratorSetT<C> B;
  SagbiCertificate<C> cert;
  std::vector<Adjoined<C>> adjoined;
  std::size_t rounds = 0;
};

/// x is variable 0 and must be a generator; every other variable needs a
/// generator whose lead monomial is a pure power of it.
template <class C>
DivideByXResult<C> sagbi_divide_by_x(GeneratorSetT<C> B, std::uint32_t degree_bound = 0,
                                     std::size_t max_rounds = 32, const std::string& prefix = "g",
                                     std::size_t first_index = 1) {
  const auto& ctx = B.context();
  Polynomial<C> x = Polynomial<C>::variable(ctx, B.ring(), 0);
  bool has_x = false;
  for (auto& g : B.gens()) has_x = has_x || g == x;
  if (!has_x) fail(Errc::HypothesisViolation, "x is not among the generators");
  for (std::size_t v = 1; v < ctx.size(); ++v) {
    bool found = false;
    for (auto& m : B.lead_monomials()) found = found || (m.deg > 0 && m[v] == m.deg);
    if (!found) fail(Errc::HypothesisViolation, "no generator has a pure power of " + ctx.name(v) + " as lead monomial");
  }
  DivideByXResult<C> res;
  for (std::size_t round = 0;; ++round) {
    if (round >= max_rounds) fail(Errc::NonTermination, "divide-by-x loop exceeded the round limit");
    res.cert = sagbi_test(B, degree_bound);
    res.rounds = round + 1;
    const TatResult<C>* bad = nullptr;
    for (auto& t : res.cert.tats)
      if (!t.zero()) {
        bad = &t;
        break;
      }
    if (!bad) break;
    const auto& rem = bad->cert.remainder;
    std::uint32_t m = rem.lm()[0];
    Polynomial<C> g = divide_by_x_power(rem, m);
    LeadFactorizer fac(B.lead_monomials());
    if (fac.factor(g.lm())) fail(Errc::NonTermination, "adjoined lead monomial already in the lead-term algebra");
    std::string name = prefix + std::to_string(res.adjoined.size() + first_index);
    res.adjoined.push_back({name, g.lm(), m, bad->pair});
    B.add(name, g);
  }
  res.B = std::move(B);
  return res;
}

/// Solves base + sum c_i products_i == target modulo the monomial ideal.
template <class C>
std::vector<C> solve_tail_coefficients(const Polynomial<C>& base, const std::vector<Polynomial<C>>& products,
                                       const Polynomial<C>& target, std::span<const Monomial> ideal) {
  const std::size_t n = products.size();
  Polynomial<C> rhs = reduce_mod_monomial_ideal(target - base, ideal);
  std::vector<Polynomial<C>> cols;
  for (auto& p : products) cols.push_back(reduce_mod_monomial_ideal(p, ideal));
  std::vector<Monomial> rows;
  auto note = [&](const Polynomial<C>& f) {
    for (auto& t : f.terms())
      if (std::find(rows.begin(), rows.end(), t.m) == rows.end()) rows.push_back(t.m);
  };
  note(rhs);
  for (auto& c : cols) note(c);
  const auto& R = base.ring();
  std::vector<std::vector<C>> A(rows.size(), std::vector<C>(n + 1, R.zero()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) A[i][j] = cols[j].coefficient(rows[i]);
    A[i][n] = rhs.coefficient(rows[i]);
  }
  std::vector<std::size_t> pivot_row(n, rows.size());
  std::size_t r = 0;
  for (std::size_t j = 0; j < n; ++j) {
    std::optional<C> inv;
    std::size_t piv = rows.size();
    bool nonzero = false;
    for (std::size_t i = r; i < rows.size(); ++i) {
      if (A[i][j].is_zero()) continue;
      nonzero = true;
      inv = A[i][j].try_inverse();
      if (inv) {
        piv = i;
        break;
      }
    }
    if (piv == rows.size()) {
      if (nonzero) fail(Errc::UndeclaredDenominator, "no invertible pivot for unknown " + std::to_string(j + 1));
      fail(Errc::Underdetermined, "unknown " + std::to_string(j + 1) + " is not determined");
    }
    std::swap(A[r], A[piv]);
    for (auto& v : A[r]) v = v * *inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || A[i][j].is_zero()) continue;
      C f = A[i][j];
      for (std::size_t k = 0; k <= n; ++k)
        if (!A[r][k].is_zero()) A[i][k] = A[i][k] - f * A[r][k];
    }
    pivot_row[j] = r++;
  }
  for (std::size_t i = r; i < rows.size(); ++i)
    if (!A[i][n].is_zero()) fail(Errc::Inconsistent, "no coefficients reach the target");
  std::vector<C> out;
  for (std::size_t j = 0; j < n; ++j) out.push_back(A[pivot_row[j]][n]);
  return out;
}

}  // namespace modinv
