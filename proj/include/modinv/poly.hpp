#pragma once

// Sparse multivariate polynomials over a coefficient ring C.
//
// C must provide a nested C::Ring handle with zero(), one(), from_int(n) and
// characteristic(), and element operations + - * / == pow(e) is_zero() ring().
// Terms are kept sorted in descending grevlex order with variable 0 smallest.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modinv/error.hpp"

namespace modinv {

inline constexpr std::size_t kMaxVars = 10;

class VarContext {
 public:
  /// Interned context; identical name lists give the same object.
  static const VarContext& make(std::vector<std::string> names) {
    static std::mutex mu;
    static std::map<std::vector<std::string>, std::unique_ptr<VarContext>> registry;
    if (names.size() > kMaxVars) fail(Errc::InvalidInput, "too many variables");
    std::lock_guard<std::mutex> lock(mu);
    auto it = registry.find(names);
    if (it == registry.end())
      it = registry.emplace(names, std::unique_ptr<VarContext>(new VarContext(names))).first;
    return *it->second;
  }

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<std::size_t> index_of(std::string_view n) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == n) return i;
    return std::nullopt;
  }

 private:
  explicit VarContext(std::vector<std::string> names) : names_(std::move(names)) {}
  std::vector<std::string> names_;
};

struct Monomial {
  std::array<std::uint16_t, kMaxVars> e{};
  std::uint32_t deg = 0;

  static Monomial var(std::size_t i, std::uint32_t k = 1) {
    Monomial m;
    m.e[i] = static_cast<std::uint16_t>(k);
    m.deg = k;
    return m;
  }
  static Monomial from_exponents(std::span<const std::uint32_t> ex) {
    if (ex.size() > kMaxVars) fail(Errc::InvalidInput, "exponent vector too long");
    Monomial m;
    for (std::size_t i = 0; i < ex.size(); ++i) {
      if (ex[i] > 0xffff) fail(Errc::InvalidInput, "exponent too large");
      m.e[i] = static_cast<std::uint16_t>(ex[i]);
      m.deg += ex[i];
    }
    return m;
  }

  std::uint32_t operator[](std::size_t i) const { return e[i]; }
  void set(std::size_t i, std::uint32_t v) {
    deg = deg - e[i] + v;
    e[i] = static_cast<std::uint16_t>(v);
  }
  bool is_one() const { return deg == 0; }

  Monomial operator*(const Monomial& o) const {
    Monomial r;
    for (std::size_t i = 0; i < kMaxVars; ++i) r.e[i] = static_cast<std::uint16_t>(e[i] + o.e[i]);
    r.deg = deg + o.deg;
    return r;
  }
  bool divides(const Monomial& o) const {
    if (deg > o.deg) return false;
    for (std::size_t i = 0; i < kMaxVars; ++i)
      if (e[i] > o.e[i]) return false;
    return true;
  }
  /// Assumes o divides *this.
  Monomial operator/(const Monomial& o) const {
    Monomial r;
    for (std::size_t i = 0; i < kMaxVars; ++i) r.e[i] = static_cast<std::uint16_t>(e[i] - o.e[i]);
    r.deg = deg - o.deg;
    return r;
  }
  Monomial pow(std::uint32_t k) const {
    Monomial r;
    for (std::size_t i = 0; i < kMaxVars; ++i) r.e[i] = static_cast<std::uint16_t>(e[i] * k);
    r.deg = deg * k;
    return r;
  }
  bool operator==(const Monomial& o) const noexcept { return deg == o.deg && e == o.e; }
  bool operator!=(const Monomial& o) const noexcept { return !(*this == o); }

  std::vector<std::uint32_t> exponents(std::size_t n) const {
    return std::vector<std::uint32_t>(e.begin(), e.begin() + n);
  }
};

/// -1, 0, 1 for a < b, a == b, a > b in grevlex with variable 0 smallest.
inline int grevlex_cmp(const Monomial& a, const Monomial& b) noexcept {
  if (a.deg != b.deg) return a.deg < b.deg ? -1 : 1;
  for (std::size_t i = 0; i < kMaxVars; ++i)
    if (a.e[i] != b.e[i]) return a.e[i] > b.e[i] ? -1 : 1;
  return 0;
}

inline bool grevlex_less(const Monomial& a, const Monomial& b) noexcept { return grevlex_cmp(a, b) < 0; }

enum class Ordering { LT, EQ, GT };

inline Ordering grevlex_compare(const VarContext& ca, const Monomial& a, const VarContext& cb,
                                const Monomial& b) {
  if (&ca != &cb) fail(Errc::ContextMismatch, "monomials from different contexts");
  int c = grevlex_cmp(a, b);
  return c < 0 ? Ordering::LT : (c > 0 ? Ordering::GT : Ordering::EQ);
}

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ m.deg;
    for (std::size_t i = 0; i < kMaxVars; ++i) {
      h ^= m.e[i];
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

inline std::string monomial_to_string(const VarContext& ctx, const Monomial& m) {
  if (m.deg == 0) return "1";
  std::string s;
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (!m.e[i]) continue;
    if (!s.empty()) s += '*';
    s += ctx.name(i);
    if (m.e[i] > 1) s += "^" + std::to_string(m.e[i]);
  }
  return s;
}

namespace detail {

/// Open-addressing accumulator used for products.
template <class C>
class TermTable {
 public:
  explicit TermTable(std::size_t expected) {
    std::size_t cap = 16;
    while (cap < expected * 2) cap <<= 1;
    slots_.resize(cap);
    used_.assign(cap, 0);
  }
  void add(const Monomial& m, const C& c) {
    if ((count_ + 1) * 2 > slots_.size()) grow();
    std::size_t mask = slots_.size() - 1;
    std::size_t i = MonomialHash{}(m) & mask;
    while (used_[i]) {
      if (slots_[i].first == m) {
        slots_[i].second += c;
        return;
      }
      i = (i + 1) & mask;
    }
    used_[i] = 1;
    slots_[i] = {m, c};
    ++count_;
  }
  template <class F>
  void drain(F&& f) {
    for (std::size_t i = 0; i < slots_.size(); ++i)
      if (used_[i] && !slots_[i].second.is_zero()) f(std::move(slots_[i].first), std::move(slots_[i].second));
  }

 private:
  void grow() {
    std::vector<std::pair<Monomial, C>> old = std::move(slots_);
    std::vector<char> old_used = std::move(used_);
    slots_.assign(old.size() * 2, {});
    used_.assign(old.size() * 2, 0);
    count_ = 0;
    for (std::size_t i = 0; i < old.size(); ++i)
      if (old_used[i]) add(old[i].first, old[i].second);
  }
  std::vector<std::pair<Monomial, C>> slots_;
  std::vector<char> used_;
  std::size_t count_ = 0;
};

}  // namespace detail

template <class C>
class Polynomial {
 public:
  using Coeff = C;
  using Ring = typename C::Ring;
  struct Term {
    Monomial m;
    C c;
  };

  Polynomial() = default;
  Polynomial(const VarContext& ctx, Ring ring) : ctx_(&ctx), ring_(ring) {}

  static Polynomial constant(const VarContext& ctx, Ring ring, const C& c) {
    return monomial(ctx, ring, Monomial{}, c);
  }
  static Polynomial constant(const VarContext& ctx, Ring ring, std::int64_t n) {
    return constant(ctx, ring, ring.from_int(n));
  }
  static Polynomial variable(const VarContext& ctx, Ring ring, std::size_t i) {
    if (i >= ctx.size()) fail(Errc::InvalidInput, "variable index out of range");
    return monomial(ctx, ring, Monomial::var(i), ring.one());
  }
  static Polynomial variable(const VarContext& ctx, Ring ring, std::string_view name) {
    auto i = ctx.index_of(name);
    if (!i) fail(Errc::InvalidInput, "unknown variable " + std::string(name));
    return variable(ctx, ring, *i);
  }
  static Polynomial monomial(const VarContext& ctx, Ring ring, const Monomial& m, const C& c) {
    Polynomial f(ctx, ring);
    if (!c.is_zero()) f.terms_.push_back({m, c});
    return f;
  }
  /// Combines like terms and sorts.
  static Polynomial from_terms(const VarContext& ctx, Ring ring, std::vector<Term> terms) {
    Polynomial f(ctx, ring);
    std::sort(terms.begin(), terms.end(),
              [](const Term& a, const Term& b) { return grevlex_less(b.m, a.m); });
    for (auto& t : terms) {
      if (!f.terms_.empty() && f.terms_.back().m == t.m) {
        f.terms_.back().c += t.c;
        if (f.terms_.back().c.is_zero()) f.terms_.pop_back();
      } else if (!t.c.is_zero()) {
        f.terms_.push_back(std::move(t));
      }
    }
    return f;
  }
  /// Trusts the caller that terms are sorted, distinct and nonzero.
  static Polynomial from_sorted(const VarContext& ctx, Ring ring, std::vector<Term> terms) {
    Polynomial f(ctx, ring);
    f.terms_ = std::move(terms);
    return f;
  }

  const VarContext& context() const { return *ctx_; }
  const Ring& ring() const { return ring_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  const Term& lead() const {
    if (terms_.empty()) fail(Errc::ZeroPolynomial, "lead term of zero polynomial");
    return terms_.front();
  }
  const Monomial& lm() const { return lead().m; }
  const C& lc() const { return lead().c; }
  std::int64_t degree() const {
    std::int64_t d = -1;
    for (auto& t : terms_) d = std::max<std::int64_t>(d, t.m.deg);
    return d;
  }
  bool is_homogeneous() const {
    for (auto& t : terms_)
      if (t.m.deg != terms_.front().m.deg) return false;
    return true;
  }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].m.deg == 0); }
  C coefficient(const Monomial& m) const {
    for (auto& t : terms_)
      if (t.m == m) return t.c;
    return ring_.zero();
  }
  /// Homogeneous component of degree d.
  Polynomial component(std::uint32_t d) const {
    std::vector<Term> out;
    for (auto& t : terms_)
      if (t.m.deg == d) out.push_back(t);
    return from_sorted(*ctx_, ring_, std::move(out));
  }

  Polynomial operator+(const Polynomial& g) const { return merge(g, false); }
  Polynomial operator-(const Polynomial& g) const { return merge(g, true); }
  Polynomial operator-() const {
    Polynomial r = *this;
    for (auto& t : r.terms_) t.c = -t.c;
    return r;
  }
  Polynomial& operator+=(const Polynomial& g) { return *this = *this + g; }
  Polynomial& operator-=(const Polynomial& g) { return *this = *this - g; }
  Polynomial& operator*=(const Polynomial& g) { return *this = *this * g; }

  Polynomial operator*(const C& c) const {
    if (c.is_zero()) return Polynomial(*ctx_, ring_);
    Polynomial r(*ctx_, ring_);
    r.terms_.reserve(terms_.size());
    for (auto& t : terms_) {
      C v = t.c * c;
      if (!v.is_zero()) r.terms_.push_back({t.m, std::move(v)});
    }
    return r;
  }
  Polynomial mul_term(const Monomial& m, const C& c) const {
    if (c.is_zero()) return Polynomial(*ctx_, ring_);
    Polynomial r(*ctx_, ring_);
    r.terms_.reserve(terms_.size());
    for (auto& t : terms_) {
      C v = t.c * c;
      if (!v.is_zero()) r.terms_.push_back({t.m * m, std::move(v)});
    }
    return r;
  }
  Polynomial mul_monomial(const Monomial& m) const {
    Polynomial r = *this;
    for (auto& t : r.terms_) t.m = t.m * m;
    return r;
  }

  Polynomial operator*(const Polynomial& g) const { return multiply(g, {}); }

  /// Product with every term divisible by one of `ideal` dropped.
  Polynomial multiply(const Polynomial& g, std::span<const Monomial> ideal) const {
    check(g);
    if (is_zero() || g.is_zero()) return Polynomial(*ctx_, ring_);
    const Polynomial& a = size() >= g.size() ? *this : g;
    const Polynomial& b = size() >= g.size() ? g : *this;
    auto killed = [&](const Monomial& m) {
      for (auto& gen : ideal)
        if (gen.divides(m)) return true;
      return false;
    };
    if (b.size() == 1) {
      Polynomial r = a.mul_term(b.terms_[0].m, b.terms_[0].c);
      if (!ideal.empty()) r = r.filter(killed);
      return r;
    }
    detail::TermTable<C> table(a.size() + b.size());
    for (auto& tb : b.terms_) {
      for (auto& ta : a.terms_) {
        Monomial m = ta.m * tb.m;
        if (!ideal.empty() && killed(m)) continue;
        table.add(m, ta.c * tb.c);
      }
    }
    std::vector<Term> out;
    table.drain([&](Monomial m, C c) { out.push_back({std::move(m), std::move(c)}); });
    std::sort(out.begin(), out.end(), [](const Term& x, const Term& y) { return grevlex_less(y.m, x.m); });
    return from_sorted(*ctx_, ring_, std::move(out));
  }

  /// f(x)^p computed termwise: coefficients to the p-th power, exponents scaled.
  Polynomial frobenius() const {
    const std::uint32_t p = ring_.characteristic();
    Polynomial r(*ctx_, ring_);
    r.terms_.reserve(terms_.size());
    for (auto& t : terms_) r.terms_.push_back({t.m.pow(p), t.c.pow(p)});
    return r;
  }

  Polynomial pow(std::uint64_t e) const { return pow_truncated(e, {}); }

  /// Power using base-p digits and the Frobenius map; truncated if `ideal` nonempty.
  Polynomial pow_truncated(std::uint64_t e, std::span<const Monomial> ideal) const {
    Polynomial result = constant(*ctx_, ring_, ring_.one());
    if (e == 0) return result;
    const std::uint32_t p = ring_.characteristic();
    Polynomial base = *this;
    bool first = true;
    while (e) {
      std::uint64_t d = e % p;
      e /= p;
      if (d) {
        Polynomial bd = base;
        for (std::uint64_t i = 1; i < d; ++i) bd = bd.multiply(base, ideal);
        result = first ? bd : result.multiply(bd, ideal);
        if (first && !ideal.empty()) result = result.filter_ideal(ideal);
        first = false;
      }
      if (e) base = base.frobenius();
    }
    return result;
  }

  Polynomial filter_ideal(std::span<const Monomial> ideal) const {
    return filter([&](const Monomial& m) {
      for (auto& gen : ideal)
        if (gen.divides(m)) return true;
      return false;
    });
  }

  bool operator==(const Polynomial& g) const {
    if (terms_.size() != g.terms_.size()) return false;
    for (std::size_t i = 0; i < terms_.size(); ++i)
      if (terms_[i].m != g.terms_[i].m || !(terms_[i].c == g.terms_[i].c)) return false;
    return true;
  }
  bool operator!=(const Polynomial& g) const { return !(*this == g); }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    const C one = ring_.one();
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      const auto& t = terms_[i];
      bool neg = !(t.c == one) && (-t.c) == one;
      std::string cs = neg ? std::string() : coeff_string(t.c);
      if (i == 0) {
        if (neg) s += "-";
      } else {
        s += neg ? " - " : " + ";
      }
      bool unit = neg || t.c == one;
      if (t.m.deg == 0) {
        s += unit ? "1" : cs;
      } else {
        if (!unit) s += cs + "*";
        s += monomial_to_string(*ctx_, t.m);
      }
    }
    return s;
  }

  template <class Pred>
  Polynomial filter(Pred&& killed) const {
    Polynomial r(*ctx_, ring_);
    for (auto& t : terms_)
      if (!killed(t.m)) r.terms_.push_back(t);
    return r;
  }

  void check(const Polynomial& g) const {
    if (ctx_ != g.ctx_) fail(Errc::ContextMismatch, "polynomials from different contexts");
  }

 private:
  static std::string coeff_string(const C& c) {
    std::string s = c.to_string();
    bool simple = true;
    for (char ch : s)
      if (ch == '+' || ch == '-' || ch == '/' || ch == '*' || ch == ' ') simple = false;
    return simple ? s : "(" + s + ")";
  }

  Polynomial merge(const Polynomial& g, bool subtract) const {
    check(g);
    Polynomial r(*ctx_, ring_);
    r.terms_.reserve(terms_.size() + g.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < terms_.size() || j < g.terms_.size()) {
      int c;
      if (i == terms_.size()) c = -1;
      else if (j == g.terms_.size()) c = 1;
      else c = grevlex_cmp(terms_[i].m, g.terms_[j].m);
      if (c > 0) {
        r.terms_.push_back(terms_[i++]);
      } else if (c < 0) {
        const auto& t = g.terms_[j++];
        r.terms_.push_back({t.m, subtract ? -t.c : t.c});
      } else {
        C v = subtract ? terms_[i].c - g.terms_[j].c : terms_[i].c + g.terms_[j].c;
        if (!v.is_zero()) r.terms_.push_back({terms_[i].m, std::move(v)});
        ++i;
        ++j;
      }
    }
    return r;
  }

  const VarContext* ctx_ = nullptr;
  Ring ring_{};
  std::vector<Term> terms_;
};

template <class C>
Polynomial<C> operator*(const C& c, const Polynomial<C>& f) {
  return f * c;
}

template <class C>
std::pair<Monomial, C> lead_term(const Polynomial<C>& f) {
  return {f.lm(), f.lc()};
}

/// Multivariate division by lead terms; nullopt unless g divides f.
template <class C>
std::optional<Polynomial<C>> try_exact_div(const Polynomial<C>& f, const Polynomial<C>& g) {
  f.check(g);
  if (g.is_zero()) fail(Errc::DivisionFailure, "division by zero polynomial");
  using T = typename Polynomial<C>::Term;
  const auto& lg = g.lead();
  if (g.size() == 1) {
    std::vector<T> out;
    out.reserve(f.size());
    for (auto& t : f.terms()) {
      if (!lg.m.divides(t.m)) return std::nullopt;
      out.push_back({t.m / lg.m, t.c / lg.c});
    }
    return Polynomial<C>::from_sorted(f.context(), f.ring(), std::move(out));
  }
  if (!f.is_zero() && (f.lm().deg < lg.m.deg || !lg.m.divides(f.lm()))) return std::nullopt;
  std::vector<T> q;
  Polynomial<C> rem = f;
  while (!rem.is_zero()) {
    const auto& lt = rem.lead();
    if (!lg.m.divides(lt.m)) return std::nullopt;
    Monomial qm = lt.m / lg.m;
    C qc = lt.c / lg.c;
    rem = rem - g.mul_term(qm, qc);
    q.push_back({qm, qc});
  }
  return Polynomial<C>::from_sorted(f.context(), f.ring(), std::move(q));
}

template <class C>
Polynomial<C> exact_div(const Polynomial<C>& f, const Polynomial<C>& g) {
  auto q = try_exact_div(f, g);
  if (!q) fail(Errc::NotDivisible, "polynomial is not an exact multiple");
  return *std::move(q);
}

/// f / v^m for the variable with index `var` (default x = index 0).
template <class C>
Polynomial<C> divide_by_x_power(const Polynomial<C>& f, std::uint32_t m, std::size_t var = 0) {
  using T = typename Polynomial<C>::Term;
  std::vector<T> out;
  out.reserve(f.size());
  for (auto& t : f.terms()) {
    if (t.m[var] < m) fail(Errc::NotDivisible, "term not divisible by " + f.context().name(var) + "^" + std::to_string(m));
    Monomial nm = t.m;
    nm.set(var, t.m[var] - m);
    out.push_back({nm, t.c});
  }
  // Dividing every term by the same monomial preserves the order.
  return Polynomial<C>::from_sorted(f.context(), f.ring(), std::move(out));
}

/// Largest m with x^m dividing every term (x = variable `var`).
template <class C>
std::uint32_t x_adic_valuation(const Polynomial<C>& f, std::size_t var = 0) {
  std::uint32_t m = 0xffffffffu;
  for (auto& t : f.terms()) m = std::min<std::uint32_t>(m, t.m[var]);
  return f.is_zero() ? 0 : m;
}

template <class C>
Polynomial<C> reduce_mod_monomial_ideal(const Polynomial<C>& f, std::span<const Monomial> gens) {
  return f.filter_ideal(gens);
}

/// Substitutes images[i] for variable i (all images in a common target context).
template <class C>
Polynomial<C> compose(const Polynomial<C>& f, const std::vector<Polynomial<C>>& images) {
  if (images.size() != f.context().size()) fail(Errc::ContextMismatch, "wrong number of images");
  const auto& tctx = images.empty() ? f.context() : images[0].context();
  Polynomial<C> zero(tctx, f.ring());
  if (f.is_zero()) return zero;
  // Horner scheme on the highest variable, recursing on the rest.
  using T = typename Polynomial<C>::Term;
  std::function<Polynomial<C>(std::vector<T>, std::size_t)> rec = [&](std::vector<T> terms, std::size_t nv) {
    if (terms.empty()) return zero;
    if (nv == 0) {
      C s = terms[0].c;
      for (std::size_t i = 1; i < terms.size(); ++i) s += terms[i].c;
      return Polynomial<C>::constant(tctx, f.ring(), s);
    }
    const std::size_t v = nv - 1;
    std::map<std::uint32_t, std::vector<T>, std::greater<>> groups;
    for (auto& t : terms) {
      Monomial m = t.m;
      std::uint32_t a = m[v];
      m.set(v, 0);
      groups[a].push_back({m, t.c});
    }
    Polynomial<C> acc = zero;
    std::uint32_t cur = groups.begin()->first;
    for (auto& [a, g] : groups) {
      for (; cur > a; --cur) acc = acc * images[v];
      acc = acc + rec(std::move(g), v);
    }
    for (; cur > 0; --cur) acc = acc * images[v];
    return acc;
  };
  return rec(f.terms(), f.context().size());
}

/// Evaluation at a point in the coefficient ring.
template <class C>
C evaluate(const Polynomial<C>& f, std::span<const C> point) {
  if (point.size() != f.context().size()) fail(Errc::ContextMismatch, "wrong number of values");
  C s = f.ring().zero();
  for (auto& t : f.terms()) {
    C v = t.c;
    for (std::size_t i = 0; i < point.size(); ++i)
      if (t.m[i]) v = v * point[i].pow(t.m[i]);
    s += v;
  }
  return s;
}

/// Linear change of variables.  `mat` is written in the display basis, which
/// lists variables from largest to smallest; display row i describes the image
/// of internal variable n-1-i as sum_j mat[i][j] * (display variable j).
template <class C>
Polynomial<C> substitute_linear(const Polynomial<C>& f, const std::vector<std::vector<C>>& mat) {
  const std::size_t n = f.context().size();
  if (mat.size() != n) fail(Errc::ContextMismatch, "matrix size does not match variable count");
  for (auto& row : mat)
    if (row.size() != n) fail(Errc::ContextMismatch, "matrix is not square");
  // Invertibility by Gaussian elimination over the coefficient ring.
  {
    auto a = mat;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t piv = n;
      for (std::size_t r = c; r < n; ++r)
        if (!a[r][c].is_zero()) {
          piv = r;
          break;
        }
      if (piv == n) fail(Errc::SingularMatrix, "substitution matrix is singular");
      std::swap(a[c], a[piv]);
      C inv = a[c][c].pow(-1);
      for (std::size_t r = c + 1; r < n; ++r) {
        if (a[r][c].is_zero()) continue;
        C fac = a[r][c] * inv;
        for (std::size_t k = c; k < n; ++k) a[r][k] = a[r][k] - fac * a[c][k];
      }
    }
  }
  std::vector<Polynomial<C>> images;
  images.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    const auto& row = mat[n - 1 - v];
    std::vector<typename Polynomial<C>::Term> terms;
    for (std::size_t j = 0; j < n; ++j)
      if (!row[j].is_zero()) terms.push_back({Monomial::var(n - 1 - j), row[j]});
    images.push_back(Polynomial<C>::from_terms(f.context(), f.ring(), std::move(terms)));
  }
  return compose(f, images);
}

/// Applies `fn` to every coefficient, landing in (ctx, ring).
template <class D, class C, class F>
Polynomial<D> map_coefficients(const Polynomial<C>& f, const VarContext& ctx, typename D::Ring ring, F&& fn) {
  std::vector<typename Polynomial<D>::Term> out;
  out.reserve(f.size());
  for (auto& t : f.terms()) {
    D c = fn(t.c);
    if (!c.is_zero()) out.push_back({t.m, std::move(c)});
  }
  if (&ctx == &f.context()) return Polynomial<D>::from_sorted(ctx, ring, std::move(out));
  return Polynomial<D>::from_terms(ctx, ring, std::move(out));
}

/// Monomial count of the given degree in n variables.
inline std::uint64_t monomial_count(std::size_t n, std::uint32_t d) {
  if (n == 0) return d == 0 ? 1 : 0;
  std::uint64_t r = 1;
  for (std::size_t i = 1; i < n; ++i) r = r * (d + i) / i;
  return r;
}

/// All monomials of degree d in n variables, descending grevlex.
inline std::vector<Monomial> monomials_of_degree(std::size_t n, std::uint32_t d) {
  std::vector<Monomial> out;
  Monomial m;
  std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t i, std::uint32_t left) {
    if (i + 1 == n) {
      m.set(i, left);
      out.push_back(m);
      m.set(i, 0);
      return;
    }
    for (std::uint32_t a = 0; a <= left; ++a) {
      m.set(i, a);
      rec(i + 1, left - a);
    }
    m.set(i, 0);
  };
  if (n == 0) {
    if (d == 0) out.push_back(m);
    return out;
  }
  rec(0, d);
  std::sort(out.begin(), out.end(), [](const Monomial& a, const Monomial& b) { return grevlex_less(b, a); });
  return out;
}

}  // namespace modinv
