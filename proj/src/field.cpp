#include "modinv/field.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace modinv {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

namespace upoly {

using Vec = std::vector<std::uint32_t>;

Vec trim(Vec a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

static std::uint32_t inv_mod(std::uint32_t a, std::uint32_t p) {
  std::uint64_t r = 1, b = a % p;
  for (std::uint32_t e = p - 2; e; e >>= 1, b = b * b % p)
    if (e & 1) r = r * b % p;
  return static_cast<std::uint32_t>(r);
}

Vec mod(Vec a, const Vec& m, std::uint32_t p) {
  a = trim(std::move(a));
  const std::size_t dm = m.size() - 1;
  const std::uint32_t lead_inv = inv_mod(m.back(), p);
  while (a.size() > dm) {
    const std::uint64_t c = static_cast<std::uint64_t>(a.back()) * lead_inv % p;
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i)
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + (p - c) * m[i]) % p);
    a = trim(std::move(a));
  }
  return a;
}

Vec mulmod(const Vec& a, const Vec& b, const Vec& m, std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  Vec c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      c[i + j] = static_cast<std::uint32_t>((c[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p);
  return mod(std::move(c), m, p);
}

Vec gcd(Vec a, Vec b, std::uint32_t p) {
  a = trim(std::move(a));
  b = trim(std::move(b));
  while (!b.empty()) {
    Vec r = mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

static Vec powmod(Vec base, std::uint64_t e, const Vec& m, std::uint32_t p) {
  Vec r{1};
  while (e) {
    if (e & 1) r = mulmod(r, base, m, p);
    e >>= 1;
    if (e) base = mulmod(base, base, m, p);
  }
  return r;
}

bool is_irreducible(const Vec& monic, std::uint32_t p) {
  const std::size_t k = monic.size() - 1;
  if (k == 0) return false;
  if (k == 1) return true;
  Vec t{0, 1};
  Vec tp = t;
  for (std::size_t i = 1; i <= k / 2; ++i) {
    tp = powmod(tp, p, monic, p);
    Vec diff = tp;
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = (diff[1] + p - 1) % p;
    Vec g = gcd(monic, trim(diff), p);
    if (g.size() > 1) return false;
  }
  return true;
}

}  // namespace upoly

namespace {

constexpr std::uint64_t kMaxOrder = 1u << 22;

std::vector<std::uint32_t> search_modulus(std::uint32_t p, std::uint32_t k) {
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < k; ++i) count *= p;
  std::vector<std::uint32_t> m(k + 1, 0);
  m[k] = 1;
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    std::uint64_t v = idx;
    for (std::uint32_t i = 0; i < k; ++i) {
      m[i] = static_cast<std::uint32_t>(v % p);
      v /= p;
    }
    if (m[0] == 0 && k > 1) continue;
    if (upoly::is_irreducible(m, p)) return m;
  }
  fail(Errc::ReducibleModulus, "no irreducible polynomial found");
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace

const GaloisField& GaloisField::make(std::uint32_t p, std::uint32_t k,
                                     std::optional<std::vector<std::uint32_t>> modulus) {
  if (!is_prime(p)) fail(Errc::NotPrime, std::to_string(p) + " is not prime");
  if (p >= (1u << 16)) fail(Errc::FieldTooLarge, "characteristic must be below 2^16");
  if (k < 1) fail(Errc::InvalidInput, "extension degree must be at least 1");
  std::uint64_t q = 1;
  for (std::uint32_t i = 0; i < k; ++i) {
    q *= p;
    if (q > kMaxOrder) fail(Errc::FieldTooLarge, "field order exceeds table limit");
  }

  std::vector<std::uint32_t> m;
  if (modulus) {
    m = *modulus;
    for (auto& c : m) c %= p;
    if (m.size() != k + 1) fail(Errc::InvalidInput, "modulus must have k+1 coefficients");
    if (m.back() != 1) fail(Errc::InvalidInput, "modulus must be monic");
    if (!upoly::is_irreducible(m, p)) fail(Errc::ReducibleModulus, "modulus is reducible");
  }

  static std::mutex mu;
  static std::map<std::pair<std::uint32_t, std::vector<std::uint32_t>>, std::unique_ptr<GaloisField>> registry;
  static std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::uint32_t>> default_modulus;
  std::lock_guard<std::mutex> lock(mu);
  if (!modulus) {
    auto key = std::make_pair(p, k);
    auto it = default_modulus.find(key);
    if (it == default_modulus.end()) it = default_modulus.emplace(key, search_modulus(p, k)).first;
    m = it->second;
  }
  auto key = std::make_pair(p, m);
  auto it = registry.find(key);
  if (it == registry.end())
    it = registry.emplace(key, std::unique_ptr<GaloisField>(new GaloisField(p, m))).first;
  return *it->second;
}

GaloisField::GaloisField(std::uint32_t p, std::vector<std::uint32_t> modulus)
    : p_(p), k_(static_cast<std::uint32_t>(modulus.size() - 1)), modulus_(std::move(modulus)) {
  q_ = 1;
  for (std::uint32_t i = 0; i < k_; ++i) q_ *= p_;
  const std::uint32_t n = q_ - 1;

  auto unpack = [&](std::uint32_t idx) {
    std::vector<std::uint32_t> v(k_, 0);
    for (std::uint32_t i = 0; i < k_; ++i) {
      v[i] = idx % p_;
      idx /= p_;
    }
    return upoly::trim(v);
  };

  // Find a primitive element by testing orders.
  std::uint32_t prim = 0;
  if (q_ == 2) {
    prim = 1;
  } else {
    auto factors = prime_factors(n);
    for (std::uint32_t g = 2; g < q_ && !prim; ++g) {
      auto gv = unpack(g);
      bool ok = true;
      for (auto l : factors) {
        std::vector<std::uint32_t> r{1}, b = gv;
        for (std::uint64_t e = n / l; e; e >>= 1) {
          if (e & 1) r = upoly::mulmod(r, b, modulus_, p_);
          b = upoly::mulmod(b, b, modulus_, p_);
        }
        if (r == std::vector<std::uint32_t>{1}) {
          ok = false;
          break;
        }
      }
      if (ok) prim = g;
    }
  }

  exp_.assign(n, 0);
  log_.assign(q_, n);
  std::vector<std::uint32_t> cur{1};
  const auto gv = unpack(prim);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint32_t idx = pack(cur);
    exp_[i] = idx;
    log_[idx] = i;
    cur = upoly::mulmod(cur, gv, modulus_, p_);
  }

  zech_.assign(n, n);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint32_t idx = exp_[i];
    std::uint32_t low = idx % p_;
    std::uint32_t plus_one = idx - low + (low + 1) % p_;
    zech_[i] = log_[plus_one];
  }
  half_ = (p_ == 2) ? 0 : n / 2;
}

std::uint32_t GaloisField::pack(std::span<const std::uint32_t> v) const {
  std::uint32_t idx = 0;
  for (std::size_t i = v.size(); i-- > 0;) idx = idx * p_ + v[i];
  return idx;
}

Fq GaloisField::from_int(std::int64_t n) const {
  std::int64_t r = n % static_cast<std::int64_t>(p_);
  if (r < 0) r += p_;
  return {this, log_[static_cast<std::uint32_t>(r)]};
}

Fq GaloisField::from_residues(std::span<const std::uint32_t> residues) const {
  if (residues.size() > k_) {
    // Reduce longer inputs modulo the defining polynomial.
    std::vector<std::uint32_t> v(residues.begin(), residues.end());
    for (auto& c : v) c %= p_;
    v = upoly::mod(std::move(v), modulus_, p_);
    return {this, log_[pack(v)]};
  }
  std::vector<std::uint32_t> v(residues.begin(), residues.end());
  for (auto& c : v) c %= p_;
  return {this, log_[pack(v)]};
}

Fq GaloisField::from_index(std::uint32_t index) const {
  if (index >= q_) fail(Errc::InvalidInput, "field index out of range");
  return {this, log_[index]};
}

Fq GaloisField::generator() const {
  const std::uint32_t t[2] = {0, 1};
  return from_residues(t);
}

Fq GaloisField::primitive() const { return {this, q_ > 2 ? 1u : 0u}; }

std::uint32_t GaloisField::index_of(const Fq& a) const {
  return a.raw() == q_ - 1 ? 0 : exp_[a.raw()];
}

std::vector<std::uint32_t> GaloisField::residues(const Fq& a) const {
  std::uint32_t idx = index_of(a);
  std::vector<std::uint32_t> v(k_, 0);
  for (std::uint32_t i = 0; i < k_; ++i) {
    v[i] = idx % p_;
    idx /= p_;
  }
  return v;
}

std::string GaloisField::to_string(const Fq& a) const {
  auto v = residues(a);
  if (k_ == 1) return std::to_string(v[0]);
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = v.size(); i-- > 0;) {
    if (!v[i]) continue;
    if (!first) os << '+';
    first = false;
    if (i == 0) {
      os << v[i];
      continue;
    }
    if (v[i] != 1) os << v[i] << '*';
    os << 't';
    if (i > 1) os << '^' << i;
  }
  if (first) os << '0';
  return os.str();
}

}  // namespace modinv
