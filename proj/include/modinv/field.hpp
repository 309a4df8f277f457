#pragma once

// Finite fields F_{p^k} in the polynomial-quotient representation.
//
// Elements are stored as Zech logarithms relative to a primitive element, so
// multiplication, inversion and addition are all table lookups.  Residue
// vectors (coefficients of 1, t, t^2, ... modulo the defining polynomial) are
// the external form.

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "modinv/error.hpp"

namespace modinv {

bool is_prime(std::uint64_t n);

class Fq;
class FieldRef;

class GaloisField {
 public:
  /// Interned field of order p^k.  Without a modulus the lexicographically
  /// first monic irreducible of degree k is used.  Throws NotPrime,
  /// ReducibleModulus or FieldTooLarge.
  static const GaloisField& make(std::uint32_t p, std::uint32_t k = 1,
                                 std::optional<std::vector<std::uint32_t>> modulus = std::nullopt);
  static const GaloisField& prime(std::uint32_t p) { return make(p, 1); }

  GaloisField(const GaloisField&) = delete;
  GaloisField& operator=(const GaloisField&) = delete;

  std::uint32_t characteristic() const noexcept { return p_; }
  std::uint32_t degree() const noexcept { return k_; }
  std::uint32_t order() const noexcept { return q_; }
  /// Monic defining polynomial, low degree first (length k+1).
  const std::vector<std::uint32_t>& modulus() const noexcept { return modulus_; }

  Fq zero() const;
  Fq one() const;
  Fq from_int(std::int64_t n) const;
  Fq from_residues(std::span<const std::uint32_t> residues) const;
  /// Element with packed index sum_i a_i p^i; enumerates the field for index < q.
  Fq from_index(std::uint32_t index) const;
  /// The class of t in F_p[t]/(modulus).
  Fq generator() const;
  Fq primitive() const;

  std::vector<std::uint32_t> residues(const Fq& a) const;
  std::uint32_t index_of(const Fq& a) const;

  // Raw log-domain arithmetic.  kZero marks the zero element.
  std::uint32_t zero_raw() const noexcept { return q_ - 1; }
  std::uint32_t add_raw(std::uint32_t a, std::uint32_t b) const noexcept {
    const std::uint32_t z = q_ - 1;
    if (a == z) return b;
    if (b == z) return a;
    std::uint32_t d = b >= a ? b - a : b + z - a;
    std::uint32_t s = zech_[d];
    if (s == z) return z;
    s += a;
    return s >= z ? s - z : s;
  }
  std::uint32_t neg_raw(std::uint32_t a) const noexcept {
    const std::uint32_t z = q_ - 1;
    if (a == z) return z;
    std::uint32_t s = a + half_;
    return s >= z ? s - z : s;
  }
  std::uint32_t mul_raw(std::uint32_t a, std::uint32_t b) const noexcept {
    const std::uint32_t z = q_ - 1;
    if (a == z || b == z) return z;
    std::uint32_t s = a + b;
    return s >= z ? s - z : s;
  }
  std::uint32_t inv_raw(std::uint32_t a) const {
    const std::uint32_t z = q_ - 1;
    if (a == z) fail(Errc::DivisionFailure, "inverse of zero");
    return a == 0 ? 0 : z - a;
  }
  std::uint32_t pow_raw(std::uint32_t a, std::int64_t e) const {
    const std::uint32_t z = q_ - 1;
    if (a == z) {
      if (e == 0) return 0;
      if (e < 0) fail(Errc::DivisionFailure, "negative power of zero");
      return z;
    }
    std::int64_t m = static_cast<std::int64_t>(z);
    std::int64_t r = (static_cast<std::int64_t>(a) * (e % m)) % m;
    if (r < 0) r += m;
    return static_cast<std::uint32_t>(r);
  }

  std::string to_string(const Fq& a) const;

 private:
  GaloisField(std::uint32_t p, std::vector<std::uint32_t> modulus);
  std::uint32_t pack(std::span<const std::uint32_t> v) const;

  std::uint32_t p_;
  std::uint32_t k_;
  std::uint32_t q_;
  std::uint32_t half_;  // log of -1
  std::vector<std::uint32_t> modulus_;
  std::vector<std::uint32_t> exp_;   // log -> packed index
  std::vector<std::uint32_t> log_;   // packed index -> log
  std::vector<std::uint32_t> zech_;  // log(1 + a^i)
};

/// Lightweight handle used as the coefficient-ring descriptor for Fq.
class FieldRef {
 public:
  FieldRef() = default;
  explicit FieldRef(const GaloisField& f) : f_(&f) {}
  Fq zero() const;
  Fq one() const;
  Fq from_int(std::int64_t n) const;
  std::uint32_t characteristic() const { return f_->characteristic(); }
  const GaloisField& field() const { return *f_; }
  bool operator==(const FieldRef& o) const { return f_ == o.f_; }

 private:
  const GaloisField* f_ = nullptr;
};

class Fq {
 public:
  using Ring = FieldRef;

  Fq() = default;
  Fq(const GaloisField* f, std::uint32_t raw) : f_(f), v_(raw) {}

  const GaloisField& field() const { return *f_; }
  FieldRef ring() const { return FieldRef(*f_); }
  std::uint32_t raw() const noexcept { return v_; }
  bool is_zero() const noexcept { return v_ == f_->zero_raw(); }
  bool is_one() const noexcept { return v_ == 0; }

  Fq operator+(const Fq& o) const { return {f_, f_->add_raw(v_, o.v_)}; }
  Fq operator-(const Fq& o) const { return {f_, f_->add_raw(v_, f_->neg_raw(o.v_))}; }
  Fq operator-() const { return {f_, f_->neg_raw(v_)}; }
  Fq operator*(const Fq& o) const { return {f_, f_->mul_raw(v_, o.v_)}; }
  Fq operator/(const Fq& o) const { return {f_, f_->mul_raw(v_, f_->inv_raw(o.v_))}; }
  Fq& operator+=(const Fq& o) { v_ = f_->add_raw(v_, o.v_); return *this; }
  Fq& operator-=(const Fq& o) { v_ = f_->add_raw(v_, f_->neg_raw(o.v_)); return *this; }
  Fq& operator*=(const Fq& o) { v_ = f_->mul_raw(v_, o.v_); return *this; }
  bool operator==(const Fq& o) const noexcept { return v_ == o.v_ && f_ == o.f_; }
  bool operator!=(const Fq& o) const noexcept { return !(*this == o); }

  Fq inverse() const { return {f_, f_->inv_raw(v_)}; }
  std::optional<Fq> try_inverse() const {
    if (is_zero()) return std::nullopt;
    return inverse();
  }
  Fq pow(std::int64_t e) const { return {f_, f_->pow_raw(v_, e)}; }
  /// a -> a^p.
  Fq frobenius() const { return pow(f_->characteristic()); }
  bool in_prime_field() const { return frobenius() == *this; }

  std::string to_string() const { return f_->to_string(*this); }

 private:
  const GaloisField* f_ = nullptr;
  std::uint32_t v_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const Fq& a) { return os << a.to_string(); }

inline Fq GaloisField::zero() const { return {this, q_ - 1}; }
inline Fq GaloisField::one() const { return {this, 0}; }
inline Fq FieldRef::zero() const { return f_->zero(); }
inline Fq FieldRef::one() const { return f_->one(); }
inline Fq FieldRef::from_int(std::int64_t n) const { return f_->from_int(n); }

/// Univariate helpers over F_p used for irreducibility testing; coefficient
/// vectors are low degree first.
namespace upoly {
std::vector<std::uint32_t> trim(std::vector<std::uint32_t> a);
std::vector<std::uint32_t> mod(std::vector<std::uint32_t> a, const std::vector<std::uint32_t>& m,
                               std::uint32_t p);
std::vector<std::uint32_t> mulmod(const std::vector<std::uint32_t>& a,
                                  const std::vector<std::uint32_t>& b,
                                  const std::vector<std::uint32_t>& m, std::uint32_t p);
std::vector<std::uint32_t> gcd(std::vector<std::uint32_t> a, std::vector<std::uint32_t> b,
                               std::uint32_t p);
bool is_irreducible(const std::vector<std::uint32_t>& monic, std::uint32_t p);
}  // namespace upoly

}  // namespace modinv

template <>
struct std::hash<modinv::Fq> {
  std::size_t operator()(const modinv::Fq& a) const noexcept { return a.raw(); }
};
