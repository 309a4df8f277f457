#pragma once

// Coefficients in F_p[x_1j, x_2j] localized at a declared set of minors.
//
// A value is num / prod_i gamma_i^{den[i]}.  Only declared minors may appear
// in denominators; anything else raises UndeclaredDenominator.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "modinv/field.hpp"
#include "modinv/poly.hpp"

namespace modinv {

using PolyFp = Polynomial<Fq>;

struct GenericRingData {
  std::uint32_t p = 0;
  std::uint32_t r = 0;
  const GaloisField* fp = nullptr;
  const VarContext* params = nullptr;  // x11..x1r, x21..x2r
  std::vector<std::string> labels;
  std::vector<PolyFp> minors;

  mutable std::mutex cache_mu;
  mutable std::map<std::pair<std::size_t, std::uint32_t>, PolyFp> power_cache;

  const PolyFp& minor_power(std::size_t i, std::uint32_t k) const;
};

class GenericCoeff;

class GenericRing {
 public:
  GenericRing() = default;
  explicit GenericRing(const GenericRingData* d) : d_(d) {}

  /// Interned by (p, r, labels).  `minors` are the declared denominators.
  static GenericRing make(std::uint32_t p, std::uint32_t r, std::vector<std::string> labels,
                          std::vector<PolyFp> minors);

  GenericCoeff zero() const;
  GenericCoeff one() const;
  GenericCoeff from_int(std::int64_t n) const;
  GenericCoeff from_poly(const PolyFp& num) const;
  /// The declared minor with the given label, as an element.
  GenericCoeff gamma(const std::string& label) const;
  GenericCoeff param(std::size_t row, std::size_t col) const;

  std::uint32_t characteristic() const { return d_->p; }
  std::uint32_t rank() const { return d_->r; }
  const GaloisField& prime_field() const { return *d_->fp; }
  const VarContext& params() const { return *d_->params; }
  const std::vector<std::string>& labels() const { return d_->labels; }
  const PolyFp& minor(std::size_t i) const { return d_->minors.at(i); }
  std::size_t label_index(const std::string& label) const;
  const GenericRingData* data() const { return d_; }
  bool operator==(const GenericRing& o) const { return d_ == o.d_; }

 private:
  const GenericRingData* d_ = nullptr;
};

/// Parameter context x11..x1r, x21..x2r (x11 smallest).
const VarContext& param_context(std::uint32_t r);

class GenericCoeff {
 public:
  using Ring = GenericRing;

  GenericCoeff() = default;
  GenericCoeff(const GenericRingData* d, PolyFp num, std::vector<std::uint32_t> den);

  GenericRing ring() const { return GenericRing(d_); }
  const PolyFp& numerator() const { return num_; }
  const std::vector<std::uint32_t>& denominator() const { return den_; }
  bool is_zero() const noexcept { return num_.is_zero(); }
  bool has_denominator() const;
  PolyFp denominator_poly() const;

  GenericCoeff operator+(const GenericCoeff& o) const;
  GenericCoeff operator-(const GenericCoeff& o) const;
  GenericCoeff operator-() const;
  GenericCoeff operator*(const GenericCoeff& o) const;
  GenericCoeff operator/(const GenericCoeff& o) const { return *this * o.inverse(); }
  GenericCoeff& operator+=(const GenericCoeff& o) { return *this = *this + o; }
  GenericCoeff& operator-=(const GenericCoeff& o) { return *this = *this - o; }
  GenericCoeff& operator*=(const GenericCoeff& o) { return *this = *this * o; }
  /// Cross-multiplication equality.
  bool operator==(const GenericCoeff& o) const;
  bool operator!=(const GenericCoeff& o) const { return !(*this == o); }

  std::optional<GenericCoeff> try_inverse() const;
  GenericCoeff inverse() const;
  GenericCoeff pow(std::int64_t e) const;

  /// psi_M: parameters mapped to `point` (ordered like the parameter context).
  /// Throws DenominatorVanishes naming the offending minor.
  Fq evaluate(const std::vector<Fq>& point) const;

  std::string to_string() const;

 private:
  void normalize();
  const GenericRingData* d_ = nullptr;
  PolyFp num_;
  std::vector<std::uint32_t> den_;
};

/// Evaluates an F_p-polynomial in the parameters at a point of an extension field.
Fq evaluate_params(const PolyFp& f, const std::vector<Fq>& point);

}  // namespace modinv
