#include "modinv/generic_coeff.hpp"

namespace modinv {

const VarContext& param_context(std::uint32_t r) {
  std::vector<std::string> names;
  for (std::uint32_t i = 1; i <= 2; ++i)
    for (std::uint32_t j = 1; j <= r; ++j) names.push_back("x" + std::to_string(i) + std::to_string(j));
  return VarContext::make(names);
}

const PolyFp& GenericRingData::minor_power(std::size_t i, std::uint32_t k) const {
  std::lock_guard<std::mutex> lock(cache_mu);
  auto key = std::make_pair(i, k);
  auto it = power_cache.find(key);
  if (it == power_cache.end()) it = power_cache.emplace(key, minors[i].pow(k)).first;
  return it->second;
}

GenericRing GenericRing::make(std::uint32_t p, std::uint32_t r, std::vector<std::string> labels,
                              std::vector<PolyFp> minors) {
  if (labels.size() != minors.size()) fail(Errc::InvalidInput, "labels and minors differ in length");
  static std::mutex mu;
  static std::map<std::tuple<std::uint32_t, std::uint32_t, std::vector<std::string>>,
                  std::unique_ptr<GenericRingData>>
      registry;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(p, r, labels);
  auto it = registry.find(key);
  if (it == registry.end()) {
    auto d = std::make_unique<GenericRingData>();
    d->p = p;
    d->r = r;
    d->fp = &GaloisField::prime(p);
    d->params = &param_context(r);
    d->labels = std::move(labels);
    for (auto& m : minors) {
      if (&m.context() != d->params) fail(Errc::ContextMismatch, "minor not in parameter context");
      if (m.is_zero()) fail(Errc::InvalidInput, "declared minor is zero");
    }
    d->minors = std::move(minors);
    it = registry.emplace(key, std::move(d)).first;
  }
  return GenericRing(it->second.get());
}

std::size_t GenericRing::label_index(const std::string& label) const {
  for (std::size_t i = 0; i < d_->labels.size(); ++i)
    if (d_->labels[i] == label) return i;
  fail(Errc::UndeclaredDenominator, "minor " + label + " is not declared");
}

GenericCoeff GenericRing::zero() const { return from_int(0); }
GenericCoeff GenericRing::one() const { return from_int(1); }
GenericCoeff GenericRing::from_int(std::int64_t n) const {
  return from_poly(PolyFp::constant(*d_->params, FieldRef(*d_->fp), d_->fp->from_int(n)));
}
GenericCoeff GenericRing::from_poly(const PolyFp& num) const {
  return GenericCoeff(d_, num, std::vector<std::uint32_t>(d_->minors.size(), 0));
}
GenericCoeff GenericRing::gamma(const std::string& label) const {
  return from_poly(d_->minors[label_index(label)]);
}
GenericCoeff GenericRing::param(std::size_t row, std::size_t col) const {
  return from_poly(PolyFp::variable(*d_->params, FieldRef(*d_->fp), row * d_->r + col));
}

GenericCoeff::GenericCoeff(const GenericRingData* d, PolyFp num, std::vector<std::uint32_t> den)
    : d_(d), num_(std::move(num)), den_(std::move(den)) {
  normalize();
}

bool GenericCoeff::has_denominator() const {
  for (auto e : den_)
    if (e) return true;
  return false;
}

PolyFp GenericCoeff::denominator_poly() const {
  PolyFp out = PolyFp::constant(*d_->params, FieldRef(*d_->fp), d_->fp->one());
  for (std::size_t i = 0; i < den_.size(); ++i)
    if (den_[i]) out = out * d_->minor_power(i, den_[i]);
  return out;
}

void GenericCoeff::normalize() {
  if (num_.is_zero()) {
    std::fill(den_.begin(), den_.end(), 0u);
    return;
  }
  for (std::size_t i = 0; i < den_.size(); ++i) {
    while (den_[i] > 0) {
      auto q = try_exact_div(num_, d_->minors[i]);
      if (!q) break;
      num_ = std::move(*q);
      --den_[i];
    }
  }
}

GenericCoeff GenericCoeff::operator+(const GenericCoeff& o) const {
  if (o.is_zero()) return *this;
  if (is_zero()) return o;
  if (den_ == o.den_) return GenericCoeff(d_, num_ + o.num_, den_);
  std::vector<std::uint32_t> e(den_.size());
  PolyFp a = num_, b = o.num_;
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = std::max(den_[i], o.den_[i]);
    if (e[i] > den_[i]) a = a * d_->minor_power(i, e[i] - den_[i]);
    if (e[i] > o.den_[i]) b = b * d_->minor_power(i, e[i] - o.den_[i]);
  }
  return GenericCoeff(d_, a + b, e);
}

GenericCoeff GenericCoeff::operator-() const {
  GenericCoeff r = *this;
  r.num_ = -r.num_;
  return r;
}

GenericCoeff GenericCoeff::operator-(const GenericCoeff& o) const { return *this + (-o); }

GenericCoeff GenericCoeff::operator*(const GenericCoeff& o) const {
  if (is_zero()) return *this;
  if (o.is_zero()) return o;
  std::vector<std::uint32_t> e(den_.size());
  bool any = false;
  for (std::size_t i = 0; i < e.size(); ++i) {
    e[i] = den_[i] + o.den_[i];
    any = any || e[i];
  }
  if (!any) {
    GenericCoeff r;
    r.d_ = d_;
    r.num_ = num_ * o.num_;
    r.den_ = std::move(e);
    return r;
  }
  return GenericCoeff(d_, num_ * o.num_, e);
}

bool GenericCoeff::operator==(const GenericCoeff& o) const {
  if (den_ == o.den_) return num_ == o.num_;
  PolyFp a = num_, b = o.num_;
  for (std::size_t i = 0; i < den_.size(); ++i) {
    if (o.den_[i] > den_[i]) a = a * d_->minor_power(i, o.den_[i] - den_[i]);
    if (den_[i] > o.den_[i]) b = b * d_->minor_power(i, den_[i] - o.den_[i]);
  }
  return a == b;
}

std::optional<GenericCoeff> GenericCoeff::try_inverse() const {
  if (is_zero()) return std::nullopt;
  PolyFp rest = num_;
  std::vector<std::uint32_t> factors(den_.size(), 0);
  bool progress = true;
  while (!rest.is_constant() && progress) {
    progress = false;
    for (std::size_t i = 0; i < den_.size(); ++i) {
      auto q = try_exact_div(rest, d_->minors[i]);
      if (q) {
        rest = std::move(*q);
        ++factors[i];
        progress = true;
      }
    }
  }
  if (!rest.is_constant()) return std::nullopt;
  Fq c = rest.lc().inverse();
  PolyFp num = PolyFp::constant(*d_->params, FieldRef(*d_->fp), c);
  for (std::size_t i = 0; i < den_.size(); ++i)
    if (den_[i]) num = num * d_->minor_power(i, den_[i]);
  return GenericCoeff(d_, num, factors);
}

GenericCoeff GenericCoeff::inverse() const {
  auto r = try_inverse();
  if (!r) fail(Errc::UndeclaredDenominator, "cannot invert " + to_string());
  return *r;
}

GenericCoeff GenericCoeff::pow(std::int64_t e) const {
  if (e < 0) return inverse().pow(-e);
  if (e == 0) return GenericRing(d_).one();
  std::vector<std::uint32_t> den = den_;
  for (auto& x : den) x = static_cast<std::uint32_t>(x * e);
  return GenericCoeff(d_, num_.pow(static_cast<std::uint64_t>(e)), den);
}

Fq evaluate_params(const PolyFp& f, const std::vector<Fq>& point) {
  if (point.empty()) fail(Errc::InvalidInput, "empty evaluation point");
  const GaloisField& F = point[0].field();
  Fq s = F.zero();
  for (auto& t : f.terms()) {
    Fq v = F.from_int(t.c.field().index_of(t.c));
    for (std::size_t i = 0; i < point.size(); ++i)
      if (t.m[i]) v *= point[i].pow(t.m[i]);
    s += v;
  }
  return s;
}

Fq GenericCoeff::evaluate(const std::vector<Fq>& point) const {
  if (point.size() != d_->params->size()) fail(Errc::ContextMismatch, "point has wrong length");
  Fq den = point[0].field().one();
  for (std::size_t i = 0; i < den_.size(); ++i) {
    if (!den_[i]) continue;
    Fq g = evaluate_params(d_->minors[i], point);
    if (g.is_zero()) fail(Errc::DenominatorVanishes, "g" + d_->labels[i] + " vanishes");
    den *= g.pow(den_[i]);
  }
  return evaluate_params(num_, point) / den;
}

std::string GenericCoeff::to_string() const {
  if (!has_denominator()) return num_.to_string();
  std::string d;
  for (std::size_t i = 0; i < den_.size(); ++i) {
    if (!den_[i]) continue;
    if (!d.empty()) d += "*";
    d += "g" + d_->labels[i];
    if (den_[i] > 1) d += "^" + std::to_string(den_[i]);
  }
  return "(" + num_.to_string() + ")/(" + d + ")";
}

}  // namespace modinv
