#pragma once

// Prime-field arithmetic: residues, primitive roots and discrete logarithms.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "ffdist/error.hpp"

namespace ffdist {

using Residue = std::uint32_t;

namespace detail {

constexpr Residue reduce(std::int64_t value, Residue modulus) {
  const auto m = static_cast<std::int64_t>(modulus);
  std::int64_t r = value % m;
  return static_cast<Residue>(r < 0 ? r + m : r);
}

constexpr Residue mul_mod(Residue a, Residue b, Residue modulus) {
  return static_cast<Residue>(static_cast<std::uint64_t>(a) * b % modulus);
}

constexpr Residue pow_mod(Residue base, std::uint64_t exponent, Residue modulus) {
  std::uint64_t result = 1 % modulus;
  std::uint64_t b = base % modulus;
  while (exponent > 0) {
    if (exponent & 1U) result = result * b % modulus;
    b = b * b % modulus;
    exponent >>= 1U;
  }
  return static_cast<Residue>(result);
}

// Inverse of a modulo m for gcd(a, m) == 1, via the extended Euclidean algorithm.
constexpr std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m) {
  std::int64_t old_r = static_cast<std::int64_t>(a % m), r = static_cast<std::int64_t>(m);
  std::int64_t old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t quotient = old_r / r;
    std::int64_t tmp = old_r - quotient * r;
    old_r = r;
    r = tmp;
    tmp = old_s - quotient * s;
    old_s = s;
    s = tmp;
  }
  const auto mm = static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(((old_s % mm) + mm) % mm);
}

}  // namespace detail

/// Deterministic trial division; moduli here are small enough that this is exact and fast.
constexpr bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0 || n % 3 == 0) return false;
  for (std::uint64_t f = 5; f * f <= n; f += 6) {
    if (n % f == 0 || n % (f + 2) == 0) return false;
  }
  return true;
}

inline std::vector<std::uint64_t> distinct_prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> factors;
  for (std::uint64_t f = 2; f * f <= n; ++f) {
    if (n % f != 0) continue;
    factors.push_back(f);
    while (n % f == 0) n /= f;
  }
  if (n > 1) factors.push_back(n);
  return factors;
}

/// An element of F_q. Carries its modulus so mixing fields is caught at runtime.
class FieldElement {
 public:
  FieldElement(std::int64_t value, Residue modulus) : value_(detail::reduce(value, modulus)), modulus_(modulus) {}

  Residue value() const noexcept { return value_; }
  Residue modulus() const noexcept { return modulus_; }
  bool is_zero() const noexcept { return value_ == 0; }

  FieldElement pow(std::uint64_t exponent) const {
    return FieldElement(detail::pow_mod(value_, exponent, modulus_), modulus_);
  }

  FieldElement inv() const {
    if (value_ == 0) fail(ErrorKind::kInvalidArgument, "zero has no multiplicative inverse");
    return pow(modulus_ - 2);
  }

  FieldElement operator-() const { return FieldElement(value_ == 0 ? 0 : modulus_ - value_, modulus_); }

  friend FieldElement operator+(FieldElement a, FieldElement b) {
    same_field(a, b);
    return FieldElement(static_cast<std::int64_t>(a.value_) + b.value_, a.modulus_);
  }
  friend FieldElement operator-(FieldElement a, FieldElement b) {
    same_field(a, b);
    return FieldElement(static_cast<std::int64_t>(a.value_) - b.value_, a.modulus_);
  }
  friend FieldElement operator*(FieldElement a, FieldElement b) {
    same_field(a, b);
    return FieldElement(detail::mul_mod(a.value_, b.value_, a.modulus_), a.modulus_);
  }
  friend bool operator==(FieldElement a, FieldElement b) = default;

 private:
  static void same_field(FieldElement a, FieldElement b) {
    if (a.modulus_ != b.modulus_) {
      fail(ErrorKind::kFieldMismatch,
           "mixing F_" + std::to_string(a.modulus_) + " and F_" + std::to_string(b.modulus_));
    }
  }

  Residue value_;
  Residue modulus_;
};

/// F_q for prime q together with its smallest primitive root and the discrete-log table.
///
/// Copies share the immutable tables.
class PrimeField {
 public:
  Residue modulus() const noexcept { return data_->q; }
  Residue primitive_root() const noexcept { return data_->g; }
  Residue group_order() const noexcept { return data_->q - 1; }

  FieldElement element(std::int64_t value) const { return FieldElement(value, data_->q); }
  FieldElement zero() const { return element(0); }
  FieldElement one() const { return element(1); }

  /// k with g^k = s, for s != 0.
  Residue dlog(Residue s) const {
    if (s == 0 || s >= data_->q) fail(ErrorKind::kInvalidArgument, "dlog of " + std::to_string(s));
    return data_->dlog[s];
  }
  Residue dlog(FieldElement s) const { return dlog(checked(s).value()); }

  /// g^k, k taken modulo q - 1.
  Residue exp(std::uint64_t k) const { return data_->exp[k % group_order()]; }

  Residue inverse(Residue s) const {
    if (s == 0) fail(ErrorKind::kInvalidArgument, "zero has no multiplicative inverse");
    return data_->exp[(group_order() - data_->dlog[s]) % group_order()];
  }

  Residue add(Residue a, Residue b) const { return (a + b) % data_->q; }
  Residue sub(Residue a, Residue b) const { return (a + data_->q - b) % data_->q; }
  Residue mul(Residue a, Residue b) const { return detail::mul_mod(a, b, data_->q); }
  Residue pow(Residue a, std::uint64_t e) const { return detail::pow_mod(a, e, data_->q); }

  FieldElement checked(FieldElement x) const {
    if (x.modulus() != data_->q) {
      fail(ErrorKind::kFieldMismatch,
           "element of F_" + std::to_string(x.modulus()) + " used with F_" + std::to_string(data_->q));
    }
    return x;
  }

  friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.modulus() == b.modulus(); }

 private:
  struct Data {
    Residue q = 0;
    Residue g = 0;
    std::vector<Residue> dlog;  // dlog[0] unused
    std::vector<Residue> exp;   // exp[k] = g^k, k in [0, q-2]
  };

  explicit PrimeField(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  friend PrimeField make_field(std::uint64_t q);

  std::shared_ptr<const Data> data_;
};

/// Builds F_q. Throws CompositeModulus unless q is prime.
inline PrimeField make_field(std::uint64_t q) {
  if (q > (std::uint64_t{1} << 31)) fail(ErrorKind::kInvalidArgument, "modulus too large for dense tables");
  if (!is_prime(q)) fail(ErrorKind::kCompositeModulus, std::to_string(q) + " is not prime");
  const auto modulus = static_cast<Residue>(q);
  const std::uint64_t group = q - 1;

  Residue g = 1;
  if (q > 2) {
    const auto factors = distinct_prime_factors(group);
    for (g = 2; g < modulus; ++g) {
      const bool generates = std::all_of(factors.begin(), factors.end(), [&](std::uint64_t p) {
        return detail::pow_mod(g, group / p, modulus) != 1;
      });
      if (generates) break;
    }
  }

  auto data = std::make_shared<PrimeField::Data>();
  data->q = modulus;
  data->g = g;
  data->dlog.assign(modulus, 0);
  data->exp.resize(group);
  Residue power = 1;
  for (std::uint64_t k = 0; k < group; ++k) {
    data->exp[k] = power;
    data->dlog[power] = static_cast<Residue>(k);
    power = detail::mul_mod(power, g, modulus);
  }
  return PrimeField(std::move(data));
}

/// All s in F_q with s^n = c, ascending. Solves n*k = dlog(c) mod (q - 1).
inline std::vector<FieldElement> nth_power_roots(const PrimeField& field, std::uint64_t n, FieldElement c) {
  if (n == 0) fail(ErrorKind::kInvalidArgument, "exponent must be >= 1");
  field.checked(c);
  const Residue q = field.modulus();
  if (c.is_zero()) return {field.zero()};

  const std::uint64_t group = field.group_order();
  const std::uint64_t target = field.dlog(c);
  const std::uint64_t g = std::gcd(n, group);
  if (target % g != 0) return {};

  const std::uint64_t reduced_group = group / g;
  std::uint64_t base = 0;
  if (reduced_group > 1) {
    base = (target / g) % reduced_group * detail::inverse_mod((n / g) % reduced_group, reduced_group) % reduced_group;
  }

  std::vector<FieldElement> roots;
  roots.reserve(g);
  for (std::uint64_t i = 0; i < g; ++i) roots.emplace_back(field.exp(base + i * reduced_group), q);
  std::sort(roots.begin(), roots.end(), [](FieldElement a, FieldElement b) { return a.value() < b.value(); });
  return roots;
}

}  // namespace ffdist
