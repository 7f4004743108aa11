#pragma once

// Additive and multiplicative characters of F_q, their Fourier coefficients and Gauss sums.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "ffdist/error.hpp"
#include "ffdist/field.hpp"

namespace ffdist {

using Complex = std::complex<double>;

namespace detail {

// e^{2 pi i k / n} with k reduced exactly before the float conversion.
inline Complex root_of_unity(std::uint64_t k, std::uint64_t n) {
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(k % n) / static_cast<double>(n);
  return std::polar(1.0, angle);
}

}  // namespace detail

/// chi(t) = e^{2 pi i t / q}, tabulated densely.
class AdditiveCharacter {
 public:
  explicit AdditiveCharacter(Residue q) : q_(q), table_(q) {
    for (Residue t = 0; t < q; ++t) table_[t] = detail::root_of_unity(t, q);
  }

  Residue modulus() const noexcept { return q_; }

  Complex operator()(Residue t) const { return table_[t % q_]; }
  Complex operator()(FieldElement t) const { return table_[t.value()]; }

  /// chi evaluated at an arbitrary integer, reduced mod q.
  Complex at(std::int64_t t) const { return table_[detail::reduce(t, q_)]; }

 private:
  Residue q_;
  std::vector<Complex> table_;
};

/// The multiplicative character psi(g^k) = e^{2 pi i index k / family} with psi(0) = 0.
///
/// `family` divides q - 1; the exact order of psi is family / gcd(index, family).
/// The additive character of the same field travels with the table so sums
/// mixing both need a single argument.
class CharacterTable {
 public:
  CharacterTable(PrimeField field, std::uint64_t family, std::uint64_t index)
      : field_(std::move(field)), chi_(field_.modulus()), family_(family), index_(index % family),
        values_(field_.modulus()) {
    for (Residue s = 1; s < field_.modulus(); ++s) {
      values_[s] = detail::root_of_unity(index_ * field_.dlog(s) % family_, family_);
    }
  }

  const PrimeField& field() const noexcept { return field_; }
  const AdditiveCharacter& additive() const noexcept { return chi_; }

  /// Exact multiplicative order h; psi^h is trivial on F_q^*.
  std::uint64_t order() const { return family_ / std::gcd(index_, family_); }
  std::uint64_t family() const noexcept { return family_; }
  std::uint64_t index() const noexcept { return index_; }
  bool is_trivial() const { return order() == 1; }

  Complex operator()(Residue s) const { return values_[s % field_.modulus()]; }
  Complex operator()(FieldElement s) const { return values_[field_.checked(s).value()]; }

  Complex chi(Residue t) const { return chi_(t); }

  /// psi^e for any integer e (negative exponents give conjugate powers).
  CharacterTable power(std::int64_t e) const {
    const auto f = static_cast<std::int64_t>(family_);
    const auto reduced = static_cast<std::uint64_t>(((e % f) + f) % f);
    return CharacterTable(field_, family_, index_ * reduced % family_);
  }

  CharacterTable conj() const { return power(-1); }

 private:
  PrimeField field_;
  AdditiveCharacter chi_;
  std::uint64_t family_;
  std::uint64_t index_;
  std::vector<Complex> values_;
};

/// The character of exact order `order` sending g to e^{2 pi i power / order}.
///
/// `power` selects among the characters of that order (e.g. psi versus psi^2 for order 3)
/// and must be coprime to `order`.
inline CharacterTable mult_character(const PrimeField& field, std::uint64_t order, std::uint64_t power = 1) {
  if (order == 0 || field.group_order() % order != 0) {
    fail(ErrorKind::kOrderDoesNotDivide,
         std::to_string(order) + " does not divide q - 1 = " + std::to_string(field.group_order()));
  }
  if (std::gcd(power % order, order) != 1 && order != 1) {
    fail(ErrorKind::kInvalidArgument,
         "power " + std::to_string(power) + " is not coprime to order " + std::to_string(order));
  }
  return CharacterTable(field, order, power % order);
}

/// Every character of exact order `order`, ordered by power.
inline std::vector<CharacterTable> characters_of_order(const PrimeField& field, std::uint64_t order) {
  std::vector<CharacterTable> out;
  for (std::uint64_t a = (order == 1 ? 0 : 1); a < std::max<std::uint64_t>(order, 1); ++a) {
    if (order == 1 || std::gcd(a, order) == 1) out.push_back(mult_character(field, order, a));
  }
  return out;
}

/// psi-hat(v) = q^{-1} sum_{s != 0} chi(-v s) psi(s).
inline Complex char_fourier(const CharacterTable& psi, FieldElement v) {
  const PrimeField& field = psi.field();
  const Residue q = field.modulus();
  const Residue minus_v = (-field.checked(v)).value();
  Complex sum = 0.0;
  for (Residue s = 1; s < q; ++s) sum += psi.chi(field.mul(minus_v, s)) * psi(s);
  return sum / static_cast<double>(q);
}

struct GaussSum {
  Complex value;
  bool trivial_character = false;  // value is then -1 rather than of modulus sqrt(q)
};

/// G(psi, chi) = sum_{s != 0} psi(s) chi(s).
inline GaussSum gauss_sum(const CharacterTable& psi) {
  const Residue q = psi.field().modulus();
  Complex sum = 0.0;
  for (Residue s = 1; s < q; ++s) sum += psi(s) * psi.chi(s);
  return {sum, psi.is_trivial()};
}

}  // namespace ffdist
