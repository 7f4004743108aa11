#pragma once

// Numerical checks of the character-sum identities behind the cubic sphere estimates,
// and measured ratios for the exponential-sum bounds they rely on.
//
// Identities are evaluated on both sides by direct summation. Bounds report
// |sum| / envelope; the envelope constant is left to the caller.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string_view>
#include <string>
#include <utility>
#include <vector>

#include "ffdist/characters.hpp"
#include "ffdist/error.hpp"
#include "ffdist/field.hpp"

namespace ffdist {

using ParameterList = std::vector<std::pair<std::string, std::int64_t>>;

/// Identities pass when |lhs - rhs| < kIdentityRelativeTolerance * max(1, |lhs|, |rhs|).
inline constexpr double kIdentityRelativeTolerance = 1e-10;

struct IdentityCheck {
  std::string name;
  ParameterList parameters;
  std::string note;
  Complex lhs;
  Complex rhs;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct BoundCheck {
  std::string name;
  ParameterList parameters;
  std::string note;
  double magnitude = 0.0;
  double envelope = 1.0;
  double ratio = 0.0;

  bool within(double envelope_constant) const { return ratio <= envelope_constant; }
};

inline IdentityCheck make_identity_check(std::string name, ParameterList parameters, Complex lhs, Complex rhs,
                                         std::string note = {}) {
  IdentityCheck check{std::move(name), std::move(parameters), std::move(note), lhs, rhs};
  check.residual = std::abs(lhs - rhs);
  check.tolerance = kIdentityRelativeTolerance * std::max({1.0, std::abs(lhs), std::abs(rhs)});
  check.pass = check.residual < check.tolerance;
  return check;
}

inline BoundCheck make_bound_check(std::string name, ParameterList parameters, Complex sum, double envelope,
                                   std::string note = {}) {
  BoundCheck check{std::move(name), std::move(parameters), std::move(note), std::abs(sum), envelope};
  check.ratio = check.magnitude / envelope;
  return check;
}

namespace detail {

inline void require_order_three_setting(const PrimeField& field, const CharacterTable& psi) {
  if (field.modulus() % 3 != 1) {
    fail(ErrorKind::kHypothesisViolated, "q = " + std::to_string(field.modulus()) + " is not 1 mod 3");
  }
  if (!(psi.field() == field)) fail(ErrorKind::kFieldMismatch, "character belongs to another field");
  if (psi.order() != 3) {
    fail(ErrorKind::kHypothesisViolated, "character has order " + std::to_string(psi.order()) + ", need 3");
  }
}

inline double binomial(unsigned n, unsigned k) {
  double value = 1.0;
  for (unsigned i = 1; i <= k; ++i) value = value * (n - k + i) / i;
  return value;
}

/// sum over s in (F_q^*)^l of chi(sum_i s_i + c_i / s_i) prod_i psi(s_i), enumerated directly.
inline Complex twisted_kloosterman_product_sum(const CharacterTable& psi, std::span<const Residue> coefficients) {
  const PrimeField& field = psi.field();
  const Residue q = field.modulus();
  const std::size_t l = coefficients.size();

  // phase[i][s] = s + c_i s^{-1}
  std::vector<std::vector<Residue>> phase(l, std::vector<Residue>(q, 0));
  for (std::size_t i = 0; i < l; ++i) {
    for (Residue s = 1; s < q; ++s) phase[i][s] = field.add(s, field.mul(coefficients[i], field.inverse(s)));
  }

  Complex total = 0.0;
  std::function<void(std::size_t, Residue, Complex)> recurse = [&](std::size_t depth, Residue acc, Complex weight) {
    if (depth == l) {
      total += psi.chi(acc) * weight;
      return;
    }
    for (Residue s = 1; s < q; ++s) recurse(depth + 1, field.add(acc, phase[depth][s]), weight * psi(s));
  };
  recurse(0, 0, 1.0);
  return total;
}

}  // namespace detail

/// sum_{s in F_q} chi(a s^3 + s)  versus  sum_{s != 0} psi(s / a) chi(s - (27 a s)^{-1}).
inline IdentityCheck check_duke_iwaniec(const PrimeField& field, FieldElement a, const CharacterTable& psi) {
  detail::require_order_three_setting(field, psi);
  field.checked(a);
  if (a.is_zero()) fail(ErrorKind::kHypothesisViolated, "a must be nonzero");

  const Residue q = field.modulus();
  const Residue av = a.value();
  Complex lhs = 0.0;
  for (Residue s = 0; s < q; ++s) lhs += psi.chi(field.add(field.mul(av, field.pow(s, 3)), s));

  const Residue a_inv = field.inverse(av);
  const Residue inv_27a = field.inverse(field.mul(27 % q, av));
  Complex rhs = 0.0;
  for (Residue s = 1; s < q; ++s) {
    rhs += psi(field.mul(s, a_inv)) * psi.chi(field.sub(s, field.mul(inv_27a, field.inverse(s))));
  }
  return make_identity_check("duke_iwaniec",
                             {{"q", q}, {"a", av}, {"psi_power", static_cast<std::int64_t>(psi.index())}}, lhs, rhs);
}

/// How the k = 0 (trivial character) term enters the Gauss-sum expansion of sum_s chi(t s^n + b).
enum class TrivialTermConvention {
  kOmit,          // sum over k = 1..h-1 only
  kIncludeTrivial // additionally chi(b) * G(psi^0, chi) = -chi(b)
};

constexpr std::string_view to_string(TrivialTermConvention c) {
  return c == TrivialTermConvention::kOmit ? "omit-trivial-term" : "include-trivial-term";
}

/// chi(b) sum_{k} psi^{-k}(t) G(psi^k, chi) with psi of order h = gcd(n, q - 1).
inline Complex gauss_expansion_rhs(const PrimeField& field, FieldElement t, FieldElement b, std::uint64_t n,
                                   TrivialTermConvention convention) {
  const std::uint64_t h = std::gcd(n, static_cast<std::uint64_t>(field.group_order()));
  const CharacterTable psi = mult_character(field, h);
  Complex sum = 0.0;
  const std::uint64_t first = convention == TrivialTermConvention::kOmit ? 1 : 0;
  for (std::uint64_t k = first; k < h; ++k) {
    sum += psi.power(-static_cast<std::int64_t>(k))(t) * gauss_sum(psi.power(static_cast<std::int64_t>(k))).value;
  }
  return psi.chi(field.checked(b).value()) * sum;
}

/// Picks the convention that reproduces direct sums over F_7 for every t != 0, b in {0, 1},
/// n in 1..6. The result is frozen below as kGaussExpansionConvention; tests re-run this.
inline TrivialTermConvention calibrate_trivial_term_convention() {
  const PrimeField field = make_field(7);
  const AdditiveCharacter chi(7);
  std::vector<TrivialTermConvention> matching;
  for (auto convention : {TrivialTermConvention::kOmit, TrivialTermConvention::kIncludeTrivial}) {
    double worst = 0.0;
    for (Residue t = 1; t < 7; ++t) {
      for (Residue b = 0; b < 2; ++b) {
        for (std::uint64_t n = 1; n <= 6; ++n) {
          Complex direct = 0.0;
          for (Residue s = 0; s < 7; ++s) direct += chi(field.add(field.mul(t, field.pow(s, n)), b));
          const Complex expanded = gauss_expansion_rhs(field, field.element(t), field.element(b), n, convention);
          worst = std::max(worst, std::abs(direct - expanded));
        }
      }
    }
    if (worst < 1e-9) matching.push_back(convention);
  }
  if (matching.size() != 1) fail(ErrorKind::kHypothesisViolated, "the F_7 oracle does not single out a convention");
  return matching.front();
}

// Selected by calibrate_trivial_term_convention(): with n = 5, q = 7 the power map is a
// bijection, the direct sum is sum_s chi(s) = 0, and the included term would give -1.
inline constexpr TrivialTermConvention kGaussExpansionConvention = TrivialTermConvention::kOmit;

/// sum_{s in F_q} chi(t s^n + b) versus its Gauss-sum expansion.
inline IdentityCheck check_gauss_expansion(const PrimeField& field, FieldElement t, FieldElement b, std::uint64_t n) {
  field.checked(t);
  field.checked(b);
  if (t.is_zero()) fail(ErrorKind::kZeroCoefficient, "t must be nonzero");
  if (n == 0) fail(ErrorKind::kInvalidArgument, "n must be >= 1");

  const Residue q = field.modulus();
  const AdditiveCharacter chi(q);
  Complex lhs = 0.0;
  for (Residue s = 0; s < q; ++s) lhs += chi(field.add(field.mul(t.value(), field.pow(s, n)), b.value()));
  const Complex rhs = gauss_expansion_rhs(field, t, b, n, kGaussExpansionConvention);
  return make_identity_check(
      "gauss_expansion",
      {{"q", q}, {"t", t.value()}, {"b", b.value()}, {"n", static_cast<std::int64_t>(n)},
       {"h", static_cast<std::int64_t>(std::gcd(n, static_cast<std::uint64_t>(field.group_order())))}},
      lhs, rhs, std::string(to_string(kGaussExpansionConvention)));
}

/// (sum_s chi(t s^3))^l versus sum_r C(l,r) q^l psi^{-(l+r)}(t) psi-hat(-1)^{l-r} (psi^2)-hat(-1)^r.
inline IdentityCheck check_cubic_power_expansion(const PrimeField& field, FieldElement t, unsigned l,
                                                 const CharacterTable& psi) {
  detail::require_order_three_setting(field, psi);
  field.checked(t);
  if (t.is_zero()) fail(ErrorKind::kHypothesisViolated, "t must be nonzero");

  const Residue q = field.modulus();
  Complex base = 0.0;
  for (Residue s = 0; s < q; ++s) base += psi.chi(field.mul(t.value(), field.pow(s, 3)));
  const Complex lhs = std::pow(base, static_cast<int>(l));

  const FieldElement minus_one = field.element(-1);
  const Complex psi_hat = char_fourier(psi, minus_one);
  const Complex psi2_hat = char_fourier(psi.power(2), minus_one);
  const double q_pow_l = std::pow(static_cast<double>(q), l);
  Complex rhs = 0.0;
  for (unsigned r = 0; r <= l; ++r) {
    rhs += detail::binomial(l, r) * q_pow_l * psi.power(-static_cast<std::int64_t>(l + r))(t) *
           std::pow(psi_hat, static_cast<int>(l - r)) * std::pow(psi2_hat, static_cast<int>(r));
  }
  return make_identity_check(
      "cubic_power_expansion",
      {{"q", q}, {"t", t.value()}, {"l", l}, {"psi_power", static_cast<std::int64_t>(psi.index())}}, lhs, rhs);
}

inline constexpr std::size_t kMaxFoldDimension = 3;

/// prod_j sum_{s} chi(-s m_j + s^3 t)  versus
/// psi^{-l}(t) sum_{s in (F_q^*)^l} chi(sum_j s_j + c_j / s_j) prod_j psi(s_j),  c_j = 3^{-3} m_j^3 t^{-1}.
inline IdentityCheck check_completed_kloosterman_form(const PrimeField& field, FieldElement t,
                                                      std::span<const FieldElement> m, const CharacterTable& psi) {
  detail::require_order_three_setting(field, psi);
  field.checked(t);
  if (t.is_zero()) fail(ErrorKind::kHypothesisViolated, "t must be nonzero");
  if (m.empty()) fail(ErrorKind::kHypothesisViolated, "need at least one frequency");
  if (m.size() > kMaxFoldDimension) {
    fail(ErrorKind::kDimensionTooLarge, std::to_string(m.size()) + "-fold sums exceed the limit of 3");
  }
  for (auto mj : m) {
    if (field.checked(mj).is_zero()) fail(ErrorKind::kHypothesisViolated, "frequencies must be nonzero");
  }

  const Residue q = field.modulus();
  const Residue tv = t.value();
  Complex lhs = 1.0;
  for (auto mj : m) {
    Complex factor = 0.0;
    for (Residue s = 0; s < q; ++s) {
      factor += psi.chi(field.sub(field.mul(tv, field.pow(s, 3)), field.mul(s, mj.value())));
    }
    lhs *= factor;
  }

  const Residue rescale = field.inverse(27 % q);  // q = 1 mod 3 rules out q = 3
  std::vector<Residue> coefficients;
  ParameterList parameters{{"q", q}, {"t", tv}, {"l", static_cast<std::int64_t>(m.size())}};
  for (std::size_t i = 0; i < m.size(); ++i) {
    coefficients.push_back(field.mul(field.mul(rescale, field.pow(m[i].value(), 3)), field.inverse(tv)));
    parameters.emplace_back("m" + std::to_string(i + 1), m[i].value());
  }
  parameters.emplace_back("psi_power", static_cast<std::int64_t>(psi.index()));
  const Complex rhs = psi.power(-static_cast<std::int64_t>(m.size()))(t) *
                      detail::twisted_kloosterman_product_sum(psi, coefficients);
  return make_identity_check("completed_kloosterman_form", std::move(parameters), lhs, rhs,
                             "m_j^3 rescaled by 3^-3 on the right-hand side");
}

/// A_r = sum_{t != 0} chi(-t j) psi^{-(d+r)}(t) sum_{s in (F_q^*)^l} chi(sum s_i + m_i^3 t^{-1} s_i^{-1}) prod psi(s_i).
inline Complex evaluate_A_r(const PrimeField& field, FieldElement j, unsigned l, unsigned d, unsigned r,
                            std::span<const FieldElement> m, const CharacterTable& psi) {
  detail::require_order_three_setting(field, psi);
  field.checked(j);
  if (j.is_zero()) fail(ErrorKind::kHypothesisViolated, "j must be nonzero");
  if (l == 0) fail(ErrorKind::kHypothesisViolated, "l must be >= 1");
  if (l > kMaxFoldDimension) fail(ErrorKind::kDimensionTooLarge, std::to_string(l) + "-fold sums exceed the limit of 3");
  if (m.size() != l) fail(ErrorKind::kHypothesisViolated, "need exactly l frequencies");
  if (l > d || r > d - l) fail(ErrorKind::kHypothesisViolated, "need 0 <= r <= d - l");
  for (auto mi : m) {
    if (field.checked(mi).is_zero()) fail(ErrorKind::kHypothesisViolated, "frequencies must be nonzero");
  }

  const Residue q = field.modulus();
  const CharacterTable twist = psi.power(-static_cast<std::int64_t>(d + r));
  std::vector<Residue> cubes;
  for (auto mi : m) cubes.push_back(field.pow(mi.value(), 3));

  Complex total = 0.0;
  std::vector<Residue> coefficients(l);
  for (Residue t = 1; t < q; ++t) {
    const Residue t_inv = field.inverse(t);
    for (std::size_t i = 0; i < l; ++i) coefficients[i] = field.mul(cubes[i], t_inv);
    total += psi.chi(field.mul(q - t, j.value())) * twist(t) * detail::twisted_kloosterman_product_sum(psi, coefficients);
  }
  return total;
}

/// |A_r| against the envelope q^{(l+1)/2}.
inline BoundCheck compute_A_r(const PrimeField& field, FieldElement j, unsigned l, unsigned d, unsigned r,
                              std::span<const FieldElement> m, const CharacterTable& psi) {
  const Complex total = evaluate_A_r(field, j, l, d, r, m, psi);
  const Residue q = field.modulus();
  ParameterList parameters{{"q", q}, {"j", j.value()}, {"l", l}, {"d", d}, {"r", r}};
  for (std::size_t i = 0; i < m.size(); ++i) parameters.emplace_back("m" + std::to_string(i + 1), m[i].value());
  parameters.emplace_back("psi_power", static_cast<std::int64_t>(psi.index()));
  return make_bound_check("A_r", std::move(parameters), total, std::pow(static_cast<double>(q), (l + 1) / 2.0));
}

struct CohomologyCheck {
  BoundCheck full_sum;             // |sum_{(t,x1,x2)} chi(g)| / q^{3/2}
  std::vector<BoundCheck> r_sums;  // |R_k| / q for k = 1..h-1, present when m1 m2 = 0
};

namespace detail {

// line_sum(t, m) = sum_x chi(t x^n - m x)
class LineSums {
 public:
  LineSums(const PrimeField& field, std::uint64_t n) : field_(field), chi_(field.modulus()), powers_(field.modulus()) {
    for (Residue x = 0; x < field.modulus(); ++x) powers_[x] = field.pow(x, n);
  }

  Complex operator()(Residue t, Residue m) const {
    Complex acc = 0.0;
    for (Residue x = 0; x < field_.modulus(); ++x) acc += chi_(field_.sub(field_.mul(t, powers_[x]), field_.mul(m, x)));
    return acc;
  }

  const AdditiveCharacter& chi() const { return chi_; }

 private:
  PrimeField field_;
  AdditiveCharacter chi_;
  std::vector<Residue> powers_;
};

inline void require_cohomology_arguments(const PrimeField& field, std::uint64_t n, FieldElement m1, FieldElement m2,
                                         FieldElement j) {
  field.checked(m1);
  field.checked(m2);
  field.checked(j);
  if (n < 2) fail(ErrorKind::kInvalidArgument, "n must be >= 2");
  if (j.is_zero()) fail(ErrorKind::kZeroRadius, "j must be nonzero");
  if (m1.is_zero() && m2.is_zero()) fail(ErrorKind::kZeroFrequency, "m = (0, 0) is excluded");
}

}  // namespace detail

/// sum over (t, x1, x2) in F_q^3 of chi(t x1^n + t x2^n - m1 x1 - m2 x2 - j t).
inline Complex cohomology_full_sum(const PrimeField& field, std::uint64_t n, FieldElement m1, FieldElement m2,
                                   FieldElement j) {
  detail::require_cohomology_arguments(field, n, m1, m2, j);
  const Residue q = field.modulus();
  const detail::LineSums line_sum(field, n);
  Complex full = 0.0;
  for (Residue t = 0; t < q; ++t) {
    full += line_sum.chi()(field.mul(q - t, j.value())) * line_sum(t, m1.value()) * line_sum(t, m2.value());
  }
  return full;
}

/// R_k = sum_{t != 0, x} psi^{-k}(t) chi(t x^n - m x - j t), psi of order h = gcd(n, q - 1).
inline Complex cohomology_r_sum(const PrimeField& field, std::uint64_t n, FieldElement m, FieldElement j,
                                std::uint64_t k) {
  detail::require_cohomology_arguments(field, n, m, field.zero(), j);
  const Residue q = field.modulus();
  const std::uint64_t h = std::gcd(n, static_cast<std::uint64_t>(field.group_order()));
  const CharacterTable twist = mult_character(field, h).power(-static_cast<std::int64_t>(k % h));
  const detail::LineSums line_sum(field, n);
  Complex total = 0.0;
  for (Residue t = 1; t < q; ++t) total += twist(t) * line_sum.chi()(field.mul(q - t, j.value())) * line_sum(t, m.value());
  return total;
}

/// Full sum against q^{3/2}, plus R_k against q for k = 1..h-1 when one frequency vanishes.
inline CohomologyCheck check_cohomology_bound(const PrimeField& field, std::uint64_t n, FieldElement m1,
                                              FieldElement m2, FieldElement j) {
  const Residue q = field.modulus();
  const Complex full = cohomology_full_sum(field, n, m1, m2, j);
  const ParameterList base{{"q", q}, {"n", static_cast<std::int64_t>(n)}, {"m1", m1.value()}, {"m2", m2.value()},
                           {"j", j.value()}};
  CohomologyCheck out{make_bound_check("cohomology_full_sum", base, full, std::pow(static_cast<double>(q), 1.5)), {}};

  if (m1.is_zero() || m2.is_zero()) {
    const FieldElement m = m1.is_zero() ? m2 : m1;
    const std::uint64_t h = std::gcd(n, static_cast<std::uint64_t>(field.group_order()));
    for (std::uint64_t k = 1; k < h; ++k) {
      ParameterList parameters = base;
      parameters.emplace_back("k", static_cast<std::int64_t>(k));
      parameters.emplace_back("h", static_cast<std::int64_t>(h));
      out.r_sums.push_back(make_bound_check("R_k", std::move(parameters), cohomology_r_sum(field, n, m, j, k),
                                            static_cast<double>(q)));
    }
  }
  return out;
}

}  // namespace ffdist
