#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ffdist/characters.hpp"
#include "oracles.hpp"

namespace {

using ffdist::Complex;
using ffdist::ErrorKind;
using ffdist::make_field;

constexpr double kTol = 1e-10;

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const ffdist::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no ffdist::Error thrown";
  return ErrorKind::kInvalidArgument;
}

TEST(MultCharacter, OrderThreeOnF7) {
  const auto psi = ffdist::mult_character(make_field(7), 3);
  const Complex omega = std::polar(1.0, 2 * std::numbers::pi / 3);
  EXPECT_LT(std::abs(psi(3U) - omega), kTol);
  EXPECT_LT(std::abs(psi(1U) - 1.0), kTol);
  EXPECT_LT(std::abs(psi(6U) - 1.0), kTol);
  EXPECT_EQ(psi(0U), Complex(0.0));
  EXPECT_EQ(psi.order(), 3U);
}

TEST(MultCharacter, OrderOneIsTrivial) {
  const auto psi = ffdist::mult_character(make_field(7), 1);
  EXPECT_TRUE(psi.is_trivial());
  for (ffdist::Residue s = 1; s < 7; ++s) EXPECT_LT(std::abs(psi(s) - 1.0), kTol);
  EXPECT_EQ(psi(0U), Complex(0.0));
}

TEST(MultCharacter, OrderMustDivideGroupOrder) {
  EXPECT_EQ(kind_of([] { ffdist::mult_character(make_field(7), 4); }), ErrorKind::kOrderDoesNotDivide);
  EXPECT_EQ(kind_of([] { ffdist::mult_character(make_field(5), 3); }), ErrorKind::kOrderDoesNotDivide);
}

TEST(MultCharacter, PowerSelectsConjugate) {
  const auto f = make_field(13);
  const auto psi = ffdist::mult_character(f, 3, 1);
  const auto psi2 = ffdist::mult_character(f, 3, 2);
  for (ffdist::Residue s = 1; s < 13; ++s) {
    EXPECT_LT(std::abs(psi2(s) - std::conj(psi(s))), kTol);
    EXPECT_LT(std::abs(psi.power(2)(s) - psi2(s)), kTol);
  }
  EXPECT_EQ(ffdist::characters_of_order(f, 3).size(), 2U);
}

TEST(Characters, HomomorphismProperties) {
  for (auto q : {5U, 7U, 11U, 13U, 31U}) {
    const auto f = make_field(q);
    const ffdist::AdditiveCharacter chi(q);
    for (ffdist::Residue a = 0; a < q; ++a) {
      for (ffdist::Residue b = 0; b < q; ++b) {
        ASSERT_LT(std::abs(chi(f.add(a, b)) - chi(a) * chi(b)), kTol);
      }
      ASSERT_NEAR(std::abs(chi(a)), 1.0, kTol);
      ASSERT_LT(std::abs(chi(a) - oracle::chi(a, q)), kTol);
    }
    for (std::uint64_t h = 1; h < q; ++h) {
      if ((q - 1) % h != 0) continue;
      for (const auto& psi : ffdist::characters_of_order(f, h)) {
        ASSERT_EQ(psi.order(), h);
        for (ffdist::Residue a = 1; a < q; ++a) {
          for (ffdist::Residue b = 1; b < q; ++b) ASSERT_LT(std::abs(psi(f.mul(a, b)) - psi(a) * psi(b)), kTol);
          ASSERT_LT(std::abs(psi.power(static_cast<std::int64_t>(h))(a) - 1.0), kTol);
        }
      }
    }
  }
}

TEST(Characters, Orthogonality) {
  for (auto q : {7U, 13U, 31U}) {
    const auto f = make_field(q);
    for (std::uint64_t h = 2; h < q; ++h) {
      if ((q - 1) % h != 0) continue;
      Complex sum = 0.0;
      const auto psi = ffdist::mult_character(f, h);
      for (ffdist::Residue s = 1; s < q; ++s) sum += psi(s);
      EXPECT_LT(std::abs(sum), kTol);
    }
    const ffdist::AdditiveCharacter chi(q);
    for (ffdist::Residue a = 0; a < q; ++a) {
      Complex sum = 0.0;
      for (ffdist::Residue t = 0; t < q; ++t) sum += chi(f.mul(a, t));
      EXPECT_LT(std::abs(sum - (a == 0 ? static_cast<double>(q) : 0.0)), kTol);
    }
  }
}

TEST(CharFourier, NontrivialAtZeroVanishes) {
  const auto f = make_field(7);
  EXPECT_LT(std::abs(ffdist::char_fourier(ffdist::mult_character(f, 3), f.zero())), kTol);
}

TEST(CharFourier, OrderThreeOnF7HasGaussModulus) {
  const auto f = make_field(7);
  EXPECT_NEAR(std::abs(ffdist::char_fourier(ffdist::mult_character(f, 3), f.one())), 1 / std::sqrt(7.0), kTol);
}

TEST(CharFourier, TrivialCharacter) {
  const auto f = make_field(7);
  const auto psi = ffdist::mult_character(f, 1);
  for (ffdist::Residue v = 1; v < 7; ++v) {
    EXPECT_LT(std::abs(ffdist::char_fourier(psi, f.element(v)) - Complex(-1.0 / 7)), kTol);
  }
}

TEST(CharFourier, MagnitudeIsInverseRootQ) {
  for (auto q : {5U, 7U, 11U, 13U, 19U, 31U, 37U}) {
    const auto f = make_field(q);
    for (std::uint64_t h = 2; h < q; ++h) {
      if ((q - 1) % h != 0) continue;
      for (const auto& psi : ffdist::characters_of_order(f, h)) {
        for (ffdist::Residue v = 1; v < q; ++v) {
          ASSERT_NEAR(std::abs(ffdist::char_fourier(psi, f.element(v))), 1 / std::sqrt(static_cast<double>(q)), kTol);
        }
      }
    }
  }
}

TEST(GaussSum, OrderThreeOnF7) {
  const auto g = ffdist::gauss_sum(ffdist::mult_character(make_field(7), 3));
  EXPECT_FALSE(g.trivial_character);
  EXPECT_NEAR(std::abs(g.value), 2.6457513110645906, kTol);
}

TEST(GaussSum, QuadraticOnF13IsPlusRoot13) {
  const auto g = ffdist::gauss_sum(ffdist::mult_character(make_field(13), 2));
  EXPECT_NEAR(g.value.real(), std::sqrt(13.0), kTol);
  EXPECT_NEAR(g.value.imag(), 0.0, kTol);
}

TEST(GaussSum, EqualsScaledFourierAtMinusOne) {
  for (auto q : {7U, 13U, 31U}) {
    const auto f = make_field(q);
    for (std::uint64_t h = 1; h < q; ++h) {
      if ((q - 1) % h != 0) continue;
      for (const auto& psi : ffdist::characters_of_order(f, h)) {
        const Complex scaled = static_cast<double>(q) * ffdist::char_fourier(psi, f.element(-1));
        EXPECT_LT(std::abs(ffdist::gauss_sum(psi).value - scaled), 1e-12 * q);
      }
    }
  }
}

TEST(GaussSum, TrivialCharacterFlagged) {
  const auto g = ffdist::gauss_sum(ffdist::mult_character(make_field(7), 1));
  EXPECT_TRUE(g.trivial_character);
  EXPECT_LT(std::abs(g.value - Complex(-1.0)), kTol);
}

}  // namespace
