#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "ffdist/rng.hpp"
#include "ffdist/vectorspace.hpp"
#include "oracles.hpp"

namespace {

using ffdist::Complex;
using ffdist::ErrorKind;
using ffdist::make_field;
using ffdist::PointSet;
using ffdist::Vector;

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

std::vector<Complex> random_function(std::size_t size, std::uint64_t seed) {
  ffdist::Rng rng(seed, "test-function");
  std::vector<Complex> f(size);
  for (auto& v : f) v = {rng.uniform() - 0.5, rng.uniform() - 0.5};
  return f;
}

TEST(NormN, Examples) {
  const auto f7 = make_field(7);
  EXPECT_EQ(ffdist::norm_n(Vector(f7, {0, 0, 0}), 3).value(), 0U);
  EXPECT_EQ(ffdist::norm_n(Vector(f7, {3, 5}), 3).value(), 5U);
  EXPECT_EQ(ffdist::norm_n(Vector(make_field(5), {1, 2}), 2).value(), 0U);
}

TEST(NormN, TableMatchesPointwise) {
  const ffdist::GridShape shape(11, 3);
  const auto table = ffdist::norm_table(shape, 4);
  for (std::size_t i = 0; i < shape.size(); ++i) {
    ASSERT_EQ(table[i], ffdist::norm_n(Vector(11, shape.coords_of(i)), 4).value());
    ASSERT_EQ(table[i], oracle::norm(oracle::decode(i, 11, 3), 4, 11));
  }
}

TEST(NormN, DependsOnlyOnDifference) {
  const auto f = make_field(7);
  const ffdist::GridShape shape(7, 2);
  const auto table = ffdist::norm_table(shape, 3);
  for (std::size_t x = 0; x < shape.size(); ++x) {
    for (std::size_t y = 0; y < shape.size(); ++y) {
      const Vector diff = Vector(7, shape.coords_of(x)) - Vector(7, shape.coords_of(y));
      ASSERT_EQ(ffdist::norm_n(diff, 3).value(), table[shape.difference(x, y)]);
    }
  }
}

TEST(GridShape, RowMajorIndexing) {
  const ffdist::GridShape shape(5, 3);
  const std::vector<ffdist::Residue> x{1, 2, 3};
  EXPECT_EQ(shape.index_of(x), 1U * 25 + 2 * 5 + 3);
  EXPECT_EQ(shape.coords_of(38), x);
  EXPECT_EQ(kind_of([] { ffdist::GridShape(5, 5); }), ErrorKind::kDimensionTooLarge);
}

TEST(PointSet, ViewsAgree) {
  const auto f = make_field(7);
  const std::vector<Vector> points{Vector(f, {1, 2}), Vector(f, {1, 2}), Vector(f, {6, 0})};
  const auto set = PointSet::from_vectors(f, 2, points);
  EXPECT_EQ(set.size(), 2U);
  EXPECT_TRUE(set.consistent());
  EXPECT_TRUE(set.contains(Vector(f, {6, 0})));
  EXPECT_FALSE(set.contains(Vector(f, {0, 6})));
  EXPECT_EQ(PointSet::full(f, 2).size(), 49U);
}

TEST(FourierTransform, DeltaIsConstant) {
  const auto f = make_field(7);
  std::vector<Complex> delta(49, 0.0);
  delta[0] = 1.0;
  const auto spectrum = ffdist::fourier_transform(f, 2, delta);
  for (const auto& v : spectrum.values()) EXPECT_LT(std::abs(v - 1.0 / 49), 1e-12);
}

TEST(FourierTransform, ConstantIsDelta) {
  const auto f = make_field(5);
  const std::vector<Complex> one(125, 1.0);
  const auto spectrum = ffdist::fourier_transform(f, 3, one);
  EXPECT_LT(std::abs(spectrum[0] - 1.0), 1e-12);
  for (std::size_t m = 1; m < 125; ++m) EXPECT_LT(std::abs(spectrum[m]), 1e-12);
}

TEST(FourierTransform, TwoPointSetInF5Squared) {
  const auto f = make_field(5);
  const auto set = PointSet::from_vectors(f, 2, std::vector<Vector>{Vector(f, {0, 0}), Vector(f, {1, 0})});
  const auto spectrum = ffdist::fourier_transform(set);
  EXPECT_LT(std::abs(spectrum.at(Vector(f, {0, 0})) - 2.0 / 25), 1e-12);
  for (auto [m1, m2] : std::vector<std::pair<int, int>>{{1, 0}, {2, 3}, {4, 4}, {0, 2}}) {
    const Complex expected = (1.0 + oracle::chi(-m1, 5)) / 25.0;
    EXPECT_LT(std::abs(spectrum.at(Vector(f, {m1, m2})) - expected), 1e-12) << m1 << "," << m2;
  }
}

TEST(FourierTransform, MatchesDirectDefinition) {
  for (auto [q, d] : std::vector<std::pair<std::uint64_t, unsigned>>{{7, 2}, {5, 3}, {3, 4}}) {
    const auto f = make_field(q);
    const auto values = random_function(oracle::grid_size(q, d), q * 10 + d);
    const auto fast = ffdist::fourier_transform(f, d, values);
    const auto slow = oracle::direct_dft(values, q, d);
    for (std::size_t m = 0; m < slow.size(); ++m) ASSERT_LT(std::abs(fast[m] - slow[m]), 1e-9) << q << "^" << d;
  }
}

TEST(FourierTransform, RoundTrip) {
  for (std::uint64_t q : {2, 3, 5, 7, 13, 31}) {
    for (unsigned d = 1; d <= 3; ++d) {
      const auto f = make_field(q);
      const auto values = random_function(oracle::grid_size(q, d), q + d);
      const auto back = ffdist::inverse_fourier_transform(ffdist::fourier_transform(f, d, values));
      double worst = 0.0;
      for (std::size_t i = 0; i < values.size(); ++i) worst = std::max(worst, std::abs(back[i] - values[i]));
      EXPECT_LT(worst, 1e-9) << q << "^" << d;
    }
  }
}

TEST(FourierTransform, WrongSizeRejected) {
  const std::vector<Complex> values(10, 1.0);
  EXPECT_EQ(kind_of([&] { ffdist::fourier_transform(make_field(7), 2, values); }), ErrorKind::kDimensionMismatch);
}

TEST(Plancherel, Indicators) {
  for (std::uint64_t q : {7, 13}) {
    for (unsigned d : {2U, 3U}) {
      const auto f = make_field(q);
      for (std::uint64_t trial = 0; trial < 20; ++trial) {
        ffdist::Rng rng(trial, "plancherel-test", q * 10 + d);
        const auto size = rng.below(oracle::grid_size(q, d) + 1);
        const auto set = ffdist::sample_point_set(f, d, size, rng);
        const auto indicator = set.indicator();
        EXPECT_LT(ffdist::plancherel_residual(f, d, indicator), 1e-9);
      }
    }
  }
}

TEST(Plancherel, ZeroAndRandomComplex) {
  const auto f = make_field(7);
  const std::vector<Complex> zero(49, 0.0);
  EXPECT_EQ(ffdist::plancherel_residual(f, 2, zero), 0.0);
  const auto values = random_function(49, 99);
  EXPECT_LT(ffdist::plancherel_residual(f, 2, values), 1e-9);
}

TEST(SamplePointSet, SizesAndDeterminism) {
  const auto f = make_field(13);
  EXPECT_EQ(ffdist::sample_point_set(f, 2, 169, 4).size(), 169U);
  EXPECT_TRUE(ffdist::sample_point_set(f, 2, 0, 4).empty());
  const auto a = ffdist::sample_point_set(f, 2, 100, 1);
  const auto b = ffdist::sample_point_set(f, 2, 100, 1);
  const auto c = ffdist::sample_point_set(f, 2, 100, 2);
  EXPECT_EQ(a.size(), 100U);
  EXPECT_TRUE(a.consistent());
  EXPECT_TRUE(std::ranges::equal(a.indices(), b.indices()));
  EXPECT_FALSE(std::ranges::equal(a.indices(), c.indices()));
  EXPECT_EQ(kind_of([&] { ffdist::sample_point_set(f, 2, 170, 1); }), ErrorKind::kSizeTooLarge);
}

TEST(PointSetFile, RoundTrip) {
  const auto f = make_field(11);
  const auto set = ffdist::sample_point_set(f, 3, 40, 7);
  std::stringstream buffer;
  ffdist::write_point_set(buffer, set);
  const auto back = ffdist::read_point_set(buffer);
  EXPECT_EQ(back.field().modulus(), 11U);
  EXPECT_EQ(back.dimension(), 3U);
  EXPECT_TRUE(std::ranges::equal(back.indices(), set.indices()));
}

TEST(PointSetFile, AcceptsBlankLinesAndSpaces) {
  std::stringstream in("\nq=7 d=2\n1, 2\n\n3,4\n");
  const auto set = ffdist::read_point_set(in);
  EXPECT_EQ(set.size(), 2U);
  EXPECT_TRUE(set.contains(Vector(set.field(), {3, 4})));
}

TEST(PointSetFile, Errors) {
  auto parse = [](const std::string& text) {
    std::stringstream in(text);
    return kind_of([&] { ffdist::read_point_set(in); });
  };
  EXPECT_EQ(parse(""), ErrorKind::kParse);
  EXPECT_EQ(parse("q=7\n1,2\n"), ErrorKind::kParse);
  EXPECT_EQ(parse("q=7 d=2\n1,7\n"), ErrorKind::kParse);
  EXPECT_EQ(parse("q=7 d=2\n1,-1\n"), ErrorKind::kParse);
  EXPECT_EQ(parse("q=7 d=2\n1,2,3\n"), ErrorKind::kParse);
  EXPECT_EQ(parse("q=7 d=2\n1,x\n"), ErrorKind::kParse);
  EXPECT_EQ(parse("q=7 d=9\n"), ErrorKind::kParse);
  EXPECT_EQ(parse("q=8 d=2\n1,2\n"), ErrorKind::kCompositeModulus);
  EXPECT_EQ(kind_of([] { ffdist::load_point_set("/nonexistent/points.txt"); }), ErrorKind::kParse);
}

}  // namespace
